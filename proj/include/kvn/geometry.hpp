#ifndef KVN_GEOMETRY_HPP
#define KVN_GEOMETRY_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace kvn {

/// Point or vector in R^d, d <= 3. Unused trailing components are zero.
using Vec = std::array<double, 3>;

inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double norm2(const Vec& a);

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

enum class DomainKind { interval, rectangle, disk };

const char* to_string(DomainKind kind);

/// Bounded open domain: an interval, an axis-aligned box (d = 2, 3) or a disk (d = 2).
class Domain {
 public:
  static Domain interval(double lo, double hi);
  static Domain rectangle(std::span<const Interval> bounds);
  static Domain disk(const Vec& center, double radius);

  DomainKind kind() const { return kind_; }
  int dim() const { return dim_; }

  /// Per-axis bounding box; for a disk this is [c - r, c + r] per axis.
  std::span<const Interval> bounds() const { return {bounds_.data(), static_cast<std::size_t>(dim_)}; }
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }

  /// True iff x lies in the open domain.
  bool contains(const Vec& x) const;
  /// Euclidean distance from x to the closed domain (0 inside).
  double distance_outside(const Vec& x) const;
  /// Nearest point of the closed domain.
  Vec project(const Vec& x) const;

  double diameter() const;
  double volume() const;

  bool operator==(const Domain&) const = default;

 private:
  DomainKind kind_ = DomainKind::interval;
  int dim_ = 1;
  std::array<Interval, 3> bounds_{};
  Vec center_{};
  double radius_ = 0.0;
};

struct BoundaryFace {
  std::size_t cell = 0;
  /// Face centroid. For the disk this is the projection of the staircase face
  /// centre onto the circle, where the normal is evaluated.
  Vec centroid{};
  Vec normal{};
  double area = 0.0;
  int axis = 0;
  int side = 0;  // -1 low side of the cell, +1 high side
};

/// Face shared by two active cells; the normal is +e_axis pointing from `lower` to `upper`.
struct InteriorFace {
  std::size_t lower = 0;
  std::size_t upper = 0;
  int axis = 0;
  Vec centroid{};
  double area = 0.0;
};

/// Cell-centred uniform grid over the bounding box of a domain, masked to the
/// cells whose centres lie inside the domain.
class Grid {
 public:
  static constexpr std::int64_t kNoNeighbor = -1;

  const Domain& domain() const { return domain_; }
  int dim() const { return domain_.dim(); }
  std::size_t size() const { return centers_.size(); }

  const std::array<int, 3>& resolution() const { return resolution_; }
  const Vec& spacing() const { return spacing_; }
  /// Largest per-axis spacing.
  double mesh_size() const;

  std::span<const Vec> centers() const { return centers_; }
  std::span<const double> volumes() const { return volumes_; }
  std::span<const InteriorFace> interior_faces() const { return interior_faces_; }
  std::span<const BoundaryFace> boundary_faces() const { return boundary_faces_; }

  /// Active neighbour of `cell` across the face (axis, side), side in {-1, +1}.
  std::optional<std::size_t> neighbor(std::size_t cell, int axis, int side) const;
  /// True when the cell has no boundary faces.
  bool is_interior(std::size_t cell) const;

  /// Per bounding-box cell: index of the active cell or kNoNeighbor.
  std::span<const std::int64_t> box_to_cell() const { return box_to_cell_; }

  double total_volume() const;
  double total_boundary_area() const;

 private:
  friend Grid build_grid(const Domain& domain, std::span<const int> resolution);

  Domain domain_;
  std::array<int, 3> resolution_{1, 1, 1};
  Vec spacing_{};
  std::vector<Vec> centers_;
  std::vector<double> volumes_;
  std::vector<std::array<std::int64_t, 6>> neighbors_;
  std::vector<std::int64_t> box_to_cell_;
  std::vector<InteriorFace> interior_faces_;
  std::vector<BoundaryFace> boundary_faces_;
};

/// Builds the grid. `resolution` has one entry per axis (a single entry is
/// broadcast to all axes); every entry must be >= 3.
Grid build_grid(const Domain& domain, std::span<const int> resolution);

inline bool contains(const Domain& domain, const Vec& x) { return domain.contains(x); }

}  // namespace kvn

#endif  // KVN_GEOMETRY_HPP
