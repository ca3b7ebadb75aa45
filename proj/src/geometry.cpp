#include "kvn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kvn {

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

const char* to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::interval: return "interval";
    case DomainKind::rectangle: return "rectangle";
    case DomainKind::disk: return "disk";
  }
  return "unknown";
}

namespace {

void check_interval(const Interval& b) {
  if (!(std::isfinite(b.lo) && std::isfinite(b.hi)) || !(b.hi > b.lo)) {
    throw GeometryError("domain extent must be finite and strictly positive, got [" + std::to_string(b.lo) +
                        ", " + std::to_string(b.hi) + "]");
  }
}

}  // namespace

Domain Domain::interval(double lo, double hi) {
  Domain d;
  d.kind_ = DomainKind::interval;
  d.dim_ = 1;
  d.bounds_[0] = {lo, hi};
  check_interval(d.bounds_[0]);
  d.center_ = {0.5 * (lo + hi), 0.0, 0.0};
  return d;
}

Domain Domain::rectangle(std::span<const Interval> bounds) {
  if (bounds.size() != 2 && bounds.size() != 3) {
    throw GeometryError("rectangle domain needs 2 or 3 axes, got " + std::to_string(bounds.size()));
  }
  Domain d;
  d.kind_ = DomainKind::rectangle;
  d.dim_ = static_cast<int>(bounds.size());
  for (std::size_t a = 0; a < bounds.size(); ++a) {
    check_interval(bounds[a]);
    d.bounds_[a] = bounds[a];
    d.center_[a] = 0.5 * (bounds[a].lo + bounds[a].hi);
  }
  return d;
}

Domain Domain::disk(const Vec& center, double radius) {
  if (!(std::isfinite(radius) && radius > 0.0)) {
    throw GeometryError("disk radius must be strictly positive, got " + std::to_string(radius));
  }
  Domain d;
  d.kind_ = DomainKind::disk;
  d.dim_ = 2;
  d.center_ = {center[0], center[1], 0.0};
  d.radius_ = radius;
  for (int a = 0; a < 2; ++a) d.bounds_[a] = {center[a] - radius, center[a] + radius};
  return d;
}

bool Domain::contains(const Vec& x) const {
  if (kind_ == DomainKind::disk) {
    const double dx = x[0] - center_[0];
    const double dy = x[1] - center_[1];
    return dx * dx + dy * dy < radius_ * radius_;
  }
  for (int a = 0; a < dim_; ++a) {
    if (!(x[a] > bounds_[a].lo && x[a] < bounds_[a].hi)) return false;
  }
  return true;
}

double Domain::distance_outside(const Vec& x) const {
  if (kind_ == DomainKind::disk) {
    const double r = std::hypot(x[0] - center_[0], x[1] - center_[1]);
    return std::max(r - radius_, 0.0);
  }
  double s = 0.0;
  for (int a = 0; a < dim_; ++a) {
    const double e = std::max({bounds_[a].lo - x[a], 0.0, x[a] - bounds_[a].hi});
    s += e * e;
  }
  return std::sqrt(s);
}

Vec Domain::project(const Vec& x) const {
  Vec p = x;
  if (kind_ == DomainKind::disk) {
    const double dx = x[0] - center_[0];
    const double dy = x[1] - center_[1];
    const double r = std::hypot(dx, dy);
    if (r > radius_) {
      p[0] = center_[0] + dx * (radius_ / r);
      p[1] = center_[1] + dy * (radius_ / r);
    }
    return p;
  }
  for (int a = 0; a < dim_; ++a) p[a] = std::clamp(x[a], bounds_[a].lo, bounds_[a].hi);
  return p;
}

double Domain::diameter() const {
  if (kind_ == DomainKind::disk) return 2.0 * radius_;
  double s = 0.0;
  for (int a = 0; a < dim_; ++a) s += bounds_[a].length() * bounds_[a].length();
  return std::sqrt(s);
}

double Domain::volume() const {
  if (kind_ == DomainKind::disk) return M_PI * radius_ * radius_;
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= bounds_[a].length();
  return v;
}

double Grid::mesh_size() const {
  double h = 0.0;
  for (int a = 0; a < dim(); ++a) h = std::max(h, spacing_[a]);
  return h;
}

std::optional<std::size_t> Grid::neighbor(std::size_t cell, int axis, int side) const {
  const std::int64_t nb = neighbors_[cell][2 * axis + (side > 0 ? 1 : 0)];
  if (nb == kNoNeighbor) return std::nullopt;
  return static_cast<std::size_t>(nb);
}

bool Grid::is_interior(std::size_t cell) const {
  for (int a = 0; a < dim(); ++a) {
    if (neighbors_[cell][2 * a] == kNoNeighbor || neighbors_[cell][2 * a + 1] == kNoNeighbor) return false;
  }
  return true;
}

double Grid::total_volume() const {
  double v = 0.0;
  for (double w : volumes_) v += w;
  return v;
}

double Grid::total_boundary_area() const {
  double s = 0.0;
  for (const auto& f : boundary_faces_) s += f.area;
  return s;
}

Grid build_grid(const Domain& domain, std::span<const int> resolution) {
  const int d = domain.dim();
  if (resolution.size() != 1 && resolution.size() != static_cast<std::size_t>(d)) {
    throw GeometryError("resolution needs 1 or " + std::to_string(d) + " entries, got " +
                        std::to_string(resolution.size()));
  }
  Grid g;
  g.domain_ = domain;
  for (int a = 0; a < d; ++a) {
    const int n = resolution.size() == 1 ? resolution[0] : resolution[a];
    if (n < 3) throw GeometryError("resolution must be >= 3 per axis, got " + std::to_string(n));
    g.resolution_[a] = n;
    g.spacing_[a] = domain.bounds()[a].length() / n;
  }

  const auto& n = g.resolution_;
  const std::size_t box_cells = static_cast<std::size_t>(n[0]) * n[1] * n[2];
  g.box_to_cell_.assign(box_cells, Grid::kNoNeighbor);

  double cell_volume = 1.0;
  for (int a = 0; a < d; ++a) cell_volume *= g.spacing_[a];

  auto box_index = [&](int i, int j, int k) { return static_cast<std::size_t>(i) + n[0] * (j + static_cast<std::size_t>(n[1]) * k); };

  std::vector<std::array<int, 3>> ijk;
  for (int k = 0; k < n[2]; ++k) {
    for (int j = 0; j < n[1]; ++j) {
      for (int i = 0; i < n[0]; ++i) {
        const std::array<int, 3> idx{i, j, k};
        Vec c{};
        for (int a = 0; a < d; ++a) c[a] = domain.bounds()[a].lo + (idx[a] + 0.5) * g.spacing_[a];
        if (!domain.contains(c)) continue;
        g.box_to_cell_[box_index(i, j, k)] = static_cast<std::int64_t>(g.centers_.size());
        g.centers_.push_back(c);
        g.volumes_.push_back(cell_volume);
        ijk.push_back(idx);
      }
    }
  }

  double other_area[3];
  for (int a = 0; a < d; ++a) {
    other_area[a] = 1.0;
    for (int b = 0; b < d; ++b)
      if (b != a) other_area[a] *= g.spacing_[b];
  }

  g.neighbors_.assign(g.centers_.size(), {Grid::kNoNeighbor, Grid::kNoNeighbor, Grid::kNoNeighbor,
                                          Grid::kNoNeighbor, Grid::kNoNeighbor, Grid::kNoNeighbor});
  for (std::size_t c = 0; c < g.centers_.size(); ++c) {
    for (int a = 0; a < d; ++a) {
      for (int side : {-1, 1}) {
        auto idx = ijk[c];
        idx[a] += side;
        std::int64_t nb = Grid::kNoNeighbor;
        if (idx[a] >= 0 && idx[a] < n[a]) nb = g.box_to_cell_[box_index(idx[0], idx[1], idx[2])];
        g.neighbors_[c][2 * a + (side > 0 ? 1 : 0)] = nb;

        Vec face = g.centers_[c];
        face[a] += 0.5 * side * g.spacing_[a];
        if (nb != Grid::kNoNeighbor) {
          if (side > 0) g.interior_faces_.push_back({c, static_cast<std::size_t>(nb), a, face, other_area[a]});
          continue;
        }

        BoundaryFace bf;
        bf.cell = c;
        bf.axis = a;
        bf.side = side;
        bf.area = other_area[a];
        if (domain.kind() == DomainKind::disk) {
          // Exact circle normal at the radial projection of the staircase face.
          Vec r{face[0] - domain.center()[0], face[1] - domain.center()[1], 0.0};
          double len = norm2(r);
          if (len == 0.0) {
            r = {0.0, 0.0, 0.0};
            r[a] = side;
            len = 1.0;
          }
          bf.normal = {r[0] / len, r[1] / len, 0.0};
          bf.centroid = {domain.center()[0] + domain.radius() * bf.normal[0],
                         domain.center()[1] + domain.radius() * bf.normal[1], 0.0};
        } else {
          bf.normal = {0.0, 0.0, 0.0};
          bf.normal[a] = side;
          bf.centroid = face;
          bf.centroid[a] = side > 0 ? domain.bounds()[a].hi : domain.bounds()[a].lo;
        }
        g.boundary_faces_.push_back(bf);
      }
    }
  }
  return g;
}

}  // namespace kvn
