#ifndef KVN_FIELDS_HPP
#define KVN_FIELDS_HPP

#include <array>
#include <string>
#include <vector>

#include "kvn/geometry.hpp"

namespace kvn {

enum class FieldKind {
  zero,
  constant,
  linear,
  rotation,
  logistic1d,
  double_well_gradient,
  harmonic_hamiltonian,
  custom_polynomial,
};

const char* to_string(FieldKind kind);
FieldKind field_kind_from_string(const std::string& name);

/// c * x0^p0 * x1^p1 * x2^p2
struct Monomial {
  double coeff = 0.0;
  std::array<int, 3> powers{0, 0, 0};
  bool operator==(const Monomial&) const = default;
};
using Polynomial = std::vector<Monomial>;

double evaluate(const Polynomial& p, const Vec& x);
/// Exact partial derivative with respect to x_axis.
Polynomial differentiate(const Polynomial& p, int axis);

using Jacobian = std::array<std::array<double, 3>, 3>;

/// Autonomous vector field F: R^d -> R^d with analytic divergence.
///
/// Built-in kinds and their parameters:
///   zero                   -
///   constant               c (d values)
///   linear                 A row-major (d*d values), F = A x
///   rotation               omega (optional, default 1), F = omega (-y, x), d = 2
///   logistic1d             r (optional, default 1), F = r x (1 - x), d = 1
///   double_well_gradient   F = -grad V, V = (x0^2 - 1)^2 / 4 + sum_{i>0} x_i^2 / 2
///   harmonic_hamiltonian   omega (optional, default 1), H = (p^2 + omega^2 q^2) / 2, d = 2
///   custom_polynomial      one polynomial per component plus the analytic divergence
class VectorField {
 public:
  static VectorField zero(int dim);
  static VectorField constant(const std::vector<double>& c);
  static VectorField linear(const std::vector<double>& a, int dim);
  static VectorField rotation(double omega = 1.0);
  static VectorField logistic1d(double rate = 1.0);
  static VectorField double_well_gradient(int dim);
  static VectorField harmonic_hamiltonian(double omega = 1.0);
  static VectorField custom_polynomial(std::vector<Polynomial> components, Polynomial divergence);

  /// Dispatches on kind; params as documented above.
  static VectorField make(FieldKind kind, int dim, const std::vector<double>& params);

  FieldKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<Polynomial>& components() const { return components_; }
  const Polynomial& divergence_polynomial() const { return divergence_; }

  /// Raw evaluation without domain checks.
  Vec value(const Vec& x) const;
  double divergence(const Vec& x) const;
  Jacobian jacobian(const Vec& x) const;

  /// True for the built-ins whose divergence vanishes identically.
  bool divergence_free() const;

  bool operator==(const VectorField&) const = default;

 private:
  FieldKind kind_ = FieldKind::zero;
  int dim_ = 1;
  std::vector<double> params_;
  std::vector<Polynomial> components_;
  Polynomial divergence_;
};

class FieldError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// F(x), rejecting x farther than 1e-12 * diam from the closed domain.
Vec evaluate(const VectorField& field, const Domain& domain, const Vec& x);
double divergence(const VectorField& field, const Domain& domain, const Vec& x);

/// Upper bound on the Lipschitz constant of F over the domain.
double lipschitz_estimate(const VectorField& field, const Domain& domain);

/// Sup norm of |F| sampled on the domain (same sample set as the Lipschitz estimate).
double sup_norm_estimate(const VectorField& field, const Domain& domain);

enum class FaceClass { minus, zero, plus };
const char* to_string(FaceClass c);

struct BoundaryClassification {
  std::vector<std::size_t> gamma_minus;
  std::vector<std::size_t> gamma_plus;
  std::vector<std::size_t> gamma_zero;
  /// F(centroid) . nu per boundary face, in grid face order.
  std::vector<double> normal_flux;
  std::vector<FaceClass> face_class;
  double max_outflow = 0.0;
  double tol = 1e-10;
};

BoundaryClassification classify_boundary(const VectorField& field, const Grid& grid, double tol = 1e-10);

struct FaceViolation {
  std::size_t face = 0;
  double normal_flux = 0.0;
};

struct NoOutflowVerdict {
  bool ok = true;
  std::vector<FaceViolation> violations;
};

NoOutflowVerdict check_no_outflow(const BoundaryClassification& classification);

}  // namespace kvn

#endif  // KVN_FIELDS_HPP
