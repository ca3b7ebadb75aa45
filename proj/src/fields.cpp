#include "kvn/fields.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace kvn {

const char* to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::zero: return "zero";
    case FieldKind::constant: return "constant";
    case FieldKind::linear: return "linear";
    case FieldKind::rotation: return "rotation";
    case FieldKind::logistic1d: return "logistic1d";
    case FieldKind::double_well_gradient: return "double_well_gradient";
    case FieldKind::harmonic_hamiltonian: return "harmonic_hamiltonian";
    case FieldKind::custom_polynomial: return "custom_polynomial";
  }
  return "unknown";
}

FieldKind field_kind_from_string(const std::string& name) {
  for (auto k : {FieldKind::zero, FieldKind::constant, FieldKind::linear, FieldKind::rotation, FieldKind::logistic1d,
                 FieldKind::double_well_gradient, FieldKind::harmonic_hamiltonian, FieldKind::custom_polynomial}) {
    if (name == to_string(k)) return k;
  }
  throw FieldError("unknown field kind '" + name + "'");
}

double evaluate(const Polynomial& p, const Vec& x) {
  double s = 0.0;
  for (const auto& m : p) {
    double t = m.coeff;
    for (int a = 0; a < 3; ++a) {
      for (int e = 0; e < m.powers[a]; ++e) t *= x[a];
    }
    s += t;
  }
  return s;
}

Polynomial differentiate(const Polynomial& p, int axis) {
  Polynomial out;
  for (const auto& m : p) {
    if (m.powers[axis] == 0) continue;
    Monomial d = m;
    d.coeff *= m.powers[axis];
    d.powers[axis] -= 1;
    out.push_back(d);
  }
  return out;
}

VectorField VectorField::zero(int dim) {
  if (dim < 1 || dim > 3) throw FieldError("field dimension must be in 1..3");
  VectorField f;
  f.kind_ = FieldKind::zero;
  f.dim_ = dim;
  return f;
}

VectorField VectorField::constant(const std::vector<double>& c) {
  if (c.empty() || c.size() > 3) throw FieldError("constant field needs 1..3 components");
  VectorField f;
  f.kind_ = FieldKind::constant;
  f.dim_ = static_cast<int>(c.size());
  f.params_ = c;
  return f;
}

VectorField VectorField::linear(const std::vector<double>& a, int dim) {
  if (dim < 1 || dim > 3 || a.size() != static_cast<std::size_t>(dim * dim)) {
    throw FieldError("linear field needs d*d coefficients (row-major)");
  }
  VectorField f;
  f.kind_ = FieldKind::linear;
  f.dim_ = dim;
  f.params_ = a;
  return f;
}

VectorField VectorField::rotation(double omega) {
  VectorField f;
  f.kind_ = FieldKind::rotation;
  f.dim_ = 2;
  f.params_ = {omega};
  return f;
}

VectorField VectorField::logistic1d(double rate) {
  VectorField f;
  f.kind_ = FieldKind::logistic1d;
  f.dim_ = 1;
  f.params_ = {rate};
  return f;
}

VectorField VectorField::double_well_gradient(int dim) {
  if (dim < 1 || dim > 3) throw FieldError("field dimension must be in 1..3");
  VectorField f;
  f.kind_ = FieldKind::double_well_gradient;
  f.dim_ = dim;
  return f;
}

VectorField VectorField::harmonic_hamiltonian(double omega) {
  VectorField f;
  f.kind_ = FieldKind::harmonic_hamiltonian;
  f.dim_ = 2;
  f.params_ = {omega};
  return f;
}

VectorField VectorField::custom_polynomial(std::vector<Polynomial> components, Polynomial divergence) {
  if (components.empty() || components.size() > 3) throw FieldError("custom field needs 1..3 components");
  VectorField f;
  f.kind_ = FieldKind::custom_polynomial;
  f.dim_ = static_cast<int>(components.size());
  for (const auto& p : components) {
    for (const auto& m : p) {
      for (int a = 0; a < 3; ++a) {
        if (m.powers[a] < 0 || (a >= f.dim_ && m.powers[a] != 0)) {
          throw FieldError("custom polynomial has an invalid exponent");
        }
      }
    }
  }
  f.components_ = std::move(components);
  f.divergence_ = std::move(divergence);
  return f;
}

VectorField VectorField::make(FieldKind kind, int dim, const std::vector<double>& params) {
  auto scalar = [&](double fallback) {
    if (params.size() > 1) throw FieldError(std::string(to_string(kind)) + " takes at most one parameter");
    return params.empty() ? fallback : params[0];
  };
  auto need_dim = [&](int want) {
    if (dim != want) {
      throw FieldError(std::string(to_string(kind)) + " requires dimension " + std::to_string(want) + ", got " +
                       std::to_string(dim));
    }
  };
  switch (kind) {
    case FieldKind::zero: return zero(dim);
    case FieldKind::constant:
      if (params.size() != static_cast<std::size_t>(dim)) throw FieldError("constant field needs d components");
      return constant(params);
    case FieldKind::linear: return linear(params, dim);
    case FieldKind::rotation: need_dim(2); return rotation(scalar(1.0));
    case FieldKind::logistic1d: need_dim(1); return logistic1d(scalar(1.0));
    case FieldKind::double_well_gradient:
      if (!params.empty()) throw FieldError("double_well_gradient takes no parameters");
      return double_well_gradient(dim);
    case FieldKind::harmonic_hamiltonian: need_dim(2); return harmonic_hamiltonian(scalar(1.0));
    case FieldKind::custom_polynomial: throw FieldError("custom_polynomial must be built from polynomials");
  }
  throw FieldError("unknown field kind");
}

Vec VectorField::value(const Vec& x) const {
  Vec v{0.0, 0.0, 0.0};
  switch (kind_) {
    case FieldKind::zero: break;
    case FieldKind::constant:
      for (int a = 0; a < dim_; ++a) v[a] = params_[a];
      break;
    case FieldKind::linear:
      for (int i = 0; i < dim_; ++i) {
        for (int j = 0; j < dim_; ++j) v[i] += params_[i * dim_ + j] * x[j];
      }
      break;
    case FieldKind::rotation:
      v[0] = -params_[0] * x[1];
      v[1] = params_[0] * x[0];
      break;
    case FieldKind::logistic1d: v[0] = params_[0] * x[0] * (1.0 - x[0]); break;
    case FieldKind::double_well_gradient:
      v[0] = x[0] - x[0] * x[0] * x[0];
      for (int a = 1; a < dim_; ++a) v[a] = -x[a];
      break;
    case FieldKind::harmonic_hamiltonian:
      v[0] = x[1];
      v[1] = -params_[0] * params_[0] * x[0];
      break;
    case FieldKind::custom_polynomial:
      for (int a = 0; a < dim_; ++a) v[a] = kvn::evaluate(components_[a], x);
      break;
  }
  return v;
}

double VectorField::divergence(const Vec& x) const {
  switch (kind_) {
    case FieldKind::zero:
    case FieldKind::constant:
    case FieldKind::rotation:
    case FieldKind::harmonic_hamiltonian: return 0.0;
    case FieldKind::linear: {
      double tr = 0.0;
      for (int i = 0; i < dim_; ++i) tr += params_[i * dim_ + i];
      return tr;
    }
    case FieldKind::logistic1d: return params_[0] * (1.0 - 2.0 * x[0]);
    case FieldKind::double_well_gradient: return 1.0 - 3.0 * x[0] * x[0] - (dim_ - 1);
    case FieldKind::custom_polynomial: return kvn::evaluate(divergence_, x);
  }
  return 0.0;
}

Jacobian VectorField::jacobian(const Vec& x) const {
  Jacobian j{};
  switch (kind_) {
    case FieldKind::zero:
    case FieldKind::constant: break;
    case FieldKind::linear:
      for (int r = 0; r < dim_; ++r) {
        for (int c = 0; c < dim_; ++c) j[r][c] = params_[r * dim_ + c];
      }
      break;
    case FieldKind::rotation:
      j[0][1] = -params_[0];
      j[1][0] = params_[0];
      break;
    case FieldKind::logistic1d: j[0][0] = params_[0] * (1.0 - 2.0 * x[0]); break;
    case FieldKind::double_well_gradient:
      j[0][0] = 1.0 - 3.0 * x[0] * x[0];
      for (int a = 1; a < dim_; ++a) j[a][a] = -1.0;
      break;
    case FieldKind::harmonic_hamiltonian:
      j[0][1] = 1.0;
      j[1][0] = -params_[0] * params_[0];
      break;
    case FieldKind::custom_polynomial:
      for (int r = 0; r < dim_; ++r) {
        for (int c = 0; c < dim_; ++c) j[r][c] = kvn::evaluate(differentiate(components_[r], c), x);
      }
      break;
  }
  return j;
}

bool VectorField::divergence_free() const {
  return kind_ == FieldKind::zero || kind_ == FieldKind::constant || kind_ == FieldKind::rotation ||
         kind_ == FieldKind::harmonic_hamiltonian;
}

namespace {

void check_in_closure(const VectorField& field, const Domain& domain, const Vec& x) {
  if (field.dim() != domain.dim()) {
    throw FieldError("field dimension " + std::to_string(field.dim()) + " does not match domain dimension " +
                     std::to_string(domain.dim()));
  }
  for (int a = 0; a < domain.dim(); ++a) {
    if (!std::isfinite(x[a])) throw FieldError("evaluation point is not finite");
  }
  if (domain.distance_outside(x) > 1e-12 * domain.diameter()) {
    throw FieldError("evaluation point lies outside the closed domain");
  }
}

double operator_norm(const Jacobian& j, int d) {
  Eigen::MatrixXd m(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) m(r, c) = j[r][c];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

/// Calls fn(x) on a 64^d lattice spanning the closed bounding box, restricted to the closed domain.
template <typename Fn>
void for_each_sample(const Domain& domain, Fn&& fn) {
  constexpr int kSamples = 64;
  const int d = domain.dim();
  std::array<int, 3> n{1, 1, 1};
  for (int a = 0; a < d; ++a) n[a] = kSamples;
  for (int k = 0; k < n[2]; ++k) {
    for (int j = 0; j < n[1]; ++j) {
      for (int i = 0; i < n[0]; ++i) {
        const std::array<int, 3> idx{i, j, k};
        Vec x{};
        for (int a = 0; a < d; ++a) {
          const auto& b = domain.bounds()[a];
          x[a] = b.lo + b.length() * idx[a] / (kSamples - 1);
        }
        if (domain.distance_outside(x) > 0.0) continue;
        fn(x);
      }
    }
  }
}

}  // namespace

Vec evaluate(const VectorField& field, const Domain& domain, const Vec& x) {
  check_in_closure(field, domain, x);
  return field.value(x);
}

double divergence(const VectorField& field, const Domain& domain, const Vec& x) {
  check_in_closure(field, domain, x);
  return field.divergence(x);
}

double lipschitz_estimate(const VectorField& field, const Domain& domain) {
  switch (field.kind()) {
    case FieldKind::zero:
    case FieldKind::constant: return 0.0;
    case FieldKind::rotation: return std::abs(field.params()[0]);
    case FieldKind::linear: return operator_norm(field.jacobian({}), field.dim());
    default: break;
  }
  constexpr double kSafety = 1.25;
  double best = 0.0;
  for_each_sample(domain, [&](const Vec& x) { best = std::max(best, operator_norm(field.jacobian(x), field.dim())); });
  return kSafety * best;
}

double sup_norm_estimate(const VectorField& field, const Domain& domain) {
  double best = 0.0;
  for_each_sample(domain, [&](const Vec& x) { best = std::max(best, norm2(field.value(x))); });
  return best;
}

const char* to_string(FaceClass c) {
  switch (c) {
    case FaceClass::minus: return "minus";
    case FaceClass::zero: return "zero";
    case FaceClass::plus: return "plus";
  }
  return "unknown";
}

BoundaryClassification classify_boundary(const VectorField& field, const Grid& grid, double tol) {
  if (!(tol >= 0.0)) throw FieldError("classification tolerance must be >= 0");
  BoundaryClassification out;
  out.tol = tol;
  out.max_outflow = -std::numeric_limits<double>::infinity();
  const auto faces = grid.boundary_faces();
  out.normal_flux.reserve(faces.size());
  out.face_class.reserve(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const double fn = dot(evaluate(field, grid.domain(), faces[f].centroid), faces[f].normal);
    out.normal_flux.push_back(fn);
    out.max_outflow = std::max(out.max_outflow, fn);
    if (fn < -tol) {
      out.gamma_minus.push_back(f);
      out.face_class.push_back(FaceClass::minus);
    } else if (fn > tol) {
      out.gamma_plus.push_back(f);
      out.face_class.push_back(FaceClass::plus);
    } else {
      out.gamma_zero.push_back(f);
      out.face_class.push_back(FaceClass::zero);
    }
  }
  return out;
}

NoOutflowVerdict check_no_outflow(const BoundaryClassification& classification) {
  NoOutflowVerdict v;
  v.ok = classification.gamma_plus.empty();
  for (std::size_t f : classification.gamma_plus) v.violations.push_back({f, classification.normal_flux[f]});
  return v;
}

}  // namespace kvn
