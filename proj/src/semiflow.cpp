#include "kvn/semiflow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kvn {

std::size_t step_count(double t, double dt) {
  if (t <= 0.0) return 0;
  const double r = t / dt;
  const double n = std::round(r);
  if (std::abs(r - n) <= 1e-9 * std::max(1.0, r)) return static_cast<std::size_t>(n);
  return static_cast<std::size_t>(std::ceil(r));
}

namespace {

struct State {
  Vec x;
  double div_integral;
};

/// One RK4 step on the system x' = s F(x), q' = s div F(x). The quadrature
/// component is Simpson's rule with the midpoint value taken as the mean of the
/// two midpoint stages.
/// Cheap membership test for the closed domain inflated by tol.
bool outside(const Domain& domain, const Vec& x, double tol) {
  if (domain.kind() == DomainKind::disk) {
    const double dx = x[0] - domain.center()[0];
    const double dy = x[1] - domain.center()[1];
    const double r = domain.radius() + tol;
    return dx * dx + dy * dy > r * r;
  }
  const auto b = domain.bounds();
  for (int a = 0; a < domain.dim(); ++a) {
    if (x[a] < b[a].lo - tol || x[a] > b[a].hi + tol) return domain.distance_outside(x) > tol;
  }
  return false;
}

State rk4_step(const VectorField& f, double sign, const State& y, double h) {
  const int d = f.dim();
  auto rhs = [&](const Vec& x, Vec& dx, double& dq) {
    const Vec v = f.value(x);
    for (int a = 0; a < d; ++a) dx[a] = sign * v[a];
    dq = sign * f.divergence(x);
  };
  Vec k1{}, k2{}, k3{}, k4{}, tmp{};
  double q1, q2, q3, q4;
  rhs(y.x, k1, q1);
  for (int a = 0; a < d; ++a) tmp[a] = y.x[a] + 0.5 * h * k1[a];
  rhs(tmp, k2, q2);
  for (int a = 0; a < d; ++a) tmp[a] = y.x[a] + 0.5 * h * k2[a];
  rhs(tmp, k3, q3);
  for (int a = 0; a < d; ++a) tmp[a] = y.x[a] + h * k3[a];
  rhs(tmp, k4, q4);
  State out = y;
  for (int a = 0; a < d; ++a) out.x[a] = y.x[a] + h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
  out.div_integral = y.div_integral + h / 6.0 * (q1 + 2.0 * q2 + 2.0 * q3 + q4);
  return out;
}

}  // namespace

Trajectory integrate(const VectorField& field, const Domain& domain, const Vec& x0, double t_end, double dt,
                     const FlowOptions& options) {
  if (!(dt > 0.0)) throw SemiflowError("time step must be positive, got " + std::to_string(dt));
  if (!(t_end >= 0.0)) throw SemiflowError("end time must be >= 0, got " + std::to_string(t_end));
  if (field.dim() != domain.dim()) throw SemiflowError("field and domain dimensions differ");
  const double tol = 1e-9 * domain.diameter();
  if (domain.distance_outside(x0) > tol) throw SemiflowError("initial point lies outside the closed domain");

  const bool backward = options.direction == FlowDirection::backward;
  const double sign = backward ? -1.0 : 1.0;

  Trajectory tr;
  tr.direction = options.direction;
  tr.times.push_back(0.0);
  tr.states.push_back(x0);
  tr.divergence_integral.push_back(0.0);

  const std::size_t n = step_count(t_end, dt);
  // Shorten the final step only when t_end is not a multiple of dt.
  const bool uniform = std::abs(t_end / dt - static_cast<double>(n)) <= 1e-9 * std::max(1.0, t_end / dt);
  State y{x0, 0.0};
  double t = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double h = (k + 1 == n && !uniform) ? t_end - dt * static_cast<double>(n - 1) : dt;
    State next = rk4_step(field, sign, y, h);
    if (outside(domain, next.x, tol)) {
      if (backward) {
        tr.exited = true;
        break;
      }
      next.x = domain.project(next.x);
      ++tr.viability_violations;
    }
    y = next;
    t = (k + 1 == n) ? t_end : dt * static_cast<double>(k + 1);
    if (options.record || k + 1 == n) {
      tr.times.push_back(t);
      tr.states.push_back(y.x);
      tr.divergence_integral.push_back(y.div_integral);
    }
  }
  return tr;
}

double check_semigroup(const VectorField& field, const Domain& domain, const Vec& x0, double s, double t, double dt) {
  if (!(s >= 0.0 && t >= 0.0)) throw SemiflowError("semigroup times must be >= 0");
  const FlowOptions opts{FlowDirection::forward, false};
  const Vec whole = integrate(field, domain, x0, s + t, dt, opts).states.back();
  const Vec first = integrate(field, domain, x0, s, dt, opts).states.back();
  const Vec composed = integrate(field, domain, first, t, dt, opts).states.back();
  Vec diff{};
  for (int a = 0; a < 3; ++a) diff[a] = whole[a] - composed[a];
  return norm2(diff);
}

}  // namespace kvn
