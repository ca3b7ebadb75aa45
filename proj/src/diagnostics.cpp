#include "kvn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include "kvn/operators.hpp"

namespace kvn {

std::string OrderResult::str() const {
  if (exact) return "exact";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", order);
  return buf;
}

OrderResult measure_order(std::span<const std::pair<double, double>> h_error) {
  if (h_error.size() < 2) throw std::invalid_argument("measure_order needs at least two points");
  for (std::size_t k = 0; k < h_error.size(); ++k) {
    if (!(h_error[k].first > 0.0)) throw std::invalid_argument("measure_order: h must be positive");
    if (k > 0 && !(h_error[k].first < h_error[k - 1].first)) {
      throw std::invalid_argument("measure_order: h must be strictly decreasing");
    }
    if (!(h_error[k].second >= 0.0) || !std::isfinite(h_error[k].second)) {
      throw std::invalid_argument("measure_order: errors must be finite and non-negative");
    }
  }
  std::vector<std::pair<double, double>> pts;
  for (const auto& [h, e] : h_error) {
    if (e > kExactErrorFloor) pts.emplace_back(std::log(h), std::log(e));
  }
  if (pts.size() < 2) return {true, 0.0};
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return {false, sxy / sxx};
}

double dissipativity_residual(const SparseOperator& generator, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto w = generator.weights();
  const double op_norm = generator.max_abs_row_sum();
  ComplexField psi(generator.size());
  double worst = 0.0;
  for (std::size_t p = 0; p < count; ++p) {
    for (auto& v : psi) {
      const double re = normal(rng);
      const double im = normal(rng);
      v = {re, im};
    }
    const ComplexField apsi = kvn::apply(generator, psi);
    const double re = inner(apsi, psi, w).real();
    const double nrm = weighted_norm(psi, w);
    const double scale = nrm * nrm * (op_norm > 0.0 ? op_norm : 1.0);
    if (scale > 0.0) worst = std::max(worst, std::abs(re) / scale);
  }
  return worst;
}

ComplexField sample(const Grid& grid, const std::function<Complex(const Vec&)>& f) {
  ComplexField out(grid.size());
  const auto centers = grid.centers();
  for (std::size_t c = 0; c < grid.size(); ++c) out[c] = f(centers[c]);
  return out;
}

RealField sample_real(const Grid& grid, const std::function<double(const Vec&)>& f) {
  RealField out(grid.size());
  const auto centers = grid.centers();
  for (std::size_t c = 0; c < grid.size(); ++c) out[c] = f(centers[c]);
  return out;
}

double green_residual(const VectorField& field, const Grid& grid, const SparseOperator& pf_generator,
                      std::span<const double> psi, std::span<const double> phi) {
  const auto w = grid.volumes();
  const auto centers = grid.centers();
  RealField div_psi(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) div_psi[c] = field.divergence(centers[c]) * psi[c];
  const RealField dpsi = flux_divergence(pf_generator, psi);
  const RealField dphi = flux_divergence(pf_generator, phi);
  return std::abs(inner(div_psi, phi, w) - inner(dpsi, phi, w) - inner(psi, dphi, w));
}

double duality_residual(const SparseOperator& koopman, const SparseOperator& pf_generator, std::span<const double> f,
                        std::span<const double> rho) {
  const auto w = pf_generator.weights();
  return std::abs(inner(kvn::apply(koopman, f), rho, w) - inner(f, kvn::apply(pf_generator, rho), w));
}

double hamiltonian_discrepancy(const SparseOperator& generator, const SparseOperator& koopman, const Grid& grid,
                               std::span<const Complex> psi) {
  const ComplexField a = kvn::apply(generator, psi);
  const ComplexField l = kvn::apply(koopman, psi);
  double num = 0.0, den = 0.0;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    if (!grid.is_interior(c)) continue;
    num = std::max(num, std::abs(a[c] + l[c]));
    den = std::max(den, std::abs(l[c]));
  }
  return den > 0.0 ? num / den : num;
}

std::pair<RealField, RealField> gaussian_probe_pair(const Grid& grid) {
  const Domain& dom = grid.domain();
  const double diam = dom.diameter();
  const double sigma = 0.06 * diam;
  Vec c1 = dom.center();
  Vec c2 = dom.center();
  c1[0] -= 0.05 * diam;
  c2[0] += 0.05 * diam;
  auto bump = [&](const Vec& c) {
    return [c, sigma, d = dom.dim()](const Vec& x) {
      double r2 = 0.0;
      for (int a = 0; a < d; ++a) r2 += (x[a] - c[a]) * (x[a] - c[a]);
      return std::exp(-r2 / (2.0 * sigma * sigma));
    };
  };
  return {sample_real(grid, bump(c1)), sample_real(grid, bump(c2))};
}

namespace {

double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Steps k1 then k2 against k1 + k2 in one go, with independent steppers.
double discrete_semigroup_residual(const SparseOperator& op, const PropagatorConfig& cfg, const ComplexField& psi0,
                                   std::size_t k1, std::size_t k2) {
  TimeStepper whole(op, cfg);
  ComplexField a = psi0;
  for (std::size_t k = 0; k < k1 + k2; ++k) a = whole.step(a);
  TimeStepper first(op, cfg);
  ComplexField b = psi0;
  for (std::size_t k = 0; k < k1; ++k) b = first.step(b);
  TimeStepper second(op, cfg);
  for (std::size_t k = 0; k < k2; ++k) b = second.step(b);
  return max_abs_diff(a, b);
}

void check(VerificationReport& r, const char* name, double value, double limit) {
  if (!(value <= limit)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s=%.3e exceeds %.1e", name, value, limit);
    r.failures.emplace_back(buf);
  }
}

}  // namespace

VerificationReport verify_run(const RunArtifacts& run, const Thresholds& th) {
  if (!run.field || !run.grid || !run.pf_generator || !run.kvn || !run.koopman || !run.classification) {
    throw std::invalid_argument("verify_run needs the field, grid, classification and all three generators");
  }
  VerificationReport r;
  r.scenario = run.scenario;
  r.probe_seed = run.probe_seed;
  r.probe_count = run.probe_count;
  r.threads = run.threads;
  r.cells = run.grid->size();
  r.convergence_orders = run.convergence_orders;

  const auto& cls = *run.classification;
  const NoOutflowVerdict verdict = check_no_outflow(cls);
  r.no_outflow_ok = verdict.ok;
  r.no_outflow_violations = verdict.violations;
  r.gamma_minus = cls.gamma_minus.size();
  r.gamma_zero = cls.gamma_zero.size();
  r.gamma_plus = cls.gamma_plus.size();
  r.max_outflow = cls.normal_flux.empty() ? 0.0 : cls.max_outflow;

  r.skewness_defect = skewness_defect(*run.kvn);
  r.dissipativity_residual = dissipativity_residual(*run.kvn, run.probe_count, run.probe_seed);
  r.mass_conservation_defect = mass_conservation_defect(*run.pf_generator);

  const auto [g1, g2] = gaussian_probe_pair(*run.grid);
  r.green_residual = green_residual(*run.field, *run.grid, *run.pf_generator, g1, g2);
  r.green_boundary_term = std::abs(boundary_flux_term(*run.pf_generator, g1, g2));
  r.duality_residual = duality_residual(*run.koopman, *run.pf_generator, g1, g2);

  const auto w = run.grid->volumes();
  if (run.psi0) {
    r.boundary_flux_max = boundary_flux_max(*run.pf_generator, *run.psi0);
    r.pfs_norm_initial = pfs_norm(*run.psi0, *run.pf_generator);
  }

  if (run.propagation) {
    const Propagation& prop = *run.propagation;
    r.norm_drift = prop.max_norm_drift;
    r.time_rounding_error = prop.time_rounding_error;
    r.pfs_norm_final = pfs_norm(prop.final_state(), *run.pf_generator);
    for (const auto& s : prop.snapshots) {
      r.boundary_flux_max = std::max(r.boundary_flux_max, boundary_flux_max(*run.pf_generator, s.psi));
    }
    if (run.propagator && run.psi0) {
      r.scheme = to_string(run.propagator->scheme);
      const std::size_t k1 = std::min<std::size_t>(prop.steps, 5);
      r.semigroup_residual = discrete_semigroup_residual(*run.kvn, *run.propagator, *run.psi0, k1, k1);
    }
  }

  if (run.kvn_oracle && run.propagation) {
    const auto& psi = run.propagation->final_state();
    ComplexField diff(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) diff[i] = psi[i] - run.kvn_oracle->psi[i];
    r.oracle_l2_error = weighted_norm(diff, w);
    r.oracle_exit_count = run.kvn_oracle->exit_count;
  }
  if (run.liouville_oracle && run.propagation) {
    const auto& psi = run.propagation->final_state();
    RealField diff(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) diff[i] = std::norm(psi[i]) - run.liouville_oracle->rho[i];
    r.born_l1_error = weighted_l1(diff, w);
  }
  if (run.kvn_oracle && run.liouville_oracle) {
    double m = 0.0;
    for (std::size_t i = 0; i < run.kvn_oracle->psi.size(); ++i) {
      m = std::max(m, std::abs(std::norm(run.kvn_oracle->psi[i]) - run.liouville_oracle->rho[i]));
    }
    r.oracle_self_consistency = m;
  }

  check(r, "skewness_defect", r.skewness_defect, th.skewness);
  check(r, "dissipativity_residual", r.dissipativity_residual, th.dissipativity);
  check(r, "mass_conservation_defect", r.mass_conservation_defect, th.mass_conservation);
  check(r, "boundary_flux_max", r.boundary_flux_max, 0.0);
  check(r, "green_boundary_term", r.green_boundary_term, 0.0);
  if (r.norm_drift && run.propagator && run.propagator->scheme == Scheme::cayley) {
    check(r, "norm_drift", *r.norm_drift, th.norm_drift);
  }
  if (r.semigroup_residual) check(r, "semigroup_residual", *r.semigroup_residual, th.semigroup);
  if (r.oracle_self_consistency) {
    check(r, "oracle_self_consistency", *r.oracle_self_consistency, th.oracle_self_consistency);
  }
  return r;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string("absent"); }

}  // namespace

std::string serialize(const VerificationReport& r) {
  std::ostringstream os;
  os << "scenario=" << r.scenario << '\n';
  os << "probe_seed=" << r.probe_seed << '\n';
  os << "probe_count=" << r.probe_count << '\n';
  os << "threads=" << r.threads << '\n';
  os << "cells=" << r.cells << '\n';
  os << "scheme=" << (r.scheme.empty() ? "absent" : r.scheme) << '\n';
  os << "skewness_defect=" << fmt(r.skewness_defect) << '\n';
  os << "dissipativity_residual=" << fmt(r.dissipativity_residual) << '\n';
  os << "green_residual=" << fmt(r.green_residual) << '\n';
  os << "green_boundary_term=" << fmt(r.green_boundary_term) << '\n';
  os << "mass_conservation_defect=" << fmt(r.mass_conservation_defect) << '\n';
  os << "duality_residual=" << fmt(r.duality_residual) << '\n';
  os << "boundary_flux_max=" << fmt(r.boundary_flux_max) << '\n';
  os << "norm_drift=" << fmt(r.norm_drift) << '\n';
  os << "semigroup_residual=" << fmt(r.semigroup_residual) << '\n';
  os << "oracle_l2_error=" << fmt(r.oracle_l2_error) << '\n';
  os << "born_l1_error=" << fmt(r.born_l1_error) << '\n';
  os << "oracle_self_consistency=" << fmt(r.oracle_self_consistency) << '\n';
  os << "pfs_norm_initial=" << fmt(r.pfs_norm_initial) << '\n';
  os << "pfs_norm_final=" << fmt(r.pfs_norm_final) << '\n';
  os << "time_rounding_error=" << fmt(r.time_rounding_error) << '\n';
  for (const auto& [name, order] : r.convergence_orders) os << "order." << name << '=' << order.str() << '\n';
  os << "oracle_exit_count=" << r.oracle_exit_count << '\n';
  os << "gamma_minus=" << r.gamma_minus << '\n';
  os << "gamma_zero=" << r.gamma_zero << '\n';
  os << "gamma_plus=" << r.gamma_plus << '\n';
  os << "max_outflow=" << fmt(r.max_outflow) << '\n';
  os << "no_outflow=" << (r.no_outflow_ok ? "ok" : "violated") << '\n';
  if (!r.no_outflow_ok) {
    os << "no_outflow_violating_faces=";
    for (std::size_t k = 0; k < r.no_outflow_violations.size(); ++k) {
      os << (k ? "," : "") << r.no_outflow_violations[k].face;
    }
    os << '\n';
  }
  os << "failures=";
  for (std::size_t k = 0; k < r.failures.size(); ++k) os << (k ? "; " : "") << r.failures[k];
  os << '\n';
  os << "status=" << (r.passed() ? "pass" : "fail") << '\n';
  return os.str();
}

const std::vector<std::pair<std::string, std::string>>& metric_sources() {
  static const std::vector<std::pair<std::string, std::string>> sources = {
      {"skewness_defect", "KvN generator is the skew-symmetric part of the Perron-Frobenius generator"},
      {"dissipativity_residual", "Re<A psi, psi> = 0 (dissipativity of the KvN generator)"},
      {"green_residual", "Green's formula for functions with vanishing flux trace"},
      {"green_boundary_term", "boundary integral of psi phi F.nu vanishes under the zero-flux closure"},
      {"mass_conservation_defect", "Perron-Frobenius semigroup preserves total mass"},
      {"duality_residual", "Koopman generator is the dual of the Perron-Frobenius generator"},
      {"boundary_flux_max", "boundary condition psi F.nu = 0"},
      {"norm_drift", "norm conservation ||psi(t)|| = ||psi0||"},
      {"semigroup_residual", "semigroup law T(t + s) = T(t) T(s)"},
      {"oracle_l2_error", "KvN transport form solved along characteristics"},
      {"born_l1_error", "Born rule rho = |psi|^2"},
      {"oracle_self_consistency", "squared KvN characteristic weight equals the Liouville weight"},
      {"pfs_norm_initial", "graph norm of the Perron-Frobenius-Sobolev space"},
      {"pfs_norm_final", "graph norm of the Perron-Frobenius-Sobolev space"},
      {"time_rounding_error", "snapshot times rounded to whole steps"},
      {"max_outflow", "no-outflow condition F.nu <= 0"},
  };
  return sources;
}

}  // namespace kvn
