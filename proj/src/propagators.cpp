#include "kvn/propagators.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace kvn {

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::cayley: return "cayley";
    case Scheme::rk4: return "rk4";
    case Scheme::dense_expm: return "dense_expm";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
  for (auto s : {Scheme::cayley, Scheme::rk4, Scheme::dense_expm}) {
    if (name == to_string(s)) return s;
  }
  throw std::invalid_argument("unknown propagator scheme '" + name + "'");
}

void PropagatorConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("propagator dt must be > 0");
  if (!(linear_solver_tol > 0.0 && linear_solver_tol <= 1e-6)) {
    throw std::invalid_argument("linear solver tolerance must lie in (0, 1e-6]");
  }
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
}

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// I + scale * A
SpMat shifted(const SparseOperator& op, double scale) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(op.nnz() + op.size());
  for (std::size_t i = 0; i < op.size(); ++i) t.emplace_back(i, i, 1.0);
  for (const auto& e : op.triplets()) t.emplace_back(e.row, e.col, scale * e.value);
  SpMat m(static_cast<Eigen::Index>(op.size()), static_cast<Eigen::Index>(op.size()));
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

Eigen::MatrixXd dense(const SparseOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : op.triplets()) m(e.row, e.col) = e.value;
  return m;
}

void split(std::span<const Complex> psi, Eigen::VectorXd& re, Eigen::VectorXd& im) {
  re.resize(static_cast<Eigen::Index>(psi.size()));
  im.resize(static_cast<Eigen::Index>(psi.size()));
  for (std::size_t i = 0; i < psi.size(); ++i) {
    re[i] = psi[i].real();
    im[i] = psi[i].imag();
  }
}

ComplexField join(const Eigen::VectorXd& re, const Eigen::VectorXd& im) {
  ComplexField out(static_cast<std::size_t>(re.size()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {re[i], im[i]};
  return out;
}

}  // namespace

struct TimeStepper::Impl {
  const SparseOperator* op = nullptr;
  PropagatorConfig cfg;
  bool trivial = false;
  // cayley
  SpMat lhs;
  SpMat rhs;
  Eigen::BiCGSTAB<SpMat, Eigen::DiagonalPreconditioner<double>> solver;
  // dense_expm
  Eigen::MatrixXd propagator;
};

TimeStepper::TimeStepper(const SparseOperator& op, const PropagatorConfig& cfg) : impl_(std::make_unique<Impl>()) {
  cfg.validate();
  impl_->op = &op;
  impl_->cfg = cfg;
  impl_->trivial = op.nnz() == 0;
  if (impl_->trivial) return;
  switch (cfg.scheme) {
    case Scheme::cayley:
      impl_->lhs = shifted(op, -0.5 * cfg.dt);
      impl_->rhs = shifted(op, 0.5 * cfg.dt);
      impl_->solver.setTolerance(cfg.linear_solver_tol);
      impl_->solver.setMaxIterations(cfg.max_iterations);
      impl_->solver.compute(impl_->lhs);
      break;
    case Scheme::dense_expm:
      if (op.size() > cfg.max_dense_dim) {
        throw PropagatorError("dense_expm refused: N = " + std::to_string(op.size()) + " exceeds max_dense_dim = " +
                              std::to_string(cfg.max_dense_dim));
      }
      impl_->propagator = (cfg.dt * dense(op)).exp();
      break;
    case Scheme::rk4: break;
  }
}

TimeStepper::~TimeStepper() = default;
TimeStepper::TimeStepper(TimeStepper&&) noexcept = default;
TimeStepper& TimeStepper::operator=(TimeStepper&&) noexcept = default;

ComplexField TimeStepper::step(std::span<const Complex> psi) {
  const SparseOperator& op = *impl_->op;
  if (psi.size() != op.size()) throw DimensionError("state size does not match operator size");
  if (impl_->trivial) return {psi.begin(), psi.end()};
  const double dt = impl_->cfg.dt;

  switch (impl_->cfg.scheme) {
    case Scheme::cayley: {
      Eigen::VectorXd re, im;
      split(psi, re, im);
      Eigen::VectorXd out[2];
      const Eigen::VectorXd* parts[2] = {&re, &im};
      for (int p = 0; p < 2; ++p) {
        const Eigen::VectorXd b = impl_->rhs * (*parts[p]);
        const double bnorm = b.norm();
        if (bnorm == 0.0) {
          out[p] = Eigen::VectorXd::Zero(b.size());
          continue;
        }
        out[p] = impl_->solver.solveWithGuess(b, *parts[p]);
        const double rel = (impl_->lhs * out[p] - b).norm() / bnorm;
        if (impl_->solver.info() != Eigen::Success || rel > impl_->cfg.linear_solver_tol) {
          throw PropagatorError("Cayley solve did not converge: relative residual " + std::to_string(rel) + " after " +
                                std::to_string(impl_->solver.iterations()) + " iterations (tol " +
                                std::to_string(impl_->cfg.linear_solver_tol) + ")");
        }
        max_residual_ = std::max(max_residual_, rel);
        max_iterations_used_ = std::max(max_iterations_used_, static_cast<int>(impl_->solver.iterations()));
      }
      return join(out[0], out[1]);
    }
    case Scheme::rk4: {
      const std::size_t n = psi.size();
      ComplexField k1 = kvn::apply(op, psi);
      ComplexField tmp(n);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = psi[i] + 0.5 * dt * k1[i];
      ComplexField k2 = kvn::apply(op, tmp);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = psi[i] + 0.5 * dt * k2[i];
      ComplexField k3 = kvn::apply(op, tmp);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = psi[i] + dt * k3[i];
      ComplexField k4 = kvn::apply(op, tmp);
      ComplexField out(n);
      for (std::size_t i = 0; i < n; ++i) out[i] = psi[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      return out;
    }
    case Scheme::dense_expm: {
      Eigen::VectorXd re, im;
      split(psi, re, im);
      return join(impl_->propagator * re, impl_->propagator * im);
    }
  }
  throw PropagatorError("unknown scheme");
}

ComplexField cayley_step(const SparseOperator& op, std::span<const Complex> psi, double dt, double tol) {
  PropagatorConfig cfg;
  cfg.scheme = Scheme::cayley;
  cfg.dt = dt;
  cfg.linear_solver_tol = tol;
  TimeStepper s(op, cfg);
  return s.step(psi);
}

ComplexField rk4_step(const SparseOperator& op, std::span<const Complex> psi, double dt) {
  PropagatorConfig cfg;
  cfg.scheme = Scheme::rk4;
  cfg.dt = dt;
  TimeStepper s(op, cfg);
  return s.step(psi);
}

ComplexField dense_expm_step(const SparseOperator& op, std::span<const Complex> psi, double dt,
                             std::size_t max_dense_dim) {
  PropagatorConfig cfg;
  cfg.scheme = Scheme::dense_expm;
  cfg.dt = dt;
  cfg.max_dense_dim = max_dense_dim;
  TimeStepper s(op, cfg);
  return s.step(psi);
}

std::size_t nearest_step(double t, double dt) {
  if (t <= 0.0) return 0;
  return static_cast<std::size_t>(std::llround(t / dt));
}

Propagation propagate(const SparseOperator& op, std::span<const Complex> psi0, double t_end,
                      const PropagatorConfig& cfg, std::span<const double> snapshot_times) {
  cfg.validate();
  if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be >= 0");
  if (psi0.size() != op.size()) throw DimensionError("initial state size does not match operator size");

  Propagation out;
  out.dt = cfg.dt;
  out.steps = nearest_step(t_end, cfg.dt);
  out.time_rounding_error = std::abs(static_cast<double>(out.steps) * cfg.dt - t_end);

  std::vector<std::size_t> wanted{0, out.steps};
  for (double t : snapshot_times) {
    if (t < 0.0 || t > t_end) throw std::invalid_argument("snapshot time outside [0, t_end]");
    const std::size_t k = std::min(nearest_step(t, cfg.dt), out.steps);
    out.time_rounding_error = std::max(out.time_rounding_error, std::abs(static_cast<double>(k) * cfg.dt - t));
    wanted.push_back(k);
  }
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

  const auto w = op.weights();
  const double norm0 = weighted_norm(psi0, w);
  auto record = [&](std::size_t k, const ComplexField& psi) {
    const double nrm = weighted_norm(psi, w);
    const double drift = norm0 > 0.0 ? (nrm - norm0) / norm0 : nrm;
    out.norm_history.push_back({k, static_cast<double>(k) * cfg.dt, nrm, drift});
    out.max_norm_drift = std::max(out.max_norm_drift, std::abs(drift));
  };

  TimeStepper stepper(op, cfg);
  ComplexField psi(psi0.begin(), psi0.end());
  std::size_t next = 0;
  record(0, psi);
  if (wanted[next] == 0) {
    out.snapshots.push_back({0, 0.0, psi});
    ++next;
  }
  for (std::size_t k = 1; k <= out.steps; ++k) {
    psi = stepper.step(psi);
    record(k, psi);
    if (next < wanted.size() && wanted[next] == k) {
      out.snapshots.push_back({k, static_cast<double>(k) * cfg.dt, psi});
      ++next;
    }
  }
  out.max_solver_residual = stepper.max_solver_residual();
  return out;
}

}  // namespace kvn
