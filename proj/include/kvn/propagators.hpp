#ifndef KVN_PROPAGATORS_HPP
#define KVN_PROPAGATORS_HPP

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "kvn/sparse_operator.hpp"

namespace kvn {

enum class Scheme { cayley, rk4, dense_expm };

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

struct PropagatorConfig {
  Scheme scheme = Scheme::cayley;
  double dt = 1e-3;
  double linear_solver_tol = 1e-12;
  std::size_t max_dense_dim = 4096;
  int max_iterations = 1000;

  /// Throws std::invalid_argument on dt <= 0 or a solver tolerance outside (0, 1e-6].
  void validate() const;
  bool operator==(const PropagatorConfig&) const = default;
};

class PropagatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Advances psi' = A psi by one step of a fixed size. Holds whatever the
/// scheme precomputes (the Cayley system matrix, the dense exponential).
class TimeStepper {
 public:
  TimeStepper(const SparseOperator& op, const PropagatorConfig& cfg);
  ~TimeStepper();
  TimeStepper(TimeStepper&&) noexcept;
  TimeStepper& operator=(TimeStepper&&) noexcept;

  ComplexField step(std::span<const Complex> psi);

  /// Largest relative residual ||(I - dt/2 A) x - rhs|| / ||rhs|| over all Cayley solves so far.
  double max_solver_residual() const { return max_residual_; }
  int max_solver_iterations() const { return max_iterations_used_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double max_residual_ = 0.0;
  int max_iterations_used_ = 0;
};

/// Solves (I - dt/2 A) psi+ = (I + dt/2 A) psi with a Krylov method to
/// relative residual tol.
ComplexField cayley_step(const SparseOperator& op, std::span<const Complex> psi, double dt, double tol = 1e-12);

/// Classical RK4 on psi' = A psi.
ComplexField rk4_step(const SparseOperator& op, std::span<const Complex> psi, double dt);

/// exp(dt A) psi, dense scaling-and-squaring; refuses N > max_dense_dim.
ComplexField dense_expm_step(const SparseOperator& op, std::span<const Complex> psi, double dt,
                             std::size_t max_dense_dim = 4096);

struct Snapshot {
  std::size_t step = 0;
  double time = 0.0;
  ComplexField psi;
};

struct NormRecord {
  std::size_t step = 0;
  double time = 0.0;
  double norm = 0.0;
  /// (||psi(t)||_w - ||psi0||_w) / ||psi0||_w
  double drift = 0.0;
};

struct Propagation {
  std::vector<Snapshot> snapshots;
  std::vector<NormRecord> norm_history;
  std::size_t steps = 0;
  double dt = 0.0;
  /// Largest |requested time - stored time| over snapshot requests and t_end.
  double time_rounding_error = 0.0;
  double max_norm_drift = 0.0;
  double max_solver_residual = 0.0;

  const ComplexField& final_state() const { return snapshots.back().psi; }
};

/// Steps psi0 to t_end (rounded to the nearest multiple of dt). Snapshots are
/// stored at step 0, at every requested time (rounded to the nearest step) and
/// at the final step.
Propagation propagate(const SparseOperator& op, std::span<const Complex> psi0, double t_end,
                      const PropagatorConfig& cfg, std::span<const double> snapshot_times = {});

/// Number of dt-steps nearest to t.
std::size_t nearest_step(double t, double dt);

}  // namespace kvn

#endif  // KVN_PROPAGATORS_HPP
