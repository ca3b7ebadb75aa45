#ifndef KVN_SEMIFLOW_HPP
#define KVN_SEMIFLOW_HPP

#include <cstddef>
#include <vector>

#include "kvn/fields.hpp"
#include "kvn/geometry.hpp"

namespace kvn {

enum class FlowDirection { forward, backward };

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  /// Entry k is the integral of div G along the path up to times[k], where G is
  /// the field actually integrated (the negated field for backward flow).
  std::vector<double> divergence_integral;
  std::size_t viability_violations = 0;
  FlowDirection direction = FlowDirection::forward;
  /// Backward flow only: the path left the closed domain and was stopped.
  bool exited = false;
};

struct FlowOptions {
  FlowDirection direction = FlowDirection::forward;
  /// Keep every step; otherwise only the initial and final states are stored.
  bool record = true;
};

/// Number of fixed steps of size dt that cover [0, t]; the last step is
/// shortened when t is not a multiple of dt (up to a relative slack of 1e-9).
std::size_t step_count(double t, double dt);

/// Fixed-step RK4 for x' = F(x) (or x' = -F(x) backward) from x0 over [0, t_end].
/// Forward paths are projected back onto the closed domain whenever a step
/// leaves it by more than 1e-9 * diam; backward paths that leave it are stopped.
Trajectory integrate(const VectorField& field, const Domain& domain, const Vec& x0, double t_end, double dt,
                     const FlowOptions& options = {});

/// || Phi_{t+s}(x0) - Phi_t(Phi_s(x0)) ||_2 with the same step size on every leg.
double check_semigroup(const VectorField& field, const Domain& domain, const Vec& x0, double s, double t, double dt);

class SemiflowError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace kvn

#endif  // KVN_SEMIFLOW_HPP
