#ifndef KVN_DIAGNOSTICS_HPP
#define KVN_DIAGNOSTICS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kvn/fields.hpp"
#include "kvn/geometry.hpp"
#include "kvn/oracle.hpp"
#include "kvn/propagators.hpp"
#include "kvn/sparse_operator.hpp"

namespace kvn {

/// Observed order of convergence, or the marker for an error that is zero to rounding.
struct OrderResult {
  bool exact = false;
  double order = 0.0;
  std::string str() const;
};

/// Errors at or below this are treated as exactly zero by measure_order.
inline constexpr double kExactErrorFloor = 1e-14;

/// Least-squares slope of log e against log h. Points with e <= 1e-14 are
/// dropped; with fewer than two points left the result is `exact`.
/// Throws std::invalid_argument on fewer than two points, non-decreasing h
/// or negative errors.
OrderResult measure_order(std::span<const std::pair<double, double>> h_error);

/// max over `count` seeded complex Gaussian probes of |Re<A psi, psi>_w| / (||psi||_w^2 ||A||_inf).
double dissipativity_residual(const SparseOperator& generator, std::size_t count, std::uint64_t seed);

/// Sample an analytic function at the cell centres.
ComplexField sample(const Grid& grid, const std::function<Complex(const Vec&)>& f);
RealField sample_real(const Grid& grid, const std::function<double(const Vec&)>& f);

/// |<(div F) psi, phi>_w - <D_h(psi F), phi>_w - <psi, D_h(phi F)>_w| with div F sampled at cell centres.
double green_residual(const VectorField& field, const Grid& grid, const SparseOperator& pf_generator,
                      std::span<const double> psi, std::span<const double> phi);

/// |<L_h f, rho>_w - <f, M rho>_w|, M the Perron-Frobenius generator.
double duality_residual(const SparseOperator& koopman, const SparseOperator& pf_generator, std::span<const double> f,
                        std::span<const double> rho);

/// max over interior cells of |A psi + L psi|, relative to max over interior cells of |L psi|.
double hamiltonian_discrepancy(const SparseOperator& generator, const SparseOperator& koopman, const Grid& grid,
                               std::span<const Complex> psi);

/// Gaussian bump pair used by the Green and duality probes: centred around the
/// domain centre, offset along the first axis, width proportional to the diameter.
std::pair<RealField, RealField> gaussian_probe_pair(const Grid& grid);

/// Everything a completed run hands to verification. Pointers to absent pieces are null.
struct RunArtifacts {
  std::string scenario;
  std::uint64_t probe_seed = 0;
  std::size_t probe_count = 100;
  unsigned threads = 1;
  const VectorField* field = nullptr;
  const Grid* grid = nullptr;
  const BoundaryClassification* classification = nullptr;
  const SparseOperator* pf_generator = nullptr;
  const SparseOperator* koopman = nullptr;
  const SparseOperator* kvn = nullptr;
  const PropagatorConfig* propagator = nullptr;
  const ComplexField* psi0 = nullptr;
  const Propagation* propagation = nullptr;
  const KvnOracle* kvn_oracle = nullptr;
  const LiouvilleOracle* liouville_oracle = nullptr;
  std::vector<std::pair<std::string, OrderResult>> convergence_orders;
};

struct VerificationReport {
  std::string scenario;
  std::uint64_t probe_seed = 0;
  std::size_t probe_count = 0;
  unsigned threads = 1;
  std::size_t cells = 0;

  double skewness_defect = 0.0;
  double dissipativity_residual = 0.0;
  double green_residual = 0.0;
  double green_boundary_term = 0.0;
  double mass_conservation_defect = 0.0;
  double duality_residual = 0.0;
  double boundary_flux_max = 0.0;
  std::optional<double> norm_drift;
  std::optional<double> semigroup_residual;
  std::optional<double> oracle_l2_error;
  std::optional<double> born_l1_error;
  std::optional<double> oracle_self_consistency;
  std::optional<double> pfs_norm_initial;
  std::optional<double> pfs_norm_final;
  std::optional<double> time_rounding_error;
  std::vector<std::pair<std::string, OrderResult>> convergence_orders;

  std::size_t oracle_exit_count = 0;
  bool no_outflow_ok = true;
  std::vector<FaceViolation> no_outflow_violations;
  std::size_t gamma_minus = 0;
  std::size_t gamma_zero = 0;
  std::size_t gamma_plus = 0;
  double max_outflow = 0.0;
  std::string scheme;

  std::vector<std::string> failures;
  bool passed() const { return failures.empty(); }
};

/// Asserted thresholds.
struct Thresholds {
  double skewness = 1e-13;
  double dissipativity = 1e-12;
  double norm_drift = 1e-9;
  double semigroup = 1e-12;
  double mass_conservation = 1e-12;
  double oracle_self_consistency = 1e-12;
};

VerificationReport verify_run(const RunArtifacts& run, const Thresholds& thresholds = {});

/// One "name=value" line per metric in a fixed order; absent metrics read "absent".
std::string serialize(const VerificationReport& report);

/// Property or construction checked by each numeric report metric.
const std::vector<std::pair<std::string, std::string>>& metric_sources();

}  // namespace kvn

#endif  // KVN_DIAGNOSTICS_HPP
