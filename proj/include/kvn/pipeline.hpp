#ifndef KVN_PIPELINE_HPP
#define KVN_PIPELINE_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kvn/diagnostics.hpp"
#include "kvn/scenario.hpp"
#include "kvn/semiflow.hpp"

namespace kvn {

inline constexpr const char* kVersion = "1.0.0";

/// Exit codes shared by every verb.
enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitUsage = 2 };

/// Worker threads from KVN_THREADS (default 1). Throws ConfigError on a malformed value.
unsigned thread_count_from_env();

struct RunOptions {
  /// Overrides grid.resolution (broadcast to every axis).
  std::optional<int> resolution;
  /// Overrides propagator.dt.
  std::optional<double> dt;
  bool propagate = true;
  unsigned threads = 1;
};

/// Everything one scenario execution produces. Operators and results are
/// absent for a static (non-propagating) execution.
struct ScenarioRun {
  Grid grid;
  BoundaryClassification classification;
  std::optional<SparseOperator> pf_generator;
  std::optional<SparseOperator> koopman;
  std::optional<SparseOperator> generator;
  InitialState initial;
  PropagatorConfig propagator;
  std::optional<Propagation> propagation;
  std::optional<KvnOracle> kvn_oracle;
  std::optional<LiouvilleOracle> liouville_oracle;
  std::optional<Trajectory> trajectory;
  VerificationReport report;
};

ScenarioRun execute(const ScenarioConfig& cfg, const RunOptions& options = {});

/// One rung of a convergence ladder.
struct RungResult {
  int resolution = 0;
  double h = 0.0;
  double dt = 0.0;
  std::optional<double> oracle_l2_error;
  std::optional<double> born_l1_error;
  double green_residual = 0.0;
  double duality_residual = 0.0;
  std::optional<double> hamiltonian_discrepancy;
  std::size_t oracle_exit_count = 0;
  VerificationReport report;
};

struct ConvergenceStudy {
  std::vector<RungResult> rungs;
  std::vector<std::pair<std::string, OrderResult>> orders;
  std::vector<std::string> failures;
};

/// Runs every rung with dt = c h and measures observed orders. Throws
/// ConfigError for fewer than two rungs or a ladder that is not increasing.
ConvergenceStudy converge(const ScenarioConfig& cfg, const std::vector<int>& ladder, unsigned threads = 1);

std::string convergence_csv(const ConvergenceStudy& study);
std::string orders_csv(const ConvergenceStudy& study, const ConvergeConfig& bands);

/// CLI verbs. Each returns an ExitCode; diagnostics go to `err`.
int run_command(const std::filesystem::path& config, const std::optional<std::filesystem::path>& out_dir,
                std::ostream& out, std::ostream& err);
int converge_command(const std::filesystem::path& config, const std::optional<std::vector<int>>& ladder,
                     const std::optional<std::filesystem::path>& out_dir, std::ostream& out, std::ostream& err);
int check_command(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

}  // namespace kvn

#endif  // KVN_PIPELINE_HPP
