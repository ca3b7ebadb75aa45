#ifndef KVN_SCENARIO_HPP
#define KVN_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kvn/fields.hpp"
#include "kvn/geometry.hpp"
#include "kvn/oracle.hpp"
#include "kvn/propagators.hpp"
#include "kvn/sparse_operator.hpp"

namespace kvn {

/// Malformed or invalid scenario file. `key` and `line` locate the problem
/// (line 0 when the problem is a missing key or a cross-key constraint).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, int line, const std::string& message);
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

enum class InitialKind { gaussian, indicator_smoothed, constant };

const char* to_string(InitialKind kind);

/// Built-in initial conditions:
///   gaussian            exp(-|x - c|^2 / (2 sigma^2)) exp(i k.x)
///   indicator_smoothed  (1 - tanh((|x - c| - radius) / width)) / 2
///   constant            1
struct InitialCondition {
  InitialKind kind = InitialKind::gaussian;
  Vec center{};
  double sigma = 0.1;
  Vec wavenumber{};
  double radius = 0.25;
  double width = 0.05;

  Complex operator()(const Vec& x) const;
  bool operator==(const InitialCondition&) const = default;
};

struct ConvergeConfig {
  std::vector<int> ladder;
  /// dt = dt_factor * h; defaults to 0.5 / sup|F|.
  std::optional<double> dt_factor;
  double order_min = 1.7;
  double order_max = 2.3;
  double born_order_min = 1.5;
  bool operator==(const ConvergeConfig&) const = default;
};

struct ScenarioConfig {
  std::string name = "scenario";
  Domain domain = Domain::interval(0.0, 1.0);
  std::vector<int> resolution;
  VectorField field = VectorField::zero(1);
  double classify_tol = 1e-10;
  InitialCondition initial;
  double t_end = 0.0;
  std::vector<double> snapshots;
  PropagatorConfig propagator;
  bool oracle_enabled = true;
  std::optional<double> oracle_dt;
  std::filesystem::path output_dir;
  std::optional<Vec> trajectory_start;
  bool export_operators = false;
  std::uint64_t probe_seed = 20240601;
  std::size_t probe_count = 100;
  ConvergeConfig converge;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Parses the flat "key = value" format. `source` names the input in messages.
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);
/// Text that parse_config maps back to an equal value.
std::string serialize_config(const ScenarioConfig& cfg);

/// Initial state sampled on the grid and rescaled to unit weighted norm,
/// together with the analytic function carrying the same scale.
struct InitialState {
  ComplexField psi;
  double scale = 1.0;
  ComplexFunction analytic;
};

InitialState make_initial_state(const InitialCondition& ic, const Grid& grid);

}  // namespace kvn

#endif  // KVN_SCENARIO_HPP
