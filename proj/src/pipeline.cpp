#include "kvn/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <ostream>
#include <sstream>

#include "kvn/io.hpp"
#include "kvn/operators.hpp"
#include "kvn/oracle.hpp"
#include "kvn/semiflow.hpp"

namespace kvn {

unsigned thread_count_from_env() {
  const char* raw = std::getenv("KVN_THREADS");
  if (!raw || !*raw) return 1;
  const std::string s(raw);
  unsigned v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 1 || v > 256) {
    throw ConfigError("KVN_THREADS", 0, "expected an integer in [1, 256], got '" + s + "'");
  }
  return v;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string("absent"); }

}  // namespace

ScenarioRun execute(const ScenarioConfig& cfg, const RunOptions& opt) {
  ScenarioRun run;
  std::vector<int> res = cfg.resolution;
  if (opt.resolution) res = {*opt.resolution};
  run.grid = build_grid(cfg.domain, res);
  if (cfg.field.dim() != cfg.domain.dim()) {
    throw ConfigError("field.kind", 0, "field dimension does not match the domain dimension");
  }

  run.classification = classify_boundary(cfg.field, run.grid, cfg.classify_tol);
  run.pf_generator = assemble_pf_generator(cfg.field, run.grid);
  run.koopman = assemble_koopman_generator(cfg.field, run.grid);
  run.generator = assemble_kvn_generator(cfg.field, run.grid);
  run.initial = make_initial_state(cfg.initial, run.grid);

  run.propagator = cfg.propagator;
  if (opt.dt) run.propagator.dt = *opt.dt;

  RunArtifacts art;
  art.scenario = cfg.name;
  art.probe_seed = cfg.probe_seed;
  art.probe_count = cfg.probe_count;
  art.threads = opt.threads;
  art.field = &cfg.field;
  art.grid = &run.grid;
  art.classification = &run.classification;
  art.pf_generator = &*run.pf_generator;
  art.koopman = &*run.koopman;
  art.kvn = &*run.generator;
  art.psi0 = &run.initial.psi;

  if (opt.propagate) {
    run.propagation = propagate(*run.generator, run.initial.psi, cfg.t_end, run.propagator, cfg.snapshots);
    art.propagator = &run.propagator;
    art.propagation = &*run.propagation;

    if (cfg.oracle_enabled) {
      // The oracle is evaluated at the time actually reached, not the requested t_end.
      const double t = static_cast<double>(run.propagation->steps) * run.propagator.dt;
      const double dt_ode = cfg.oracle_dt.value_or(default_oracle_dt(run.propagator.dt));
      const ComplexFunction psi0 = run.initial.analytic;
      const RealFunction rho0 = [psi0](const Vec& x) { return std::norm(psi0(x)); };
      run.kvn_oracle = characteristics_oracle_kvn(cfg.field, run.grid, psi0, t, dt_ode, opt.threads);
      run.liouville_oracle = characteristics_oracle_liouville(cfg.field, run.grid, rho0, t, dt_ode, opt.threads);
      art.kvn_oracle = &*run.kvn_oracle;
      art.liouville_oracle = &*run.liouville_oracle;
    }
    if (cfg.trajectory_start) {
      run.trajectory = integrate(cfg.field, cfg.domain, *cfg.trajectory_start, cfg.t_end, run.propagator.dt);
    }
  }

  run.report = verify_run(art);
  return run;
}

ConvergenceStudy converge(const ScenarioConfig& cfg, const std::vector<int>& ladder, unsigned threads) {
  if (ladder.size() < 2) throw ConfigError("converge.ladder", 0, "a convergence study needs at least two rungs");
  for (std::size_t k = 1; k < ladder.size(); ++k) {
    if (ladder[k] <= ladder[k - 1]) throw ConfigError("converge.ladder", 0, "ladder must be strictly increasing");
  }
  for (int n : ladder) {
    if (n < 3) throw ConfigError("converge.ladder", 0, "every rung must be >= 3");
  }
  if (!cfg.oracle_enabled) throw ConfigError("oracle.enabled", 0, "a convergence study needs the oracle");

  double c = 0.0;
  if (cfg.converge.dt_factor) {
    c = *cfg.converge.dt_factor;
  } else {
    const double sup = sup_norm_estimate(cfg.field, cfg.domain);
    c = sup > 0.0 ? 0.5 / sup : 0.5;
  }

  auto rung = [&](int n, unsigned oracle_threads) {
    RungResult r;
    r.resolution = n;
    const std::vector<int> res{n};
    r.h = build_grid(cfg.domain, res).mesh_size();
    r.dt = c * r.h;
    RunOptions opt;
    opt.resolution = n;
    opt.dt = r.dt;
    opt.threads = oracle_threads;
    ScenarioRun run = execute(cfg, opt);
    r.report = run.report;
    r.report.threads = threads;
    r.oracle_l2_error = run.report.oracle_l2_error;
    r.born_l1_error = run.report.born_l1_error;
    r.green_residual = run.report.green_residual;
    r.duality_residual = run.report.duality_residual;
    r.oracle_exit_count = run.report.oracle_exit_count;
    if (cfg.field.divergence_free()) {
      r.hamiltonian_discrepancy = hamiltonian_discrepancy(*run.generator, *run.koopman, run.grid, run.initial.psi);
    }
    return r;
  };

  ConvergenceStudy study;
  if (threads > 1) {
    // Rungs are independent; each gets its own copy of everything it touches.
    std::vector<std::future<RungResult>> jobs;
    for (int n : ladder) jobs.push_back(std::async(std::launch::async, rung, n, 1u));
    for (auto& j : jobs) study.rungs.push_back(j.get());
  } else {
    for (int n : ladder) study.rungs.push_back(rung(n, 1u));
  }

  auto order_of = [&](const std::string& name, auto get) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : study.rungs) {
      const std::optional<double> e = get(r);
      if (!e) return;
      pts.emplace_back(r.h, *e);
    }
    study.orders.emplace_back(name, measure_order(pts));
  };
  order_of("oracle_l2_error", [](const RungResult& r) { return r.oracle_l2_error; });
  order_of("born_l1_error", [](const RungResult& r) { return r.born_l1_error; });
  order_of("green_residual", [](const RungResult& r) { return std::optional<double>(r.green_residual); });
  order_of("duality_residual", [](const RungResult& r) { return std::optional<double>(r.duality_residual); });
  order_of("hamiltonian_discrepancy", [](const RungResult& r) { return r.hamiltonian_discrepancy; });

  const auto& bands = cfg.converge;
  for (const auto& [name, o] : study.orders) {
    if (o.exact) continue;
    if (name == "oracle_l2_error" && (o.order < bands.order_min || o.order > bands.order_max)) {
      study.failures.push_back("order.oracle_l2_error=" + fmt(o.order) + " outside [" + fmt(bands.order_min) + ", " +
                               fmt(bands.order_max) + "]");
    }
    if (name == "born_l1_error" && o.order < bands.born_order_min) {
      study.failures.push_back("order.born_l1_error=" + fmt(o.order) + " below " + fmt(bands.born_order_min));
    }
  }
  for (const auto& r : study.rungs) {
    for (const auto& f : r.report.failures) study.failures.push_back("rung " + std::to_string(r.resolution) + ": " + f);
  }
  return study;
}

std::string convergence_csv(const ConvergenceStudy& study) {
  std::string s =
      "resolution,h,dt,oracle_l2_error,born_l1_error,green_residual,duality_residual,hamiltonian_discrepancy,"
      "oracle_exit_count\n";
  for (const auto& r : study.rungs) {
    s += std::to_string(r.resolution) + ',' + fmt(r.h) + ',' + fmt(r.dt) + ',' + fmt(r.oracle_l2_error) + ',' +
         fmt(r.born_l1_error) + ',' + fmt(r.green_residual) + ',' + fmt(r.duality_residual) + ',' +
         fmt(r.hamiltonian_discrepancy) + ',' + std::to_string(r.oracle_exit_count) + '\n';
  }
  return s;
}

std::string orders_csv(const ConvergenceStudy& study, const ConvergeConfig& bands) {
  std::string s = "quantity,order,band\n";
  for (const auto& [name, o] : study.orders) {
    std::string band = "reported";
    if (name == "oracle_l2_error") band = "[" + fmt(bands.order_min) + ", " + fmt(bands.order_max) + "]";
    if (name == "born_l1_error") band = ">= " + fmt(bands.born_order_min);
    s += name + ',' + o.str() + ',' + band + '\n';
  }
  return s;
}

namespace {

void warn_outflow(const VerificationReport& r, std::ostream& err) {
  if (r.no_outflow_ok) return;
  err << "WARNING: no-outflow condition violated on " << r.no_outflow_violations.size()
      << " boundary face(s), max F.nu = " << fmt(r.max_outflow) << "; faces:";
  for (const auto& v : r.no_outflow_violations) err << ' ' << v.face;
  err << '\n';
}

/// Maps the exceptions of the pipeline onto exit codes.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const PropagatorError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  }
}

std::string operator_text(const SparseOperator& op) {
  std::ostringstream os;
  write_coordinate(os, op);
  return os.str();
}

}  // namespace

int run_command(const std::filesystem::path& config, const std::optional<std::filesystem::path>& out_dir,
                std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ScenarioConfig cfg = load_config(config);
    RunOptions opt;
    opt.threads = thread_count_from_env();
    const ScenarioRun run = execute(cfg, opt);
    warn_outflow(run.report, err);

    const auto dir = out_dir.value_or(cfg.output_dir);
    // Everything is computed before the first file is written.
    std::vector<std::pair<std::filesystem::path, std::string>> files;
    files.emplace_back(dir / "series.kvnf", encode_series(*run.propagation, run.grid.size(), run.grid.dim()));
    files.emplace_back(dir / "norms.csv", norm_csv(*run.propagation));
    files.emplace_back(dir / "classification.csv", classification_csv(run.grid, run.classification));
    if (run.trajectory) files.emplace_back(dir / "trajectory.csv", trajectory_csv(*run.trajectory, run.grid.dim()));
    if (cfg.export_operators) {
      files.emplace_back(dir / "pf_generator.coo", operator_text(*run.pf_generator));
      files.emplace_back(dir / "koopman_generator.coo", operator_text(*run.koopman));
      files.emplace_back(dir / "kvn_generator.coo", operator_text(*run.generator));
    }
    const std::string report = serialize(run.report);
    files.emplace_back(dir / "report.txt", report);
    for (const auto& [path, bytes] : files) write_atomic(path, bytes);

    out << report;
    return run.report.passed() ? kExitPass : kExitFail;
  });
}

int converge_command(const std::filesystem::path& config, const std::optional<std::vector<int>>& ladder,
                     const std::optional<std::filesystem::path>& out_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ScenarioConfig cfg = load_config(config);
    const unsigned threads = thread_count_from_env();
    const std::vector<int> rungs = ladder.value_or(cfg.converge.ladder);
    const ConvergenceStudy study = converge(cfg, rungs, threads);
    warn_outflow(study.rungs.back().report, err);

    VerificationReport report = study.rungs.back().report;
    report.convergence_orders = study.orders;
    report.failures = study.failures;

    const auto dir = out_dir.value_or(cfg.output_dir);
    const std::string table = orders_csv(study, cfg.converge);
    write_atomic(dir / "convergence.csv", convergence_csv(study));
    write_atomic(dir / "orders.csv", table);
    write_atomic(dir / "convergence_report.txt", serialize(report));

    out << convergence_csv(study) << '\n' << table;
    for (const auto& f : study.failures) err << "FAIL: " << f << '\n';
    return study.failures.empty() ? kExitPass : kExitFail;
  });
}

int check_command(const std::filesystem::path& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ScenarioConfig cfg = load_config(config);
    RunOptions opt;
    opt.threads = thread_count_from_env();
    opt.propagate = false;
    const ScenarioRun run = execute(cfg, opt);
    warn_outflow(run.report, err);
    out << serialize(run.report);
    // A no-outflow violation is reported, not fatal.
    return run.report.passed() ? kExitPass : kExitFail;
  });
}

}  // namespace kvn
