#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "kvn/diagnostics.hpp"
#include "kvn/operators.hpp"

using namespace kvn;

namespace {

using Points = std::vector<std::pair<double, double>>;

std::map<std::string, std::string> parse_report(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

struct ZeroRun {
  VectorField field = VectorField::zero(2);
  Grid grid;
  BoundaryClassification cls;
  SparseOperator pf, koop, gen;
  PropagatorConfig cfg;
  ComplexField psi0;
  Propagation prop;

  ZeroRun()
      : grid(build_grid(Domain::disk({0, 0, 0}, 1.0), std::vector<int>{24})),
        cls(classify_boundary(field, grid)),
        pf(assemble_pf_generator(field, grid)),
        koop(assemble_koopman_generator(field, grid)),
        gen(assemble_kvn_generator(field, grid)),
        psi0(sample(grid, [](const Vec& x) { return Complex(std::exp(-x[0] * x[0] - x[1] * x[1]), 0); })) {
    cfg.dt = 0.05;
    prop = propagate(gen, psi0, 1.0, cfg);
  }

  RunArtifacts artifacts() const {
    RunArtifacts a;
    a.scenario = "zero";
    a.probe_seed = 7;
    a.field = &field;
    a.grid = &grid;
    a.classification = &cls;
    a.pf_generator = &pf;
    a.koopman = &koop;
    a.kvn = &gen;
    a.propagator = &cfg;
    a.psi0 = &psi0;
    a.propagation = &prop;
    return a;
  }
};

}  // namespace

TEST_CASE("measure_order examples") {
  CHECK(measure_order(Points{{0.1, 1e-2}, {0.05, 2.5e-3}}).order == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(measure_order(Points{{0.1, 1e-3}, {0.05, 5e-4}, {0.025, 2.5e-4}}).order == doctest::Approx(1.0).epsilon(1e-12));
  const OrderResult noisy = measure_order(Points{{0.1, 1.1e-2}, {0.05, 2.4e-3}, {0.025, 6.3e-4}});
  CHECK(noisy.order > 1.8);
  CHECK(noisy.order < 2.2);
  const OrderResult exact = measure_order(Points{{0.1, 1e-16}, {0.05, 0.0}});
  CHECK(exact.exact);
  CHECK(exact.str() == "exact");
  CHECK_THROWS_AS(measure_order(Points{{0.1, 1e-3}}), std::invalid_argument);
  CHECK_THROWS_AS(measure_order(Points{{0.05, 1e-3}, {0.1, 1e-4}}), std::invalid_argument);
  CHECK_THROWS_AS(measure_order(Points{{0.1, -1e-3}, {0.05, 1e-4}}), std::invalid_argument);
}

TEST_CASE("verify_run on the zero field") {
  const ZeroRun z;
  const VerificationReport r = verify_run(z.artifacts());
  CHECK(r.passed());
  CHECK(r.skewness_defect <= 1e-12);
  CHECK(r.dissipativity_residual <= 1e-12);
  CHECK(r.green_residual <= 1e-12);
  CHECK(r.duality_residual <= 1e-12);
  CHECK(r.mass_conservation_defect <= 1e-12);
  CHECK(r.boundary_flux_max <= 1e-12);
  REQUIRE(r.norm_drift);
  CHECK(*r.norm_drift <= 1e-12);
  CHECK(r.no_outflow_ok);
  CHECK(r.cells == z.grid.size());
  CHECK_FALSE(r.oracle_l2_error.has_value());
  CHECK_FALSE(r.born_l1_error.has_value());
}

TEST_CASE("missing oracle is absent, not a failure") {
  const ZeroRun z;
  const VerificationReport r = verify_run(z.artifacts());
  const auto kv = parse_report(serialize(r));
  CHECK(kv.at("oracle_l2_error") == "absent");
  CHECK(kv.at("born_l1_error") == "absent");
  CHECK(kv.at("status") == "pass");
}

TEST_CASE("serialization is deterministic and follows the metric table") {
  const ZeroRun z;
  const VerificationReport r = verify_run(z.artifacts());
  const std::string a = serialize(r);
  CHECK(a == serialize(verify_run(z.artifacts())));
  const auto kv = parse_report(a);
  std::set<std::string> names;
  for (const auto& [name, source] : metric_sources()) {
    CAPTURE(name);
    CHECK(names.insert(name).second);
    CHECK_FALSE(source.empty());
    CHECK(kv.count(name) == 1);
  }
  // Every floating metric in the report has a declared source.
  for (const auto& [key, value] : kv) {
    char* end = nullptr;
    std::strtod(value.c_str(), &end);
    const bool real = value == "absent" || (*end == '\0' && value.find_first_of("eE.") != std::string::npos);
    if (real) {
      if (key == "max_outflow") continue;
      CAPTURE(key);
      CHECK(names.count(key) == 1);
    }
  }
}

TEST_CASE("residuals are finite and non-negative") {
  const Grid g = build_grid(Domain::interval(0, 1), std::vector<int>{64});
  const VectorField f = VectorField::logistic1d();
  const SparseOperator m = assemble_pf_generator(f, g);
  const SparseOperator l = assemble_koopman_generator(f, g);
  const auto [psi, phi] = gaussian_probe_pair(g);
  for (double v : {green_residual(f, g, m, psi, phi), duality_residual(l, m, psi, phi),
                   dissipativity_residual(assemble_kvn_generator(f, g), 20, 1)}) {
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
  }
}
