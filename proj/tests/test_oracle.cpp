#include <doctest.h>

#include <cmath>

#include "kvn/diagnostics.hpp"
#include "kvn/oracle.hpp"

using namespace kvn;

namespace {

Grid grid1(const Domain& d, int n) {
  const std::vector<int> r{n};
  return build_grid(d, r);
}

Complex bump(const Vec& x, double c, double s) { return std::exp(-std::pow(x[0] - c, 2) / (2 * s * s)); }

}  // namespace

TEST_CASE("zero field returns the initial data") {
  const Grid g = grid1(Domain::interval(0, 1), 50);
  const ComplexFunction psi0 = [](const Vec& x) { return Complex(std::sin(3 * x[0]), x[0]); };
  const KvnOracle o = characteristics_oracle_kvn(VectorField::zero(1), g, psi0, 0.7, 1e-3);
  const LiouvilleOracle r = characteristics_oracle_liouville(VectorField::zero(1), g,
                                                             [](const Vec& x) { return 1 + x[0]; }, 0.7, 1e-3);
  for (std::size_t c = 0; c < g.size(); ++c) {
    CHECK(o.psi[c] == psi0(g.centers()[c]));
    CHECK(r.rho[c] == 1 + g.centers()[c][0]);
  }
  CHECK(o.exit_count == 0);
}

TEST_CASE("contraction F = -x against the closed form") {
  const Domain d = Domain::interval(-1, 1);
  const Grid g = grid1(d, 2048);
  const VectorField f = VectorField::linear({-1.0}, 1);
  const ComplexFunction psi0 = [](const Vec& x) { return bump(x, 0.3, 0.2); };
  const KvnOracle o = characteristics_oracle_kvn(f, g, psi0, 1.0, 1e-3);
  const double e = std::exp(1.0);
  double m = 0;
  std::size_t exits = 0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const double x = g.centers()[c][0];
    if (std::abs(x * e) > 1.0) {
      ++exits;
      CHECK(o.psi[c] == Complex(0, 0));
      CHECK(o.exited[c] == 1);
      continue;
    }
    m = std::max(m, std::abs(o.psi[c] - psi0({x * e, 0, 0}) * std::sqrt(e)));
  }
  CHECK(m <= 1e-10);
  CHECK(o.exit_count == exits);
  // Norm over [-1, 1] of psi0 equals the norm of the transported state.
  const ComplexField s0 = sample(g, psi0);
  CHECK(std::abs(weighted_norm(o.psi, g.volumes()) - weighted_norm(s0, g.volumes())) <= 1e-6);

  const RealFunction rho0 = [&](const Vec& x) { return std::norm(psi0(x)); };
  const LiouvilleOracle r = characteristics_oracle_liouville(f, g, rho0, 1.0, 1e-3);
  double mass0 = 0, mass1 = 0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    mass0 += g.volumes()[c] * rho0(g.centers()[c]);
    mass1 += g.volumes()[c] * r.rho[c];
    if (!r.exited[c]) CHECK(r.rho[c] == doctest::Approx(rho0({g.centers()[c][0] * e, 0, 0}) * e).epsilon(1e-9));
  }
  CHECK(std::abs(mass1 - mass0) <= 1e-6);
}

TEST_CASE("rotation transports rigidly") {
  const Domain d = Domain::disk({0, 0, 0}, 1.0);
  const Grid g = grid1(d, 48);
  const double t = 1.3;
  const ComplexFunction psi0 = [](const Vec& x) {
    return std::exp(-((x[0] - 0.4) * (x[0] - 0.4) + x[1] * x[1]) / 0.045) * Complex(std::cos(x[1]), std::sin(x[1]));
  };
  const KvnOracle o = characteristics_oracle_kvn(VectorField::rotation(), g, psi0, t, 1e-3);
  CHECK(o.exit_count == 0);
  double m = 0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const Vec& x = g.centers()[c];
    const Vec back{std::cos(t) * x[0] + std::sin(t) * x[1], -std::sin(t) * x[0] + std::cos(t) * x[1], 0};
    m = std::max(m, std::abs(o.psi[c] - psi0(back)));
  }
  CHECK(m <= 1e-10);
  const RealFunction rho0 = [&](const Vec& x) { return std::norm(psi0(x)); };
  const LiouvilleOracle r = characteristics_oracle_liouville(VectorField::rotation(), g, rho0, t, 1e-3);
  double mass0 = 0, mass1 = 0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    mass0 += g.volumes()[c] * rho0(g.centers()[c]);
    mass1 += g.volumes()[c] * r.rho[c];
  }
  CHECK(mass1 == doctest::Approx(mass0).epsilon(1e-3));
}

TEST_CASE("squared KvN oracle equals the Liouville oracle") {
  const Grid g = grid1(Domain::interval(0, 1), 200);
  const ComplexFunction psi0 = [](const Vec& x) { return bump(x, 0.5, 0.05) * Complex(1, 2 * x[0]); };
  const RealFunction rho0 = [&](const Vec& x) { return std::norm(psi0(x)); };
  const KvnOracle o = characteristics_oracle_kvn(VectorField::logistic1d(), g, psi0, 0.5, 1e-3);
  const LiouvilleOracle r = characteristics_oracle_liouville(VectorField::logistic1d(), g, rho0, 0.5, 1e-3);
  for (std::size_t c = 0; c < g.size(); ++c) CHECK(std::abs(std::norm(o.psi[c]) - r.rho[c]) <= 1e-12);
}

TEST_CASE("threaded oracle is bitwise identical to the serial one") {
  const Grid g = grid1(Domain::disk({0, 0, 0}, 1.0), 40);
  const ComplexFunction psi0 = [](const Vec& x) { return Complex(std::exp(-x[0] * x[0] * 8), x[1]); };
  const VectorField f = VectorField::linear({-0.5, 1, -1, -0.2}, 2);
  const KvnOracle a = characteristics_oracle_kvn(f, g, psi0, 0.8, 1e-3, 1);
  const KvnOracle b = characteristics_oracle_kvn(f, g, psi0, 0.8, 1e-3, 3);
  CHECK(a.psi == b.psi);
  CHECK(a.exited == b.exited);
}

TEST_CASE("default oracle step") {
  CHECK(default_oracle_dt(1e-3) == doctest::Approx(1e-4));
  CHECK(default_oracle_dt(0.5) == 1e-3);
}
