#include <doctest.h>

#include <cmath>

#include "kvn/semiflow.hpp"

using namespace kvn;

namespace {
const Domain kSym = Domain::interval(-1, 1);
const Domain kDisk = Domain::disk({0, 0, 0}, 1.0);
const VectorField kDecay = VectorField::linear({-1.0}, 1);
}  // namespace

TEST_CASE("zero field keeps every point fixed") {
  const Trajectory tr = integrate(VectorField::zero(2), kDisk, {0.3, -0.2, 0}, 1.0, 0.01);
  CHECK(tr.times.front() == 0.0);
  CHECK(tr.times.back() == doctest::Approx(1.0));
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    CHECK(tr.states[k] == Vec{0.3, -0.2, 0});
    CHECK(tr.divergence_integral[k] == 0.0);
  }
}

TEST_CASE("exponential decay against the closed form") {
  const Trajectory tr = integrate(kDecay, kSym, {1.0, 0, 0}, 1.0, 1e-3);
  CHECK(std::abs(tr.states.back()[0] - std::exp(-1.0)) <= 1e-8);
  CHECK(std::abs(tr.divergence_integral.back() + 1.0) <= 1e-8);
  CHECK(tr.states.size() == 1001);
  CHECK(tr.viability_violations == 0);
  CHECK(tr.divergence_integral.front() == 0.0);
}

TEST_CASE("rotation returns after one period") {
  const Trajectory tr = integrate(VectorField::rotation(), kDisk, {1, 0, 0}, 2 * M_PI, 1e-3);
  CHECK(std::hypot(tr.states.back()[0] - 1.0, tr.states.back()[1]) <= 1e-6);
  CHECK(tr.viability_violations == 0);
}

TEST_CASE("flow at time zero is the identity") {
  const Vec x0{0.123456789, 0, 0};
  const Trajectory tr = integrate(kDecay, kSym, x0, 0.0, 1e-3);
  REQUIRE(tr.states.size() == 1);
  CHECK(tr.states.front() == x0);
  CHECK(step_count(0.0, 1e-3) == 0);
}

TEST_CASE("semigroup residuals") {
  CHECK(check_semigroup(VectorField::zero(1), kSym, {0.4, 0, 0}, 0.5, 0.5, 1e-3) == 0.0);
  CHECK(check_semigroup(kDecay, kSym, {1.0, 0, 0}, 0.5, 0.5, 1e-3) <= 1e-10);
  CHECK(check_semigroup(VectorField::rotation(), kDisk, {1, 0, 0}, 1.0, 2.0, 1e-3) <= 1e-8);
}

TEST_CASE("RK4 error drops by about sixteen when dt halves") {
  auto err = [](double dt) {
    return std::abs(integrate(kDecay, kSym, {0.9, 0, 0}, 1.0, dt).states.back()[0] - 0.9 * std::exp(-1.0));
  };
  const double ratio = err(0.1) / err(0.05);
  CHECK(ratio >= 14.0);
  CHECK(ratio <= 18.0);
}

TEST_CASE("last step is shortened when t is not a multiple of dt") {
  CHECK(step_count(1.0, 0.3) == 4);
  CHECK(step_count(0.9, 0.3) == 3);
  const Trajectory tr = integrate(kDecay, kSym, {1.0, 0, 0}, 1.0, 0.3);
  CHECK(tr.times.back() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(tr.states.back()[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-3));
}

TEST_CASE("invalid arguments are rejected") {
  CHECK_THROWS_AS(integrate(kDecay, kSym, {0.5, 0, 0}, 1.0, 0.0), SemiflowError);
  CHECK_THROWS_AS(integrate(kDecay, kSym, {0.5, 0, 0}, 1.0, -1e-3), SemiflowError);
  CHECK_THROWS_AS(integrate(kDecay, kSym, {0.5, 0, 0}, -1.0, 1e-3), SemiflowError);
  CHECK_THROWS_AS(integrate(kDecay, kSym, {1.5, 0, 0}, 1.0, 1e-3), SemiflowError);
  CHECK_NOTHROW(integrate(kDecay, kSym, {1.0, 0, 0}, 1.0, 1e-3));
}

TEST_CASE("viability: no-outflow flows never need projection") {
  const VectorField fields[] = {VectorField::rotation(), VectorField::harmonic_hamiltonian(1.0),
                                VectorField::linear({-1, 0, 0, -1}, 2)};
  for (const auto& f : fields) {
    for (const Vec& x0 : {Vec{0.999, 0, 0}, Vec{0, -1, 0}, Vec{0.6, 0.8, 0}}) {
      const Trajectory tr = integrate(f, kDisk, x0, 3.0, 1e-3, {FlowDirection::forward, false});
      CHECK(tr.viability_violations == 0);
      CHECK(kDisk.distance_outside(tr.states.back()) <= 1e-9 * kDisk.diameter());
    }
  }
  const Trajectory tr = integrate(VectorField::logistic1d(), Domain::interval(0, 1), {1.0, 0, 0}, 2.0, 1e-3);
  CHECK(tr.viability_violations == 0);
}

TEST_CASE("outflow forward paths are projected and counted") {
  const Trajectory tr = integrate(VectorField::linear({1.0}, 1), kSym, {0.5, 0, 0}, 2.0, 1e-3);
  CHECK(tr.viability_violations > 0);
  for (const auto& x : tr.states) CHECK(kSym.distance_outside(x) <= 1e-9 * kSym.diameter());
  CHECK(tr.states.back()[0] == doctest::Approx(1.0));
}

TEST_CASE("backward paths stop when they leave the domain") {
  const Trajectory tr = integrate(kDecay, kSym, {0.5, 0, 0}, 1.0, 1e-3, {FlowDirection::backward, true});
  CHECK(tr.exited);
  CHECK(tr.direction == FlowDirection::backward);
  const Trajectory ok = integrate(kDecay, kSym, {0.2, 0, 0}, 1.0, 1e-3, {FlowDirection::backward, true});
  CHECK_FALSE(ok.exited);
  CHECK(ok.states.back()[0] == doctest::Approx(0.2 * std::exp(1.0)).epsilon(1e-10));
  // Integral of div(-F) = +1 along the backward path.
  CHECK(ok.divergence_integral.back() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("record flag keeps only the end points") {
  const Trajectory tr = integrate(kDecay, kSym, {0.5, 0, 0}, 1.0, 1e-2, {FlowDirection::forward, false});
  CHECK(tr.states.size() == 2);
  CHECK(tr.times.size() == 2);
  const Trajectory full = integrate(kDecay, kSym, {0.5, 0, 0}, 1.0, 1e-2);
  CHECK(full.states.back() == tr.states.back());
}
