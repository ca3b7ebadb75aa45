#include "kvn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "kvn/semiflow.hpp"

namespace kvn {

double default_oracle_dt(double pde_dt) { return std::min(1e-3, pde_dt / 10.0); }

namespace {

struct Foot {
  Vec point{};
  /// Integral of div(-F) along the backward path, i.e. -int_0^t div F(y(s)) ds.
  double backward_divergence = 0.0;
  bool exited = false;
};

std::vector<Foot> trace_feet(const VectorField& field, const Grid& grid, double t, double dt_ode, unsigned threads) {
  const std::size_t n = grid.size();
  std::vector<Foot> feet(n);
  const auto centers = grid.centers();
  const FlowOptions opts{FlowDirection::backward, false};
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const Trajectory tr = integrate(field, grid.domain(), centers[c], t, dt_ode, opts);
      feet[c] = {tr.states.back(), tr.divergence_integral.back(), tr.exited};
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    work(0, n);
    return feet;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned k = 0; k < threads; ++k) {
    const std::size_t begin = std::min(n, k * chunk);
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back(work, begin, end);
  }
  for (auto& th : pool) th.join();
  return feet;
}

}  // namespace

KvnOracle characteristics_oracle_kvn(const VectorField& field, const Grid& grid, const ComplexFunction& psi0,
                                     double t, double dt_ode, unsigned threads) {
  KvnOracle out;
  out.psi.assign(grid.size(), Complex{0.0, 0.0});
  out.exited.assign(grid.size(), 0);
  const auto feet = trace_feet(field, grid, t, dt_ode, threads);
  for (std::size_t c = 0; c < feet.size(); ++c) {
    if (feet[c].exited) {
      out.exited[c] = 1;
      ++out.exit_count;
      continue;
    }
    out.psi[c] = psi0(feet[c].point) * std::exp(0.5 * feet[c].backward_divergence);
  }
  return out;
}

LiouvilleOracle characteristics_oracle_liouville(const VectorField& field, const Grid& grid, const RealFunction& rho0,
                                                 double t, double dt_ode, unsigned threads) {
  LiouvilleOracle out;
  out.rho.assign(grid.size(), 0.0);
  out.exited.assign(grid.size(), 0);
  const auto feet = trace_feet(field, grid, t, dt_ode, threads);
  for (std::size_t c = 0; c < feet.size(); ++c) {
    if (feet[c].exited) {
      out.exited[c] = 1;
      ++out.exit_count;
      continue;
    }
    out.rho[c] = rho0(feet[c].point) * std::exp(feet[c].backward_divergence);
  }
  return out;
}

}  // namespace kvn
