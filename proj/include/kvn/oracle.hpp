#ifndef KVN_ORACLE_HPP
#define KVN_ORACLE_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "kvn/fields.hpp"
#include "kvn/geometry.hpp"
#include "kvn/sparse_operator.hpp"

namespace kvn {

using ComplexFunction = std::function<Complex(const Vec&)>;
using RealFunction = std::function<double(const Vec&)>;

/// Method-of-characteristics reference solutions. Each cell centre is traced
/// backwards along x' = -F(x) for time t; cells whose backward path leaves the
/// closed domain are fed from the (zero) inflow boundary, receive 0 and are flagged.
struct KvnOracle {
  ComplexField psi;
  std::vector<std::uint8_t> exited;
  std::size_t exit_count = 0;
};

struct LiouvilleOracle {
  RealField rho;
  std::vector<std::uint8_t> exited;
  std::size_t exit_count = 0;
};

/// psi(t, x) = psi0(y) exp(-1/2 int_0^t div F(y(s)) ds), y the backward characteristic from x.
KvnOracle characteristics_oracle_kvn(const VectorField& field, const Grid& grid, const ComplexFunction& psi0,
                                     double t, double dt_ode, unsigned threads = 1);

/// rho(t, x) = rho0(y) exp(-int_0^t div F(y(s)) ds).
LiouvilleOracle characteristics_oracle_liouville(const VectorField& field, const Grid& grid, const RealFunction& rho0,
                                                 double t, double dt_ode, unsigned threads = 1);

/// min(1e-3, dt / 10)
double default_oracle_dt(double pde_dt);

}  // namespace kvn

#endif  // KVN_ORACLE_HPP
