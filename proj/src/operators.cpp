#include "kvn/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kvn {

namespace {

std::vector<double> grid_weights(const Grid& grid) { return {grid.volumes().begin(), grid.volumes().end()}; }

void check_dims(const VectorField& field, const Grid& grid) {
  if (field.dim() != grid.dim()) {
    throw DimensionError("field dimension " + std::to_string(field.dim()) + " does not match grid dimension " +
                         std::to_string(grid.dim()));
  }
}

}  // namespace

SparseOperator assemble_pf_generator(const VectorField& field, const Grid& grid) {
  check_dims(field, grid);
  const auto w = grid.volumes();
  std::vector<Triplet> t;
  t.reserve(4 * grid.interior_faces().size());
  for (const auto& f : grid.interior_faces()) {
    // Outward flux of cell `lower` through the face is a * u * (rho_lower + rho_upper) / 2.
    const double u = field.value(f.centroid)[f.axis];
    const double flux = 0.5 * f.area * u;
    t.push_back({f.lower, f.lower, -flux / w[f.lower]});
    t.push_back({f.lower, f.upper, -flux / w[f.lower]});
    t.push_back({f.upper, f.lower, flux / w[f.upper]});
    t.push_back({f.upper, f.upper, flux / w[f.upper]});
  }
  SparseOperator op(grid.size(), grid_weights(grid), std::move(t));

  // Zero-flux closure: psi F.nu = 0 on every boundary face.
  std::vector<BoundaryFlux> closure;
  closure.reserve(grid.boundary_faces().size());
  const auto faces = grid.boundary_faces();
  for (std::size_t k = 0; k < faces.size(); ++k) closure.push_back({k, faces[k].cell, 0.0});
  op.set_boundary_fluxes(std::move(closure));
  return op;
}

SparseOperator assemble_koopman_generator(const VectorField& field, const Grid& grid) {
  check_dims(field, grid);
  const auto centers = grid.centers();
  std::vector<Triplet> t;
  t.reserve(3 * grid.size() * grid.dim());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const Vec fc = field.value(centers[c]);
    for (int a = 0; a < grid.dim(); ++a) {
      if (fc[a] == 0.0) continue;
      const double h = grid.spacing()[a];
      const auto lo = grid.neighbor(c, a, -1);
      const auto hi = grid.neighbor(c, a, +1);
      if (lo && hi) {
        t.push_back({c, *hi, fc[a] / (2.0 * h)});
        t.push_back({c, *lo, -fc[a] / (2.0 * h)});
      } else if (hi) {
        t.push_back({c, *hi, fc[a] / h});
        t.push_back({c, c, -fc[a] / h});
      } else if (lo) {
        t.push_back({c, c, fc[a] / h});
        t.push_back({c, *lo, -fc[a] / h});
      }
    }
  }
  return SparseOperator(grid.size(), grid_weights(grid), std::move(t));
}

SparseOperator weighted_skew_part(const SparseOperator& op) {
  const auto w = op.weights();
  // Build S = W A, which is exactly antisymmetric, then scale rows by 1/w_i.
  std::vector<Triplet> s;
  s.reserve(2 * op.nnz());
  for (const auto& e : op.triplets()) {
    const double half = 0.5 * w[e.row] * e.value;
    s.push_back({e.row, e.col, half});
    s.push_back({e.col, e.row, -half});
  }
  SparseOperator skew(op.size(), {w.begin(), w.end()}, std::move(s));
  std::vector<Triplet> a = skew.triplets();
  for (auto& e : a) e.value /= w[e.row];
  SparseOperator out(op.size(), {w.begin(), w.end()}, std::move(a));
  out.set_boundary_fluxes({op.boundary_fluxes().begin(), op.boundary_fluxes().end()});
  return out;
}

SparseOperator assemble_kvn_generator(const VectorField& field, const Grid& grid) {
  return weighted_skew_part(assemble_pf_generator(field, grid));
}

ComplexField flux_divergence(const SparseOperator& pf_generator, std::span<const Complex> u) {
  ComplexField out = kvn::apply(pf_generator, u);
  for (auto& v : out) v = -v;
  return out;
}

RealField flux_divergence(const SparseOperator& pf_generator, std::span<const double> u) {
  RealField out = kvn::apply(pf_generator, u);
  for (auto& v : out) v = -v;
  return out;
}

double pfs_norm(std::span<const Complex> psi, const SparseOperator& pf_generator) {
  const auto w = pf_generator.weights();
  const double a = weighted_norm(psi, w);
  const double b = weighted_norm(flux_divergence(pf_generator, psi), w);
  return std::sqrt(a * a + b * b);
}

double pfs_norm(std::span<const Complex> psi, const VectorField& field, const Grid& grid) {
  return pfs_norm(psi, assemble_pf_generator(field, grid));
}

double mass_conservation_defect(const SparseOperator& op) {
  const auto w = op.weights();
  std::vector<double> colsum(op.size(), 0.0);
  for (const auto& e : op.triplets()) colsum[e.col] += w[e.row] * e.value;
  double best = 0.0;
  for (double s : colsum) best = std::max(best, std::abs(s));
  return best;
}

double boundary_flux_term(const SparseOperator& op, std::span<const double> psi, std::span<const double> phi) {
  double s = 0.0;
  for (const auto& b : op.boundary_fluxes()) s += b.coeff * psi[b.cell] * phi[b.cell];
  return s;
}

double boundary_flux_max(const SparseOperator& op, std::span<const Complex> u) {
  double best = 0.0;
  for (const auto& b : op.boundary_fluxes()) best = std::max(best, std::abs(b.coeff * u[b.cell]));
  return best;
}

}  // namespace kvn
