#ifndef KVN_OPERATORS_HPP
#define KVN_OPERATORS_HPP

#include "kvn/fields.hpp"
#include "kvn/geometry.hpp"
#include "kvn/sparse_operator.hpp"

namespace kvn {

/// Finite-volume discretisation of rho -> -div(rho F) with centred face
/// fluxes and zero flux through every boundary face.
SparseOperator assemble_pf_generator(const VectorField& field, const Grid& grid);

/// Centred differences for f -> F . grad f; one-sided differences where a
/// neighbour is missing.
SparseOperator assemble_koopman_generator(const VectorField& field, const Grid& grid);

/// Skew part of the Perron-Frobenius generator in <.,.>_w:
/// A = (M - M^{+w}) / 2. Skew-symmetric up to rounding of a single division.
SparseOperator assemble_kvn_generator(const VectorField& field, const Grid& grid);

/// (M - M^{+w}) / 2 for an arbitrary operator.
SparseOperator weighted_skew_part(const SparseOperator& op);

/// D_h(u F) = -(M u) with M the Perron-Frobenius generator.
ComplexField flux_divergence(const SparseOperator& pf_generator, std::span<const Complex> u);
RealField flux_divergence(const SparseOperator& pf_generator, std::span<const double> u);

/// sqrt(||psi||_w^2 + ||D_h(psi F)||_w^2)
double pfs_norm(std::span<const Complex> psi, const VectorField& field, const Grid& grid);
double pfs_norm(std::span<const Complex> psi, const SparseOperator& pf_generator);

/// max_j |sum_i w_i M_ij|
double mass_conservation_defect(const SparseOperator& op);

/// Discrete counterpart of the boundary integral of psi phi F.nu, built from
/// the fluxes recorded by the closure.
double boundary_flux_term(const SparseOperator& op, std::span<const double> psi, std::span<const double> phi);

/// max over boundary faces of |recorded flux applied to u|.
double boundary_flux_max(const SparseOperator& op, std::span<const Complex> u);

}  // namespace kvn

#endif  // KVN_OPERATORS_HPP
