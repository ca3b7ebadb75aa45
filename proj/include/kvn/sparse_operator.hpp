#ifndef KVN_SPARSE_OPERATOR_HPP
#define KVN_SPARSE_OPERATOR_HPP

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

namespace kvn {

using Complex = std::complex<double>;
/// Complex grid function, one value per active cell.
using ComplexField = std::vector<Complex>;
/// Real grid function (densities, observables), one value per active cell.
using RealField = std::vector<double>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// <u, v>_w = sum_i w_i conj(u_i) v_i
Complex inner(std::span<const Complex> u, std::span<const Complex> v, std::span<const double> w);
double inner(std::span<const double> u, std::span<const double> v, std::span<const double> w);
double weighted_norm(std::span<const Complex> u, std::span<const double> w);
double weighted_norm(std::span<const double> u, std::span<const double> w);
double weighted_l1(std::span<const double> u, std::span<const double> w);

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

/// Flux through one boundary face as imposed by the closure: coeff * u[cell].
struct BoundaryFlux {
  std::size_t face = 0;
  std::size_t cell = 0;
  double coeff = 0.0;
};

/// Real sparse matrix in compressed-row form with the cell weights that
/// define the inner product it is meant to act in.
class SparseOperator {
 public:
  SparseOperator() = default;
  /// Sorts row-major, sums duplicate (row, col) pairs and drops exact zeros.
  SparseOperator(std::size_t n, std::vector<double> weights, std::vector<Triplet> triplets);

  std::size_t size() const { return n_; }
  std::size_t nnz() const { return values_.size(); }
  std::span<const double> weights() const { return weights_; }
  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> cols() const { return cols_; }
  std::span<const double> values() const { return values_; }
  std::vector<Triplet> triplets() const;

  /// Stored entry or 0.
  double coeff(std::size_t row, std::size_t col) const;

  void multiply(std::span<const double> x, std::span<double> y) const;
  void multiply(std::span<const Complex> x, std::span<Complex> y) const;

  double max_abs_row_sum() const;

  std::span<const BoundaryFlux> boundary_fluxes() const { return boundary_fluxes_; }
  void set_boundary_fluxes(std::vector<BoundaryFlux> fluxes) { boundary_fluxes_ = std::move(fluxes); }

 private:
  std::size_t n_ = 0;
  std::vector<double> weights_;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> cols_;
  std::vector<double> values_;
  std::vector<BoundaryFlux> boundary_fluxes_;
};

/// Real operator applied to real and imaginary parts separately.
ComplexField apply(const SparseOperator& op, std::span<const Complex> in);
RealField apply(const SparseOperator& op, std::span<const double> in);

/// max over stored entries of |w_i A_ij + w_j A_ji|, normalised by max |w_i A_ij|.
double skewness_defect(const SparseOperator& op);

/// Adjoint under <.,.>_w: (M^{+w})_ij = w_j M_ji / w_i.
SparseOperator weighted_adjoint(const SparseOperator& op);

/// Coordinate-format text, one "row col value" line per entry, 17 significant digits.
void write_coordinate(std::ostream& os, const SparseOperator& op);

}  // namespace kvn

#endif  // KVN_SPARSE_OPERATOR_HPP
