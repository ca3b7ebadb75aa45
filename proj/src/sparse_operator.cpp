#include "kvn/sparse_operator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace kvn {

namespace {

void check_sizes(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": size mismatch (" + std::to_string(a) + " vs " + std::to_string(b) +
                         ")");
  }
}

}  // namespace

Complex inner(std::span<const Complex> u, std::span<const Complex> v, std::span<const double> w) {
  check_sizes(u.size(), v.size(), "inner");
  check_sizes(u.size(), w.size(), "inner");
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * std::conj(u[i]) * v[i];
  return s;
}

double inner(std::span<const double> u, std::span<const double> v, std::span<const double> w) {
  check_sizes(u.size(), v.size(), "inner");
  check_sizes(u.size(), w.size(), "inner");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * u[i] * v[i];
  return s;
}

double weighted_norm(std::span<const Complex> u, std::span<const double> w) {
  check_sizes(u.size(), w.size(), "weighted_norm");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * std::norm(u[i]);
  return std::sqrt(s);
}

double weighted_norm(std::span<const double> u, std::span<const double> w) { return std::sqrt(inner(u, u, w)); }

double weighted_l1(std::span<const double> u, std::span<const double> w) {
  check_sizes(u.size(), w.size(), "weighted_l1");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * std::abs(u[i]);
  return s;
}

SparseOperator::SparseOperator(std::size_t n, std::vector<double> weights, std::vector<Triplet> triplets)
    : n_(n), weights_(std::move(weights)) {
  check_sizes(weights_.size(), n, "SparseOperator weights");
  for (double w : weights_) {
    if (!(w > 0.0)) throw DimensionError("SparseOperator weights must be positive");
  }
  for (const auto& t : triplets) {
    if (t.row >= n || t.col >= n) throw DimensionError("SparseOperator triplet index out of range");
  }
  std::stable_sort(triplets.begin(), triplets.end(),
                   [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });

  row_ptr_.assign(n + 1, 0);
  std::size_t k = 0;
  while (k < triplets.size()) {
    const std::size_t r = triplets[k].row;
    const std::size_t c = triplets[k].col;
    double v = 0.0;
    for (; k < triplets.size() && triplets[k].row == r && triplets[k].col == c; ++k) v += triplets[k].value;
    if (v == 0.0) continue;
    cols_.push_back(c);
    values_.push_back(v);
    ++row_ptr_[r + 1];
  }
  for (std::size_t r = 0; r < n; ++r) row_ptr_[r + 1] += row_ptr_[r];
}

std::vector<Triplet> SparseOperator::triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (std::size_t r = 0; r < n_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) out.push_back({r, cols_[k], values_[k]});
  }
  return out;
}

double SparseOperator::coeff(std::size_t row, std::size_t col) const {
  const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
  const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

void SparseOperator::multiply(std::span<const double> x, std::span<double> y) const {
  check_sizes(x.size(), n_, "multiply");
  check_sizes(y.size(), n_, "multiply");
  for (std::size_t r = 0; r < n_; ++r) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += values_[k] * x[cols_[k]];
    y[r] = s;
  }
}

void SparseOperator::multiply(std::span<const Complex> x, std::span<Complex> y) const {
  check_sizes(x.size(), n_, "multiply");
  check_sizes(y.size(), n_, "multiply");
  for (std::size_t r = 0; r < n_; ++r) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      re += values_[k] * x[cols_[k]].real();
      im += values_[k] * x[cols_[k]].imag();
    }
    y[r] = {re, im};
  }
}

double SparseOperator::max_abs_row_sum() const {
  double best = 0.0;
  for (std::size_t r = 0; r < n_; ++r) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += std::abs(values_[k]);
    best = std::max(best, s);
  }
  return best;
}

ComplexField apply(const SparseOperator& op, std::span<const Complex> in) {
  ComplexField out(in.size());
  op.multiply(in, out);
  return out;
}

RealField apply(const SparseOperator& op, std::span<const double> in) {
  RealField out(in.size());
  op.multiply(in, out);
  return out;
}

double skewness_defect(const SparseOperator& op) {
  const auto w = op.weights();
  double scale = 0.0;
  double defect = 0.0;
  const auto rp = op.row_ptr();
  const auto cols = op.cols();
  const auto vals = op.values();
  for (std::size_t i = 0; i < op.size(); ++i) {
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      const std::size_t j = cols[k];
      scale = std::max(scale, std::abs(w[i] * vals[k]));
      defect = std::max(defect, std::abs(w[i] * vals[k] + w[j] * op.coeff(j, i)));
    }
  }
  return scale > 0.0 ? defect / scale : 0.0;
}

SparseOperator weighted_adjoint(const SparseOperator& op) {
  const auto w = op.weights();
  std::vector<Triplet> t = op.triplets();
  for (auto& e : t) {
    const double v = w[e.row] * e.value / w[e.col];
    e = {e.col, e.row, v};
  }
  return SparseOperator(op.size(), {w.begin(), w.end()}, std::move(t));
}

void write_coordinate(std::ostream& os, const SparseOperator& op) {
  char buf[96];
  for (const auto& t : op.triplets()) {
    std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", t.row, t.col, t.value);
    os << buf;
  }
}

}  // namespace kvn
