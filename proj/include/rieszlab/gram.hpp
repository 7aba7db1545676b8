#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "rieszlab/errors.hpp"
#include "rieszlab/kernels.hpp"
#include "rieszlab/weights.hpp"

namespace rieszlab {

/// span{e_k : lo <= k <= hi}, e_k(theta) = e^{i k theta}.
struct BasisRange {
  int lo = 0;
  int hi = 0;

  BasisRange(int lo_, int hi_) : lo(lo_), hi(hi_) {
    if (hi < lo) throw DomainError("basis range must satisfy lo <= hi");
  }
  std::size_t size() const { return static_cast<std::size_t>(hi - lo + 1); }
  bool operator==(const BasisRange&) const = default;
};

/// Entries (e_{row_j}, e_{col_k}) in L2(w), i.e. w^(col_k - row_j).
struct GramBlock {
  BasisRange rows;
  BasisRange cols;
  Matrix matrix;

  bool square() const { return rows == cols; }

  HermitianMatrix hermitian() const {
    if (!square()) throw DomainError("only a diagonal Gram block is Hermitian");
    return HermitianMatrix(matrix);
  }
};

inline GramBlock build_gram(const FourierTable& ft, BasisRange rows, BasisRange cols) {
  const int gap = std::max(std::abs(cols.hi - rows.lo), std::abs(cols.lo - rows.hi));
  if (gap > ft.K())
    throw InsufficientCoefficients("Gram block needs |index gap| up to " + std::to_string(gap) + " but K = " +
                                   std::to_string(ft.K()));
  Matrix m(rows.size(), cols.size());
  for (std::size_t j = 0; j < rows.size(); ++j)
    for (std::size_t k = 0; k < cols.size(); ++k)
      m(j, k) = ft(cols.lo + static_cast<int>(k) - (rows.lo + static_cast<int>(j)));
  return {rows, cols, std::move(m)};
}

/// L2(w) norm of sum_k x_k e_{lo+k}, i.e. sqrt(sum_{j,k} x_j conj(x_k) G_jk).
/// For even weights G is real symmetric and this is sqrt(x* G x).
inline double weighted_norm(std::span<const cplx> x, const GramBlock& g, double tol = 1e-12) {
  if (!g.square()) throw DomainError("weighted_norm needs a square Gram block");
  if (x.size() != g.rows.size()) throw DomainError("coefficient vector and Gram block differ in size");
  cplx q = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    cplx acc = 0.0;
    auto gj = g.matrix.row(j);
    for (std::size_t k = 0; k < x.size(); ++k) acc += gj[k] * std::conj(x[k]);
    q += x[j] * acc;
  }
  const double xx = std::pow(norm2(x), 2);
  if (q.real() < -tol * g.matrix.max_abs() * xx)
    throw NegativeQuadraticForm("Gram quadratic form is negative: " + std::to_string(q.real()));
  return std::sqrt(std::max(q.real(), 0.0));
}

}  // namespace rieszlab
