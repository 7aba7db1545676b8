#pragma once
//
// Dense complex linear algebra used throughout the library: a row-major
// matrix, a validated Hermitian wrapper, Cholesky factorization with a pivot
// floor, a power-iteration estimate of the largest singular value of any
// operator that can apply itself and its adjoint, and the norm of a diagonal
// multiplier in a Gram inner product.
//
// Everything here is a pure function of its inputs.

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rieszlab/errors.hpp"

namespace rieszlab {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(std::span<const cplx> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  /// Builds from nested rows; every row must have the same length.
  static Matrix from_rows(const std::vector<std::vector<cplx>>& rows) {
    if (rows.empty() || rows.front().empty()) throw DomainError("matrix must be nonempty");
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_) throw DomainError("ragged matrix rows");
      std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<cplx> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const cplx> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  Matrix adjoint() const {
    Matrix a(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) a(c, r) = std::conj((*this)(r, c));
    return a;
  }

  CVector apply(std::span<const cplx> x) const {
    CVector y(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      cplx acc = 0.0;
      const cplx* a = data_.data() + r * cols_;
      for (std::size_t c = 0; c < cols_; ++c) acc += a[c] * x[c];
      y[r] = acc;
    }
    return y;
  }

  CVector apply_adjoint(std::span<const cplx> y) const {
    CVector x(cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
      const cplx yr = y[r];
      const cplx* a = data_.data() + r * cols_;
      for (std::size_t c = 0; c < cols_; ++c) x[c] += std::conj(a[c]) * yr;
    }
    return x;
  }

  double max_abs() const {
    double m = 0.0;
    for (const cplx& v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw DomainError("matrix product dimension mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      auto ci = c.row(i);
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        auto bk = b.row(k);
        for (std::size_t j = 0; j < b.cols_; ++j) ci[j] += aik * bk[j];
      }
    }
    return c;
  }

  friend Matrix operator-(Matrix a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DomainError("matrix difference dimension mismatch");
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

/// A square matrix equal to its own conjugate transpose. Construction checks
/// the symmetry to a relative tolerance and then mirrors the upper triangle so
/// that the stored entries are exactly Hermitian.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(Matrix m, double rel_tol = 1e-12) : m_(std::move(m)) {
    if (!m_.square() || m_.rows() == 0) throw DomainError("Hermitian matrix must be square with dim >= 1");
    const double scale = std::max(m_.max_abs(), 1e-300);
    for (std::size_t j = 0; j < m_.rows(); ++j) {
      if (std::abs(m_(j, j).imag()) > rel_tol * scale) throw DomainError("Hermitian matrix has complex diagonal");
      m_(j, j) = m_(j, j).real();
      for (std::size_t k = j + 1; k < m_.cols(); ++k) {
        if (std::abs(m_(j, k) - std::conj(m_(k, j))) > rel_tol * scale)
          throw DomainError("matrix is not Hermitian");
        m_(k, j) = std::conj(m_(j, k));
      }
    }
  }

  std::size_t dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

  double max_diagonal() const {
    double d = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) d = std::max(d, m_(i, i).real());
    return d;
  }

 private:
  Matrix m_;
};

/// Lower-triangular L with L L* equal to the factored matrix.
class CholeskyFactor {
 public:
  CholeskyFactor(Matrix lower, double pivot_floor, double max_diagonal)
      : l_(std::move(lower)), pivot_floor_(pivot_floor), max_diagonal_(max_diagonal) {}

  std::size_t dim() const { return l_.rows(); }
  const Matrix& lower() const { return l_; }

  /// Smallest pivot (squared diagonal of L) met during elimination.
  double pivot_floor() const { return pivot_floor_; }
  double max_diagonal() const { return max_diagonal_; }
  /// Largest diagonal entry of the source over the pivot floor.
  double cond_estimate() const { return max_diagonal_ / pivot_floor_; }

  /// L v
  CVector multiply_lower(std::span<const cplx> v) const {
    const std::size_t n = dim();
    CVector y(n);
    for (std::size_t i = 0; i < n; ++i) {
      cplx acc = 0.0;
      auto li = l_.row(i);
      for (std::size_t k = 0; k <= i; ++k) acc += li[k] * v[k];
      y[i] = acc;
    }
    return y;
  }

  /// L* v
  CVector multiply_adjoint(std::span<const cplx> v) const {
    const std::size_t n = dim();
    CVector y(n);
    for (std::size_t k = 0; k < n; ++k) {
      auto lk = l_.row(k);
      const cplx vk = v[k];
      for (std::size_t i = 0; i <= k; ++i) y[i] += std::conj(lk[i]) * vk;
    }
    return y;
  }

  /// Solves L y = b by forward substitution.
  CVector solve_lower(std::span<const cplx> b) const {
    const std::size_t n = dim();
    CVector y(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
      auto li = l_.row(i);
      cplx acc = y[i];
      for (std::size_t k = 0; k < i; ++k) acc -= li[k] * y[k];
      y[i] = acc / li[i];
    }
    return y;
  }

  /// Solves L* x = b by back substitution.
  CVector solve_adjoint(std::span<const cplx> b) const {
    const std::size_t n = dim();
    CVector x(b.begin(), b.end());
    for (std::size_t k = n; k-- > 0;) {
      auto lk = l_.row(k);
      x[k] /= std::conj(lk[k]);
      const cplx xk = x[k];
      for (std::size_t i = 0; i < k; ++i) x[i] -= std::conj(lk[i]) * xk;
    }
    return x;
  }

  /// L^{-1} M, column by column.
  Matrix solve_lower(const Matrix& m) const {
    Matrix out(m.rows(), m.cols());
    CVector col(m.rows());
    for (std::size_t c = 0; c < m.cols(); ++c) {
      for (std::size_t r = 0; r < m.rows(); ++r) col[r] = m(r, c);
      CVector y = solve_lower(col);
      for (std::size_t r = 0; r < m.rows(); ++r) out(r, c) = y[r];
    }
    return out;
  }

 private:
  Matrix l_;
  double pivot_floor_;
  double max_diagonal_;
};

/// Cholesky factorization. Throws NotPositiveDefinite when a pivot falls to
/// rel_tol times the largest diagonal entry or below.
inline CholeskyFactor cholesky(const HermitianMatrix& m, double rel_tol = 1e-13) {
  const std::size_t n = m.dim();
  const double max_diag = m.max_diagonal();
  if (!(max_diag > 0.0)) throw NotPositiveDefinite("matrix has no positive diagonal entry");
  const double threshold = rel_tol * max_diag;

  Matrix l(n, n);
  double pivot_floor = max_diag;
  for (std::size_t j = 0; j < n; ++j) {
    auto lj = l.row(j);
    double d = m(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(lj[k]);
    if (!(d > threshold)) {
      throw NotPositiveDefinite("pivot " + std::to_string(d) + " at index " + std::to_string(j) +
                                " is below " + std::to_string(threshold));
    }
    pivot_floor = std::min(pivot_floor, d);
    const double ljj = std::sqrt(d);
    lj[j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      auto li = l.row(i);
      cplx acc = m(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= li[k] * std::conj(lj[k]);
      li[j] = acc / ljj;
    }
  }
  return CholeskyFactor(std::move(l), pivot_floor, max_diag);
}

inline double norm2(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& x : v) s += std::norm(x);
  return std::sqrt(s);
}

/// Anything that maps C^cols -> C^rows and can apply its adjoint.
template <class Op>
concept LinearOperator = requires(const Op& op, std::span<const cplx> v) {
  { op.rows() } -> std::convertible_to<std::size_t>;
  { op.cols() } -> std::convertible_to<std::size_t>;
  { op.apply(v) } -> std::convertible_to<CVector>;
  { op.apply_adjoint(v) } -> std::convertible_to<CVector>;
};

struct PowerIterationOptions {
  double tol = 1e-10;
  std::size_t max_iter = 20000;
};

/// Fixed starting vector: a gentle ramp, normalized. A ramp has components
/// along both symmetric and antisymmetric vectors, which matters for the
/// persymmetric Toeplitz structure that shows up everywhere here.
inline CVector power_iteration_start(std::size_t n) {
  CVector x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = 1.0 + static_cast<double>(k) / static_cast<double>(n);
  const double s = norm2(x);
  for (cplx& v : x) v /= s;
  return x;
}

/// Largest singular value of op by power iteration on op* op.
///
/// Stops when the eigen-residual ||op*op x - rho x|| drops to tol * rho, where
/// rho = ||op x||^2 is the Rayleigh quotient; the returned value is sqrt(rho).
template <LinearOperator Op>
double largest_singular_value(const Op& op, PowerIterationOptions opts = {}) {
  if (op.rows() == 0 || op.cols() == 0) throw DomainError("empty operator");
  CVector x = power_iteration_start(op.cols());
  double rho = 0.0;
  double residual = 0.0;
  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    const CVector y = op.apply(x);
    double yy = 0.0;
    for (const cplx& v : y) yy += std::norm(v);
    rho = yy;
    if (rho == 0.0) return 0.0;  // the start vector is generic; op vanishes
    CVector z = op.apply_adjoint(y);
    residual = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) residual += std::norm(z[k] - rho * x[k]);
    residual = std::sqrt(residual);
    if (residual <= opts.tol * rho) return std::sqrt(rho);
    const double zn = norm2(z);
    for (std::size_t k = 0; k < z.size(); ++k) x[k] = z[k] / zn;
  }
  throw NoConvergence("power iteration stopped after " + std::to_string(opts.max_iter) +
                      " iterations with relative residual " + std::to_string(residual / rho));
}

/// The operator L* D L^{-*}: a diagonal multiplier written in coordinates
/// that are orthonormal for the inner product x* G y with G = L L*.
class WhitenedDiagonal {
 public:
  WhitenedDiagonal(std::span<const cplx> d, const CholeskyFactor& chol) : d_(d), chol_(chol) {
    if (d.size() != chol.dim()) throw DomainError("diagonal and Gram dimensions differ");
  }
  std::size_t rows() const { return d_.size(); }
  std::size_t cols() const { return d_.size(); }

  CVector apply(std::span<const cplx> v) const {
    CVector u = chol_.solve_adjoint(v);
    for (std::size_t k = 0; k < u.size(); ++k) u[k] *= d_[k];
    return chol_.multiply_adjoint(u);
  }

  CVector apply_adjoint(std::span<const cplx> v) const {
    CVector u = chol_.multiply_lower(v);
    for (std::size_t k = 0; k < u.size(); ++k) u[k] *= std::conj(d_[k]);
    return chol_.solve_lower(u);
  }

 private:
  std::span<const cplx> d_;
  const CholeskyFactor& chol_;
};

/// sup over x != 0 of ||D x||_G / ||x||_G for ||x||_G^2 = x* G x, G = L L*.
///
/// Computed densely as the largest singular value of L^{-1} conj(D) L, the
/// adjoint of WhitenedDiagonal. Power iteration is not used here: multipliers
/// with many entries near 1 leave a cluster of eigenvalues within ~1e-7 of the
/// top one, where its residual test needs far more iterations than a dense
/// eigensolve costs at section sizes of a few hundred.
inline double whitened_norm(std::span<const cplx> d, const CholeskyFactor& chol) {
  const std::size_t n = chol.dim();
  if (d.size() != n) throw DomainError("diagonal and Gram dimensions differ");
  const Eigen::Index m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) L(i, j) = chol.lower()(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  Eigen::MatrixXcd X = L;
  for (Eigen::Index i = 0; i < m; ++i) X.row(i) *= std::conj(d[static_cast<std::size_t>(i)]);
  L.triangularView<Eigen::Lower>().solveInPlace(X);
  const Eigen::MatrixXcd XX = X.adjoint() * X;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(XX, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NoConvergence("Hermitian eigensolver failed");
  return std::sqrt(std::max(0.0, eig.eigenvalues()(m - 1)));
}

inline double whitened_norm(std::span<const cplx> d, const HermitianMatrix& g) {
  const CholeskyFactor chol = cholesky(g);
  return whitened_norm(d, chol);
}

/// The same norm by power iteration on WhitenedDiagonal; matrix-free, and
/// accurate when the top singular value is separated.
inline double whitened_norm_iterative(std::span<const cplx> d, const CholeskyFactor& chol,
                                      PowerIterationOptions opts = {}) {
  return largest_singular_value(WhitenedDiagonal(d, chol), opts);
}

}  // namespace rieszlab
