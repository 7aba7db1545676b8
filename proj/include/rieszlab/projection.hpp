#pragma once
//
// Finite-section estimates of the Riesz projection norm on L2(w).
//
// With E = span{e_0..e_N} and F = span{e_-N..e_-1}, the norm of the projection
// onto E along F is sec(phi), where sin(phi) is the largest cosine between the
// two subspaces: sin(phi) = sigma_max(A^{-1/2} C B^{-1/2}) for the Gram blocks
// A = (E,E), B = (F,F), C = (E,F). Square roots are replaced by Cholesky
// factors, which leaves the singular values unchanged. Sections are nested, so
// the estimate is a lower bound for ||R||_w that does not decrease with N.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rieszlab/errors.hpp"
#include "rieszlab/gram.hpp"
#include "rieszlab/kernels.hpp"
#include "rieszlab/weights.hpp"

namespace rieszlab {

struct AngleResult {
  int N = 0;
  double sin_phi = 0.0;
  double sec_phi = 1.0;
  double cond_estimate = 1.0;
};

inline double sec_from_sin(double s) { return 1.0 / std::sqrt((1.0 - s) * (1.0 + s)); }

namespace detail {

// L_A^{-1} C L_B^{-*}
class WhitenedCross {
 public:
  WhitenedCross(const CholeskyFactor& a, const Matrix& c, const CholeskyFactor& b) : a_(a), c_(c), b_(b) {}
  std::size_t rows() const { return a_.dim(); }
  std::size_t cols() const { return b_.dim(); }
  CVector apply(std::span<const cplx> v) const { return a_.solve_lower(c_.apply(b_.solve_adjoint(v))); }
  CVector apply_adjoint(std::span<const cplx> u) const {
    return b_.solve_lower(c_.apply_adjoint(a_.solve_adjoint(u)));
  }

 private:
  const CholeskyFactor& a_;
  const Matrix& c_;
  const CholeskyFactor& b_;
};

}  // namespace detail

/// Largest cosine between span(first basis) and span(second basis) given
/// their Gram blocks and the cross block.
inline AngleResult subspace_angle(const HermitianMatrix& a, const HermitianMatrix& b, const Matrix& cross,
                                  PowerIterationOptions opts = {}) {
  const CholeskyFactor la = cholesky(a);
  const CholeskyFactor lb = cholesky(b);
  const double s = largest_singular_value(detail::WhitenedCross(la, cross, lb), opts);
  if (!(s < 1.0)) throw NotPositiveDefinite("subspaces intersect to working precision (sin phi >= 1)");
  AngleResult r;
  r.sin_phi = s;
  r.sec_phi = sec_from_sin(s);
  r.cond_estimate = std::max(la.cond_estimate(), lb.cond_estimate());
  return r;
}

/// ||R||_w restricted to span{e_-N..e_N}. Needs ft.K >= 2N.
inline AngleResult riesz_norm_section(const FourierTable& ft, int N, PowerIterationOptions opts = {}) {
  if (N < 1) throw DomainError("section size N must be positive");
  if (ft.K() < 2 * N)
    throw InsufficientCoefficients("section N = " + std::to_string(N) + " needs K >= " + std::to_string(2 * N));
  const BasisRange e(0, N), f(-N, -1);
  const GramBlock a = build_gram(ft, e, e);
  const GramBlock b = build_gram(ft, f, f);
  const GramBlock c = build_gram(ft, e, f);
  AngleResult r = subspace_angle(a.hermitian(), b.hermitian(), c.matrix, opts);
  r.N = N;
  return r;
}

struct Extrapolation {
  std::vector<AngleResult> raw;
  double value = 1.0;
  /// Aitken acceleration assumes geometric convergence, which nothing
  /// guarantees here; the raw sequence is the trustworthy output.
  bool experimental = true;
};

/// Aitken delta-squared limit of sec_phi over the last three sections.
inline Extrapolation riesz_norm_extrapolate(const FourierTable& ft, std::span<const int> sections,
                                            PowerIterationOptions opts = {}) {
  if (sections.size() < 3) throw DomainError("extrapolation needs at least three sections");
  for (std::size_t i = 1; i < sections.size(); ++i)
    if (!(sections[i] > sections[i - 1])) throw DomainError("sections must be increasing");
  Extrapolation out;
  for (int n : sections) out.raw.push_back(riesz_norm_section(ft, n, opts));
  const std::size_t k = out.raw.size();
  const double x0 = out.raw[k - 3].sec_phi, x1 = out.raw[k - 2].sec_phi, x2 = out.raw[k - 1].sec_phi;
  const double d1 = x1 - x0, d2 = x2 - x1;
  const double denom = d2 - d1;
  if (std::abs(denom) <= 1e-14 * std::abs(x2) || std::abs(d2) <= 1e-14 * std::abs(x2))
    out.value = x2;
  else
    out.value = x2 - d2 * d2 / denom;
  return out;
}

struct ProjectionPair {
  double norm_P = 1.0;
  double norm_I_minus_P = 1.0;
};

/// Norms of the coordinate projection onto the first `split` basis vectors
/// along the rest, and of its complement, in the inner product given by g.
inline ProjectionPair projection_norm_pair(const HermitianMatrix& g, std::size_t split) {
  if (split == 0 || split >= g.dim()) throw DomainError("split must leave both blocks nonempty");
  const CholeskyFactor chol = cholesky(g);
  CVector first(g.dim(), 0.0), second(g.dim(), 0.0);
  for (std::size_t k = 0; k < g.dim(); ++k) (k < split ? first : second)[k] = 1.0;
  return {whitened_norm(first, chol), whitened_norm(second, chol)};
}

/// Projection onto E = span{e_0..e_N} along F = span{e_-N..e_-1}, and I - P,
/// computed on the joint Gram matrix of e_-N..e_N.
inline ProjectionPair projection_norm_pair(const FourierTable& ft, int N) {
  if (N < 1) throw DomainError("section size N must be positive");
  if (ft.K() < 2 * N)
    throw InsufficientCoefficients("section N = " + std::to_string(N) + " needs K >= " + std::to_string(2 * N));
  const BasisRange all(-N, N);
  const GramBlock g = build_gram(ft, all, all);
  const ProjectionPair onto_f = projection_norm_pair(g.hermitian(), static_cast<std::size_t>(N));
  return {onto_f.norm_I_minus_P, onto_f.norm_P};
}

struct ScanRow {
  double a = 0.0;
  std::optional<AngleResult> result;
  std::string error;
};

/// sec_phi(N) for w^a over a grid of exponents. Failures are recorded per row
/// and the scan continues.
inline std::vector<ScanRow> exponent_scan(const WeightSpec& w, std::span<const double> a_grid, int N,
                                          const QuadratureConfig& quad = {}, PowerIterationOptions opts = {}) {
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    if (!(a_grid[i] > 0.0)) throw DomainError("exponents must be positive");
    if (i > 0 && !(a_grid[i] > a_grid[i - 1])) throw DomainError("exponents must increase");
  }
  std::vector<ScanRow> rows;
  for (double a : a_grid) {
    ScanRow row;
    row.a = a;
    try {
      const FourierTable ft = fourier_coeffs(WeightSpec::power_of(w, a), 2 * N, quad);
      row.result = riesz_norm_section(ft, N, opts);
    } catch (const NumericalError& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace rieszlab
