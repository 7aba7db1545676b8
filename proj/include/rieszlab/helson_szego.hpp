#pragma once
//
// Analytic certificates: a polynomial h = sum_{k<=D} c_k e^{ik theta} with
// |w - h| <= s w on a grid gives ||R||_w <= (1 - s^2)^{-1/2} on that grid.
//
// The search minimizes s(c) = max_j |w_j - h(theta_j)| / w_j. Every step is a
// weighted least-squares problem whose normal equations are Hermitian
// Toeplitz, so moments and evaluations go through FFTs and the solve is a
// Levinson recursion.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "rieszlab/errors.hpp"
#include "rieszlab/kernels.hpp"
#include "rieszlab/weights.hpp"

namespace rieszlab {

struct AnalyticCertificate {
  int degree = 0;
  CVector coefficients;  // c_0..c_D
  double ratio = 1.0;    // max_j |w_j - h_j| / w_j
  int grid = 0;
};

/// theta_j = -pi + (j + 1/2) 2pi / M, which avoids 0 and pi for even M.
inline std::vector<double> offset_grid(int M) {
  if (M < 1) throw DomainError("grid size must be positive");
  std::vector<double> t(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) t[static_cast<std::size_t>(j)] = -kPi + (j + 0.5) * 2.0 * kPi / M;
  return t;
}

inline std::vector<double> weight_on_grid(const WeightSpec& w, int M) {
  const detail::WeightProfile p = detail::WeightProfile::of(w);
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(M));
  for (double t : offset_grid(M)) {
    const double x = p.value(t);
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("weight must be positive and finite on the grid");
    v.push_back(x);
  }
  return v;
}

namespace detail {

// sum_j v_j e^{i m theta_j} and sum_k c_k e^{i k theta_j} on the offset grid.
class GridTransform {
 public:
  explicit GridTransform(int M) : M_(M), in_(static_cast<std::size_t>(M)), out_(static_cast<std::size_t>(M)) {}

  int size() const { return M_; }

  // m = 0..count-1
  CVector moments(const std::vector<double>& v, int count) {
    for (int j = 0; j < M_; ++j) in_[idx(j)] = v[idx(j)];
    fft_.fwd(out_.data(), in_.data(), M_);  // sum v_j e^{-2pi i mj/M}
    CVector t(static_cast<std::size_t>(count));
    for (int m = 0; m < count; ++m) t[idx(m)] = std::conj(out_[idx(m % M_)]) * shift(m);
    return t;
  }

  std::vector<cplx> evaluate(const CVector& c) {
    std::fill(in_.begin(), in_.end(), cplx(0.0));
    for (std::size_t k = 0; k < c.size(); ++k) in_[k] = std::conj(c[k] * shift(static_cast<int>(k)));
    fft_.fwd(out_.data(), in_.data(), M_);
    std::vector<cplx> h(static_cast<std::size_t>(M_));
    for (int j = 0; j < M_; ++j) h[idx(j)] = std::conj(out_[idx(j)]);
    return h;
  }

 private:
  static std::size_t idx(int i) { return static_cast<std::size_t>(i); }
  cplx shift(int m) const { return std::polar(1.0, m * (-kPi + kPi / M_)); }

  int M_;
  Eigen::FFT<double> fft_;
  std::vector<cplx> in_, out_;
};

// Solves T x = y for T[i][j] = t(j - i), t(-m) = conj(t(m)), by the general
// Levinson recursion. Returns false on a vanishing pivot.
inline bool levinson(const CVector& t, const CVector& y, CVector& x) {
  const std::size_t n = y.size();
  auto a = [&](std::ptrdiff_t d) { return d <= 0 ? t[static_cast<std::size_t>(-d)] : std::conj(t[static_cast<std::size_t>(d)]); };
  if (!(std::abs(t[0]) > 0.0)) return false;
  CVector f{1.0 / a(0)}, b{1.0 / a(0)};
  x.assign(1, y[0] / a(0));
  for (std::size_t k = 1; k < n; ++k) {
    cplx ef = 0.0, eb = 0.0, ex = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      ef += a(static_cast<std::ptrdiff_t>(k - i)) * f[i];
      eb += a(-static_cast<std::ptrdiff_t>(i + 1)) * b[i];
      ex += a(static_cast<std::ptrdiff_t>(k - i)) * x[i];
    }
    const cplx denom = 1.0 - ef * eb;
    if (!(std::abs(denom) > 1e-14)) return false;
    CVector nf(k + 1), nb(k + 1);
    for (std::size_t i = 0; i <= k; ++i) {
      const cplx fi = i < k ? f[i] : cplx(0.0);
      const cplx bi = i > 0 ? b[i - 1] : cplx(0.0);
      nf[i] = (fi - ef * bi) / denom;
      nb[i] = (bi - eb * fi) / denom;
    }
    f.swap(nf);
    b.swap(nb);
    x.push_back(0.0);
    const cplx g = y[k] - ex;
    for (std::size_t i = 0; i <= k; ++i) x[i] += g * b[i];
  }
  return true;
}

inline double toeplitz_residual(const CVector& t, const CVector& y, const CVector& x) {
  const std::size_t n = y.size();
  double r = 0.0, s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += (j >= i ? t[j - i] : std::conj(t[i - j])) * x[j];
    r = std::max(r, std::abs(acc - y[i]));
    s = std::max(s, std::abs(y[i]));
  }
  return s > 0.0 ? r / s : r;
}

inline CVector toeplitz_solve_dense(const CVector& t, const CVector& y) {
  const Eigen::Index n = static_cast<Eigen::Index>(y.size());
  Eigen::MatrixXcd T(n, n);
  Eigen::VectorXcd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    rhs(i) = y[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j)
      T(i, j) = j >= i ? t[static_cast<std::size_t>(j - i)] : std::conj(t[static_cast<std::size_t>(i - j)]);
  }
  const Eigen::LDLT<Eigen::MatrixXcd> ldlt(T);
  if (ldlt.info() != Eigen::Success) throw NotPositiveDefinite("weighted normal equations are singular");
  const Eigen::VectorXcd sol = ldlt.solve(rhs);
  return CVector(sol.data(), sol.data() + n);
}

}  // namespace detail

/// Hermitian Toeplitz solve: Levinson, with a dense LDLT fallback when the
/// recursion breaks down or its residual exceeds 1e-8.
inline CVector toeplitz_solve(const CVector& t, const CVector& y) {
  if (t.size() < y.size() || y.empty()) throw DomainError("toeplitz_solve: need t(0..n-1) for n unknowns");
  CVector x;
  if (detail::levinson(t, y, x) && detail::toeplitz_residual(t, y, x) <= 1e-8) return x;
  return detail::toeplitz_solve_dense(t, y);
}

/// max_j |w_j - h(theta_j)| / w_j on the offset grid of size M.
inline double grid_ratio(const std::vector<double>& w, const CVector& c) {
  const int M = static_cast<int>(w.size());
  if (static_cast<int>(c.size()) > M) throw DomainError("degree must be below the grid size");
  detail::GridTransform tr(M);
  const std::vector<cplx> h = tr.evaluate(c);
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) s = std::max(s, std::abs(w[j] - h[j]) / w[j]);
  return s;
}

inline double grid_ratio(const WeightSpec& w, const CVector& c, int M) { return grid_ratio(weight_on_grid(w, M), c); }

struct HsSearchOptions {
  int irls_steps = 4;  // per exponent q in {2, 8, 32}
};

/// Minimax search for the best degree-D certificate on an M-point grid.
/// Reweighted least squares on the l^q surrogate (q = 2, 8, 32), then `iters`
/// Lawson updates omega <- omega * r. Deterministic; returns the best iterate.
inline AnalyticCertificate hs_search(const WeightSpec& w, int D, int M, int iters, HsSearchOptions opts = {}) {
  if (D < 0) throw DomainError("degree must be nonnegative");
  if (M <= 2 * D) throw DomainError("grid size must exceed twice the degree");
  if (iters < 0) throw DomainError("iteration count must be nonnegative");
  const std::vector<double> wv = weight_on_grid(w, M);
  const std::size_t n = static_cast<std::size_t>(D) + 1;
  detail::GridTransform tr(M);

  AnalyticCertificate best;
  best.degree = D;
  best.grid = M;
  CVector c(n, 0.0);
  c[0] = fourier_coeffs(w, 0)(0);

  std::vector<double> r(wv.size());
  auto measure = [&](const CVector& coeffs) {
    const std::vector<cplx> h = tr.evaluate(coeffs);
    double s = 0.0;
    for (std::size_t j = 0; j < wv.size(); ++j) {
      r[j] = std::abs(wv[j] - h[j]) / wv[j];
      s = std::max(s, r[j]);
    }
    if (s < best.ratio || best.coefficients.empty()) {
      best.ratio = s;
      best.coefficients = coeffs;
    }
    return s;
  };

  std::vector<double> omega(wv.size()), v(wv.size());
  auto solve = [&]() {
    for (std::size_t j = 0; j < wv.size(); ++j) v[j] = omega[j] / (wv[j] * wv[j]);
    const CVector t = tr.moments(v, D + 1);
    for (std::size_t j = 0; j < wv.size(); ++j) v[j] = omega[j] / wv[j];
    CVector rhs = tr.moments(v, D + 1);
    for (cplx& z : rhs) z = std::conj(z);
    return toeplitz_solve(t, rhs);
  };
  auto normalize = [&]() {
    const double top = *std::max_element(omega.begin(), omega.end());
    if (!(top > 0.0) || !std::isfinite(top)) return false;
    for (double& o : omega) o = std::max(o / top, 1e-14);
    return true;
  };

  double s = measure(c);
  if (s == 0.0) return best;

  for (double q : {2.0, 8.0, 32.0}) {
    for (int step = 0; step < opts.irls_steps; ++step) {
      for (std::size_t j = 0; j < wv.size(); ++j) omega[j] = std::pow(r[j] / s, q - 2.0);
      if (!normalize()) break;
      c = solve();
      s = measure(c);
      if (s == 0.0) return best;
    }
  }

  std::fill(omega.begin(), omega.end(), 1.0);
  for (int it = 0; it < iters; ++it) {
    c = solve();
    s = measure(c);
    if (s == 0.0) break;
    for (std::size_t j = 0; j < wv.size(); ++j) omega[j] *= r[j];
    if (!normalize()) break;
  }

  if (!(best.ratio < 1.0)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "best grid ratio %.6f >= 1 at degree %d, grid %d; raise the degree or grid", best.ratio, D,
                  M);
    throw SearchDiverged(buf);
  }
  return best;
}

/// (1 - s^2)^{-1/2}: a grid-level upper bound for ||R||_w.
inline double certificate_to_bound(const AnalyticCertificate& cert) {
  if (!(cert.ratio >= 0.0 && cert.ratio < 1.0)) throw DomainError("certificate ratio must lie in [0, 1)");
  return 1.0 / std::sqrt((1.0 - cert.ratio) * (1.0 + cert.ratio));
}

/// Taylor coefficients of ((1 - z)/(1 + z))^alpha with value 1 at z = 0.
/// On the circle this has real part cos(alpha pi/2) |tan(theta/2)|^alpha.
inline CVector sector_series(double alpha, int D) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (D < 0) throw DomainError("degree must be nonnegative");
  const std::size_t n = static_cast<std::size_t>(D) + 1;
  std::vector<double> p(n), q(n);
  p[0] = q[0] = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    p[k] = p[k - 1] * (kk - 1.0 - alpha) / kk;   // (1 - z)^alpha
    q[k] = -q[k - 1] * (alpha + kk - 1.0) / kk;  // (1 + z)^-alpha
  }
  CVector c(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i <= k; ++i) acc += p[i] * q[k - i];
    c[k] = acc;
  }
  return c;
}

/// The weight certified by the sector series: cos(alpha pi/2) |tan(theta/2)|^alpha.
inline WeightSpec sector_weight(double alpha) { return WeightSpec::tan_alpha(alpha).scaled(std::cos(alpha * kPi / 2.0)); }

/// cos^2(alpha pi/2) ((1 - z)/(1 + z))^alpha truncated at degree D, measured
/// against sector_weight(alpha) on the M-point offset grid.
inline AnalyticCertificate explicit_sector_certificate(double alpha, int D, int M = 8192) {
  if (M <= D) throw DomainError("grid size must exceed the degree");
  CVector c = sector_series(alpha, D);
  const double k = std::pow(std::cos(alpha * kPi / 2.0), 2);
  for (cplx& z : c) z *= k;
  AnalyticCertificate cert;
  cert.degree = D;
  cert.grid = M;
  cert.ratio = grid_ratio(sector_weight(alpha), c, M);
  cert.coefficients = std::move(c);
  return cert;
}

// Text form: "degree D grid M ratio s" then one "re im" line per coefficient.
inline void write_certificate(std::ostream& out, const AnalyticCertificate& cert) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "degree %d grid %d ratio %.17g\n", cert.degree, cert.grid, cert.ratio);
  out << buf;
  for (const cplx& z : cert.coefficients) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", z.real(), z.imag());
    out << buf;
  }
}

inline AnalyticCertificate read_certificate(std::istream& in) {
  AnalyticCertificate cert;
  std::string line, k1, k2, k3;
  if (!std::getline(in, line)) throw VerificationFailed("certificate is empty");
  {
    std::istringstream head(line);
    std::string extra;
    if (!(head >> k1 >> cert.degree >> k2 >> cert.grid >> k3 >> cert.ratio) || k1 != "degree" || k2 != "grid" ||
        k3 != "ratio" || (head >> extra))
      throw VerificationFailed("malformed certificate header: " + line);
  }
  if (cert.degree < 0 || cert.grid <= cert.degree) throw VerificationFailed("certificate header has invalid sizes");
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    double re = 0.0, im = 0.0;
    std::string extra;
    if (!(row >> re >> im) || (row >> extra)) throw VerificationFailed("malformed coefficient line: " + line);
    cert.coefficients.emplace_back(re, im);
  }
  if (cert.coefficients.size() != static_cast<std::size_t>(cert.degree) + 1)
    throw VerificationFailed("expected " + std::to_string(cert.degree + 1) + " coefficients, found " +
                             std::to_string(cert.coefficients.size()));
  return cert;
}

/// Recomputes the grid ratio of a certificate against w. Throws
/// VerificationFailed if it differs from the declared ratio by more than tol
/// or is not below 1. Returns the recomputed ratio.
inline double verify_certificate(const WeightSpec& w, const AnalyticCertificate& cert, double tol = 1e-9) {
  if (cert.coefficients.size() != static_cast<std::size_t>(cert.degree) + 1)
    throw VerificationFailed("coefficient count does not match the degree");
  const double s = grid_ratio(w, cert.coefficients, cert.grid);
  char buf[160];
  if (!(std::abs(s - cert.ratio) <= tol)) {
    std::snprintf(buf, sizeof buf, "declared ratio %.12g but recomputed %.12g", cert.ratio, s);
    throw VerificationFailed(buf);
  }
  if (!(s < 1.0)) {
    std::snprintf(buf, sizeof buf, "ratio %.12g is not below 1", s);
    throw VerificationFailed(buf);
  }
  return s;
}

}  // namespace rieszlab
