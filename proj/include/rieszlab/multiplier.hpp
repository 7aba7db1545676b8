#pragma once
//
// Fast monotone multipliers T e_k = lambda_k e_k on sections of H^2(w).
//
// lambda_k = exp(-nu_k). The sequence is stored as log(nu_k) because nu_k
// underflows long before the indices of interest (exp(-n^2) is subnormal for
// n > 26), and powers lambda^N are formed as exp(-N nu) from the logs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rieszlab/errors.hpp"
#include "rieszlab/gram.hpp"
#include "rieszlab/kernels.hpp"
#include "rieszlab/weights.hpp"

namespace rieszlab {

class MultiplierSequence {
 public:
  enum class Family { gauss, custom };

  /// nu_n = exp(-c n^2), n = 0..length-1.
  static MultiplierSequence gauss(double c, int length, double fast_threshold = 0.5) {
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("gauss parameter c must be positive");
    if (length < 2) throw DomainError("sequence length must be at least 2");
    MultiplierSequence s(Family::gauss);
    s.c_ = c;
    for (int n = 0; n < length; ++n) s.log_nu_.push_back(-c * double(n) * double(n));
    s.check_fast(fast_threshold);
    return s;
  }

  /// Explicit lambdas, strictly increasing in [0, 1).
  static MultiplierSequence custom(std::span<const double> lambdas, double fast_threshold = 0.5) {
    if (lambdas.size() < 2) throw DomainError("sequence length must be at least 2");
    MultiplierSequence s(Family::custom);
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
      const double l = lambdas[k];
      if (!(l >= 0.0 && l < 1.0)) throw DomainError("lambdas must lie in [0, 1)");
      if (k > 0 && !(l > lambdas[k - 1])) throw DomainError("lambdas must be strictly increasing");
      s.log_nu_.push_back(l == 0.0 ? kInf : std::log(-std::log(l)));
    }
    s.check_fast(fast_threshold);
    return s;
  }

  Family family() const { return family_; }
  std::string id() const { return family_ == Family::gauss ? "gauss" : "custom"; }
  double c() const { return c_; }
  int size() const { return static_cast<int>(log_nu_.size()); }

  double log_nu(int k) const { return log_nu_.at(static_cast<std::size_t>(k)); }
  double nu(int k) const { return std::exp(log_nu(k)); }
  double lambda(int k) const { return std::exp(-nu(k)); }
  /// kappa_n = sqrt(nu_n / nu_{n+1})
  double kappa(int n) const { return std::exp(0.5 * (log_nu(n) - log_nu(n + 1))); }

  /// lambda_k^N
  double lambda_pow(int k, double N) const {
    if (N == 0.0) return 1.0;
    return std::exp(-std::exp(std::log(N) + log_nu(k)));
  }

  /// 1 - lambda_k^N, without cancellation.
  double one_minus_lambda_pow(int k, double N) const {
    if (N == 0.0) return 0.0;
    return -std::expm1(-std::exp(std::log(N) + log_nu(k)));
  }

  /// log(1 - lambda_k)
  double log_one_minus_lambda(int k) const {
    const double ln = log_nu(k);
    if (ln < -30.0) return ln - 0.5 * std::exp(ln);
    return std::log(-std::expm1(-std::exp(ln)));
  }

 private:
  explicit MultiplierSequence(Family f) : family_(f) {}

  void check_fast(double threshold) {
    const int L = size();
    const double log_ratio = log_one_minus_lambda(L - 1) - log_one_minus_lambda(L - 2);
    if (!(log_ratio <= std::log(threshold))) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "(1 - lambda_{k+1}) / (1 - lambda_k) = %.6g at the last index exceeds %.6g",
                    std::exp(log_ratio), threshold);
      throw NotFast(buf);
    }
  }

  Family family_;
  double c_ = 0.0;
  std::vector<double> log_nu_;
};

/// N_n = greatest integer with N_n sqrt(nu_n nu_{n+1}) <= 1, for every n whose
/// value fits in 64 bits. Computed in extended precision and checked in log
/// space on both sides of the boundary.
class PowerSchedule {
 public:
  explicit PowerSchedule(const MultiplierSequence& seq) {
    const long double limit = std::log(static_cast<long double>(std::numeric_limits<std::uint64_t>::max()));
    for (int n = 0; n + 1 < seq.size(); ++n) {
      const long double half = 0.5L * (static_cast<long double>(seq.log_nu(n)) + seq.log_nu(n + 1));
      if (-half >= limit) break;
      std::uint64_t N = static_cast<std::uint64_t>(std::floor(std::exp(-half)));
      auto fits = [&](std::uint64_t k) { return k == 0 || std::log(static_cast<long double>(k)) + half <= 0.0L; };
      while (N > 0 && !fits(N)) --N;
      while (N < std::numeric_limits<std::uint64_t>::max() && fits(N + 1)) ++N;
      if (N == 0) throw DomainError("N_" + std::to_string(n) + " would be zero: nu_n nu_{n+1} > 1");
      N_.push_back(N);
    }
  }

  int size() const { return static_cast<int>(N_.size()); }
  std::uint64_t operator[](int n) const { return N_.at(static_cast<std::size_t>(n)); }
  const std::vector<std::uint64_t>& values() const { return N_; }

 private:
  std::vector<std::uint64_t> N_;
};

/// The M-section span{e_0..e_{M-1}} of H^2(w), with its Gram matrix factored
/// once for all multiplier norms.
class MultiplierSection {
 public:
  MultiplierSection(const FourierTable& ft, int M) : M_(M), chol_(factor(ft, M)) {}

  int dim() const { return M_; }
  const CholeskyFactor& cholesky_factor() const { return chol_; }

  /// Norm of diag(d) in the L^2(w) inner product.
  double norm(std::span<const cplx> d) const {
    if (d.size() != static_cast<std::size_t>(M_)) throw DomainError("multiplier length must equal the section dim");
    return whitened_norm(d, chol_);
  }

 private:
  static CholeskyFactor factor(const FourierTable& ft, int M) {
    if (M < 1) throw DomainError("section dim must be positive");
    const BasisRange r(0, M - 1);
    return cholesky(build_gram(ft, r, r).hermitian());
  }

  int M_;
  CholeskyFactor chol_;
};

/// ||T^n|| on the section.
inline double power_norm(const MultiplierSequence& seq, const MultiplierSection& sec, std::uint64_t n) {
  if (sec.dim() > seq.size()) throw DomainError("section dim exceeds the sequence length");
  if (n == 0) return 1.0;
  CVector d(static_cast<std::size_t>(sec.dim()));
  for (int k = 0; k < sec.dim(); ++k) d[static_cast<std::size_t>(k)] = seq.lambda_pow(k, static_cast<double>(n));
  return sec.norm(d);
}

inline double power_norm(const MultiplierSequence& seq, const FourierTable& ft, std::uint64_t n, int M) {
  return power_norm(seq, MultiplierSection(ft, M), n);
}

/// Powers to sample when sweeping n over 0..N_upto: every n <= 64, a ratio
/// 1.1 geometric grid above that, and N_k - 1, N_k, N_k + 1 for k <= upto.
inline std::vector<std::uint64_t> power_sweep_grid(const PowerSchedule& sched, int upto) {
  if (upto < 0 || upto >= sched.size()) throw DomainError("schedule index out of range");
  const std::uint64_t top = sched[upto];
  std::vector<std::uint64_t> p;
  for (std::uint64_t n = 0; n <= std::min<std::uint64_t>(64, top); ++n) p.push_back(n);
  for (long double x = 64.0L; x <= static_cast<long double>(top); x *= 1.1L) p.push_back(static_cast<std::uint64_t>(std::llround(x)));
  for (int k = 0; k <= upto; ++k)
    for (std::uint64_t v : {sched[k] - 1, sched[k], sched[k] + 1})
      if (v <= top) p.push_back(v);
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  return p;
}

/// ||R||_w where it is known in closed form: 1 for constants, sec(beta pi/2)
/// for |tan(theta/2)|^beta with beta < 1.
inline std::optional<double> certified_riesz_norm(const WeightSpec& w) {
  switch (w.family()) {
    case WeightSpec::Family::constant: return 1.0;
    case WeightSpec::Family::tan_alpha: return 1.0 / std::cos(w.alpha() * kPi / 2.0);
    case WeightSpec::Family::power_of: {
      const WeightSpec& base = w.base();
      if (base.family() == WeightSpec::Family::constant) return 1.0;
      if (base.family() == WeightSpec::Family::tan_alpha && base.alpha() * w.exponent() < 1.0)
        return 1.0 / std::cos(base.alpha() * w.exponent() * kPi / 2.0);
      return std::nullopt;
    }
    default: return std::nullopt;
  }
}

/// max over 0 <= n < M - 1 of the norm of the coordinate projection onto
/// span{e_0..e_n} along span{e_{n+1}..e_{M-1}}; the last projection is I.
inline double basis_constant_section(const MultiplierSection& sec) {
  const int M = sec.dim();
  double best = 1.0;
  CVector d(static_cast<std::size_t>(M), 0.0);
  for (int n = 0; n + 1 < M; ++n) {
    d[static_cast<std::size_t>(n)] = 1.0;
    best = std::max(best, sec.norm(d));
  }
  return best;
}

inline double basis_constant_section(const FourierTable& ft, int M) {
  return basis_constant_section(MultiplierSection(ft, M));
}

struct TailGap {
  int n = 0;
  std::uint64_t N = 0;
  double gap = 0.0;
  double analytic_bound = 0.0;
  double b = 1.0;
  bool certified = false;            // b is the exact ||R||_w, not a section estimate
  bool truncation_dominated = false;  // n + 1 is the last index in the section
};

/// ||T^{N_n} - Q_n|| on the section, Q_n = projection onto span{e_k : k > n},
/// with the bound b (b lambda_n^{N_n} + (b + 1)(1 - lambda_{n+1}^{N_n})).
inline TailGap tail_gap(const MultiplierSequence& seq, const PowerSchedule& sched, const MultiplierSection& sec, int n,
                        double b, bool certified) {
  const int M = sec.dim();
  if (M > seq.size()) throw DomainError("section dim exceeds the sequence length");
  if (n < 0 || n + 1 >= M) throw DomainError("tail_gap needs n + 1 < M");
  if (n >= sched.size()) throw DomainError("N_" + std::to_string(n) + " is beyond the materialized schedule");
  TailGap out;
  out.n = n;
  out.N = sched[n];
  out.b = b;
  out.certified = certified;
  out.truncation_dominated = n + 2 == M;
  const double N = static_cast<double>(out.N);
  CVector d(static_cast<std::size_t>(M));
  for (int k = 0; k < M; ++k)
    d[static_cast<std::size_t>(k)] = k > n ? -seq.one_minus_lambda_pow(k, N) : seq.lambda_pow(k, N);
  out.gap = sec.norm(d);
  out.analytic_bound = b * (b * seq.lambda_pow(n, N) + (b + 1.0) * seq.one_minus_lambda_pow(n + 1, N));
  return out;
}

/// Uses the closed-form ||R||_w when known, else the section basis constant.
inline TailGap tail_gap(const MultiplierSequence& seq, const WeightSpec& w, const FourierTable& ft, int n, int M) {
  const MultiplierSection sec(ft, M);
  const PowerSchedule sched(seq);
  const std::optional<double> exact = certified_riesz_norm(w);
  const double b = exact ? *exact : basis_constant_section(sec);
  return tail_gap(seq, sched, sec, n, b, exact.has_value());
}

inline double sign_multiplier_norm(const MultiplierSection& sec, std::span<const int> signs) {
  if (signs.size() != static_cast<std::size_t>(sec.dim())) throw DomainError("sign pattern length must equal M");
  CVector d(signs.size());
  for (std::size_t k = 0; k < signs.size(); ++k) {
    if (signs[k] != 1 && signs[k] != -1) throw DomainError("signs must be +1 or -1");
    d[k] = static_cast<double>(signs[k]);
  }
  return sec.norm(d);
}

/// Sign patterns drawn from the bits of a mt19937_64 stream, so the patterns
/// for a given seed are the same on every platform.
inline std::vector<std::vector<int>> sign_patterns(int M, int count, std::uint64_t seed) {
  if (M < 1 || count < 1) throw DomainError("pattern size and count must be positive");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(count), std::vector<int>(static_cast<std::size_t>(M)));
  for (auto& pattern : out) {
    std::uint64_t bits = 0;
    for (int k = 0; k < M; ++k) {
      if (k % 64 == 0) bits = rng();
      pattern[static_cast<std::size_t>(k)] = (bits >> (k % 64)) & 1u ? 1 : -1;
    }
  }
  return out;
}

struct SignSweep {
  double max_norm = 0.0;
  int argmax = 0;
  std::uint64_t seed = 0;
  int patterns = 0;
};

inline SignSweep max_sign_multiplier_norm(const MultiplierSection& sec, int count, std::uint64_t seed) {
  SignSweep out;
  out.seed = seed;
  out.patterns = count;
  const auto patterns = sign_patterns(sec.dim(), count, seed);
  for (int i = 0; i < count; ++i) {
    const double v = sign_multiplier_norm(sec, patterns[static_cast<std::size_t>(i)]);
    if (v > out.max_norm) {
      out.max_norm = v;
      out.argmax = i;
    }
  }
  return out;
}

}  // namespace rieszlab
