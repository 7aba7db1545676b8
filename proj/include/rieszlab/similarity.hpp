#pragma once
//
// The similarity floor sec(pi/2p) next to what an M-section can see of the
// power norms of a fast multiplier: a section lower bound from the norms of
// T^{N_k} and of the tail projections Q_n, and the section basis constant as
// the upper leg. None of the section numbers is a proof of anything.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rieszlab/errors.hpp"
#include "rieszlab/helson_szego.hpp"
#include "rieszlab/multiplier.hpp"
#include "rieszlab/weights.hpp"

namespace rieszlab {

struct SandwichReport {
  std::string weight;
  CriticalExponent p{kInf};
  double floor = 1.0;
  double lower = 1.0;  // section lower bound
  double upper = 1.0;  // section basis constant
  int M = 0;
  int schedule_terms = 0;  // N_k used in the lower leg
  bool floor_bracketed = false;
};

/// floor from the critical exponent, upper = basis_constant_section at M,
/// lower = max of ||T^{N_k}|| over the schedule and ||Q_n|| over n < M/2.
inline SandwichReport sandwich(const WeightSpec& w, const MultiplierSequence& seq, int M,
                               const QuadratureConfig& quad = {}, double tol = 1e-6) {
  if (M < 2) throw DomainError("section dim must be at least 2");
  SandwichReport r;
  r.weight = w.id();
  r.M = M;
  r.p = critical_exponent(w);
  r.floor = similarity_floor(r.p);

  const MultiplierSection sec(fourier_coeffs(w, M, quad), M);
  r.upper = basis_constant_section(sec);

  const PowerSchedule sched(seq);
  double lower = 0.0;
  for (int k = 0; k < sched.size(); ++k) {
    lower = std::max(lower, power_norm(seq, sec, sched[k]));
    ++r.schedule_terms;
  }
  CVector q(static_cast<std::size_t>(M), 1.0);
  for (int n = 0; n < M / 2; ++n) {
    q[static_cast<std::size_t>(n)] = 0.0;
    lower = std::max(lower, sec.norm(q));
  }
  r.lower = lower;
  if (!(r.lower <= r.upper + tol)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "sandwich ordering violated: lower %.12g > upper %.12g", r.lower, r.upper);
    throw VerificationFailed(buf);
  }
  r.floor_bracketed = r.floor >= r.lower - tol && r.floor <= r.upper + tol;
  return r;
}

/// max of v/w and w/v over the offset grid and over points approaching the
/// possible singularities at 0 and +-pi at distances 10^-1 .. 10^-15.
inline double equivalence_constant(const WeightSpec& w, const WeightSpec& v, int M = 8192) {
  const detail::WeightProfile pw = detail::WeightProfile::of(w);
  const detail::WeightProfile pv = detail::WeightProfile::of(v);
  double worst = 1.0;
  auto take = [&](double a, double b) {
    if (a == b) return;
    if (!(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b))) {
      worst = kInf;
      return;
    }
    worst = std::max({worst, a / b, b / a});
  };
  for (double t : offset_grid(M)) take(pw.value(t), pv.value(t));
  for (int j = 1; j <= 15; ++j) {
    const double d = std::pow(10.0, -j);
    take(pw.value_near(0.0, d), pv.value_near(0.0, d));
    take(pw.value_near(0.0, -d), pv.value_near(0.0, -d));
    take(pw.value_near(kPi, -d), pv.value_near(kPi, -d));
    take(pw.value_near(-kPi, d), pv.value_near(-kPi, d));
  }
  return worst;
}

struct EquivalentPair {
  SandwichReport w;
  SandwichReport v;
  double equivalence_constant = 1.0;
};

inline EquivalentPair equivalent_weight_comparison(const WeightSpec& w, const WeightSpec& v,
                                                   const MultiplierSequence& seq, int M, double cap = 1e6,
                                                   const QuadratureConfig& quad = {}) {
  const double k = equivalence_constant(w, v);
  if (!(k <= cap)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s and %s are not equivalent: ratio %.3g exceeds cap %.3g", w.id().c_str(),
                  v.id().c_str(), k, cap);
    throw NotEquivalent(buf);
  }
  EquivalentPair out{sandwich(w, seq, M, quad), sandwich(v, seq, M, quad), k};
  return out;
}

}  // namespace rieszlab
