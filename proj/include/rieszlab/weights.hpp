#pragma once
//
// Weight families on the circle (-pi, pi] and their Fourier coefficients
//
//     w^(m) = (1/2pi) \int_{-pi}^{pi} w(theta) e^{-i m theta} d theta.
//
// Families with algebraic singularities (|tan(theta/2)|^a has a zero at 0 and
// a pole at +-pi, |theta|^a a zero at 0) are integrated panel by panel with
// tanh-sinh, evaluating the weight from the distance to the singular point.
// Steps are integrated exactly; sampled weights use the periodic trapezoidal
// rule on the grid they came with.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <istream>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "rieszlab/errors.hpp"
#include "rieszlab/kernels.hpp"
#include "rieszlab/quadrature.hpp"

namespace rieszlab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

class WeightSpec {
 public:
  enum class Family { constant, tan_alpha, abs_theta_alpha, power_of, piecewise_step, sampled };

  static WeightSpec constant() { return WeightSpec(Family::constant); }

  static WeightSpec tan_alpha(double alpha) {
    check_alpha(alpha, "tan_alpha");
    WeightSpec w(Family::tan_alpha);
    w.alpha_ = alpha;
    return w;
  }

  static WeightSpec abs_theta_alpha(double alpha) {
    check_alpha(alpha, "abs_theta_alpha");
    WeightSpec w(Family::abs_theta_alpha);
    w.alpha_ = alpha;
    return w;
  }

  static WeightSpec power_of(const WeightSpec& base, double exponent) {
    if (!(exponent > 0.0) || !std::isfinite(exponent)) throw DomainError("power_of exponent must be positive");
    WeightSpec w(Family::power_of);
    w.base_ = std::make_shared<const WeightSpec>(base);
    w.exponent_ = exponent;
    return w;
  }

  /// levels[i] on (b[i-1], b[i]] with b[-1] = -pi and b[n] = pi.
  static WeightSpec piecewise_step(std::vector<double> levels, std::vector<double> breakpoints) {
    if (levels.size() != breakpoints.size() + 1)
      throw DomainError("piecewise_step needs one more level than breakpoints");
    for (double l : levels)
      if (!(l > 0.0) || !std::isfinite(l)) throw DomainError("piecewise_step levels must be strictly positive");
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
      if (!(breakpoints[i] > -kPi && breakpoints[i] < kPi))
        throw DomainError("piecewise_step breakpoints must lie in (-pi, pi)");
      if (i > 0 && !(breakpoints[i] > breakpoints[i - 1]))
        throw DomainError("piecewise_step breakpoints must increase");
    }
    WeightSpec w(Family::piecewise_step);
    w.levels_ = std::move(levels);
    w.breakpoints_ = std::move(breakpoints);
    return w;
  }

  static WeightSpec sampled(std::vector<double> theta, std::vector<double> values) {
    if (theta.size() != values.size() || theta.size() < 2) throw DomainError("sampled weight needs >= 2 points");
    bool positive = false;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      if (!(theta[i] > -kPi && theta[i] <= kPi)) throw DomainError("sampled theta must lie in (-pi, pi]");
      if (i > 0 && !(theta[i] > theta[i - 1])) throw DomainError("sampled theta must be strictly increasing");
      if (!(values[i] >= 0.0) || !std::isfinite(values[i])) throw DomainError("sampled values must be >= 0");
      positive = positive || values[i] > 0.0;
    }
    if (!positive) throw DomainError("sampled weight is identically zero");
    WeightSpec w(Family::sampled);
    w.theta_ = std::move(theta);
    w.values_ = std::move(values);
    return w;
  }

  /// c * w for c > 0.
  WeightSpec scaled(double c) const {
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("weight scale must be positive");
    WeightSpec w = *this;
    w.scale_ *= c;
    return w;
  }

  Family family() const { return family_; }
  double alpha() const { return alpha_; }
  double exponent() const { return exponent_; }
  double scale() const { return scale_; }
  const WeightSpec& base() const { return *base_; }
  const std::vector<double>& levels() const { return levels_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& sample_theta() const { return theta_; }
  const std::vector<double>& sample_values() const { return values_; }

  /// Short family name used in result tables.
  std::string id() const {
    switch (family_) {
      case Family::constant: return "constant";
      case Family::tan_alpha: return "tan-alpha";
      case Family::abs_theta_alpha: return "abs-theta-alpha";
      case Family::power_of: return "power-of-" + base_->id();
      case Family::piecewise_step: return "piecewise-step";
      case Family::sampled: return "sampled";
    }
    return "unknown";
  }

 private:
  explicit WeightSpec(Family f) : family_(f) {}

  static void check_alpha(double alpha, const char* what) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError(std::string(what) + " requires alpha in (0,1)");
  }

  Family family_;
  double alpha_ = std::numeric_limits<double>::quiet_NaN();
  double exponent_ = 1.0;
  double scale_ = 1.0;
  std::shared_ptr<const WeightSpec> base_;
  std::vector<double> levels_;
  std::vector<double> breakpoints_;
  std::vector<double> theta_;
  std::vector<double> values_;
};

namespace detail {

// A weight flattened to  scale * shape(theta)^power.
struct WeightProfile {
  enum class Shape { one, tan_half, abs_theta, step, sampled };
  Shape shape = Shape::one;
  double power = 1.0;
  double scale = 1.0;
  const WeightSpec* leaf = nullptr;  // owns step levels / samples

  static WeightProfile of(const WeightSpec& w) {
    WeightProfile p;
    switch (w.family()) {
      case WeightSpec::Family::constant: p.shape = Shape::one; break;
      case WeightSpec::Family::tan_alpha: p.shape = Shape::tan_half; p.power = w.alpha(); break;
      case WeightSpec::Family::abs_theta_alpha: p.shape = Shape::abs_theta; p.power = w.alpha(); break;
      case WeightSpec::Family::piecewise_step: p.shape = Shape::step; p.leaf = &w; break;
      case WeightSpec::Family::sampled: p.shape = Shape::sampled; p.leaf = &w; break;
      case WeightSpec::Family::power_of: {
        p = of(w.base());
        p.power *= w.exponent();
        p.scale = std::pow(p.scale, w.exponent());
        break;
      }
    }
    p.scale *= w.scale();
    return p;
  }

  double shape_value(double theta) const {
    switch (shape) {
      case Shape::one: return 1.0;
      case Shape::tan_half: {
        if (theta == kPi || theta == -kPi) return kInf;
        return std::abs(std::tan(theta / 2.0));
      }
      case Shape::abs_theta: return std::abs(theta);
      case Shape::step: {
        const auto& b = leaf->breakpoints();
        const std::size_t i = static_cast<std::size_t>(std::lower_bound(b.begin(), b.end(), theta) - b.begin());
        return leaf->levels()[i];
      }
      case Shape::sampled: return interpolate(theta);
    }
    return 0.0;
  }

  double interpolate(double theta) const {
    const auto& t = leaf->sample_theta();
    const auto& v = leaf->sample_values();
    const std::size_t n = t.size();
    const auto it = std::upper_bound(t.begin(), t.end(), theta);
    double t0, t1, v0, v1;
    if (it == t.begin() || it == t.end()) {  // wrap-around segment
      t0 = t[n - 1];
      v0 = v[n - 1];
      t1 = t[0] + 2.0 * kPi;
      v1 = v[0];
      if (theta < t0) theta += 2.0 * kPi;
    } else {
      const std::size_t i = static_cast<std::size_t>(it - t.begin());
      t0 = t[i - 1];
      t1 = t[i];
      v0 = v[i - 1];
      v1 = v[i];
    }
    const double u = (theta - t0) / (t1 - t0);
    return v0 + u * (v1 - v0);
  }

  double raise(double s) const {
    if (power == 1.0) return scale * s;
    if (s == 0.0) return power > 0.0 ? 0.0 : kInf;
    if (std::isinf(s)) return power > 0.0 ? kInf : 0.0;
    return scale * std::pow(s, power);
  }

  double value(double theta) const { return raise(shape_value(theta)); }

  // Value at theta = anchor + offset where anchor is -pi, 0 or pi and the
  // offset is tiny; avoids forming theta when it would round onto the anchor.
  double value_near(double anchor, double offset) const {
    if (shape == Shape::tan_half) {
      const double t = std::abs(std::tan(offset / 2.0));
      return raise(anchor == 0.0 ? t : 1.0 / t);
    }
    if (shape == Shape::abs_theta) return raise(std::abs(anchor + offset));
    return value(anchor + offset);
  }

  // w ~ distance^exponent near the anchor.
  double local_exponent(double anchor) const {
    if (shape == Shape::tan_half) return anchor == 0.0 ? power : -power;
    if (shape == Shape::abs_theta && anchor == 0.0) return power;
    return 0.0;
  }
};

}  // namespace detail

/// Pointwise value on (-pi, pi]. The tan family is +infinity at pi.
inline double eval_weight(const WeightSpec& w, double theta) {
  if (!(theta > -kPi && theta <= kPi)) throw DomainError("theta must lie in (-pi, pi]");
  return detail::WeightProfile::of(w).value(theta);
}

/// sup{a > 0 : w^a in A2}, known in closed form for the analytic families.
struct CriticalExponent {
  double p;
  bool infinite() const { return std::isinf(p); }
};

inline CriticalExponent critical_exponent(const WeightSpec& w) {
  switch (w.family()) {
    case WeightSpec::Family::constant:
    case WeightSpec::Family::piecewise_step: return {kInf};
    case WeightSpec::Family::tan_alpha:
    case WeightSpec::Family::abs_theta_alpha: return {1.0 / w.alpha()};
    case WeightSpec::Family::power_of: return {critical_exponent(w.base()).p / w.exponent()};
    case WeightSpec::Family::sampled:
      throw Unsupported("critical exponent of a sampled weight is not known in closed form; scan numerically");
  }
  throw Unsupported("unknown weight family");
}

/// sec(pi / 2p); 1 when p is infinite. Requires p > 1.
inline double similarity_floor(CriticalExponent p) {
  if (p.infinite()) return 1.0;
  if (!(p.p > 1.0)) throw Unsupported("critical exponent <= 1: the weight is not an A2 weight");
  return 1.0 / std::cos(kPi / (2.0 * p.p));
}

/// Fourier coefficients m = -K..K. Only m >= 0 are stored; negative indices
/// are conjugates, so Hermitian symmetry holds exactly.
class FourierTable {
 public:
  explicit FourierTable(std::vector<cplx> nonnegative) : c_(std::move(nonnegative)) {
    if (c_.empty()) throw DomainError("Fourier table needs at least the zeroth coefficient");
    if (!(c_[0].real() > 1e-14)) throw DomainError("zeroth Fourier coefficient must be strictly positive");
    c_[0] = c_[0].real();
  }

  int K() const { return static_cast<int>(c_.size()) - 1; }

  cplx operator()(int m) const {
    const int a = m < 0 ? -m : m;
    if (a > K())
      throw InsufficientCoefficients("Fourier index " + std::to_string(m) + " exceeds K = " + std::to_string(K()));
    return m < 0 ? std::conj(c_[static_cast<std::size_t>(a)]) : c_[static_cast<std::size_t>(a)];
  }

  const std::vector<cplx>& nonnegative() const { return c_; }

 private:
  std::vector<cplx> c_;
};

struct QuadratureConfig {
  double abs_tol = 1e-10;
  int max_level = 10;
  /// Panels per period of the highest requested frequency.
  double panels_per_period = 1.0;
};

namespace detail {

inline std::vector<cplx> step_coefficients(const WeightProfile& p, int K) {
  const auto& b = p.leaf->breakpoints();
  const auto& lv = p.leaf->levels();
  std::vector<cplx> c(static_cast<std::size_t>(K) + 1);
  for (std::size_t i = 0; i < lv.size(); ++i) {
    const double lo = i == 0 ? -kPi : b[i - 1];
    const double hi = i == b.size() ? kPi : b[i];
    const double level = p.raise(lv[i]);
    c[0] += level * (hi - lo);
    for (int m = 1; m <= K; ++m) {
      // \int_lo^hi e^{-i m t} dt = (e^{-i m hi} - e^{-i m lo}) / (-i m)
      const cplx diff = std::polar(1.0, -m * hi) - std::polar(1.0, -m * lo);
      c[static_cast<std::size_t>(m)] += level * diff / cplx(0.0, -static_cast<double>(m));
    }
  }
  for (cplx& v : c) v /= 2.0 * kPi;
  return c;
}

inline std::vector<cplx> sampled_coefficients(const WeightProfile& p, int K) {
  const auto& t = p.leaf->sample_theta();
  const auto& v = p.leaf->sample_values();
  const std::size_t n = t.size();
  std::vector<cplx> c(static_cast<std::size_t>(K) + 1);
  // Periodic trapezoid: node i carries half of each adjacent gap.
  for (std::size_t i = 0; i < n; ++i) {
    const double prev = i == 0 ? t[n - 1] - 2.0 * kPi : t[i - 1];
    const double next = i + 1 == n ? t[0] + 2.0 * kPi : t[i + 1];
    const double wt = 0.5 * (next - prev) * p.raise(v[i]);
    const cplx z = std::polar(1.0, -t[i]);
    cplx phase = 1.0;
    for (int m = 0; m <= K; ++m) {
      c[static_cast<std::size_t>(m)] += wt * phase;
      phase *= z;
    }
  }
  for (cplx& x : c) x /= 2.0 * kPi;
  return c;
}

struct QuadPanel {
  double a, b;
  bool anchored_left, anchored_right;
};

inline std::vector<cplx> singular_coefficients(const WeightProfile& p, int K, const QuadratureConfig& q) {
  // Special points -pi, 0, pi; every family routed here is smooth elsewhere.
  const double anchors[] = {-kPi, 0.0, kPi};
  for (double a : anchors) {
    if (p.local_exponent(a) <= -1.0)
      throw QuadratureFailure("weight is not integrable near theta = " + std::to_string(a) +
                              " (local exponent " + std::to_string(p.local_exponent(a)) + ")");
  }
  std::vector<QuadPanel> panels;
  const int per_half = std::max(2, static_cast<int>(std::ceil(0.5 * std::max(K, 1) * q.panels_per_period)));
  for (int half = 0; half < 2; ++half) {
    const double lo = anchors[half];
    const double hi = anchors[half + 1];
    const double len = (hi - lo) / per_half;
    for (int i = 0; i < per_half; ++i)
      panels.push_back({lo + i * len, i + 1 == per_half ? hi : lo + (i + 1) * len, i == 0, i + 1 == per_half});
  }

  // Neglected mass between each anchor and the innermost node.
  {
    const auto deepest = tanh_sinh_level(0).back();
    const double r = (panels.front().b - panels.front().a) / 2.0;
    const double delta = r * deepest.from_left;
    for (double a : anchors) {
      const double e = p.local_exponent(a);
      const double v = p.value_near(a, a == kPi ? -delta : delta);
      const double tail = v * delta / (1.0 + e) / (2.0 * kPi);
      if (!(tail <= q.abs_tol))
        throw QuadratureFailure("singularity at theta = " + std::to_string(a) + " too strong for tolerance");
    }
  }

  const std::size_t n = static_cast<std::size_t>(K) + 1;
  std::vector<cplx> sums(n), previous(n), current(n);
  for (int level = 0; level <= q.max_level; ++level) {
    const auto nodes = tanh_sinh_level(level);
    for (const QuadPanel& pan : panels) {
      const double r = (pan.b - pan.a) / 2.0;
      for (const TanhSinhNode& node : nodes) {
        const double dl = r * node.from_left;
        const double dr = r * node.from_right;
        double theta, value;
        if (dl <= dr) {
          theta = pan.a + dl;
          value = pan.anchored_left ? p.value_near(pan.a, dl) : p.value(theta);
        } else {
          theta = pan.b - dr;
          value = pan.anchored_right ? p.value_near(pan.b, -dr) : p.value(theta);
        }
        const double wv = r * node.weight * value;
        if (!std::isfinite(wv)) throw QuadratureFailure("non-finite weight value at theta = " + std::to_string(theta));
        const cplx z = std::polar(1.0, -theta);
        cplx phase = 1.0;
        for (std::size_t m = 0; m < n; ++m) {
          sums[m] += wv * phase;
          phase *= z;
        }
      }
    }
    const double h = std::ldexp(1.0, -level);
    double diff = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      current[m] = h * sums[m] / (2.0 * kPi);
      diff = std::max(diff, std::abs(current[m] - previous[m]));
    }
    if (level >= 2 && diff <= q.abs_tol) return current;
    previous = current;
  }
  throw QuadratureFailure("Fourier quadrature did not reach abs_tol " + std::to_string(q.abs_tol) + " by level " +
                          std::to_string(q.max_level));
}

}  // namespace detail

/// w^(m) for m = -K..K, each to quad.abs_tol.
inline FourierTable fourier_coeffs(const WeightSpec& w, int K, const QuadratureConfig& quad = {}) {
  if (K < 0) throw DomainError("K must be nonnegative");
  const detail::WeightProfile p = detail::WeightProfile::of(w);
  std::vector<cplx> c;
  switch (p.shape) {
    case detail::WeightProfile::Shape::one:
      c.assign(static_cast<std::size_t>(K) + 1, 0.0);
      c[0] = p.scale;
      break;
    case detail::WeightProfile::Shape::step: c = detail::step_coefficients(p, K); break;
    case detail::WeightProfile::Shape::sampled: c = detail::sampled_coefficients(p, K); break;
    case detail::WeightProfile::Shape::tan_half:
    case detail::WeightProfile::Shape::abs_theta: c = detail::singular_coefficients(p, K, quad); break;
  }
  if (!(c[0].real() > 1e-14)) throw DomainError("weight has no mass: w^(0) <= 1e-14");
  return FourierTable(std::move(c));
}

/// Parses "theta value" pairs, one per line; blank lines and lines starting
/// with '#' are skipped.
inline WeightSpec read_sampled_weight(std::istream& in) {
  std::vector<double> theta, values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double t, v;
    std::string rest;
    if (!(ls >> t >> v) || (ls >> rest))
      throw DomainError("sampled weight line " + std::to_string(lineno) + ": expected 'theta value'");
    theta.push_back(t);
    values.push_back(v);
  }
  return WeightSpec::sampled(std::move(theta), std::move(values));
}

}  // namespace rieszlab
