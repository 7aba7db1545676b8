#pragma once
//
// Double-exponential (tanh-sinh) nodes on a reference panel.
//
// A node at parameter t maps to x = a + r (1 + tanh s) = b - r (1 - tanh s),
// s = (pi/2) sinh t, r = (b - a)/2. Both offsets are produced in closed form
// so that integrands with endpoint singularities can be evaluated from the
// distance to the endpoint, which keeps full relative precision even when
// that distance is 1e-300.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "rieszlab/errors.hpp"

namespace rieszlab {

struct TanhSinhNode {
  double from_left;   // (x - a) / r, in (0, 2)
  double from_right;  // (b - x) / r, in (0, 2)
  double weight;      // dx/dt / r, without the step h
};

/// Nodes first introduced at the given level. Level 0 uses the integer
/// abscissae t = k; level l > 0 adds the odd multiples of 2^-l. The rule at
/// level l is h_l times the sum over all nodes of levels 0..l.
inline std::vector<TanhSinhNode> tanh_sinh_level(int level) {
  const double h = std::ldexp(1.0, -level);
  const int stride = level == 0 ? 1 : 2;
  const int first = level == 0 ? 0 : 1;
  std::vector<TanhSinhNode> nodes;
  for (int k = first;; k += stride) {
    const double t = k * h;
    const double s = std::numbers::pi / 2.0 * std::sinh(t);
    const double e = std::exp(-2.0 * s);
    const double near = 2.0 * e / (1.0 + e);  // 1 - tanh s
    const double far = 2.0 / (1.0 + e);       // 1 + tanh s
    const double ch = std::cosh(s);
    const double w = std::numbers::pi / 2.0 * std::cosh(t) / (ch * ch);
    if (!(near > 0.0) || !(w > 0.0) || !std::isfinite(w)) break;
    nodes.push_back({far, near, w});
    if (k != 0) nodes.push_back({near, far, w});
  }
  return nodes;
}

/// Integrand signature: f(x, distance_from_a, distance_from_b).
using PanelIntegrand = std::function<double(double, double, double)>;

/// Adaptive tanh-sinh on [a, b]: refines until two successive levels agree to
/// abs_tol. Intended for checks and one-off integrals; the Fourier machinery
/// runs its own vectorized loop over the same nodes.
inline double tanh_sinh_integrate(const PanelIntegrand& f, double a, double b, double abs_tol = 1e-12,
                                  int max_level = 12) {
  const double r = (b - a) / 2.0;
  double sum = 0.0;
  double previous = 0.0;
  for (int level = 0; level <= max_level; ++level) {
    for (const TanhSinhNode& n : tanh_sinh_level(level)) {
      const double dl = r * n.from_left;
      const double dr = r * n.from_right;
      const double x = dl <= dr ? a + dl : b - dr;
      sum += n.weight * f(x, dl, dr);
    }
    const double estimate = r * std::ldexp(sum, -level);
    if (level > 0 && std::abs(estimate - previous) <= abs_tol) return estimate;
    previous = estimate;
  }
  throw QuadratureFailure("tanh-sinh did not reach tolerance");
}

}  // namespace rieszlab
