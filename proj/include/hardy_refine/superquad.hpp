#pragma once

// Grid checks for superquadratic functions: f is superquadratic on [0, inf) when for every a
// there is C_a with
//
//   f(b) >= f(a) + C_a (b - a) + f(|b - a|)   for all b >= 0.
//
// On a finite grid each b != a bounds C_a from one side, so a grid is consistent iff the
// resulting intervals are nonempty. A consistent grid is evidence only.
//
// Emptiness is judged with the absolute slack `tol` plus a bound on the rounding error of
// the two binding quotients, so large f values on closely spaced points do not produce
// spurious violations.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "hardy_refine/errors.hpp"
#include "hardy_refine/quadrature.hpp"
#include "hardy_refine/scalar_fn.hpp"

namespace hardy_refine {

struct AnchorInterval {
  double a = 0.0;
  double low = -std::numeric_limits<double>::infinity();
  double high = std::numeric_limits<double>::infinity();
  std::optional<double> b_low;   // grid point giving the binding lower bound
  std::optional<double> b_high;  // grid point giving the binding upper bound
  double rounding = 0.0;         // floating-point error bound of low and high together
  bool empty = false;
};

/// (a, b_low, b_high): the lower bound from b_low < a exceeds the upper bound from b_high > a.
struct Violation {
  double a = 0.0;
  double b_low = 0.0;
  double b_high = 0.0;
  double excess = 0.0;  // low - high
};

struct SuperquadWitness {
  std::vector<double> anchors;
  std::vector<AnchorInterval> intervals;
  std::optional<Violation> violation;  // empty means consistent on the grid
  double tol = 0.0;
  bool convex_on_grid = true;  // diagnostic, never part of the verdict

  bool consistent() const noexcept { return !violation.has_value(); }
};

/// Sorted distinct grid points; rejects negative or non-finite entries.
inline std::vector<double> canonical_grid(std::span<const double> grid) {
  std::vector<double> g(grid.begin(), grid.end());
  for (double v : g)
    if (!std::isfinite(v) || v < 0.0) throw PreconditionError("superquadratic grid entries must be finite and >= 0");
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  if (g.size() < 3) throw DegenerateGrid("superquadratic check needs at least 3 distinct grid points");
  return g;
}

namespace detail {

inline bool convex_on(std::span<const double> g, std::span<const double> fg, double tol) {
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    // slope comparison avoids dividing by tiny spacings twice
    const double left = (fg[i] - fg[i - 1]) / (g[i] - g[i - 1]);
    const double right = (fg[i + 1] - fg[i]) / (g[i + 1] - g[i]);
    if (right < left - tol * std::max(1.0, std::fabs(left))) return false;
  }
  return true;
}

}  // namespace detail

template <class F>
SuperquadWitness check_superquadratic(const F& f, std::span<const double> grid, double tol = 1e-9) {
  if (!(tol >= 0.0)) throw PreconditionError("tol must be >= 0");
  SuperquadWitness w;
  w.tol = tol;
  w.anchors = canonical_grid(grid);
  const std::vector<double>& g = w.anchors;

  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::vector<double> fg(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) fg[i] = f(g[i]);

  for (std::size_t i = 0; i < g.size(); ++i) {
    AnchorInterval iv;
    iv.a = g[i];
    double err_low = 0.0, err_high = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double d = g[j] - g[i];
      if (std::fabs(d) < 1e-12) continue;
      const double fd = f(std::fabs(d));
      const double bound = (fg[j] - fg[i] - fd) / d;
      const double err = 16.0 * eps * (std::fabs(fg[j]) + std::fabs(fg[i]) + std::fabs(fd)) / std::fabs(d);
      if (d > 0.0 && bound < iv.high) {
        iv.high = bound;
        iv.b_high = g[j];
        err_high = err;
      } else if (d < 0.0 && bound > iv.low) {
        iv.low = bound;
        iv.b_low = g[j];
        err_low = err;
      }
    }
    iv.rounding = err_low + err_high;
    iv.empty = iv.low > iv.high + tol + iv.rounding;
    w.intervals.push_back(iv);
  }

  for (const AnchorInterval& iv : w.intervals) {
    if (!iv.empty) continue;
    w.violation = Violation{iv.a, *iv.b_low, *iv.b_high, iv.low - iv.high};
    break;
  }
  w.convex_on_grid = detail::convex_on(g, fg, tol);
  return w;
}

/// Finite measure on points of [0, inf) with positive weights summing to 1.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<double> points, std::vector<double> weights)
      : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.empty() || points_.size() != weights_.size())
      throw PreconditionError("measure needs matching, nonempty points and weights");
    CompensatedSum s;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!std::isfinite(points_[i]) || points_[i] < 0.0) throw PreconditionError("measure points must be finite and >= 0");
      if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) throw PreconditionError("measure weights must be positive");
      s.add(weights_[i]);
    }
    if (std::fabs(s.value() - 1.0) > 1e-12) throw PreconditionError("measure weights must sum to 1");
  }

  std::span<const double> points() const noexcept { return points_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return points_.size(); }

  double mean() const {
    CompensatedSum s;
    for (std::size_t i = 0; i < size(); ++i) s.add(weights_[i] * points_[i]);
    return s.value();
  }

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
};

/// lhs, rhs and gap = rhs - lhs of a Jensen-type inequality lhs <= rhs.
struct JensenGap {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};

/// f(sum w phi) <= sum w f(phi) - sum w f(|phi - sum w phi|)
template <class F>
JensenGap jensen_gap(const F& f, const DiscreteMeasure& m) {
  const double mu = m.mean();
  CompensatedSum rhs;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double w = m.weights()[i];
    const double x = m.points()[i];
    rhs.add(w * f(x));
    rhs.add(-w * f(std::fabs(x - mu)));
  }
  JensenGap r;
  r.lhs = f(mu);
  r.rhs = rhs.value();
  r.gap = r.rhs - r.lhs;
  return r;
}

}  // namespace hardy_refine
