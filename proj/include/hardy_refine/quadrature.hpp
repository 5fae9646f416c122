#pragma once

// Adaptive Gauss-Kronrod quadrature on intervals and on the half-line (0, inf), plus the
// nested integrals that make up the Hardy functionals: the running average
// H(x) = (1/x) int_0^x f, int H^p, int f^p and the refinement correction term.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "hardy_refine/errors.hpp"

namespace hardy_refine {

enum class Transform {
  rational,      // t = (u / (1 - u))^m, u in (0, 1)
  log_truncate,  // t = e^s on [trunc_lo, trunc_hi]; tails dropped
};

struct QuadConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  std::size_t max_panels = 2000;
  Transform transform = Transform::rational;
  // rational map is t = (u / (1 - u))^m; a tail x^{-a} becomes (1 - u)^{m(a-1)-1}, bounded
  // for a >= 1 + 1/m. m = 4 covers the p-th powers of 1/t tails down to p = 5/4.
  int rational_power = 4;
  double trunc_lo = 1e-8;
  double trunc_hi = 1e8;

  void validate() const {
    if (!(rel_tol > 0.0)) throw PreconditionError("rel_tol must be > 0");
    if (!(abs_tol > 0.0)) throw PreconditionError("abs_tol must be > 0");
    if (max_panels < 1) throw PreconditionError("max_panels must be >= 1");
    if (rational_power < 1 || rational_power > 4) throw PreconditionError("rational_power must be in [1, 4]");
    if (transform == Transform::log_truncate && !(trunc_lo > 0.0 && trunc_lo < trunc_hi))
      throw PreconditionError("log-truncate needs 0 < trunc_lo < trunc_hi");
  }

  double tolerance_for(double value) const { return std::max(abs_tol, rel_tol * std::fabs(value)); }
};

struct QuadResult {
  double value = 0.0;
  double err_estimate = 0.0;
  std::size_t panels_used = 0;
  bool converged = true;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double err;
};

template <class G>
Panel gk15(const G& g, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = g(center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::fabs(resk);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = g(center - dx);
    f2[j] = g(center + dx);
    const double s = f1[j] + f2[j];
    resk += kWgk[j] * s;
    resabs += kWgk[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * s;
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::fabs(fc - reskh);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::fabs(f1[j] - reskh) + std::fabs(f2[j] - reskh));
  const double w = std::fabs(half);
  resasc *= w;
  resabs *= w;
  double err = std::fabs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > uflow / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return Panel{a, b, resk * half, err};
}

inline bool splittable(double a, double b) {
  const double scale = std::max({std::fabs(a), std::fabs(b), std::numeric_limits<double>::min()});
  // the outermost Kronrod node sits 0.0043 half-widths inside; keep it off the endpoints
  return (b - a) > 2048.0 * std::numeric_limits<double>::epsilon() * scale;
}

/// Globally adaptive bisection over the given panel edges. The worst panel (largest error,
/// leftmost on ties) is split until the summed error meets the tolerance or the panel budget
/// is exhausted. The final value is summed left to right with compensation, so results do not
/// depend on the order in which panels were refined.
template <class G>
QuadResult adaptive(const G& g, std::span<const double> edges, const QuadConfig& cfg) {
  std::vector<Panel> panels;
  panels.reserve(std::min<std::size_t>(cfg.max_panels + edges.size(), 1u << 16));
  double total = 0.0, total_err = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i] < edges[i + 1])) continue;
    panels.push_back(gk15(g, edges[i], edges[i + 1]));
    total += panels.back().value;
    total_err += panels.back().err;
  }
  const auto worse = [&panels](std::size_t l, std::size_t r) {
    if (panels[l].err != panels[r].err) return panels[l].err < panels[r].err;
    return panels[l].a > panels[r].a;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(worse)> queue(worse);
  for (std::size_t i = 0; i < panels.size(); ++i) queue.push(i);

  while (!queue.empty() && total_err > cfg.tolerance_for(total) && panels.size() < cfg.max_panels) {
    const std::size_t i = queue.top();
    queue.pop();
    const Panel parent = panels[i];
    if (!splittable(parent.a, parent.b)) continue;  // kept as is; its error stays in the total
    const double mid = 0.5 * (parent.a + parent.b);
    const Panel left = gk15(g, parent.a, mid);
    const Panel right = gk15(g, mid, parent.b);
    total += left.value + right.value - parent.value;
    total_err += left.err + right.err - parent.err;
    panels[i] = left;
    panels.push_back(right);
    queue.push(i);
    queue.push(panels.size() - 1);
  }

  std::sort(panels.begin(), panels.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  CompensatedSum value, err;
  for (const Panel& p : panels) {
    value.add(p.value);
    err.add(p.err);
  }
  QuadResult out;
  out.value = value.value();
  out.err_estimate = err.value();
  out.panels_used = panels.size();
  out.converged = out.err_estimate <= cfg.tolerance_for(out.value);
  return out;
}

inline std::vector<double> merge_edges(double a, double b, std::span<const double> interior) {
  std::vector<double> edges{a};
  for (double x : interior)
    if (x > a && x < b) edges.push_back(x);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

template <class F>
double sample(const F& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) throw NonFiniteSample(x);
  return v;
}

}  // namespace detail

/// int_a^b f(t) dt. `breakpoints` inside (a, b) become initial panel edges.
template <class F>
QuadResult integrate_interval(const F& f, double a, double b, const QuadConfig& cfg,
                              std::span<const double> breakpoints = {}) {
  if (!(a <= b)) throw PreconditionError("integrate_interval requires a <= b");
  if (a == b) return {};
  const auto g = [&f](double t) { return detail::sample(f, t); };
  const std::vector<double> edges = detail::merge_edges(a, b, breakpoints);
  return detail::adaptive(g, edges, cfg);
}

/// int_0^inf f(t) dt under cfg.transform. `breakpoints` are positions in t.
template <class F>
QuadResult integrate_halfline(const F& f, const QuadConfig& cfg, std::span<const double> breakpoints = {}) {
  cfg.validate();
  if (cfg.transform == Transform::log_truncate) {
    const auto g = [&f](double s) {
      const double t = std::exp(s);
      return detail::sample(f, t) * t;
    };
    std::vector<double> logs;
    for (double t : breakpoints)
      if (t > 0.0) logs.push_back(std::log(t));
    const double lo = std::log(cfg.trunc_lo), hi = std::log(cfg.trunc_hi);
    // start from one panel per ~e^2 so a narrow bump is not missed by a single rule
    const int n0 = std::max(4, static_cast<int>(std::ceil((hi - lo) / 2.0)));
    for (int i = 1; i < n0; ++i) logs.push_back(lo + (hi - lo) * i / n0);
    return detail::adaptive(g, detail::merge_edges(lo, hi, logs), cfg);
  }
  const int m = cfg.rational_power;
  const auto g = [&f, m](double u) {
    const double w = 1.0 - std::min(u, std::nextafter(1.0, 0.0));
    const double r = u / w;
    double t = r, jac = 1.0 / (w * w);
    if (m > 1) {
      const double rm1 = std::pow(r, m - 1);
      t = rm1 * r;
      jac *= m * rm1;
    }
    const double v = detail::sample(f, t);
    if (v == 0.0) return 0.0;
    const double out = v * jac;
    if (!std::isfinite(out)) throw NonFiniteSample(t);
    return out;
  };
  const auto to_u = [m](double t) {
    const double r = m == 1 ? t : std::pow(t, 1.0 / m);
    return r / (1.0 + r);
  };
  // initial edges one to two decades apart in t
  std::vector<double> us;
  for (double t : {1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 0.1, 0.3, 1.0, 3.0, 10.0, 100.0, 1e3, 1e4, 1e6, 1e8})
    us.push_back(to_u(t));
  for (double t : breakpoints)
    if (t > 0.0 && std::isfinite(t)) us.push_back(to_u(t));
  return detail::adaptive(g, detail::merge_edges(0.0, 1.0, us), cfg);
}

/// Prefix integrals of f on a grid: cumulative[i] = int_0^{grid[i]} f.
struct RunningAverage {
  std::vector<double> grid;
  std::vector<double> cumulative;
  std::vector<double> cumulative_err;
  bool converged = true;

  double average(std::size_t i) const { return cumulative.at(i) / grid.at(i); }
};

namespace detail {

inline QuadConfig inner_config(const QuadConfig& outer) {
  QuadConfig inner = outer;
  inner.rel_tol = outer.rel_tol / 10.0;
  // Relative control only: the half-line map scales absolute errors by up to x^2.
  inner.abs_tol = 1e-300;
  inner.max_panels = 400;
  return inner;
}

inline void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw PreconditionError("grid must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) throw PreconditionError("grid entries must be positive and finite");
    if (i && !(grid[i] > grid[i - 1])) throw PreconditionError("grid must be strictly increasing");
  }
}

}  // namespace detail

/// Cumulative integrals of f over a strictly increasing positive grid, panel by panel,
/// with inner tolerance rel_tol / 10.
template <class F>
RunningAverage running_average(const F& f, std::span<const double> grid, const QuadConfig& cfg) {
  detail::check_grid(grid);
  const QuadConfig inner = detail::inner_config(cfg);
  RunningAverage out;
  out.grid.assign(grid.begin(), grid.end());
  CompensatedSum cum, err;
  double left = 0.0;
  for (double x : grid) {
    const QuadResult piece = integrate_interval(f, left, x, inner);
    cum.add(piece.value);
    err.add(piece.err_estimate);
    out.converged = out.converged && piece.converged;
    out.cumulative.push_back(cum.value());
    out.cumulative_err.push_back(err.value());
    left = x;
  }
  return out;
}

/// x -> int_0^x f, answered from a cached log-spaced RunningAverage plus one short
/// quadrature from the nearest grid point below x. Points below the first grid node
/// (1e-6) are integrated directly from 0.
template <class F>
class PrefixIntegral {
 public:
  PrefixIntegral(const F& f, const QuadConfig& cfg, std::span<const double> breakpoints = {})
      : f_(f), inner_(detail::inner_config(cfg)) {
    std::vector<double> grid;
    for (int k = -24; k <= 64; ++k) grid.push_back(std::pow(10.0, k / 4.0));
    for (double t : breakpoints)
      if (t > grid.front() && std::isfinite(t)) grid.push_back(t);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    cache_ = running_average(f_, grid, cfg);
  }

  double operator()(double x) const {
    const auto& grid = cache_.grid;
    if (x <= grid.front()) return track(integrate_interval(f_, 0.0, x, inner_));
    const std::size_t j = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), x) - grid.begin()) - 1;
    if (grid[j] == x) return cache_.cumulative[j];
    return cache_.cumulative[j] + track(integrate_interval(f_, grid[j], x, inner_));
  }

  /// (1/x) int_0^x f
  double average(double x) const { return (*this)(x) / x; }

  const RunningAverage& cache() const noexcept { return cache_; }
  bool converged() const noexcept { return cache_.converged && inner_failures_ == 0; }

 private:
  double track(const QuadResult& r) const {
    if (!r.converged) ++inner_failures_;
    return r.value;
  }

  const F& f_;
  QuadConfig inner_;
  RunningAverage cache_;
  mutable std::size_t inner_failures_ = 0;
};

// ---------------------------------------------------------------------------------------------
// Spectral densities. A density describes t -> F(t) through its spectrum against a fixed
// vector: eigenvalues lambda_k(t) (ascending) and weights |<u_k, eta>|^2. A scalar f is the
// one-component density (f(t), 1). Then
//   <F(t) eta, eta>             = sum_k w_k lambda_k
//   <g(F(t)) eta, eta>          = sum_k w_k g(lambda_k)
// which is all the Hardy functionals need.
// ---------------------------------------------------------------------------------------------

template <class D>
concept SpectralDensity = requires(const D& d, double t, std::span<double> lam, std::span<double> w) {
  { d.components() } -> std::convertible_to<std::size_t>;
  d.spectrum(t, lam, w);
  { d.breakpoints() } -> std::convertible_to<std::span<const double>>;
};

/// One-component density for a scalar function.
template <class F>
class ScalarDensity {
 public:
  explicit ScalarDensity(const F& f) : f_(f) {}
  std::size_t components() const { return 1; }
  void spectrum(double t, std::span<double> lam, std::span<double> w) const {
    lam[0] = f_(t);
    w[0] = 1.0;
  }
  std::span<const double> breakpoints() const { return {}; }

 private:
  const F& f_;
};

namespace detail {

template <SpectralDensity D>
class DensityEval {
 public:
  explicit DensityEval(const D& d) : d_(d), lam_(d.components()), w_(d.components()) {}

  void at(double t) const { d_.spectrum(t, lam_, w_); }
  std::size_t size() const { return lam_.size(); }
  double lambda(std::size_t k) const { return lam_[k]; }
  double weight(std::size_t k) const { return w_[k]; }

  double mean(double t) const {
    at(t);
    CompensatedSum s;
    for (std::size_t k = 0; k < lam_.size(); ++k) s.add(w_[k] * lam_[k]);
    return s.value();
  }
  double power(double t, double p) const {
    at(t);
    CompensatedSum s;
    for (std::size_t k = 0; k < lam_.size(); ++k) s.add(w_[k] * std::pow(std::fabs(lam_[k]), p));
    return s.value();
  }

 private:
  const D& d_;
  mutable std::vector<double> lam_;
  mutable std::vector<double> w_;
};

}  // namespace detail

/// Inner variable of the correction integrals.
enum class InnerMap {
  // t = x w^q, q = p/(p-1). Turns x^{1/p} t^{-1/p} dt / x into q dw and
  // x^{-1/p} t^{1/p} into w^{q-1}, removing the endpoint singularity at t = 0.
  power,
  // t = x v; (1/x) dt = dv.
  linear,
};

struct InnerStats {
  std::size_t evaluations = 0;
  std::size_t failures = 0;
  std::size_t kinks = 0;
  std::size_t kink_fallbacks = 0;
};

namespace detail {

/// Locates the sign change of `ind` on [lo, hi] by bisection.
template <class Ind>
double bisect_kink(const Ind& ind, double lo, double hi, double flo) {
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = ind(mid);
    if (!std::isfinite(fm)) throw KinkNotBracketed("non-finite kink indicator at w=" + std::to_string(mid));
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// int over the unit inner variable of sum_k w_k |s * lambda_k(t) - shift|^p with t and s
/// given by `map`, split at the zero crossings of s * lambda_k(t) - shift.
template <SpectralDensity D>
QuadResult deviation_inner(const DensityEval<D>& ev, std::span<const double> t_breaks, double x, double shift,
                           double p, InnerMap map, const QuadConfig& inner, InnerStats& stats) {
  const double q = p / (p - 1.0);
  const auto position = [&](double w) -> std::pair<double, double> {
    if (map == InnerMap::linear) return {x * w, 1.0};
    return {x * std::pow(w, q), std::pow(w, q - 1.0)};
  };
  const auto integrand = [&](double w) {
    const auto [t, s] = position(w);
    ev.at(t);
    CompensatedSum sum;
    for (std::size_t k = 0; k < ev.size(); ++k) {
      const double wk = ev.weight(k);
      if (wk != 0.0) sum.add(wk * std::pow(std::fabs(s * ev.lambda(k) - shift), p));
    }
    return sum.value();
  };

  std::vector<double> breaks;
  for (double tb : t_breaks) {
    if (!(tb > 0.0 && tb < x)) continue;
    breaks.push_back(map == InnerMap::linear ? tb / x : std::pow(tb / x, 1.0 / q));
  }

  // Scan points: uniform in w plus two per decade of t below x, so features of F at t = O(1)
  // (which sit at w ~ x^{-1/q} when x is large) are neither missed by the scan nor by the
  // initial panels.
  std::vector<double> scan;
  constexpr int kScan = 24;
  for (int i = 1; i <= kScan; ++i) scan.push_back(static_cast<double>(i) / kScan);
  for (int k = -12; k <= 40; ++k) {
    const double tk = std::pow(10.0, k / 2.0);
    if (tk >= x) break;
    const double wk = map == InnerMap::linear ? tk / x : std::pow(tk / x, 1.0 / q);
    scan.push_back(wk);
    breaks.push_back(wk);
  }
  std::sort(scan.begin(), scan.end());
  scan.erase(std::unique(scan.begin(), scan.end()), scan.end());

  const std::size_t m = ev.size();
  std::vector<double> prev(m), cur(m);
  const auto indicators = [&](double w, std::vector<double>& out) {
    if (w == 0.0 && map == InnerMap::power) {
      std::fill(out.begin(), out.end(), -shift);
      return;
    }
    const auto [t, s] = position(w);
    ev.at(t);
    for (std::size_t k = 0; k < m; ++k) out[k] = s * ev.lambda(k) - shift;
  };
  double w_prev = map == InnerMap::power ? 0.0 : std::min(1e-9, 0.5 * scan.front());
  indicators(w_prev, prev);
  for (const double w_cur : scan) {
    indicators(w_cur, cur);
    for (std::size_t k = 0; k < m; ++k) {
      const double a = prev[k], b = cur[k];
      if (!((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0))) continue;
      const auto branch = [&, k](double w) {
        const auto [t, s] = position(w);
        ev.at(t);
        return s * ev.lambda(k) - shift;
      };
      try {
        breaks.push_back(bisect_kink(branch, w_prev, w_cur, a));
        ++stats.kinks;
      } catch (const KinkNotBracketed&) {
        // finer panels around the unresolved crossing instead
        ++stats.kink_fallbacks;
        for (int j = 0; j <= 8; ++j) breaks.push_back(w_prev + (w_cur - w_prev) * j / 8.0);
      }
    }
    prev.swap(cur);
    w_prev = w_cur;
  }

  const QuadResult r = integrate_interval(integrand, 0.0, 1.0, inner, breaks);
  ++stats.evaluations;
  if (!r.converged) ++stats.failures;
  return r;
}

}  // namespace detail

/// The three half-line functionals of one density at exponent p, sharing one prefix cache.
/// `weighted` switches to the dx/x measure of the weighted (Lemma-type) form:
///   lhs        = int H(x)^p dx            | int H(x)^p dx/x
///   power      = int <F^p eta,eta> dt     | int <F^p eta,eta> dt/t
///   correction = int (1/x) int_0^x x^{1/p} t^{-1/p} <|x^{-1/p} t^{1/p} F(t) - ((p-1)/p) H(x)|^p eta,eta> dt dx
///              | int (1/x) int_0^x <|F(t) - H(x)|^p eta,eta> dt dx/x
template <SpectralDensity D>
class HardyFunctionals {
 public:
  HardyFunctionals(const D& density, double p, const QuadConfig& cfg, bool weighted = false)
      : density_(density),
        mean_eval_(density),
        mean_fn_(mean_eval_),
        p_(p),
        cfg_(cfg),
        weighted_(weighted),
        prefix_(mean_fn_, cfg, density.breakpoints()) {
    cfg.validate();
    if (!(p >= 1.0)) throw PreconditionError("p must be >= 1");
  }

  // prefix_ refers to mean_fn_, which refers to mean_eval_
  HardyFunctionals(const HardyFunctionals&) = delete;
  HardyFunctionals& operator=(const HardyFunctionals&) = delete;

  double average(double x) const { return prefix_.average(x); }

  QuadResult lhs() const {
    const auto g = [&](double x) {
      const double h = std::pow(std::fabs(prefix_.average(x)), p_);
      return weighted_ ? h / x : h;
    };
    QuadResult r = integrate_halfline(g, cfg_, density_.breakpoints());
    r.converged = r.converged && prefix_.converged();
    return r;
  }

  QuadResult power() const {
    detail::DensityEval<D> ev(density_);
    const auto g = [&](double t) {
      const double v = ev.power(t, p_);
      return weighted_ ? v / t : v;
    };
    return integrate_halfline(g, cfg_, density_.breakpoints());
  }

  QuadResult correction() const {
    const detail::DensityEval<D> ev(density_);
    const QuadConfig inner = detail::inner_config(cfg_);
    const double q = p_ / (p_ - 1.0);
    const std::span<const double> breaks = density_.breakpoints();
    const auto g = [&](double x) {
      const double h = prefix_.average(x);
      if (weighted_) {
        const QuadResult r = detail::deviation_inner(ev, breaks, x, h, p_, InnerMap::linear, inner, stats_);
        return r.value / x;
      }
      const double shift = (p_ - 1.0) / p_ * h;
      const QuadResult r = detail::deviation_inner(ev, breaks, x, shift, p_, InnerMap::power, inner, stats_);
      return q * r.value;
    };
    QuadResult r = integrate_halfline(g, cfg_, breaks);
    r.converged = r.converged && stats_.failures == 0 && prefix_.converged();
    return r;
  }

  const InnerStats& inner_stats() const noexcept { return stats_; }

 private:
  struct MeanFn {
    const detail::DensityEval<D>& ev;
    double operator()(double t) const { return ev.mean(t); }
  };

  const D& density_;
  detail::DensityEval<D> mean_eval_;
  MeanFn mean_fn_;
  double p_;
  QuadConfig cfg_;
  bool weighted_;
  PrefixIntegral<MeanFn> prefix_;
  mutable InnerStats stats_;
};

/// int_0^inf ((1/x) int_0^x f)^p dx
template <class F>
QuadResult hardy_lhs(const F& f, double p, const QuadConfig& cfg) {
  const ScalarDensity<F> d(f);
  return HardyFunctionals<ScalarDensity<F>>(d, p, cfg).lhs();
}

/// int_0^inf (1/x) int_0^x x^{1/p} t^{-1/p} |x^{-1/p} t^{1/p} f(t) - ((p-1)/p) H(x)|^p dt dx
template <class F>
QuadResult correction_term(const F& f, double p, const QuadConfig& cfg) {
  if (!(p > 1.0)) throw PreconditionError("correction_term requires p > 1");
  const ScalarDensity<F> d(f);
  return HardyFunctionals<ScalarDensity<F>>(d, p, cfg).correction();
}

}  // namespace hardy_refine
