#pragma once

// Finite-dimensional (Hermitian matrix) forms of the operator inequalities.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hardy_refine/hardy.hpp"
#include "hardy_refine/hermitian.hpp"
#include "hardy_refine/superquad.hpp"

namespace hardy_refine {

// ---------------------------------------------------------------------------------------------
// Jensen-type gaps
// ---------------------------------------------------------------------------------------------

namespace detail {

inline void require_psd(const HermitianMatrix& m, const char* what) {
  if (!m.is_psd()) throw PreconditionError(std::string(what) + " must be positive semidefinite");
}

inline void require_dim(const HermitianMatrix& m, const UnitVector& eta) {
  if (m.dim() != eta.dim()) throw PreconditionError("matrix and vector dimensions differ");
}

/// <f(|M - a I|) eta, eta>
template <class F>
double deviation_form(const HermitianMatrix& m, double a, const F& f, const CVector& eta) {
  const CMatrix shifted = m.matrix() - a * CMatrix::Identity(m.dim(), m.dim());
  return quadratic_form_of(HermitianMatrix(shifted), [&](double l) { return f(std::fabs(l)); }, eta);
}

}  // namespace detail

/// f(<A eta,eta>) <= <f(A) eta,eta> - <f(|A - <A eta,eta> I|) eta,eta>
template <class F>
JensenGap theorem_a_gap(const HermitianMatrix& a, const UnitVector& eta, const F& f) {
  detail::require_psd(a, "A");
  detail::require_dim(a, eta);
  const CVector& v = eta.vector();
  const double mean = a.quadratic_form(v);
  CompensatedSum rhs;
  rhs.add(1.0 * quadratic_form_of(a, f, v));
  rhs.add(-(1.0 * detail::deviation_form(a, mean, f, v)));
  JensenGap r;
  r.lhs = f(mean);
  r.rhs = rhs.value();
  r.gap = r.rhs - r.lhs;
  return r;
}

/// Phi(X_1..X_m) = sum w_i X_i with positive weights. After normalization the weights are
/// nudged until the left-to-right sum is exactly 1, so Phi(I, .., I) == I bitwise.
class AveragingMap {
 public:
  explicit AveragingMap(std::vector<double> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw PreconditionError("averaging map needs at least one weight");
    double total = 0.0;
    for (double w : w_) {
      if (!(w > 0.0) || !std::isfinite(w)) throw PreconditionError("averaging weights must be positive");
      total += w;
    }
    for (double& w : w_) w /= total;
    std::vector<std::size_t> order(w_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w_[a] > w_[b]; });
    for (int it = 0; it < 64 && sum() != 1.0; ++it) {
      double& w = w_[order[static_cast<std::size_t>(it) % order.size()]];
      const double adjusted = w + (1.0 - sum());
      if (adjusted > 0.0) w = adjusted;
    }
    if (sum() != 1.0) throw PreconditionError("could not normalize averaging weights");
  }

  std::span<const double> weights() const noexcept { return w_; }
  std::size_t size() const noexcept { return w_.size(); }

  HermitianMatrix apply(std::span<const HermitianMatrix> xs) const {
    if (xs.size() != w_.size()) throw PreconditionError("averaging map size mismatch");
    CMatrix acc = w_[0] * xs[0].matrix();
    for (std::size_t i = 1; i < xs.size(); ++i) {
      if (xs[i].dim() != xs[0].dim()) throw PreconditionError("averaging map dimension mismatch");
      acc += w_[i] * xs[i].matrix();
    }
    return HermitianMatrix(acc);
  }

 private:
  double sum() const {
    double s = 0.0;
    for (double w : w_) s += w;
    return s;
  }

  std::vector<double> w_;
};

/// With A = Phi(F):
///   f(<A eta,eta>) <= sum w_i <f(F_i) eta,eta> - sum w_i <f(|F_i - <A eta,eta> I|) eta,eta>
template <class F>
JensenGap theorem_b_gap(std::span<const HermitianMatrix> samples, const AveragingMap& phi, const UnitVector& eta,
                        const F& f) {
  for (const HermitianMatrix& s : samples) {
    detail::require_psd(s, "field sample");
    detail::require_dim(s, eta);
  }
  const CVector& v = eta.vector();
  const HermitianMatrix avg = phi.apply(samples);
  const double mean = avg.quadratic_form(v);
  CompensatedSum rhs;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double w = phi.weights()[i];
    rhs.add(w * quadratic_form_of(samples[i], f, v));
    rhs.add(-(w * detail::deviation_form(samples[i], mean, f, v)));
  }
  JensenGap r;
  r.lhs = f(mean);
  r.rhs = rhs.value();
  r.gap = r.rhs - r.lhs;
  return r;
}

// ---------------------------------------------------------------------------------------------
// Matrix fields
// ---------------------------------------------------------------------------------------------

/// Samples F(t_1..t_m) of a PSD matrix field. Between samples the field is linear in t;
/// outside [t_1, t_m] it is zero.
class MatrixField {
 public:
  MatrixField(std::vector<double> grid, std::vector<HermitianMatrix> samples)
      : grid_(std::move(grid)), samples_(std::move(samples)) {
    if (grid_.empty() || grid_.size() != samples_.size()) throw PreconditionError("field grid and samples must match");
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      if (!(grid_[i] > 0.0) || !std::isfinite(grid_[i])) throw PreconditionError("field grid must be positive");
      if (i && !(grid_[i] > grid_[i - 1])) throw PreconditionError("field grid must be strictly increasing");
      if (samples_[i].dim() != samples_[0].dim()) throw PreconditionError("field samples differ in dimension");
      if (!samples_[i].is_psd()) throw PreconditionError("field sample " + std::to_string(i) + " is not PSD");
    }
  }

  /// Samples g(t_i) on the given grid.
  template <class G>
  static MatrixField sample(const G& g, std::vector<double> grid) {
    std::vector<HermitianMatrix> s;
    s.reserve(grid.size());
    for (double t : grid) s.push_back(g(t));
    return MatrixField(std::move(grid), std::move(s));
  }

  Eigen::Index dim() const noexcept { return samples_[0].dim(); }
  std::span<const double> grid() const noexcept { return grid_; }
  std::span<const HermitianMatrix> samples() const noexcept { return samples_; }
  std::span<const double> breakpoints() const noexcept { return grid_; }

  HermitianMatrix operator()(double t) const {
    if (!(t >= grid_.front() && t <= grid_.back())) return HermitianMatrix::zero(dim());
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    if (it == grid_.end()) return samples_.back();
    const std::size_t j = static_cast<std::size_t>(it - grid_.begin());
    const double s = (t - grid_[j - 1]) / (grid_[j] - grid_[j - 1]);
    return HermitianMatrix((1.0 - s) * samples_[j - 1].matrix() + s * samples_[j].matrix());
  }

  /// Every other sample (the last one always kept): the h -> 2h field of a Richardson audit.
  MatrixField coarsened() const {
    std::vector<double> g;
    std::vector<HermitianMatrix> s;
    for (std::size_t i = 0; i < grid_.size(); i += 2) {
      g.push_back(grid_[i]);
      s.push_back(samples_[i]);
    }
    if (g.back() != grid_.back()) {
      g.push_back(grid_.back());
      s.push_back(samples_.back());
    }
    return MatrixField(std::move(g), std::move(s));
  }

 private:
  std::vector<double> grid_;
  std::vector<HermitianMatrix> samples_;
};

/// t -> sum_k exp(-(ln t - mu_k)^2 / (2 sigma_k^2)) A_k, with A_k PSD. Random test fields.
struct BumpField {
  std::vector<double> centers;  // mu_k, in ln t
  std::vector<double> widths;   // sigma_k
  std::vector<HermitianMatrix> coefficients;

  Eigen::Index dim() const { return coefficients.front().dim(); }

  HermitianMatrix operator()(double t) const {
    CMatrix acc = CMatrix::Zero(dim(), dim());
    if (t > 0.0) {
      const double s = std::log(t);
      for (std::size_t k = 0; k < coefficients.size(); ++k) {
        const double z = (s - centers[k]) / widths[k];
        acc += std::exp(-0.5 * z * z) * coefficients[k].matrix();
      }
    }
    return HermitianMatrix(acc);
  }
};

/// 1-3 bumps centred in [1e-2, 1e2] with widths in [0.3, 1.5]; coefficients are full rank,
/// or rank one when `rank_one` is set.
inline BumpField random_bump_field(Eigen::Index dim, Rng& rng, bool rank_one = false) {
  BumpField f;
  const int n = 1 + static_cast<int>(rng() % 3);
  for (int k = 0; k < n; ++k) {
    f.centers.push_back(std::log(1e-2) + uniform01(rng) * std::log(1e4));
    f.widths.push_back(0.3 + 1.2 * uniform01(rng));
    f.coefficients.push_back(random_psd(dim, rng, rank_one ? 1 : dim));
  }
  return f;
}

// ---------------------------------------------------------------------------------------------
// Refined operator Hardy inequality, via quadratic forms against eta
// ---------------------------------------------------------------------------------------------

/// Spectral density of t -> F(t) seen through eta: eigenvalues of F(t) (negative ones clipped
/// to 0) with weights |<u_k, eta>|^2.
template <class Field>
class FieldDensity {
 public:
  FieldDensity(const Field& field, const UnitVector& eta) : field_(field), eta_(eta) {}

  std::size_t components() const { return static_cast<std::size_t>(eta_.dim()); }

  void spectrum(double t, std::span<double> lam, std::span<double> w) const {
    const HermitianMatrix m = field_(t);
    if (m.dim() != eta_.dim()) throw PreconditionError("field and vector dimensions differ");
    const Spectrum s = m.spectrum();
    const CVector c = s.vectors.adjoint() * eta_.vector();
    const double scale = std::max(std::fabs(s.values(0)), std::fabs(s.values(s.values.size() - 1)));
    for (Eigen::Index k = 0; k < c.size(); ++k) {
      double l = s.values(k);
      if (!std::isfinite(l)) throw NonFiniteSample(t);
      if (l < 0.0) {
        clip_ = std::max(clip_, -l);
        if (scale > 0.0) rel_clip_ = std::max(rel_clip_, -l / scale);
        l = 0.0;
      }
      lam[static_cast<std::size_t>(k)] = l;
      w[static_cast<std::size_t>(k)] = std::norm(c(k));
    }
  }

  std::span<const double> breakpoints() const {
    if constexpr (requires(const Field& f) { f.breakpoints(); }) return field_.breakpoints();
    else return {};
  }

  double clip() const noexcept { return clip_; }
  double relative_clip() const noexcept { return rel_clip_; }

 private:
  const Field& field_;
  const UnitVector& eta_;
  mutable double clip_ = 0.0;
  mutable double rel_clip_ = 0.0;
};

/// <field(t) eta,eta> version of the refined Hardy inequality (p >= 2). Works for any callable
/// t -> HermitianMatrix; sampled fields are additionally Richardson-audited.
template <class Field>
HardyReport operator_hardy_refined(const Field& field, double p, const UnitVector& eta, const QuadConfig& cfg,
                                   const std::string& name = "F") {
  detail::require_p(p, 2.0, true, "operator_hardy_refined");
  const FieldDensity<Field> d(field, eta);
  HardyReport r = detail::refined_from_density(d, name, p, cfg, ReportKind::operator_refined);
  r.psd_clip = d.clip();
  if (d.relative_clip() > 0.0) {
    // first-order effect of a relative perturbation on p-homogeneous terms
    r.err_budget += p * d.relative_clip() *
                    (std::fabs(r.lhs) + std::fabs(r.classical_rhs) + std::fabs(r.correction_coefficient * r.correction));
    r.verdict = judge(r.refined_margin, r.err_budget);
  }
  return r;
}

inline HardyReport operator_hardy_refined(const MatrixField& field, double p, const UnitVector& eta,
                                          const QuadConfig& cfg, const std::string& name = "F") {
  HardyReport r = operator_hardy_refined<MatrixField>(field, p, eta, cfg, name);
  if (field.grid().size() >= 5) {
    const MatrixField coarse = field.coarsened();
    const HardyReport c = operator_hardy_refined<MatrixField>(coarse, p, eta, cfg, name);
    r.discretization_estimate = std::max({std::fabs(r.lhs - c.lhs), std::fabs(r.classical_rhs - c.classical_rhs),
                                          std::fabs(r.refined_rhs - c.refined_rhs)});
  }
  return r;
}

// ---------------------------------------------------------------------------------------------
// Hansen's inequality in the Loewner order
// ---------------------------------------------------------------------------------------------

struct HansenOptions {
  double lo = 1e-4;
  double hi = 1e4;
  std::size_t intervals = 512;  // the audit also runs 2 * intervals
  double tol = 1e-6;
};

struct HansenResult {
  double p = 0.0;
  double eigmin_slack = 0.0;  // eigmin(R - L) on the finer grid
  double richardson = 0.0;    // spectral norm of the change in R - L between the two grids
  CMatrix lhs;                // L
  CMatrix rhs;                // R
  bool holds = true;          // eigmin_slack >= -tol
};

namespace detail {

inline HermitianMatrix psd_power(const HermitianMatrix& m, double p) {
  return apply_function(m, [p](double l) { return l > 0.0 ? std::pow(l, p) : 0.0; });
}

/// L and R for the field that equals F(lo) on (0, lo], F on [lo, hi] and 0 beyond hi,
/// with trapezoid sums in s = ln x.
template <class Field>
std::pair<CMatrix, CMatrix> hansen_sides(const Field& field, double p, const HansenOptions& opt, std::size_t n) {
  const double s0 = std::log(opt.lo);
  const double h = (std::log(opt.hi) - s0) / static_cast<double>(n);
  const double q = p / (p - 1.0);

  std::vector<double> x(n + 1);
  std::vector<HermitianMatrix> fx(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    x[j] = j == n ? opt.hi : std::exp(s0 + h * static_cast<double>(j));
    fx[j] = apply_function(field(x[j]), [](double l) { return std::max(l, 0.0); });
  }

  CMatrix k = opt.lo * fx[0].matrix();
  CMatrix l = opt.lo * psd_power(fx[0], p).matrix();
  CMatrix r = opt.lo * psd_power(fx[0], p).matrix();
  CMatrix prev_l = opt.lo * psd_power(fx[0], p).matrix();  // x_j H_j^p at j = 0
  CMatrix prev_r = prev_l;
  for (std::size_t j = 1; j <= n; ++j) {
    k += 0.5 * h * (x[j - 1] * fx[j - 1].matrix() + x[j] * fx[j].matrix());
    const HermitianMatrix hj(k / x[j]);
    const CMatrix cur_l = x[j] * psd_power(hj, p).matrix();
    const CMatrix cur_r = x[j] * psd_power(fx[j], p).matrix();
    l += 0.5 * h * (prev_l + cur_l);
    r += 0.5 * h * (prev_r + cur_r);
    prev_l = cur_l;
    prev_r = cur_r;
  }
  // beyond hi: H(x) = K / x
  l += std::pow(opt.hi, 1.0 - p) / (p - 1.0) * psd_power(HermitianMatrix(k), p).matrix();
  return {l, std::pow(q, p) * r};
}

}  // namespace detail

/// R - L >= 0 with L = int ((1/x) int_0^x F)^p dx and R = (p/(p-1))^p int F^p dt.
template <class Field>
HansenResult hansen_check(const Field& field, double p, const HansenOptions& opt = {}) {
  if (!(p > 1.0) || !std::isfinite(p)) throw PreconditionError("hansen_check requires p > 1");
  if (!(opt.lo > 0.0 && opt.hi > opt.lo) || opt.intervals < 2) throw PreconditionError("bad Hansen discretization");
  const auto coarse = detail::hansen_sides(field, p, opt, opt.intervals);
  const auto fine = detail::hansen_sides(field, p, opt, 2 * opt.intervals);
  HansenResult res;
  res.p = p;
  res.lhs = fine.first;
  res.rhs = fine.second;
  const HermitianMatrix slack(fine.second - fine.first, 1e-10);
  const HermitianMatrix slack_coarse(coarse.second - coarse.first, 1e-10);
  res.eigmin_slack = slack.eigmin();
  res.richardson = HermitianMatrix(slack.matrix() - slack_coarse.matrix()).norm();
  res.holds = res.eigmin_slack >= -opt.tol;
  return res;
}

struct HansenFinding {
  double p = 0.0;
  std::uint64_t master_seed = 0;
  std::size_t trial = 0;
  std::uint64_t instance_seed = 0;
  bool rank_one = false;
  BumpField field;
  HansenResult result;
};

/// Random bump fields (alternately full rank and rank one) for p > 2; returns the first whose
/// slack stays below -10 tol even after adding the discretization estimate.
inline std::optional<HansenFinding> hansen_counterexample_search(double p, std::size_t trials, std::uint64_t seed,
                                                                 Eigen::Index dim = 3,
                                                                 const HansenOptions& opt = {}) {
  if (!(p > 2.0) || !std::isfinite(p)) throw PreconditionError("hansen_counterexample_search requires p > 2");
  for (std::size_t i = 0; i < trials; ++i) {
    const std::uint64_t s = derive_seed(seed, i);
    Rng rng(s);
    const bool rank_one = i % 2 == 1;
    BumpField f = random_bump_field(dim, rng, rank_one);
    const HansenResult r = hansen_check(f, p, opt);
    if (r.eigmin_slack + r.richardson < -10.0 * opt.tol) return HansenFinding{p, seed, i, s, rank_one, std::move(f), r};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------------------------
// External Jensen inequality
// ---------------------------------------------------------------------------------------------

struct ExternalJensen {
  double lhs = 0.0;
  double rhs_lower_bound = 0.0;
  double slack = 0.0;  // lhs - rhs_lower_bound
  bool finding = false;
};

/// For ||x||^2 - ||y||^2 = 1 and <Ax,x> >= <By,y>:
///   f(<Ax,x> - <By,y>) >= ||x||^2 f(<A x,x>/||x||^2) - <f(B)y,y> + <f(|B - <By,y>/||y||^2|)y,y>
///                         + f(||y||^2 d) + ||y||^2 f(d),   d = |<Ax,x>/||x||^2 - <By,y>/||y||^2|
template <class F>
ExternalJensen external_jensen_check(const HermitianMatrix& a, const HermitianMatrix& b, const CVector& x,
                                     const CVector& y, const F& f, double tol = 1e-10) {
  if (a.dim() != x.size() || b.dim() != y.size()) throw HypothesisViolated("dimensions", "matrix and vector sizes differ");
  if (!a.is_psd()) throw HypothesisViolated("A_psd", "A is not positive semidefinite");
  if (!b.is_psd()) throw HypothesisViolated("B_psd", "B is not positive semidefinite");
  const double nx = x.squaredNorm();
  const double ny = y.squaredNorm();
  if (!(ny > 0.0)) throw HypothesisViolated("y_nonzero", "||y|| must be positive");
  if (std::fabs(nx - ny - 1.0) > 1e-10) throw HypothesisViolated("norm_difference", "||x||^2 - ||y||^2 must equal 1");
  const double ax = a.quadratic_form(x);
  const double by = b.quadratic_form(y);
  if (ax - by < 0.0) throw HypothesisViolated("order", "<Ax,x> - <By,y> must be >= 0");

  const double d = std::fabs(ax / nx - by / ny);
  if (!std::isfinite(d)) throw HypothesisViolated("y_nonzero", "normalized averages overflow");
  CompensatedSum rhs;
  rhs.add(nx * f(ax / nx));
  rhs.add(-quadratic_form_of(b, f, y));
  rhs.add(detail::deviation_form(b, by / ny, f, y));
  rhs.add(f(ny * d));
  rhs.add(ny * f(d));

  ExternalJensen r;
  r.lhs = f(ax - by);
  r.rhs_lower_bound = rhs.value();
  r.slack = r.lhs - r.rhs_lower_bound;
  const double scale = std::max({1.0, std::fabs(r.lhs), std::fabs(r.rhs_lower_bound)});
  r.finding = r.slack < -tol * scale;
  return r;
}

}  // namespace hardy_refine
