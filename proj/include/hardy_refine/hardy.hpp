#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "hardy_refine/quadrature.hpp"
#include "hardy_refine/scalar_fn.hpp"

namespace hardy_refine {

enum class Verdict { holds, holds_within_error, violated };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "Holds";
    case Verdict::holds_within_error: return "HoldsWithinError";
    case Verdict::violated: return "Violated";
  }
  return "?";
}

/// A margin inside the error budget is never a violation.
inline Verdict judge(double margin, double err_budget) {
  if (margin >= err_budget) return Verdict::holds;
  if (margin >= -err_budget) return Verdict::holds_within_error;
  return Verdict::violated;
}

enum class ReportKind { classical, refined, lemma_weighted, difference_counterpart, operator_refined };

inline const char* to_string(ReportKind k) {
  switch (k) {
    case ReportKind::classical: return "classical";
    case ReportKind::refined: return "refined";
    case ReportKind::lemma_weighted: return "lemma_weighted";
    case ReportKind::difference_counterpart: return "difference_counterpart";
    case ReportKind::operator_refined: return "operator_refined";
  }
  return "?";
}

/// One inequality instance for a given (f, p).
///
/// For every kind, refined_rhs = classical_rhs + correction_coefficient * correction and the
/// margins are rhs - lhs. The difference counterpart swaps roles: its lhs is
/// (p/(p-1))^p int f^p and its classical_rhs is int H^p.
struct HardyReport {
  ReportKind kind = ReportKind::classical;
  std::string function;
  double p = 0.0;
  double lhs = 0.0;
  double classical_rhs = 0.0;
  double correction = 0.0;
  double correction_coefficient = 0.0;
  double refined_rhs = 0.0;
  double classical_margin = 0.0;
  double refined_margin = 0.0;
  double err_budget = 0.0;
  Verdict verdict = Verdict::holds;

  // Difference counterpart only: the margin obtained with (p/(p-1))^{p-1} in place of
  // (p/(p-1))^{p-2}, i.e. the coefficient that the change of variables actually produces.
  std::optional<double> derived_margin;

  // constituent integrals
  QuadResult lhs_quad;
  QuadResult power_quad;
  QuadResult correction_quad;
  bool converged = true;

  // operator reports only
  double psd_clip = 0.0;
  std::optional<double> discretization_estimate;
};

namespace detail {

inline double conjugate_exponent(double p) { return p / (p - 1.0); }

inline void require_p(double p, double lo, bool lo_inclusive, const char* what) {
  const bool ok = lo_inclusive ? p >= lo : p > lo;
  if (!ok || !std::isfinite(p)) throw PreconditionError(std::string(what) + ": p out of range");
}

inline HardyReport zero_report(ReportKind kind, const std::string& name, double p, double coefficient) {
  HardyReport r;
  r.kind = kind;
  r.function = name;
  r.p = p;
  r.correction_coefficient = coefficient;
  r.verdict = Verdict::holds;
  if (kind == ReportKind::difference_counterpart) r.derived_margin = 0.0;
  return r;
}

/// Classical/refined assembly shared by the scalar and operator paths.
template <SpectralDensity D>
HardyReport refined_from_density(const D& density, const std::string& name, double p, const QuadConfig& cfg,
                                 ReportKind kind) {
  const double q = conjugate_exponent(p);
  const HardyFunctionals<D> fn(density, p, cfg);
  HardyReport r;
  r.kind = kind;
  r.function = name;
  r.p = p;
  r.lhs_quad = fn.lhs();
  r.power_quad = fn.power();
  r.lhs = r.lhs_quad.value;
  r.classical_rhs = std::pow(q, p) * r.power_quad.value;
  r.err_budget = r.lhs_quad.err_estimate + std::pow(q, p) * r.power_quad.err_estimate;
  r.converged = r.lhs_quad.converged && r.power_quad.converged;
  if (kind != ReportKind::classical) {
    r.correction_quad = fn.correction();
    r.correction = r.correction_quad.value;
    r.correction_coefficient = -std::pow(q, p - 2.0);
    r.err_budget += std::pow(q, p - 2.0) * r.correction_quad.err_estimate;
    r.converged = r.converged && r.correction_quad.converged;
  }
  r.refined_rhs = r.classical_rhs + r.correction_coefficient * r.correction;
  r.classical_margin = r.classical_rhs - r.lhs;
  r.refined_margin = r.refined_rhs - r.lhs;
  r.verdict = judge(r.refined_margin, r.err_budget);
  return r;
}

}  // namespace detail

/// int H^p <= (p/(p-1))^p int f^p, for p > 1.
template <class F = ScalarFn>
HardyReport classical_check(const F& f, double p, const QuadConfig& cfg, const std::string& name = "f") {
  detail::require_p(p, 1.0, false, "classical_check");
  const ScalarDensity<F> d(f);
  return detail::refined_from_density(d, name, p, cfg, ReportKind::classical);
}

inline HardyReport classical_check(const ScalarFn& f, double p, const QuadConfig& cfg) {
  detail::require_p(p, 1.0, false, "classical_check");
  if (f.is_zero()) return detail::zero_report(ReportKind::classical, f.name(), p, 0.0);
  return classical_check<ScalarFn>(f, p, cfg, f.name());
}

/// int H^p <= (p/(p-1))^p int f^p - (p/(p-1))^{p-2} C(f, p), for p >= 2.
template <class F = ScalarFn>
HardyReport refined_check(const F& f, double p, const QuadConfig& cfg, const std::string& name = "f") {
  detail::require_p(p, 2.0, true, "refined_check");
  const ScalarDensity<F> d(f);
  return detail::refined_from_density(d, name, p, cfg, ReportKind::refined);
}

inline HardyReport refined_check(const ScalarFn& f, double p, const QuadConfig& cfg) {
  detail::require_p(p, 2.0, true, "refined_check");
  const double q = detail::conjugate_exponent(p);
  if (f.is_zero()) return detail::zero_report(ReportKind::refined, f.name(), p, -std::pow(q, p - 2.0));
  return refined_check<ScalarFn>(f, p, cfg, f.name());
}

/// Weighted form, p >= 2:
///   int H_g(x)^p dx/x <= int g^p dt/t - int (1/x) int_0^x |g(t) - H_g(x)|^p dt dx/x.
template <class F = ScalarFn>
HardyReport lemma_weighted_check(const F& g, double p, const QuadConfig& cfg, const std::string& name = "g") {
  detail::require_p(p, 2.0, true, "lemma_weighted_check");
  const ScalarDensity<F> d(g);
  const HardyFunctionals<ScalarDensity<F>> fn(d, p, cfg, /*weighted=*/true);
  HardyReport r;
  r.kind = ReportKind::lemma_weighted;
  r.function = name;
  r.p = p;
  r.lhs_quad = fn.lhs();
  r.power_quad = fn.power();
  r.correction_quad = fn.correction();
  r.lhs = r.lhs_quad.value;
  r.classical_rhs = r.power_quad.value;
  r.correction = r.correction_quad.value;
  r.correction_coefficient = -1.0;
  r.refined_rhs = r.classical_rhs - r.correction;
  r.classical_margin = r.classical_rhs - r.lhs;
  r.refined_margin = r.refined_rhs - r.lhs;
  r.err_budget = r.lhs_quad.err_estimate + r.power_quad.err_estimate + r.correction_quad.err_estimate;
  r.converged = r.lhs_quad.converged && r.power_quad.converged && r.correction_quad.converged;
  r.verdict = judge(r.refined_margin, r.err_budget);
  return r;
}

inline HardyReport lemma_weighted_check(const ScalarFn& g, double p, const QuadConfig& cfg) {
  detail::require_p(p, 2.0, true, "lemma_weighted_check");
  if (g.is_zero()) return detail::zero_report(ReportKind::lemma_weighted, g.name(), p, -1.0);
  return lemma_weighted_check<ScalarFn>(g, p, cfg, g.name());
}

/// Difference counterpart, 1 < p <= 2:
///   (p/(p-1))^p int f^p <= int H^p + (p/(p-1))^{p-2} C(f, p).
template <class F = ScalarFn>
HardyReport difference_counterpart_check(const F& f, double p, const QuadConfig& cfg, const std::string& name = "f") {
  if (!(p > 1.0 && p <= 2.0)) throw PreconditionError("difference_counterpart_check requires 1 < p <= 2");
  const double q = detail::conjugate_exponent(p);
  const ScalarDensity<F> d(f);
  const HardyFunctionals<ScalarDensity<F>> fn(d, p, cfg);
  HardyReport r;
  r.kind = ReportKind::difference_counterpart;
  r.function = name;
  r.p = p;
  r.lhs_quad = fn.lhs();
  r.power_quad = fn.power();
  r.correction_quad = fn.correction();
  r.lhs = std::pow(q, p) * r.power_quad.value;
  r.classical_rhs = r.lhs_quad.value;
  r.correction = r.correction_quad.value;
  r.correction_coefficient = std::pow(q, p - 2.0);
  r.refined_rhs = r.classical_rhs + r.correction_coefficient * r.correction;
  r.classical_margin = r.classical_rhs - r.lhs;
  r.refined_margin = r.refined_rhs - r.lhs;
  r.derived_margin = r.classical_rhs + std::pow(q, p - 1.0) * r.correction - r.lhs;
  r.err_budget = std::pow(q, p) * r.power_quad.err_estimate + r.lhs_quad.err_estimate +
                 r.correction_coefficient * r.correction_quad.err_estimate;
  r.converged = r.lhs_quad.converged && r.power_quad.converged && r.correction_quad.converged;
  r.verdict = judge(r.refined_margin, r.err_budget);
  return r;
}

inline HardyReport difference_counterpart_check(const ScalarFn& f, double p, const QuadConfig& cfg) {
  if (!(p > 1.0 && p <= 2.0)) throw PreconditionError("difference_counterpart_check requires 1 < p <= 2");
  const double q = detail::conjugate_exponent(p);
  if (f.is_zero()) return detail::zero_report(ReportKind::difference_counterpart, f.name(), p, std::pow(q, p - 2.0));
  return difference_counterpart_check<ScalarFn>(f, p, cfg, f.name());
}

}  // namespace hardy_refine
