#pragma once

// Command implementations behind the hardy_refine executable. Flag parsing lives in
// tools/; everything here is callable from tests.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hardy_refine/hardy.hpp"
#include "hardy_refine/io.hpp"
#include "hardy_refine/operator.hpp"
#include "hardy_refine/superquad.hpp"

namespace hardy_refine::cli {

enum class Command { verify_hardy, verify_jensen, verify_operator, sweep, example };
enum class Format { json, csv };

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Exit codes of run().
inline constexpr int kOk = 0;
inline constexpr int kError = 1;
inline constexpr int kViolated = 2;

struct RunConfig {
  Command command = Command::example;
  std::optional<std::string> f;  // expression or @family tag
  std::string p = "2";           // single value or start:end:step
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  std::uint64_t seed = kDefaultSeed;
  int dim = 3;
  std::size_t grid_points = 64;
  std::size_t trials = 100;
  std::optional<std::string> out;
  Format format = Format::json;
  std::optional<std::string> field_path;  // MatrixField JSON for verify-operator
  bool weighted = false;                  // verify-hardy: add the dt/t form (needs int f^p dt/t < inf)

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw PreconditionError("tolerances must be > 0");
    if (dim < 1) throw PreconditionError("--dim must be >= 1");
    if (grid_points < 2) throw PreconditionError("--grid-points must be >= 2");
  }
};

/// HARDY_REFINE_SEED if set and valid, else 42.
inline std::uint64_t default_seed() {
  const char* env = std::getenv("HARDY_REFINE_SEED");
  if (!env || !*env) return kDefaultSeed;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') throw PreconditionError("HARDY_REFINE_SEED must be a nonnegative integer");
  return v;
}

/// "2.5" or "start:end:step"; endpoints are included within 1e-12. Every value must be > 1.
inline std::vector<double> parse_p_grid(const std::string& text) {
  const auto num = [&](const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || !std::isfinite(v)) throw PreconditionError("bad p value '" + s + "'");
    return v;
  };
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t colon = text.find(':', start);
    parts.push_back(text.substr(start, colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  std::vector<double> ps;
  if (parts.size() == 1) {
    ps.push_back(num(parts[0]));
  } else if (parts.size() == 3) {
    const double a = num(parts[0]);
    const double b = num(parts[1]);
    const double h = num(parts[2]);
    if (!(h > 0.0) || b < a) throw PreconditionError("p grid needs start <= end and step > 0");
    for (std::size_t k = 0;; ++k) {
      const double v = a + static_cast<double>(k) * h;
      if (v > b + 1e-12) break;
      ps.push_back(v);
      if (ps.size() > 100000) throw PreconditionError("p grid too large");
    }
  } else {
    throw PreconditionError("p must be a number or start:end:step");
  }
  for (double v : ps)
    if (!(v > 1.0)) throw PreconditionError("p values must be > 1");
  return ps;
}

inline QuadConfig quad_config(const RunConfig& rc) {
  QuadConfig q;
  q.rel_tol = rc.rel_tol;
  q.abs_tol = rc.abs_tol;
  q.validate();
  return q;
}

namespace detail {

inline void emit(const RunConfig& rc, const std::string& body, std::ostream& out) {
  if (!rc.out) {
    out << body;
    return;
  }
  std::ofstream file(*rc.out, std::ios::binary);
  if (!file) throw PreconditionError("cannot open output file " + *rc.out);
  file << body;
  if (!file) throw PreconditionError("failed writing " + *rc.out);
}

inline void header(io::JsonWriter& w, const char* command, const RunConfig& rc) {
  w.field("command", command);
  w.field("rel_tol", rc.rel_tol);
  w.field("abs_tol", rc.abs_tol);
}

inline std::string reports_body(const char* command, const RunConfig& rc, const std::vector<HardyReport>& reports) {
  if (rc.format == Format::csv) return io::csv(reports);
  io::JsonWriter w;
  w.begin_object();
  header(w, command, rc);
  w.key("reports").begin_array();
  for (const HardyReport& r : reports) io::write_report(w, r);
  w.end_array();
  w.end_object();
  return w.str();
}

inline void summarize(const HardyReport& r, std::ostream& log) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-22s p=%-6g margin=%-+.6e budget=%.1e %s%s\n", to_string(r.kind), r.p,
                r.refined_margin, r.err_budget, to_string(r.verdict), r.converged ? "" : " (not converged)");
  log << buf;
}

inline int exit_code(const std::vector<HardyReport>& reports) {
  for (const HardyReport& r : reports)
    if (r.verdict == Verdict::violated) return kViolated;
  return kOk;
}

}  // namespace detail

/// Classical check for every p, plus the refined form (p >= 2, and the weighted form on
/// request) and the difference counterpart (p <= 2).
inline int verify_hardy(const RunConfig& rc, std::ostream& out, std::ostream& log) {
  const ScalarFn f = make_function(rc.f.value_or("@inv1p"));
  const QuadConfig q = quad_config(rc);
  std::vector<HardyReport> reports;
  for (double p : parse_p_grid(rc.p)) {
    reports.push_back(classical_check(f, p, q));
    if (p >= 2.0) {
      reports.push_back(refined_check(f, p, q));
      if (rc.weighted) reports.push_back(lemma_weighted_check(f, p, q));
    }
    if (p <= 2.0) reports.push_back(difference_counterpart_check(f, p, q));
  }
  for (const HardyReport& r : reports) detail::summarize(r, log);
  detail::emit(rc, detail::reports_body("verify-hardy", rc, reports), out);
  return detail::exit_code(reports);
}

/// One row per p: refined for p >= 2, difference counterpart below.
inline int sweep(const RunConfig& rc, std::ostream& out, std::ostream& log) {
  const ScalarFn f = make_function(rc.f.value_or("@inv1p"));
  const QuadConfig q = quad_config(rc);
  std::vector<HardyReport> reports;
  for (double p : parse_p_grid(rc.p))
    reports.push_back(p >= 2.0 ? refined_check(f, p, q) : difference_counterpart_check(f, p, q));
  for (const HardyReport& r : reports) detail::summarize(r, log);
  detail::emit(rc, detail::reports_body("sweep", rc, reports), out);
  return detail::exit_code(reports);
}

inline const std::vector<double>& canonical_superquad_grid() {
  static const std::vector<double> g{0.0, 0.1, 0.5, 1.0, 2.0, 10.0};
  return g;
}

/// Random measure with 1..8 atoms in [0, 10].
inline DiscreteMeasure random_measure(Rng& rng) {
  const std::size_t n = 1 + static_cast<std::size_t>(rng() % 8);
  std::vector<double> pts(n);
  for (double& x : pts) x = 10.0 * uniform01(rng);
  return DiscreteMeasure(std::move(pts), random_simplex(n, rng));
}

/// Grid check on the canonical grid and Jensen gaps on `trials` seeded random measures.
inline int verify_jensen(const RunConfig& rc, std::ostream& out, std::ostream& log) {
  const ScalarFn f = make_function(rc.f.value_or("@power:3"));
  const SuperquadWitness wit = check_superquadratic(f, canonical_superquad_grid());
  std::vector<JensenGap> gaps;
  for (std::size_t i = 0; i < rc.trials; ++i) {
    Rng rng(derive_seed(rc.seed, i));
    gaps.push_back(jensen_gap(f, random_measure(rng)));
  }
  double worst = 0.0;
  std::size_t negative = 0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (i == 0 || gaps[i].gap < worst) worst = gaps[i].gap;
    if (gaps[i].gap < -1e-10) ++negative;
  }
  log << "grid: " << (wit.consistent() ? "consistent on grid" : "violated") << ", jensen gaps below -1e-10: "
      << negative << " of " << gaps.size() << "\n";

  std::string body;
  if (rc.format == Format::csv) {
    body = "trial,lhs,rhs,gap\n";
    for (std::size_t i = 0; i < gaps.size(); ++i)
      body += std::to_string(i) + "," + io::number(gaps[i].lhs) + "," + io::number(gaps[i].rhs) + "," +
              io::number(gaps[i].gap) + "\n";
  } else {
    io::JsonWriter w;
    w.begin_object();
    w.field("command", "verify-jensen");
    w.field("function", f.name());
    w.key("seed").value(rc.seed);
    w.key("grid_check");
    io::write_witness(w, wit);
    w.field("trials", gaps.size());
    w.field("worst_gap", gaps.empty() ? 0.0 : worst);
    w.field("negative_gaps", negative);
    w.key("gaps").begin_array();
    for (const JensenGap& g : gaps) io::write_gap(w, g);
    w.end_array();
    w.end_object();
    body = w.str();
  }
  detail::emit(rc, body, out);
  // a negative gap only contradicts the inequality when f passed the grid check
  return wit.consistent() && negative > 0 ? kViolated : kOk;
}

namespace detail {

struct GapSummary {
  double worst = 0.0;
  std::size_t worst_trial = 0;
  std::size_t count = 0;
};

inline void note_gap(GapSummary& s, double gap, std::size_t trial) {
  if (s.count == 0 || gap < s.worst) {
    s.worst = gap;
    s.worst_trial = trial;
  }
  ++s.count;
}

inline void write_summary(io::JsonWriter& w, std::string_view key, const GapSummary& s) {
  w.key(key).begin_object();
  w.field("instances", s.count);
  w.field("worst_gap", s.worst);
  w.field("worst_trial", s.worst_trial);
  w.end_object();
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  const double a = std::log(lo);
  const double h = (std::log(hi) - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = i + 1 == n ? hi : std::exp(a + h * static_cast<double>(i));
  g.front() = lo;
  return g;
}

}  // namespace detail

/// Operator suites at one p: Theorem A and B gaps, the external Jensen inequality, Hansen's
/// inequality (a check for p <= 2, a counterexample search for p > 2) and, for p >= 2, the
/// refined operator Hardy inequality on a sampled field.
inline int verify_operator(const RunConfig& rc, std::ostream& out, std::ostream& log) {
  const std::vector<double> ps = parse_p_grid(rc.p);
  if (ps.size() != 1) throw PreconditionError("verify-operator takes a single p");
  const double p = ps[0];
  // t^p is superquadratic for p >= 2, -t^p for 1 < p <= 2
  const ScalarFn f = rc.f ? make_function(*rc.f) : power_family(p, p >= 2.0 ? PowerSign::plus : PowerSign::minus);
  const Eigen::Index dim = rc.dim;
  const QuadConfig q = quad_config(rc);
  int code = kOk;

  detail::GapSummary ga, gb;
  std::size_t ext_findings = 0;
  detail::GapSummary ext;
  for (std::size_t i = 0; i < rc.trials; ++i) {
    Rng rng(derive_seed(rc.seed, 3 * i));
    const HermitianMatrix a = random_psd(dim, rng);
    detail::note_gap(ga, theorem_a_gap(a, random_unit_vector(dim, rng), f).gap, i);

    Rng rng_b(derive_seed(rc.seed, 3 * i + 1));
    const std::size_t m = 2 + static_cast<std::size_t>(rng_b() % 4);
    std::vector<HermitianMatrix> samples;
    for (std::size_t k = 0; k < m; ++k) samples.push_back(random_psd(dim, rng_b));
    const AveragingMap phi(random_simplex(m, rng_b));
    detail::note_gap(gb, theorem_b_gap(samples, phi, random_unit_vector(dim, rng_b), f).gap, i);

    Rng rng_e(derive_seed(rc.seed, 3 * i + 2));
    const HermitianMatrix ea = random_psd(dim, rng_e);
    const HermitianMatrix eb = 0.5 * random_psd(dim, rng_e);
    const double ny = 0.1 + 0.9 * uniform01(rng_e);
    const CVector y = std::sqrt(ny) * random_unit_vector(dim, rng_e).vector();
    const CVector x = std::sqrt(1.0 + ny) * random_unit_vector(dim, rng_e).vector();
    if (ea.quadratic_form(x) < eb.quadratic_form(y)) continue;  // hypothesis not met by this draw
    const ExternalJensen e = external_jensen_check(ea, eb, x, y, f);
    detail::note_gap(ext, e.slack, i);
    if (e.finding) ++ext_findings;
  }
  if (ga.count && ga.worst < -1e-8) code = kViolated;
  if (gb.count && gb.worst < -1e-8) code = kViolated;
  log << "theorem A worst gap " << ga.worst << ", theorem B worst gap " << gb.worst << ", external Jensen findings "
      << ext_findings << "\n";

  std::vector<HansenResult> hansen;
  std::optional<HansenFinding> finding;
  if (p <= 2.0) {
    for (std::size_t i = 0; i < rc.trials; ++i) {
      Rng rng(derive_seed(rc.seed ^ 0x48414e53454eULL, i));
      hansen.push_back(hansen_check(random_bump_field(dim, rng, i % 2 == 1), p));
      if (!hansen.back().holds) code = kViolated;
    }
  } else {
    finding = hansen_counterexample_search(p, rc.trials, rc.seed, dim);
    log << "hansen counterexample search: " << (finding ? "finding" : "none") << "\n";
  }

  std::optional<HardyReport> hardy;
  if (p >= 2.0) {
    Rng rng(derive_seed(rc.seed ^ 0x4841524459ULL, 0));
    std::optional<MatrixField> field;
    if (rc.field_path) {
      std::ifstream in(*rc.field_path);
      if (!in) throw PreconditionError("cannot open field file " + *rc.field_path);
      field = io::field_from_json(in);
    } else {
      const BumpField bump = random_bump_field(dim, rng);
      field = MatrixField::sample(bump, detail::log_grid(1e-4, 1e4, rc.grid_points));
    }
    const UnitVector eta = random_unit_vector(field->dim(), rng);
    hardy = operator_hardy_refined(*field, p, eta, q, rc.field_path ? *rc.field_path : "random bump field");
    detail::summarize(*hardy, log);
    if (hardy->verdict == Verdict::violated) code = kViolated;
  }

  std::string body;
  if (rc.format == Format::csv) {
    if (!hardy) throw PreconditionError("csv output of verify-operator needs p >= 2");
    body = io::csv(std::span<const HardyReport>(&*hardy, 1));
  } else {
    io::JsonWriter w;
    w.begin_object();
    detail::header(w, "verify-operator", rc);
    w.field("p", p);
    w.field("function", f.name());
    w.field("dim", rc.dim);
    w.key("seed").value(rc.seed);
    detail::write_summary(w, "theorem_a", ga);
    detail::write_summary(w, "theorem_b", gb);
    detail::write_summary(w, "external_jensen", ext);
    w.field("external_jensen_findings", ext_findings);
    if (p <= 2.0) {
      w.key("hansen").begin_array();
      for (const HansenResult& h : hansen) io::write_hansen(w, h);
      w.end_array();
    } else {
      w.key("hansen_counterexample");
      if (finding) io::write_finding(w, *finding);
      else w.null();
    }
    if (hardy) {
      w.key("operator_hardy");
      io::write_report(w, *hardy);
    }
    w.end_object();
    body = w.str();
  }
  detail::emit(rc, body, out);
  return code;
}

/// f(t) = 1/(t+1), p = 2 end to end.
inline int example(const RunConfig& rc, std::ostream& out, std::ostream& log) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const QuadConfig q = quad_config(rc);
  const ScalarFn f = make_function("@inv1p");
  const HardyReport classical = classical_check(f, 2.0, q);
  const HardyReport refined = refined_check(f, 2.0, q);
  const QuadResult norm = integrate_halfline([](double x) { return 1.0 / ((x + 1.0) * (x + 1.0)); }, q);

  struct Row {
    const char* name;
    double value;
    const char* ref_text;
    double ref;
  };
  const Row rows[] = {
      {"int H(x)^2 dx", refined.lhs, "pi^2/3", pi2 / 3.0},
      {"int 1/(x+1)^2 dx", norm.value, "1", 1.0},
      {"correction", refined.correction, "2 - pi^2/6", 2.0 - pi2 / 6.0},
      {"refined rhs", refined.refined_rhs, "2 + pi^2/6", 2.0 + pi2 / 6.0},
      {"refined margin", refined.refined_margin, "2 - pi^2/6", 2.0 - pi2 / 6.0},
  };
  std::string text;
  for (const Row& r : rows) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-18s = %.17g   %-11s = %.17g   deviation %.3e\n", r.name, r.value, r.ref_text,
                  r.ref, r.value - r.ref);
    text += buf;
  }
  const bool chain = refined.lhs <= refined.refined_rhs + refined.err_budget &&
                     refined.refined_rhs <= refined.classical_rhs + refined.err_budget;
  text += std::string("pi^2/3 <= 2 + pi^2/6 <= 4: ") + (chain ? "confirmed" : "NOT confirmed") + "\n";
  text += std::string("verdict: ") + to_string(refined.verdict) + "\n";

  const std::vector<HardyReport> reports{classical, refined};
  std::string body;
  if (rc.format == Format::csv) {
    body = io::csv(reports);
  } else {
    io::JsonWriter w;
    w.begin_object();
    detail::header(w, "example", rc);
    w.key("reference").begin_object();
    for (const Row& r : rows) {
      w.key(r.name).begin_object();
      w.field("value", r.value);
      w.field("reference", r.ref);
      w.field("deviation", r.value - r.ref);
      w.end_object();
    }
    w.end_object();
    w.key("reports").begin_array();
    for (const HardyReport& r : reports) io::write_report(w, r);
    w.end_array();
    w.end_object();
    body = w.str();
  }
  if (rc.out) {
    detail::emit(rc, body, out);
    out << text;
  } else if (rc.format == Format::csv) {
    out << body;
    log << text;
  } else {
    out << text;
  }
  return detail::exit_code(reports);
}

/// Runs one command. Library errors are reported on `log` and map to exit code 1.
inline int run(const RunConfig& rc, std::ostream& out, std::ostream& log) {
  try {
    rc.validate();
    switch (rc.command) {
      case Command::verify_hardy: return verify_hardy(rc, out, log);
      case Command::verify_jensen: return verify_jensen(rc, out, log);
      case Command::verify_operator: return verify_operator(rc, out, log);
      case Command::sweep: return sweep(rc, out, log);
      case Command::example: return example(rc, out, log);
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
  }
  return kError;
}

}  // namespace hardy_refine::cli
