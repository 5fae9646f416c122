// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any criterion fails.
// Usage: acceptance [output-dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "common/corpus.hpp"
#include "hardy_refine/cli.hpp"
#include "hardy_refine/hardy.hpp"
#include "hardy_refine/io.hpp"
#include "hardy_refine/operator.hpp"
#include "hardy_refine/superquad.hpp"

using namespace hardy_refine;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void fail(Outcome& o, const std::string& why) {
  o.pass = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += why;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const std::vector<double> kPowers = {2.0, 2.5, 3.0, 4.0};

Outcome example_reproduction() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const QuadConfig cfg;
  const HardyReport r = refined_check(make_function("1/(t+1)"), 2.0, cfg);
  const QuadResult norm = integrate_halfline([](double x) { return 1.0 / ((x + 1.0) * (x + 1.0)); }, cfg);
  const double secs = seconds_since(t0);
  if (std::fabs(r.lhs - pi * pi / 3.0) > 1e-6) fail(o, "lhs " + fmt("%.12g", r.lhs));
  if (std::fabs(norm.value - 1.0) > 1e-9) fail(o, "int (x+1)^-2 = " + fmt("%.12g", norm.value));
  if (std::fabs(r.correction - (2.0 - pi * pi / 6.0)) > 1e-4) fail(o, "correction " + fmt("%.12g", r.correction));
  if (!(r.lhs <= r.refined_rhs && r.refined_rhs <= r.classical_rhs)) fail(o, "inequality chain not confirmed");
  if (std::fabs(r.refined_margin - 0.35507) > 1e-3) fail(o, "refined margin " + fmt("%.12g", r.refined_margin));
  if (secs > 60.0) fail(o, "runtime " + fmt("%.1f s", secs));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("lhs=") + fmt("%.12f", r.lhs) +
              " correction=" + fmt("%.12f", r.correction) + " margin=" + fmt("%.8f", r.refined_margin) + " in " +
              fmt("%.2f s", secs);
  return o;
}

Outcome refinement_dominance() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  int cells = 0;
  for (const auto& fc : corpus::functions())
    for (double p : kPowers) {
      const HardyReport r = refined_check(make_function(fc.tag), p, QuadConfig{});
      ++cells;
      if (r.correction < -r.err_budget) fail(o, fc.tag + " p=" + fmt("%g", p) + " correction < -budget");
      if (r.refined_rhs > r.classical_rhs + r.err_budget) fail(o, fc.tag + " p=" + fmt("%g", p) + " refined > classical");
    }
  const double secs = seconds_since(t0);
  if (secs > 600.0) fail(o, "runtime " + fmt("%.1f s", secs));
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(cells) + " reports in " + fmt("%.1f s", secs);
  return o;
}

Outcome superquadratic_suite() {
  Outcome o;
  const auto& grid = cli::canonical_superquad_grid();
  const auto expect = [&](double p, PowerSign s, bool consistent) {
    const SuperquadWitness w = check_superquadratic(power_family(p, s), grid);
    if (w.consistent() != consistent)
      fail(o, std::string(s == PowerSign::plus ? "t^" : "-t^") + fmt("%g", p) + " verdict mismatch");
  };
  for (double p : {2.0, 2.5, 3.0, 4.0}) expect(p, PowerSign::plus, true);
  for (double p : {1.2, 1.5, 2.0}) expect(p, PowerSign::minus, true);
  for (double p : {1.2, 1.5}) expect(p, PowerSign::plus, false);
  const ScalarFn sq = power_family(2.0, PowerSign::plus);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    Rng rng(derive_seed(3, i));
    worst = std::max(worst, std::fabs(jensen_gap(sq, cli::random_measure(rng)).gap));
  }
  if (worst > 1e-12) fail(o, "t^2 jensen gap " + fmt("%.3g", worst));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("9 family verdicts, max |gap| for t^2 = ") +
              fmt("%.2e", worst);
  return o;
}

Outcome operator_jensen() {
  Outcome o;
  double worst_a = INFINITY, worst_b = INFINITY;
  bool bitwise = true;
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng(derive_seed(4, i));
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 6);
    const double p = i % 2 == 0 ? 2.0 : 3.0;
    const auto f = [p](double t) { return std::pow(t, p); };
    const HermitianMatrix a = random_psd(n, rng);
    const UnitVector eta = random_unit_vector(n, rng);
    const JensenGap ga = theorem_a_gap(a, eta, f);
    worst_a = std::min(worst_a, ga.gap);
    const JensenGap g1 = theorem_b_gap(std::vector<HermitianMatrix>{a}, AveragingMap({1.0}), eta, f);
    bitwise = bitwise && g1.lhs == ga.lhs && g1.rhs == ga.rhs && g1.gap == ga.gap;
  }
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng(derive_seed(5, i));
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 6);
    const std::size_t m = 1 + rng() % 5;
    const double p = i % 2 == 0 ? 2.0 : 3.0;
    std::vector<HermitianMatrix> fs;
    for (std::size_t k = 0; k < m; ++k) fs.push_back(random_psd(n, rng));
    const AveragingMap phi(random_simplex(m, rng));
    const UnitVector eta = random_unit_vector(n, rng);
    worst_b = std::min(worst_b, theorem_b_gap(fs, phi, eta, [p](double t) { return std::pow(t, p); }).gap);
  }
  if (worst_a < -1e-8) fail(o, "theorem A gap " + fmt("%.3g", worst_a));
  if (worst_b < -1e-8) fail(o, "theorem B gap " + fmt("%.3g", worst_b));
  if (!bitwise) fail(o, "m=1 reduction differs from theorem A");
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("min gap A=") + fmt("%.2e", worst_a) +
              " B=" + fmt("%.2e", worst_b) + ", m=1 bitwise " + (bitwise ? "equal" : "different");
  return o;
}

Outcome scalar_operator_coherence() {
  Outcome o;
  double worst = 0.0;
  const UnitVector eta = UnitVector::basis(1, 0);
  for (const auto& fc : corpus::functions()) {
    const auto field = [&](double t) { return HermitianMatrix(CMatrix::Constant(1, 1, fc.f(t))); };
    const HardyReport op = operator_hardy_refined(field, 2.0, eta, QuadConfig{});
    const HardyReport sc = refined_check(make_function(fc.tag), 2.0, QuadConfig{});
    const double d = std::max({std::fabs(op.lhs - sc.lhs), std::fabs(op.classical_rhs - sc.classical_rhs),
                               std::fabs(op.correction - sc.correction), std::fabs(op.refined_margin - sc.refined_margin)});
    worst = std::max(worst, d);
    if (d > 1e-8) fail(o, fc.tag + " differs by " + fmt("%.3g", d));
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("max deviation ") + fmt("%.2e", worst);
  return o;
}

Outcome hansen(const fs::path& outdir) {
  Outcome o;
  double worst = INFINITY, worst_rich = 0.0;
  for (double p : {1.1, 1.5, 2.0})
    for (std::uint64_t i = 0; i < 50; ++i) {
      Rng rng(derive_seed(6, i));
      const BumpField f = random_bump_field(3, rng, i % 2 == 1);
      const HansenResult h = hansen_check(f, p);
      worst = std::min(worst, h.eigmin_slack);
      worst_rich = std::max(worst_rich, h.richardson);
      if (h.eigmin_slack < -1e-6) fail(o, "p=" + fmt("%g", p) + " field " + std::to_string(i) + " slack " +
                                                fmt("%.3g", h.eigmin_slack));
    }
  // p > 2: search for a violation; a finding is archived, its absence is not a failure
  std::string search;
  for (double p : {2.5, 3.0, 4.0}) {
    const auto finding = hansen_counterexample_search(p, 200, 42);
    search += " p=" + fmt("%g", p) + ":";
    if (finding) {
      io::JsonWriter w;
      io::write_finding(w, *finding);
      const fs::path file = outdir / ("hansen_finding_p" + fmt("%g", p) + ".json");
      std::ofstream(file, std::ios::binary) << w.str();
      search += "finding(trial " + std::to_string(finding->trial) + ")";
    } else {
      search += "none";
    }
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("min eigmin_slack ") + fmt("%.2e", worst) +
              ", max richardson " + fmt("%.2e", worst_rich) + "; counterexample search (200 trials)" + search;
  return o;
}

Outcome difference_counterpart() {
  Outcome o;
  int ok = 0, total = 0;
  double derived = INFINITY;
  for (const auto& fc : corpus::functions())
    for (double p : {1.25, 1.5, 2.0}) {
      const HardyReport r = difference_counterpart_check(make_function(fc.tag), p, QuadConfig{});
      ++total;
      if (r.derived_margin) derived = std::min(derived, *r.derived_margin + r.err_budget);
      if (r.verdict == Verdict::violated)
        fail(o, fc.tag + " p=" + fmt("%g", p) + " Violated (margin " + fmt("%.4g", r.refined_margin) + ")");
      else
        ++ok;
      if (p == 2.0) {
        const HardyReport ref = refined_check(make_function(fc.tag), 2.0, QuadConfig{});
        if (std::fabs(r.correction - ref.correction) > r.err_budget + ref.err_budget)
          fail(o, fc.tag + " p=2 correction disagrees with the refined check");
      }
    }
  o.detail = std::to_string(ok) + "/" + std::to_string(total) + " hold" + (o.detail.empty() ? "" : "; " + o.detail) +
             "; diagnostic: with coefficient (p/(p-1))^(p-1) the smallest margin + budget is " + fmt("%.3g", derived);
  return o;
}

Outcome parser_corpus() {
  Outcome o;
  std::size_t n = 0;
  for (const auto& c : corpus::grammar()) {
    ++n;
    try {
      const dsl::Expr e = dsl::parse(c.text);
      const double want = c.reference(c.t);
      if (std::fabs(e(c.t) - want) > 1e-12 * std::max(1.0, std::fabs(want))) fail(o, "'" + c.text + "' value");
      const dsl::Expr back = dsl::parse(e.to_string());
      if (!same_structure(e, back) || back(c.t) != e(c.t)) fail(o, "'" + c.text + "' round trip");
    } catch (const std::exception& ex) {
      fail(o, "'" + c.text + "' threw " + ex.what());
    }
  }
  if (n < 20) fail(o, "corpus too small");
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(n) + " expressions";
  return o;
}

// Runs the command suite into `dir`, one report file per command.
std::vector<fs::path> full_suite(const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<cli::RunConfig> runs;
  const auto add = [&](cli::Command c, std::string f, std::string p, cli::Format fmt_, std::size_t trials) {
    cli::RunConfig rc;
    rc.command = c;
    if (!f.empty()) rc.f = f;
    rc.p = std::move(p);
    rc.format = fmt_;
    rc.trials = trials;
    runs.push_back(rc);
  };
  add(cli::Command::example, "", "2", cli::Format::json, 0);
  for (const auto& fc : corpus::functions()) add(cli::Command::verify_hardy, fc.tag, "2:3:0.5", cli::Format::json, 0);
  add(cli::Command::sweep, "exp(-t)", "2:4:0.5", cli::Format::csv, 0);
  add(cli::Command::verify_jensen, "t^3", "2", cli::Format::json, 100);
  add(cli::Command::verify_operator, "", "3", cli::Format::json, 20);
  add(cli::Command::verify_operator, "", "1.5", cli::Format::json, 20);
  std::vector<fs::path> files;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const fs::path file = dir / ("report_" + std::to_string(i) + (runs[i].format == cli::Format::csv ? ".csv" : ".json"));
    runs[i].out = file.string();
    std::ostringstream out, log;
    cli::run(runs[i], out, log);
    files.push_back(file);
  }
  return files;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(const fs::path& outdir) {
  Outcome o;
  const auto a = full_suite(outdir / "run_a");
  const auto b = full_suite(outdir / "run_b");
  std::size_t bytes = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string x = slurp(a[i]), y = slurp(b[i]);
    if (x.empty()) fail(o, a[i].filename().string() + " missing or empty");
    if (x != y) fail(o, a[i].filename().string() + " differs");
    bytes += x.size();
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(a.size()) + " report files, " + std::to_string(bytes) +
              " bytes compared";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path outdir = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::create_directories(outdir);

  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"example reproduction", example_reproduction},
      {"refinement dominance", refinement_dominance},
      {"superquadraticity suite", superquadratic_suite},
      {"operator Jensen properties", operator_jensen},
      {"scalar/operator coherence", scalar_operator_coherence},
      {"Hansen check", [&] { return hansen(outdir); }},
      {"difference counterpart", difference_counterpart},
      {"parser corpus", parser_corpus},
      {"determinism", [&] { return determinism(outdir); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].name << ": " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
