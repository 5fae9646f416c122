#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "hardy_refine/cli.hpp"

namespace {

using hardy_refine::cli::Command;
using hardy_refine::cli::Format;
using hardy_refine::cli::RunConfig;

constexpr const char* kGrammar = R"(expressions in t:
  expr    := term (('+' | '-') term)*
  term    := unary (('*' | '/') unary)*
  unary   := '-' unary | power
  power   := primary ('^' unary)?        (right-associative)
  primary := number | t | name '(' expr ')' | '(' expr ')'
  name    := exp | log | abs | sqrt
family tags: @inv1p 1/(t+1), @exp e^-t, @texp t e^-t, @trat t/(1+t^2), @lorentz 1/(1+t^2),
  @zero, @power:P t^P, @negpower:P -t^P
exit status: 0 all checks hold, 2 some inequality violated, 1 usage or evaluation error
)";

struct Flags {
  std::string f;
  std::string format = "json";
  std::string out;
  std::string field;
};

void add_common(CLI::App& sub, RunConfig& rc, Flags& fl) {
  sub.add_option("--f", fl.f, "expression in t or family tag");
  sub.add_option("--p", rc.p, "exponent, or start:end:step")->capture_default_str();
  sub.add_option("--tol", rc.rel_tol, "relative quadrature tolerance")->capture_default_str();
  sub.add_option("--abs-tol", rc.abs_tol, "absolute quadrature tolerance")->capture_default_str();
  sub.add_option("--seed", rc.seed, "master seed (default: $HARDY_REFINE_SEED or 42)");
  sub.add_option("--dim", rc.dim, "matrix dimension")->capture_default_str();
  sub.add_option("--grid-points", rc.grid_points, "samples of the operator field")->capture_default_str();
  sub.add_option("--trials", rc.trials, "random instances per suite")->capture_default_str();
  sub.add_option("--out", fl.out, "report file (default: stdout)");
  sub.add_option("--format", fl.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig rc;
  Flags fl;
  try {
    rc.seed = hardy_refine::cli::default_seed();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hardy_refine::cli::kError;
  }

  CLI::App app{"Numerical checks of Hardy-type and superquadratic Jensen inequalities"};
  app.footer(kGrammar);
  app.set_config("--config", "", "TOML/INI file with option values");
  app.require_subcommand(1);

  const std::map<std::string, std::pair<Command, const char*>> commands{
      {"verify-hardy", {Command::verify_hardy, "classical, refined, weighted and difference Hardy reports"}},
      {"verify-jensen", {Command::verify_jensen, "superquadratic grid check and discrete Jensen gaps"}},
      {"verify-operator", {Command::verify_operator, "matrix Jensen, Hansen and operator Hardy checks"}},
      {"sweep", {Command::sweep, "one Hardy report per p"}},
      {"example", {Command::example, "f(t) = 1/(t+1), p = 2"}},
  };
  for (const auto& [name, cmd] : commands) {
    CLI::App* sub = app.add_subcommand(name, cmd.second);
    add_common(*sub, rc, fl);
    if (cmd.first == Command::verify_operator) sub->add_option("--field", fl.field, "matrix field JSON file");
    if (cmd.first == Command::verify_hardy)
      sub->add_flag("--weighted", rc.weighted, "also check the int H^p dx/x form (p >= 2)");
    sub->callback([&rc, c = cmd.first] { rc.command = c; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hardy_refine::cli::kError;
  }

  if (!fl.f.empty()) rc.f = fl.f;
  if (!fl.out.empty()) rc.out = fl.out;
  if (!fl.field.empty()) rc.field_path = fl.field;
  rc.format = fl.format == "csv" ? Format::csv : Format::json;
  return hardy_refine::cli::run(rc, std::cout, std::cerr);
}
