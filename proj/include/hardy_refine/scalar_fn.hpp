#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "hardy_refine/errors.hpp"
#include "hardy_refine/funcdsl.hpp"

namespace hardy_refine {

/// Built-in function families. Every member is c * base(t) with c = `scale`.
enum class FamilyKind {
  zero,
  constant,         // c
  power,            // c * t^p
  neg_power,        // -c * t^p
  inv_one_plus,     // c / (t + 1)
  exp_decay,        // c * e^{-t}
  t_exp_decay,      // c * t e^{-t}
  t_over_one_plus_sq,  // c * t / (1 + t^2)
  lorentzian,       // c / (1 + t^2)
};

struct Family {
  FamilyKind kind = FamilyKind::zero;
  double p = 0.0;
  double scale = 1.0;
};

/// Expected grid verdict for the power families, used by property tests.
enum class ExpectedShape { consistent, violated, unknown };

/// An evaluable real function of t, either parsed from text or taken from a built-in family.
class ScalarFn {
 public:
  explicit ScalarFn(dsl::Expr e) : source_(std::move(e)) {}
  explicit ScalarFn(Family f) : source_(f) {}

  double operator()(double t) const {
    if (const auto* e = std::get_if<dsl::Expr>(&source_)) return (*e)(t);
    return eval_family(std::get<Family>(source_), t);
  }

  bool is_parsed() const noexcept { return std::holds_alternative<dsl::Expr>(source_); }
  const Family* family() const noexcept { return std::get_if<Family>(&source_); }
  const dsl::Expr* expr() const noexcept { return std::get_if<dsl::Expr>(&source_); }

  /// True when f vanishes identically (lets callers skip quadrature entirely).
  bool is_zero() const noexcept {
    const Family* f = family();
    return f && (f->kind == FamilyKind::zero || f->scale == 0.0);
  }

  /// Returns c * f. Parsed expressions become `c*(expr)`.
  ScalarFn scaled(double c) const {
    if (const Family* f = family()) {
      Family g = *f;
      g.scale *= c;
      return ScalarFn(g);
    }
    return ScalarFn(dsl::parse(dsl::detail::format_number(c) + "*(" + expr()->to_string() + ")"));
  }

  std::string name() const {
    if (const auto* e = expr()) return e->to_string();
    const Family& f = *family();
    std::string base;
    switch (f.kind) {
      case FamilyKind::zero: return "0";
      case FamilyKind::constant: return dsl::detail::format_number(f.scale);
      case FamilyKind::power: base = "t^" + dsl::detail::format_number(f.p); break;
      case FamilyKind::neg_power: base = "-t^" + dsl::detail::format_number(f.p); break;
      case FamilyKind::inv_one_plus: base = "1/(t+1)"; break;
      case FamilyKind::exp_decay: base = "exp(-t)"; break;
      case FamilyKind::t_exp_decay: base = "t*exp(-t)"; break;
      case FamilyKind::t_over_one_plus_sq: base = "t/(1+t^2)"; break;
      case FamilyKind::lorentzian: base = "1/(1+t^2)"; break;
    }
    if (f.scale == 1.0) return base;
    return dsl::detail::format_number(f.scale) + "*(" + base + ")";
  }

  ExpectedShape expected_shape() const noexcept {
    const Family* f = family();
    if (!f) return ExpectedShape::unknown;
    if (f->kind == FamilyKind::power) return f->p >= 2.0 ? ExpectedShape::consistent : ExpectedShape::violated;
    if (f->kind == FamilyKind::neg_power)
      return f->p > 1.0 && f->p <= 2.0 ? ExpectedShape::consistent : ExpectedShape::unknown;
    return ExpectedShape::unknown;
  }

 private:
  static double eval_family(const Family& f, double t) {
    switch (f.kind) {
      case FamilyKind::zero: return 0.0;
      case FamilyKind::constant: return f.scale;
      case FamilyKind::power:
        if (t < 0.0) throw DomainError("t^p", t);
        return f.scale * std::pow(t, f.p);
      case FamilyKind::neg_power:
        if (t < 0.0) throw DomainError("-t^p", t);
        return -f.scale * std::pow(t, f.p);
      case FamilyKind::inv_one_plus: return f.scale / (t + 1.0);
      case FamilyKind::exp_decay: return f.scale * std::exp(-t);
      case FamilyKind::t_exp_decay: return f.scale * t * std::exp(-t);
      case FamilyKind::t_over_one_plus_sq: return f.scale * t / (1.0 + t * t);
      case FamilyKind::lorentzian: return f.scale / (1.0 + t * t);
    }
    return 0.0;
  }

  std::variant<dsl::Expr, Family> source_;
};

enum class PowerSign { plus, minus };

/// t -> +t^p or t -> -t^p, tagged with its expected superquadraticity.
inline ScalarFn power_family(double p, PowerSign sign) {
  if (!(p > 1.0)) throw PreconditionError("power_family requires p > 1");
  return ScalarFn(Family{sign == PowerSign::plus ? FamilyKind::power : FamilyKind::neg_power, p, 1.0});
}

/// Resolves a family tag ("@inv1p", "@exp", "@texp", "@trat", "@lorentz", "@zero",
/// "@power:P", "@negpower:P"). Returns nullopt for anything else.
inline std::optional<ScalarFn> family_from_tag(std::string_view tag) {
  if (tag.empty() || tag.front() != '@') return std::nullopt;
  tag.remove_prefix(1);
  const auto with_param = [&](std::string_view prefix, FamilyKind k) -> std::optional<ScalarFn> {
    if (tag.substr(0, prefix.size()) != prefix) return std::nullopt;
    const std::string num(tag.substr(prefix.size()));
    char* end = nullptr;
    const double p = std::strtod(num.c_str(), &end);
    if (num.empty() || *end != '\0' || !(p > 1.0)) throw PreconditionError("bad family parameter in @" + std::string(tag));
    return ScalarFn(Family{k, p, 1.0});
  };
  if (tag == "zero") return ScalarFn(Family{FamilyKind::zero});
  if (tag == "inv1p") return ScalarFn(Family{FamilyKind::inv_one_plus});
  if (tag == "exp") return ScalarFn(Family{FamilyKind::exp_decay});
  if (tag == "texp") return ScalarFn(Family{FamilyKind::t_exp_decay});
  if (tag == "trat") return ScalarFn(Family{FamilyKind::t_over_one_plus_sq});
  if (tag == "lorentz") return ScalarFn(Family{FamilyKind::lorentzian});
  if (auto f = with_param("power:", FamilyKind::power)) return f;
  if (auto f = with_param("negpower:", FamilyKind::neg_power)) return f;
  return std::nullopt;
}

/// Family tag or expression text.
inline ScalarFn make_function(std::string_view text) {
  if (auto f = family_from_tag(text)) return *f;
  if (!text.empty() && text.front() == '@') throw PreconditionError("unknown family tag " + std::string(text));
  return ScalarFn(dsl::parse(text));
}

}  // namespace hardy_refine
