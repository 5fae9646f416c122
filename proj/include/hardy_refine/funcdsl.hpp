#pragma once

// A small expression language for user-supplied functions of one variable t.
//
// Grammar (whitespace-insensitive):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?            right-associative
//   primary := number | 't' | name '(' expr ')' | '(' expr ')'
//   name    := exp | log | abs | sqrt
//
// Precedence is ^ > unary minus > * / > + -, so -t^2 is -(t^2) and 2^3^2 is 2^(3^2).
// There is no implicit multiplication.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hardy_refine/errors.hpp"

namespace hardy_refine::dsl {

enum class NodeKind { constant, variable, add, sub, mul, div, pow, neg, exp, log, abs, sqrt };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind;
  double value = 0.0;  // constants only
  NodePtr lhs;         // operand of unary nodes and calls
  NodePtr rhs;
};

inline const char* node_name(NodeKind k) {
  switch (k) {
    case NodeKind::constant: return "constant";
    case NodeKind::variable: return "t";
    case NodeKind::add: return "+";
    case NodeKind::sub: return "-";
    case NodeKind::mul: return "*";
    case NodeKind::div: return "/";
    case NodeKind::pow: return "^";
    case NodeKind::neg: return "unary -";
    case NodeKind::exp: return "exp";
    case NodeKind::log: return "log";
    case NodeKind::abs: return "abs";
    case NodeKind::sqrt: return "sqrt";
  }
  return "?";
}

namespace detail {

inline bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

inline double checked(double v, NodeKind k, double t) {
  if (!std::isfinite(v)) throw DomainError(node_name(k), t);
  return v;
}

inline double eval_node(const Node& n, double t) {
  switch (n.kind) {
    case NodeKind::constant: return n.value;
    case NodeKind::variable: return t;
    case NodeKind::add: return checked(eval_node(*n.lhs, t) + eval_node(*n.rhs, t), n.kind, t);
    case NodeKind::sub: return checked(eval_node(*n.lhs, t) - eval_node(*n.rhs, t), n.kind, t);
    case NodeKind::mul: return checked(eval_node(*n.lhs, t) * eval_node(*n.rhs, t), n.kind, t);
    case NodeKind::div: {
      const double num = eval_node(*n.lhs, t);
      const double den = eval_node(*n.rhs, t);
      if (den == 0.0) throw DomainError("/", t);
      return checked(num / den, n.kind, t);
    }
    case NodeKind::pow: {
      const double base = eval_node(*n.lhs, t);
      const double ex = eval_node(*n.rhs, t);
      if (base < 0.0 && !is_integer(ex)) throw DomainError("^", t);
      if (base == 0.0 && ex < 0.0) throw DomainError("^", t);
      return checked(std::pow(base, ex), n.kind, t);
    }
    case NodeKind::neg: return -eval_node(*n.lhs, t);
    case NodeKind::exp: return checked(std::exp(eval_node(*n.lhs, t)), n.kind, t);
    case NodeKind::log: {
      const double a = eval_node(*n.lhs, t);
      if (!(a > 0.0)) throw DomainError("log", t);
      return checked(std::log(a), n.kind, t);
    }
    case NodeKind::abs: return std::fabs(eval_node(*n.lhs, t));
    case NodeKind::sqrt: {
      const double a = eval_node(*n.lhs, t);
      if (a < 0.0) throw DomainError("sqrt", t);
      return std::sqrt(a);
    }
  }
  throw DomainError("?", t);
}

inline int precedence(NodeKind k) {
  switch (k) {
    case NodeKind::add:
    case NodeKind::sub: return 1;
    case NodeKind::mul:
    case NodeKind::div: return 2;
    case NodeKind::neg: return 3;
    case NodeKind::pow: return 4;
    default: return 5;
  }
}

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void print_node(const Node& n, std::string& out);

inline void print_child(const Node& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print_node(child, out);
  if (parens) out += ')';
}

inline void print_node(const Node& n, std::string& out) {
  const int prec = precedence(n.kind);
  switch (n.kind) {
    case NodeKind::constant: out += format_number(n.value); return;
    case NodeKind::variable: out += 't'; return;
    case NodeKind::neg:
      out += '-';
      print_child(*n.lhs, precedence(n.lhs->kind) < 3, out);
      return;
    case NodeKind::exp:
    case NodeKind::log:
    case NodeKind::abs:
    case NodeKind::sqrt:
      out += node_name(n.kind);
      print_child(*n.lhs, true, out);
      return;
    case NodeKind::pow:
      print_child(*n.lhs, precedence(n.lhs->kind) <= prec, out);
      out += '^';
      print_child(*n.rhs, precedence(n.rhs->kind) < 3, out);
      return;
    default:
      // left-associative binary operators
      print_child(*n.lhs, precedence(n.lhs->kind) < prec, out);
      out += node_name(n.kind);
      print_child(*n.rhs, precedence(n.rhs->kind) <= prec, out);
      return;
  }
}

inline bool same_tree(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == NodeKind::constant) return a.value == b.value;
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
  if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
  if (a.lhs && !same_tree(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !same_tree(*a.rhs, *b.rhs)) return false;
  return true;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse_all() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != src_.size()) fail({"operator", "end of input"});
    return e;
  }

 private:
  static NodePtr make(NodeKind k, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0) {
    return std::make_shared<const Node>(Node{k, v, std::move(a), std::move(b)});
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    skip_ws();
    std::string found = pos_ < src_.size() ? "'" + std::string(1, src_[pos_]) + "'" : "end of input";
    throw SyntaxError(pos_, std::move(expected), found);
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(NodeKind::add, lhs, term());
      else if (accept('-')) lhs = make(NodeKind::sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(NodeKind::mul, lhs, unary());
      else if (accept('/')) lhs = make(NodeKind::div, lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(NodeKind::neg, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(NodeKind::pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail({"number", "'t'", "function name", "'('", "'-'"});
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (accept('(')) {
      NodePtr inner = expr();
      if (!accept(')')) fail({"')'", "operator"});
      return inner;
    }
    fail({"number", "'t'", "function name", "'('", "'-'"});
  }

  NodePtr number() {
    // decimal literals only: digits [. digits] [(e|E) [+|-] digits]
    const auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_, ++n;
      return n;
    };
    const std::size_t start = pos_;
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) {
      pos_ = start;
      fail({"number"});
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      const std::size_t mark = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = mark;  // "2e" is the number 2 followed by garbage
    }
    const std::string text(src_.substr(start, pos_ - start));
    const double v = std::strtod(text.c_str(), nullptr);
    if (!std::isfinite(v)) throw SyntaxError(start, {"finite number"}, "'" + text + "'");
    return make(NodeKind::constant, nullptr, nullptr, v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string name(src_.substr(start, pos_ - start));
    if (name == "t") return make(NodeKind::variable);
    NodeKind k;
    if (name == "exp") k = NodeKind::exp;
    else if (name == "log") k = NodeKind::log;
    else if (name == "abs") k = NodeKind::abs;
    else if (name == "sqrt") k = NodeKind::sqrt;
    else throw UnknownIdentifier(start, name);
    if (!accept('(')) fail({"'('"});
    NodePtr arg = expr();
    if (!accept(')')) fail({"')'", "operator"});
    return make(k, arg);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Immutable parsed expression. Copies share the tree.
class Expr {
 public:
  explicit Expr(NodePtr root) : root_(std::move(root)) {}

  double operator()(double t) const { return detail::eval_node(*root_, t); }

  const Node& root() const noexcept { return *root_; }

  /// Canonical text form; parses back to a structurally identical tree.
  std::string to_string() const {
    std::string out;
    detail::print_node(*root_, out);
    return out;
  }

  friend bool same_structure(const Expr& a, const Expr& b) { return detail::same_tree(*a.root_, *b.root_); }

 private:
  NodePtr root_;
};

inline Expr parse(std::string_view source) { return Expr(detail::Parser(source).parse_all()); }

/// Evaluates e at t. Domain violations throw DomainError; the result is always finite.
inline double eval(const Expr& e, double t) { return e(t); }

}  // namespace hardy_refine::dsl
