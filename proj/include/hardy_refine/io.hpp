#pragma once

// Report serialization. Every double is written with 17 significant digits; non-finite
// values become null. Key order is fixed so identical runs give identical bytes.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hardy_refine/hardy.hpp"
#include "hardy_refine/operator.hpp"
#include "hardy_refine/superquad.hpp"

namespace hardy_refine::io {

inline std::string number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string quoted(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

/// Minimal streaming JSON writer with two-space indentation.
class JsonWriter {
 public:
  JsonWriter& begin_object() { return open('{'); }
  JsonWriter& end_object() { return close('}'); }
  JsonWriter& begin_array() { return open('['); }
  JsonWriter& end_array() { return close(']'); }

  JsonWriter& key(std::string_view k) {
    separate();
    out_ += quoted(k) + ": ";
    after_key_ = true;
    return *this;
  }

  JsonWriter& value(double v) { return raw(number(v)); }
  JsonWriter& value(bool v) { return raw(v ? "true" : "false"); }
  JsonWriter& value(std::string_view s) { return raw(quoted(s)); }
  JsonWriter& value(const char* s) { return raw(quoted(s)); }
  template <std::integral T>
  JsonWriter& value(T v) {
    return raw(std::to_string(v));
  }
  JsonWriter& null() { return raw("null"); }

  template <class T>
  JsonWriter& field(std::string_view k, const T& v) {
    key(k);
    return value(v);
  }

  JsonWriter& field(std::string_view k, const std::optional<double>& v) {
    key(k);
    return v ? value(*v) : null();
  }

  JsonWriter& numbers(std::string_view k, std::span<const double> xs) {
    key(k);
    begin_array();
    for (double x : xs) value(x);
    return end_array();
  }

  std::string str() const { return out_ + "\n"; }

 private:
  JsonWriter& open(char c) {
    separate();
    out_ += c;
    first_.push_back(true);
    return *this;
  }

  JsonWriter& close(char c) {
    const bool empty = first_.back();
    first_.pop_back();
    if (!empty) newline();
    out_ += c;
    return *this;
  }

  JsonWriter& raw(const std::string& s) {
    separate();
    out_ += s;
    return *this;
  }

  void separate() {
    if (after_key_) {
      after_key_ = false;
      return;
    }
    if (first_.empty()) return;
    if (!first_.back()) out_ += ',';
    first_.back() = false;
    newline();
  }

  void newline() {
    out_ += '\n';
    out_.append(2 * first_.size(), ' ');
  }

  std::string out_;
  std::vector<bool> first_;
  bool after_key_ = false;
};

inline void write_quad(JsonWriter& w, std::string_view k, const QuadResult& q) {
  w.key(k).begin_object();
  w.field("value", q.value);
  w.field("err_estimate", q.err_estimate);
  w.field("panels_used", q.panels_used);
  w.field("converged", q.converged);
  w.end_object();
}

inline void write_report(JsonWriter& w, const HardyReport& r) {
  w.begin_object();
  w.field("kind", to_string(r.kind));
  w.field("function", r.function);
  w.field("p", r.p);
  w.field("lhs", r.lhs);
  w.field("classical_rhs", r.classical_rhs);
  w.field("correction", r.correction);
  w.field("correction_coefficient", r.correction_coefficient);
  w.field("refined_rhs", r.refined_rhs);
  w.field("classical_margin", r.classical_margin);
  w.field("refined_margin", r.refined_margin);
  w.field("err_budget", r.err_budget);
  w.field("verdict", to_string(r.verdict));
  w.field("derived_margin", r.derived_margin);
  w.field("converged", r.converged);
  w.key("quadrature").begin_object();
  write_quad(w, "lhs", r.lhs_quad);
  write_quad(w, "power", r.power_quad);
  write_quad(w, "correction", r.correction_quad);
  w.end_object();
  if (r.kind == ReportKind::operator_refined) {
    w.field("psd_clip", r.psd_clip);
    w.field("discretization_estimate", r.discretization_estimate);
  }
  w.end_object();
}

inline constexpr std::string_view kCsvHeader =
    "kind,function,p,lhs,classical_rhs,correction,correction_coefficient,refined_rhs,classical_margin,"
    "refined_margin,err_budget,verdict,derived_margin,converged,lhs_err,power_err,correction_err,"
    "lhs_panels,power_panels,correction_panels";

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

inline std::string csv_row(const HardyReport& r) {
  std::string row;
  const auto add = [&](const std::string& s) {
    if (!row.empty()) row += ',';
    row += s;
  };
  add(to_string(r.kind));
  add(csv_field(r.function));
  for (double v : {r.p, r.lhs, r.classical_rhs, r.correction, r.correction_coefficient, r.refined_rhs,
                   r.classical_margin, r.refined_margin, r.err_budget})
    add(number(v));
  add(to_string(r.verdict));
  add(r.derived_margin ? number(*r.derived_margin) : "");
  add(r.converged ? "true" : "false");
  add(number(r.lhs_quad.err_estimate));
  add(number(r.power_quad.err_estimate));
  add(number(r.correction_quad.err_estimate));
  add(std::to_string(r.lhs_quad.panels_used));
  add(std::to_string(r.power_quad.panels_used));
  add(std::to_string(r.correction_quad.panels_used));
  return row;
}

inline std::string csv(std::span<const HardyReport> reports) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const HardyReport& r : reports) out += csv_row(r) + '\n';
  return out;
}

inline void write_witness(JsonWriter& w, const SuperquadWitness& s) {
  w.begin_object();
  w.field("verdict", s.consistent() ? "ConsistentOnGrid" : "ViolatedAt");
  if (s.violation) {
    w.key("violation").begin_object();
    w.field("a", s.violation->a);
    w.field("b_low", s.violation->b_low);
    w.field("b_high", s.violation->b_high);
    w.field("excess", s.violation->excess);
    w.end_object();
  }
  w.field("tol", s.tol);
  w.field("convex_on_grid", s.convex_on_grid);
  w.key("intervals").begin_array();
  for (const AnchorInterval& iv : s.intervals) {
    w.begin_object();
    w.field("a", iv.a);
    w.field("low", iv.low);
    w.field("high", iv.high);
    w.field("empty", iv.empty);
    w.end_object();
  }
  w.end_array();
  w.end_object();
}

inline void write_gap(JsonWriter& w, const JensenGap& g) {
  w.begin_object();
  w.field("lhs", g.lhs);
  w.field("rhs", g.rhs);
  w.field("gap", g.gap);
  w.end_object();
}

inline void write_hermitian(JsonWriter& w, const CMatrix& m) {
  w.begin_array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      w.begin_array();
      w.value(m(i, j).real());
      w.value(m(i, j).imag());
      w.end_array();
    }
  w.end_array();
}

inline void write_hansen(JsonWriter& w, const HansenResult& h) {
  w.begin_object();
  w.field("p", h.p);
  w.field("eigmin_slack", h.eigmin_slack);
  w.field("richardson", h.richardson);
  w.field("verdict", h.holds ? "Holds" : "Violated");
  w.end_object();
}

inline void write_bump_field(JsonWriter& w, const BumpField& f) {
  w.begin_object();
  w.field("dim", static_cast<std::size_t>(f.dim()));
  w.numbers("centers", f.centers);
  w.numbers("widths", f.widths);
  w.key("coefficients").begin_array();
  for (const HermitianMatrix& a : f.coefficients) write_hermitian(w, a.matrix());
  w.end_array();
  w.end_object();
}

inline void write_finding(JsonWriter& w, const HansenFinding& f) {
  w.begin_object();
  w.field("p", f.p);
  w.key("master_seed").value(f.master_seed);
  w.field("trial", f.trial);
  w.key("instance_seed").value(f.instance_seed);
  w.field("rank_one", f.rank_one);
  w.key("result");
  write_hansen(w, f.result);
  w.key("field");
  write_bump_field(w, f.field);
  w.end_object();
}

inline void write_external(JsonWriter& w, const ExternalJensen& e) {
  w.begin_object();
  w.field("lhs", e.lhs);
  w.field("rhs_lower_bound", e.rhs_lower_bound);
  w.field("slack", e.slack);
  w.field("finding", e.finding);
  w.end_object();
}

// ---------------------------------------------------------------------------------------------
// MatrixField documents: {"dim": n, "grid": [...], "samples": [[[re, im], ...], ...]}
// with each sample's n*n entries in row-major order.
// ---------------------------------------------------------------------------------------------

inline std::string field_to_json(const MatrixField& f) {
  JsonWriter w;
  w.begin_object();
  w.field("dim", static_cast<std::size_t>(f.dim()));
  w.numbers("grid", f.grid());
  w.key("samples").begin_array();
  for (const HermitianMatrix& s : f.samples()) write_hermitian(w, s.matrix());
  w.end_array();
  w.end_object();
  return w.str();
}

inline MatrixField field_from_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("matrix field JSON: ") + e.what());
  }
  try {
    const auto n = doc.at("dim").get<Eigen::Index>();
    if (n < 1) throw PreconditionError("matrix field JSON: dim must be >= 1");
    auto grid = doc.at("grid").get<std::vector<double>>();
    const auto& raw = doc.at("samples");
    std::vector<HermitianMatrix> samples;
    for (const auto& s : raw) {
      if (s.size() != static_cast<std::size_t>(n * n)) throw PreconditionError("matrix field JSON: sample has wrong size");
      CMatrix m(n, n);
      for (Eigen::Index k = 0; k < n * n; ++k) {
        const auto& e = s.at(static_cast<std::size_t>(k));
        m(k / n, k % n) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
      }
      samples.emplace_back(m, 1e-12);
    }
    return MatrixField(std::move(grid), std::move(samples));
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("matrix field JSON: ") + e.what());
  }
}

inline MatrixField field_from_json(std::string_view text) {
  std::istringstream in{std::string(text)};
  return field_from_json(in);
}

}  // namespace hardy_refine::io
