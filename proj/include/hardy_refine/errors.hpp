#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace hardy_refine {

namespace detail {
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (bad p, empty grid, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found)
      : Error(format(offset, expected, found)), offset_(offset), expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  static std::string format(std::size_t offset, const std::vector<std::string>& expected,
                            const std::string& found) {
    std::string msg = "syntax error at offset " + std::to_string(offset) + ": found " + found + ", expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += expected[i];
    }
    return msg;
  }

  std::size_t offset_;
  std::vector<std::string> expected_;
};

class UnknownIdentifier : public Error {
 public:
  UnknownIdentifier(std::size_t offset, const std::string& name)
      : Error("unknown identifier '" + name + "' at offset " + std::to_string(offset)),
        offset_(offset),
        name_(name) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& name() const noexcept { return name_; }

 private:
  std::size_t offset_;
  std::string name_;
};

/// Evaluation left the real domain of a node (log of a nonpositive value, 0^negative, ...).
class DomainError : public Error {
 public:
  DomainError(const std::string& node, double t)
      : Error("domain error in " + node + " at t=" + detail::format_double(t)), node_(node), t_(t) {}

  const std::string& node() const noexcept { return node_; }
  double t() const noexcept { return t_; }

 private:
  std::string node_;
  double t_;
};

/// An integrand returned NaN or infinity at a quadrature node.
class NonFiniteSample : public Error {
 public:
  explicit NonFiniteSample(double x)
      : Error("non-finite integrand sample at x=" + detail::format_double(x)), x_(x) {}
  double x() const noexcept { return x_; }

 private:
  double x_;
};

/// Bisection could not isolate a sign change of a kink indicator within resolution.
class KinkNotBracketed : public Error {
 public:
  using Error::Error;
};

class DegenerateGrid : public Error {
 public:
  using Error::Error;
};

class EigenFailure : public Error {
 public:
  using Error::Error;
};

class HypothesisViolated : public Error {
 public:
  HypothesisViolated(std::string which, const std::string& detail)
      : Error("hypothesis violated (" + which + "): " + detail), which_(std::move(which)) {}
  const std::string& which() const noexcept { return which_; }

 private:
  std::string which_;
};

}  // namespace hardy_refine
