#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hardy_refine/errors.hpp"
#include "hardy_refine/quadrature.hpp"

namespace hardy_refine {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct Spectrum {
  Eigen::VectorXd values;  // ascending
  CMatrix vectors;         // columns
};

/// Conjugate-symmetric complex matrix. The stored matrix is exactly Hermitian
/// ((M + M*)/2 of the input).
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  explicit HermitianMatrix(const CMatrix& m, double tol = 1e-12) {
    if (m.rows() != m.cols() || m.rows() == 0) throw PreconditionError("Hermitian matrix must be square and nonempty");
    if (!m.allFinite()) throw PreconditionError("Hermitian matrix has non-finite entries");
    const double scale = m.norm();
    if ((m - m.adjoint()).norm() > tol * scale) throw PreconditionError("matrix is not Hermitian");
    m_ = (m + m.adjoint()) * 0.5;
  }

  static HermitianMatrix from_real(const Eigen::MatrixXd& m) { return HermitianMatrix(m.cast<cplx>()); }

  static HermitianMatrix diagonal(std::span<const double> d) {
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
    return HermitianMatrix(m);
  }

  static HermitianMatrix identity(Eigen::Index n) { return HermitianMatrix(CMatrix::Identity(n, n)); }
  static HermitianMatrix zero(Eigen::Index n) { return HermitianMatrix(CMatrix::Zero(n, n)); }

  const CMatrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

  Spectrum spectrum() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m_);
    if (es.info() != Eigen::Success) throw EigenFailure("Hermitian eigendecomposition did not converge");
    return {es.eigenvalues(), es.eigenvectors()};
  }

  Eigen::VectorXd eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw EigenFailure("Hermitian eigendecomposition did not converge");
    return es.eigenvalues();
  }

  double eigmin() const { return eigenvalues()(0); }

  /// Spectral norm.
  double norm() const {
    const Eigen::VectorXd ev = eigenvalues();
    return std::max(std::fabs(ev(0)), std::fabs(ev(ev.size() - 1)));
  }

  /// eigmin >= -rel_tol * ||M||
  bool is_psd(double rel_tol = 1e-10) const {
    const Eigen::VectorXd ev = eigenvalues();
    const double scale = std::max(std::fabs(ev(0)), std::fabs(ev(ev.size() - 1)));
    return ev(0) >= -rel_tol * scale;
  }

  /// Re <M eta, eta>
  double quadratic_form(const CVector& eta) const {
    if (eta.size() != dim()) throw PreconditionError("vector dimension mismatch");
    return eta.dot(m_ * eta).real();
  }

  friend HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
    return HermitianMatrix(a.m_ + b.m_);
  }
  friend HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
    return HermitianMatrix(a.m_ - b.m_);
  }
  friend HermitianMatrix operator*(double c, const HermitianMatrix& a) { return HermitianMatrix(c * a.m_); }

 private:
  CMatrix m_;
};

/// Vector of norm 1 within 1e-12.
class UnitVector {
 public:
  explicit UnitVector(CVector v) : v_(std::move(v)) {
    if (v_.size() == 0 || !v_.allFinite() || std::fabs(v_.norm() - 1.0) > 1e-12)
      throw PreconditionError("unit vector must have norm 1");
  }

  static UnitVector normalized(const CVector& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw PreconditionError("cannot normalize a zero vector");
    return UnitVector(v / n);
  }

  static UnitVector basis(Eigen::Index n, Eigen::Index k) {
    CVector v = CVector::Zero(n);
    v(k) = 1.0;
    return UnitVector(v);
  }

  const CVector& vector() const noexcept { return v_; }
  Eigen::Index dim() const noexcept { return v_.size(); }

 private:
  CVector v_;
};

/// U f(Lambda) U*.
template <class F>
HermitianMatrix apply_function(const HermitianMatrix& m, const F& f) {
  const Spectrum s = m.spectrum();
  Eigen::VectorXd fv(s.values.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = f(s.values(i));
  return HermitianMatrix(s.vectors * fv.cast<cplx>().asDiagonal() * s.vectors.adjoint());
}

inline HermitianMatrix abs(const HermitianMatrix& m) {
  return apply_function(m, [](double t) { return std::fabs(t); });
}

/// <f(M) eta, eta> = sum_k f(lambda_k) |<u_k, eta>|^2, without reassembling f(M).
template <class F>
double quadratic_form_of(const HermitianMatrix& m, const F& f, const CVector& eta) {
  const Spectrum s = m.spectrum();
  const CVector c = s.vectors.adjoint() * eta;
  CompensatedSum sum;
  for (Eigen::Index k = 0; k < c.size(); ++k) sum.add(f(s.values(k)) * std::norm(c(k)));
  return sum.value();
}

// ---------------------------------------------------------------------------------------------
// Seeded random instances
// ---------------------------------------------------------------------------------------------

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Per-instance seed; independent of the order in which instances are run.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

// std::normal_distribution is implementation-defined; Box-Muller over raw 53-bit uniforms
// keeps instances identical across standard libraries.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double standard_normal(Rng& rng) {
  double u = uniform01(rng);
  while (u == 0.0) u = uniform01(rng);
  const double v = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * v);
}

/// Standard complex Gaussian: real and imaginary parts N(0, 1/2).
inline cplx complex_normal(Rng& rng) {
  const double s = 0.7071067811865476;
  const double re = standard_normal(rng);
  return {s * re, s * standard_normal(rng)};
}

/// A = M*M / ||M*M|| with M standard complex Gaussian; spectrum in [0, 1].
inline HermitianMatrix random_psd(Eigen::Index dim, Rng& rng, Eigen::Index rank = -1) {
  if (rank < 0) rank = dim;
  CMatrix m(rank, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < rank; ++i) m(i, j) = complex_normal(rng);
  const HermitianMatrix a(m.adjoint() * m);
  const double n = a.norm();
  return HermitianMatrix((1.0 / n) * a.matrix());
}

inline UnitVector random_unit_vector(Eigen::Index dim, Rng& rng) {
  CVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = complex_normal(rng);
  return UnitVector::normalized(v);
}

/// Uniform point of the probability simplex.
inline std::vector<double> random_simplex(std::size_t m, Rng& rng) {
  std::vector<double> w(m);
  double total = 0.0;
  for (double& x : w) {
    double u = uniform01(rng);
    while (u == 0.0) u = uniform01(rng);
    x = -std::log(u);
    total += x;
  }
  for (double& x : w) x /= total;
  return w;
}

}  // namespace hardy_refine
