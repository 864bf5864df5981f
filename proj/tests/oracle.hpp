#pragma once

// Independent reference implementations for the tests. Everything here is
// built from Eigen and the <cmath> special functions, sharing no code with
// the library beyond the ComplexMatrix container used to hand data across.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "macroq/linalg.hpp"
#include "macroq/states.hpp"

namespace oracle {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using cd = std::complex<double>;

inline Mat to_eigen(const macroq::ComplexMatrix& m) {
  Mat out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

inline macroq::ComplexMatrix from_eigen(const Mat& m) {
  macroq::ComplexMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Mat lowering(int n) {
  Mat a = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

// a on `mode` (1-based, mode 1 slowest) of an M-mode space with N levels.
inline Mat lowering(int modes, int n, int mode) {
  Mat out = Mat::Identity(1, 1);
  for (int m = 1; m <= modes; ++m) out = kron(out, m == mode ? lowering(n) : Mat::Identity(n, n));
  return out;
}

// The three-term definition, summed over modes, taken literally.
inline double I_three_term(const Mat& rho, int modes, int n) {
  cd total = 0.0;
  for (int m = 1; m <= modes; ++m) {
    const Mat a = lowering(modes, n, m);
    const Mat ad = a.adjoint();
    total += (0.5 * rho * rho * ad * a + 0.5 * rho * ad * a * rho - rho * a * rho * ad).trace();
  }
  return total.real();
}

inline double C_traces(const Mat& rho, int modes, int n) {
  cd total = 0.0;
  const cd i(0.0, 1.0);
  for (int m = 1; m <= modes; ++m) {
    const Mat a = lowering(modes, n, m);
    const Mat q = (a + a.adjoint()) / std::sqrt(2.0);
    const Mat p = (a - a.adjoint()) / (i * std::sqrt(2.0));
    total += (rho * rho * q * q + rho * rho * p * p - rho * q * rho * q - rho * p * rho * p).trace();
  }
  return total.real();
}

inline double purity(const Mat& rho) { return (rho * rho).trace().real(); }

inline double factorial(int n) { return std::tgamma(n + 1.0); }

// Coherent amplitudes by the closed form, renormalised over N levels.
inline Vec coherent(int n, cd alpha) {
  Vec v(n);
  for (int k = 0; k < n; ++k) v(k) = std::exp(-std::norm(alpha) / 2) * std::pow(alpha, k) / std::sqrt(factorial(k));
  return v / v.norm();
}

inline Mat projector(const Vec& v) { return v * v.adjoint(); }

// Orthonormal Hermite function from the physicists' polynomial.
inline double psi(int n, double x) {
  return std::hermite(n, x) * std::exp(-x * x / 2) /
         std::sqrt(std::pow(2.0, n) * factorial(n) * std::sqrt(std::numbers::pi));
}

inline double position_density(const Mat& rho, double q) {
  cd total = 0.0;
  for (Eigen::Index m = 0; m < rho.rows(); ++m)
    for (Eigen::Index k = 0; k < rho.cols(); ++k) total += rho(m, k) * psi(m, q) * psi(k, q);
  return total.real();
}

// W of |m><n| in the Laguerre form, for the convention with unit integral
// over dq dp.
inline cd wigner_unit(int m, int n, double q, double p) {
  if (m > n) return std::conj(wigner_unit(n, m, q, p));
  const double r2 = q * q + p * p;
  const int k = n - m;
  const cd z = std::sqrt(2.0) * cd(q, p);
  return (m % 2 ? -1.0 : 1.0) / std::numbers::pi * std::sqrt(factorial(m) / factorial(n)) * std::pow(z, k) *
         std::exp(-r2) * std::assoc_laguerre(m, k, 2 * r2);
}

inline double wigner(const Mat& rho, double q, double p) {
  cd total = 0.0;
  for (Eigen::Index m = 0; m < rho.rows(); ++m)
    for (Eigen::Index n = 0; n < rho.cols(); ++n)
      if (rho(m, n) != cd(0.0)) total += rho(m, n) * wigner_unit(static_cast<int>(m), static_cast<int>(n), q, p);
  return total.real();
}

inline Mat random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out(i, j) = cd(g(rng), g(rng));
  return out;
}

}  // namespace oracle
