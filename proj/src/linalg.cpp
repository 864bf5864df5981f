#include "macroq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include <Eigen/Dense>

#include "macroq/errors.hpp"
#include "macroq/tolerances.hpp"

namespace macroq {

std::size_t max_dimension() {
  if (const char* env = std::getenv("MACROQ_MAX_DIM")) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return static_cast<std::size_t>(value);
  }
  return kDefaultMaxDimension;
}

namespace {

std::string shape(const ComplexMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw InvalidArgument("matrix entries length " + std::to_string(entries_.size()) +
                          " does not match shape " + std::to_string(rows_) + "x" + std::to_string(cols_));
  }
  if (!all_finite()) throw InvalidArgument("matrix contains non-finite entries");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::outer(std::span<const Complex> v, std::span<const Complex> w) {
  ComplexMatrix m(v.size(), w.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) m(i, j) = v[i] * std::conj(w[j]);
  return m;
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double ComplexMatrix::max_abs() const {
  double out = 0.0;
  for (const auto& z : entries_) out = std::max(out, std::abs(z));
  return out;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw InvalidArgument("cannot add " + shape(*this) + " and " + shape(other));
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw InvalidArgument("cannot subtract " + shape(other) + " from " + shape(*this));
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (auto& z : entries_) z *= scale;
  return *this;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows())
    throw InvalidArgument("matmul: incompatible shapes " + shape(a) + " and " + shape(b));
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  std::vector<double> out(2 * n * m, 0.0);
  const auto* ap = reinterpret_cast<const double*>(a.entries().data());
  const auto* bp = reinterpret_cast<const double*>(b.entries().data());
  // i-k-j ordering with explicit real arithmetic keeps the inner loop
  // contiguous and free of the complex-multiply NaN fixups.
  for (std::size_t i = 0; i < n; ++i) {
    double* row = out.data() + 2 * i * m;
    for (std::size_t l = 0; l < k; ++l) {
      const double ar = ap[2 * (i * k + l)];
      const double ai = ap[2 * (i * k + l) + 1];
      if (ar == 0.0 && ai == 0.0) continue;
      const double* brow = bp + 2 * l * m;
      for (std::size_t j = 0; j < m; ++j) {
        const double br = brow[2 * j], bi = brow[2 * j + 1];
        row[2 * j] += ar * br - ai * bi;
        row[2 * j + 1] += ar * bi + ai * br;
      }
    }
  }
  ComplexMatrix c(n, m);
  auto dst = c.entries();
  for (std::size_t i = 0; i < n * m; ++i) dst[i] = Complex(out[2 * i], out[2 * i + 1]);
  return c;
}

ComplexMatrix adjoint(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

Complex trace(const ComplexMatrix& a) {
  if (!a.is_square()) throw InvalidArgument("trace of non-square matrix " + shape(a));
  Complex sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) sum += a(i, i);
  return sum;
}

Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols())
    throw InvalidArgument("trace_product: incompatible shapes " + shape(a) + " and " + shape(b));
  Complex sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) sum += a(i, j) * b(j, i);
  return sum;
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

std::vector<Complex> apply(const ComplexMatrix& a, std::span<const Complex> x) {
  if (a.cols() != x.size())
    throw InvalidArgument("apply: matrix " + shape(a) + " against vector of length " + std::to_string(x.size()));
  std::vector<Complex> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex sum = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) sum += a(i, j) * x[j];
    y[i] = sum;
  }
  return y;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidArgument("max_abs_diff: shapes " + shape(a) + " and " + shape(b) + " differ");
  double out = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::abs(a.entries()[i] - b.entries()[i]));
  return out;
}

double hermiticity_defect(const ComplexMatrix& a) {
  if (!a.is_square()) throw InvalidArgument("hermiticity of non-square matrix " + shape(a));
  double out = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j) out = std::max(out, std::abs(a(i, j) - std::conj(a(j, i))));
  return out;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a) {
  if (!a.is_square()) throw InvalidArgument("eigenvalues of non-square matrix " + shape(a));
  const auto n = static_cast<Eigen::Index>(a.rows());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("Hermitian eigenvalue solver did not converge");
  const auto& values = solver.eigenvalues();
  return {values.data(), values.data() + values.size()};
}

ComplexMatrix expm(const ComplexMatrix& a) {
  if (!a.is_square()) throw InvalidArgument("expm of non-square matrix " + shape(a));
  const std::size_t n = a.rows();

  // Max absolute row sum bounds the spectral radius.
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(a(i, j));
    norm = std::max(norm, row);
  }
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  ComplexMatrix scaled = a * Complex(std::ldexp(1.0, -squarings));

  // Taylor series; with ||scaled|| <= 1/2 the terms fall below 1e-18 within
  // ~20 orders.
  ComplexMatrix result = ComplexMatrix::identity(n);
  ComplexMatrix term = ComplexMatrix::identity(n);
  for (int k = 1; k <= 40; ++k) {
    term = matmul(term, scaled) * Complex(1.0 / k);
    result += term;
    if (term.max_abs() < 1e-18 * result.max_abs()) break;
  }
  for (int s = 0; s < squarings; ++s) result = matmul(result, result);
  return result;
}

}  // namespace macroq
