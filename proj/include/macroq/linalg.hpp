#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace macroq {

using Complex = std::complex<double>;

// Dense row-major complex matrix. Holds operators and density matrices on the
// truncated Fock space; dimensions stay in the low thousands so no sparse
// storage is attempted.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  // Throws InvalidArgument if entries.size() != rows * cols or any entry is
  // not finite.
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const Complex> diag);
  static ComplexMatrix diagonal(std::span<const double> diag);
  // |v><w|
  static ComplexMatrix outer(std::span<const Complex> v, std::span<const Complex> w);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return entries_.size(); }
  bool is_square() const { return rows_ == cols_; }
  bool empty() const { return entries_.empty(); }

  Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::span<Complex> entries() { return entries_; }
  std::span<const Complex> entries() const { return entries_; }

  bool all_finite() const;
  double max_abs() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex scale);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix adjoint(const ComplexMatrix& a);
Complex trace(const ComplexMatrix& a);
// Tr[AB] summed directly over both indices.
Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b);

// Kronecker product; a's index varies slowest.
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

// y = A x
std::vector<Complex> apply(const ComplexMatrix& a, std::span<const Complex> x);

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
// max |A - A^dagger| entrywise
double hermiticity_defect(const ComplexMatrix& a);

// Eigenvalues of a Hermitian matrix in ascending order. Only the lower
// triangle is read.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a);

// Matrix exponential by scaling and squaring of a truncated Taylor series.
ComplexMatrix expm(const ComplexMatrix& a);

}  // namespace macroq
