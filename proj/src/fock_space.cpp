#include "macroq/fock_space.hpp"

#include <cmath>

#include "macroq/errors.hpp"
#include "macroq/tolerances.hpp"

namespace macroq {

std::size_t ModeSpec::dimension() const {
  const std::size_t budget = max_dimension();
  std::size_t dim = 1;
  for (int m = 0; m < num_modes; ++m) {
    dim *= static_cast<std::size_t>(truncation);
    if (dim > budget) {
      throw TruncationError("Hilbert-space dimension " + std::to_string(truncation) + "^" +
                            std::to_string(num_modes) + " exceeds the budget of " + std::to_string(budget) +
                            " (set MACROQ_MAX_DIM to raise it)");
    }
  }
  return dim;
}

void ModeSpec::validate() const {
  if (num_modes < 1) throw InvalidArgument("number of modes must be >= 1, got " + std::to_string(num_modes));
  if (truncation < 2) throw InvalidArgument("Fock truncation must be >= 2, got " + std::to_string(truncation));
  (void)dimension();
}

std::string to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::Annihilation: return "a";
    case OperatorKind::Creation: return "a_dag";
    case OperatorKind::Q: return "q";
    case OperatorKind::P: return "p";
    case OperatorKind::Number: return "n";
  }
  return "?";
}

ComplexMatrix single_mode_annihilation(int truncation) {
  const auto n = static_cast<std::size_t>(truncation);
  ComplexMatrix a(n, n);
  for (std::size_t k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

ComplexMatrix single_mode_number(int truncation) {
  const auto n = static_cast<std::size_t>(truncation);
  ComplexMatrix num(n, n);
  for (std::size_t k = 0; k < n; ++k) num(k, k) = static_cast<double>(k);
  return num;
}

ComplexMatrix embed_single_mode(const ModeSpec& spec, int mode, const ComplexMatrix& single) {
  spec.validate();
  if (mode < 1 || mode > spec.num_modes) {
    throw InvalidArgument("mode index " + std::to_string(mode) + " outside 1.." + std::to_string(spec.num_modes));
  }
  const auto n = static_cast<std::size_t>(spec.truncation);
  if (single.rows() != n || single.cols() != n) throw InvalidArgument("single-mode operator does not match truncation");

  std::size_t before = 1, after = 1;
  for (int m = 1; m < mode; ++m) before *= n;
  for (int m = mode + 1; m <= spec.num_modes; ++m) after *= n;
  return tensor_product(tensor_product(ComplexMatrix::identity(before), single), ComplexMatrix::identity(after));
}

namespace {

ComplexMatrix single_mode(OperatorKind kind, int truncation) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const ComplexMatrix a = single_mode_annihilation(truncation);
  switch (kind) {
    case OperatorKind::Annihilation: return a;
    case OperatorKind::Creation: return adjoint(a);
    case OperatorKind::Q: return (a + adjoint(a)) * Complex(inv_sqrt2);
    case OperatorKind::P: return (a - adjoint(a)) * Complex(0.0, -inv_sqrt2);
    case OperatorKind::Number: return single_mode_number(truncation);
  }
  throw InvalidArgument("unknown operator kind");
}

}  // namespace

ModeOperator make_operator(const ModeSpec& spec, OperatorKind kind, int mode) {
  return {spec, embed_single_mode(spec, mode, single_mode(kind, spec.truncation)), kind, mode};
}

ModeOperator annihilation_op(const ModeSpec& spec, int mode) {
  return make_operator(spec, OperatorKind::Annihilation, mode);
}
ModeOperator creation_op(const ModeSpec& spec, int mode) { return make_operator(spec, OperatorKind::Creation, mode); }
ModeOperator quadrature_q(const ModeSpec& spec, int mode) { return make_operator(spec, OperatorKind::Q, mode); }
ModeOperator quadrature_p(const ModeSpec& spec, int mode) { return make_operator(spec, OperatorKind::P, mode); }
ModeOperator number_op(const ModeSpec& spec, int mode) { return make_operator(spec, OperatorKind::Number, mode); }

OperatorCache::OperatorCache(ModeSpec spec) : spec_(spec) { spec_.validate(); }

const ComplexMatrix& OperatorCache::get(OperatorKind kind, int mode) {
  std::lock_guard lock(mutex_);
  const auto key = std::make_pair(kind, mode);
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(key, make_operator(spec_, kind, mode)).first;
  return it->second.matrix;
}

}  // namespace macroq
