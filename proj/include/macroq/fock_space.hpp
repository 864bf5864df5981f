#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "macroq/linalg.hpp"

namespace macroq {

// Number of bosonic modes M and per-mode truncation N (levels 0..N-1).
struct ModeSpec {
  int num_modes = 1;
  int truncation = 2;

  // N^M. Throws TruncationError when it exceeds max_dimension().
  std::size_t dimension() const;
  // Throws InvalidArgument for M < 1 or N < 2, TruncationError over budget.
  void validate() const;

  friend bool operator==(const ModeSpec&, const ModeSpec&) = default;
};

enum class OperatorKind { Annihilation, Creation, Q, P, Number };

std::string to_string(OperatorKind kind);

struct ModeOperator {
  ModeSpec spec;
  ComplexMatrix matrix;
  OperatorKind kind;
  int mode;  // 1-based
};

// Single-mode N x N building blocks.
ComplexMatrix single_mode_annihilation(int truncation);
ComplexMatrix single_mode_number(int truncation);

// Places a single-mode operator on `mode` (1-based) of the M-mode space.
// Mode 1 is the slowest-varying tensor index.
ComplexMatrix embed_single_mode(const ModeSpec& spec, int mode, const ComplexMatrix& single);

ModeOperator annihilation_op(const ModeSpec& spec, int mode);
ModeOperator creation_op(const ModeSpec& spec, int mode);
// (a + a^dagger)/sqrt(2)
ModeOperator quadrature_q(const ModeSpec& spec, int mode);
// (a - a^dagger)/(i sqrt(2))
ModeOperator quadrature_p(const ModeSpec& spec, int mode);
ModeOperator number_op(const ModeSpec& spec, int mode);

ModeOperator make_operator(const ModeSpec& spec, OperatorKind kind, int mode);

// Builds operators for one ModeSpec on demand and keeps them. Lookups are
// serialized, returned references stay valid for the cache's lifetime.
class OperatorCache {
 public:
  explicit OperatorCache(ModeSpec spec);

  const ModeSpec& spec() const { return spec_; }
  const ComplexMatrix& get(OperatorKind kind, int mode);

 private:
  ModeSpec spec_;
  std::mutex mutex_;
  std::map<std::pair<OperatorKind, int>, ModeOperator> cache_;
};

}  // namespace macroq
