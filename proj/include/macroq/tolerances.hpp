#pragma once

#include <cstddef>

namespace macroq {

// Numerical thresholds shared by every module.
struct Tolerances {
  // DensityMatrix / PureState invariants.
  double hermiticity = 1e-10;
  double trace = 1e-10;
  double norm = 1e-10;
  double psd_floor = -1e-8;
  // Population allowed on the top retained Fock level of any mode.
  double tail = 1e-12;
  double weight_sum = 1e-12;

  // Traces of Hermitian products are real; anything above this is corruption.
  double imag_residue = 1e-10;
  double three_vs_two_term = 1e-10;
  double identity_residual = 1e-9;
  double pure_relation = 1e-10;
  double chi2_consistency = 1e-12;

  // Displacement: population beyond N - ceil(4|beta| sqrt(N)).
  double displacement_guard = 1e-10;

  // Phase-space grids.
  double grid_normalization = 1e-6;
  double wigner_imag_residue = 1e-10;
  // Estimated relative change of C when the grid step is halved.
  double resolution = 1e-4;
  double cross_pipeline = 1e-3;
};

inline constexpr Tolerances kTolerances{};

// Cap on N^M; overridden by the MACROQ_MAX_DIM environment variable.
inline constexpr std::size_t kDefaultMaxDimension = 4096;
std::size_t max_dimension();

}  // namespace macroq
