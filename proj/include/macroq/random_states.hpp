#pragma once

#include <cstdint>
#include <random>

#include "macroq/states.hpp"

namespace macroq {

// Seeded generators for property checks. Amplitudes are complex Gaussian
// on levels 0..N-2 of every mode; the top level is left empty so the states
// satisfy the tail rule exactly.
PureState random_pure_state(const ModeSpec& spec, std::mt19937_64& rng);

// Convex combination of `components` random projectors with flat-Dirichlet
// weights.
DensityMatrix random_mixed_state(const ModeSpec& spec, std::mt19937_64& rng, int components = 3);

}  // namespace macroq
