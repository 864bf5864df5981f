#pragma once

#include <span>
#include <utility>
#include <vector>

#include "macroq/fock_space.hpp"
#include "macroq/linalg.hpp"
#include "macroq/tolerances.hpp"

namespace macroq {

class DensityMatrix;

// Normalized state vector on the truncated M-mode Fock space.
class PureState {
 public:
  // Validates norm and top-level tail; throws ValidationError /
  // TruncationError.
  PureState(ModeSpec spec, std::vector<Complex> amplitudes, const Tolerances& tol = kTolerances);

  const ModeSpec& spec() const { return spec_; }
  std::span<const Complex> amplitudes() const { return amplitudes_; }

  DensityMatrix projector() const;

 private:
  ModeSpec spec_;
  std::vector<Complex> amplitudes_;
};

// Trace-one Hermitian PSD operator on the truncated M-mode Fock space. The
// constructor enforces every invariant, so any DensityMatrix in hand is valid.
class DensityMatrix {
 public:
  DensityMatrix(ModeSpec spec, ComplexMatrix matrix, const Tolerances& tol = kTolerances);

  const ModeSpec& spec() const { return spec_; }
  const ComplexMatrix& matrix() const { return matrix_; }
  std::size_t dimension() const { return matrix_.rows(); }

  std::vector<double> populations() const;

 private:
  ModeSpec spec_;
  ComplexMatrix matrix_;
};

// Isotropic Gaussian Wigner function of width a; a = 1 is the vacuum.
struct GaussianSpec {
  double a = 1.0;

  // Thermal occupation (a^2 - 1)/2 of the matching Fock-diagonal state.
  double mean_occupation() const { return 0.5 * (a * a - 1.0); }
  void validate() const;
};

// Population on level N-1 of each mode, given Fock populations of the
// full M-mode space.
std::vector<double> top_level_populations(const ModeSpec& spec, std::span<const double> populations);
double max_top_level_population(const ModeSpec& spec, std::span<const double> populations);

// Truncation defaults: the larger of the rule-of-thumb heuristic and the
// smallest N meeting the tail tolerance.
int default_truncation_coherent(Complex alpha);
int default_truncation_thermal(const GaussianSpec& g);
int minimal_truncation_coherent(Complex alpha, double tail_tol = kTolerances.tail);
int minimal_truncation_thermal(const GaussianSpec& g, double tail_tol = kTolerances.tail);

PureState fock_state(const ModeSpec& spec, int n);
// One occupation per mode.
PureState fock_state(const ModeSpec& spec, std::span<const int> occupations);

// Truncated, renormalized coherent state. Single mode.
PureState coherent_state(const ModeSpec& spec, Complex alpha);

// (|alpha> + e^{i phase}|-alpha>) / norm. Single mode.
PureState cat_state(const ModeSpec& spec, Complex alpha, double relative_phase);

// (|alpha><alpha| + |-alpha><-alpha|)/2. Single mode.
DensityMatrix cat_mixture(const ModeSpec& spec, Complex alpha);

// Uniform mixture of d consecutive Fock levels starting at 0
// (include_vacuum) or at 1.
DensityMatrix fock_mixture(const ModeSpec& spec, int d, bool include_vacuum);

// Fock-diagonal thermal state whose Wigner function is the Gaussian of width
// a. Single mode.
DensityMatrix thermal_state(const ModeSpec& spec, const GaussianSpec& g);

DensityMatrix mix(std::span<const std::pair<double, DensityMatrix>> components);

// rho_a (x) rho_b with M = M_a + M_b; truncations must match.
DensityMatrix product_state(const DensityMatrix& a, const DensityMatrix& b);
PureState product_state(const PureState& a, const PureState& b);

// Tr[rho^2]
double purity(const DensityMatrix& rho);

// <alpha|beta> for untruncated coherent states.
Complex coherent_overlap(Complex alpha, Complex beta);

}  // namespace macroq
