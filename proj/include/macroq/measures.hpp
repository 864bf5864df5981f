#pragma once

#include <optional>
#include <string>

#include "macroq/states.hpp"
#include "macroq/tolerances.hpp"

namespace macroq {

// The Wigner function is normalized to unit integral over phase space and
// C = (2 pi)^M / 2 * int |grad W|^2, P = (2 pi)^M * int W^2. The alternative
// convention that rescales these by 2^M is not used anywhere.
inline constexpr const char* kConventionNote =
    "W normalized to unit phase-space integral; C = (2pi)^M/2 * integral of |grad W|^2, "
    "P = (2pi)^M * integral of W^2 over dq dp with [q,p] = i; the 2^M-rescaled convention is not used";

enum class MeasurePath { Operator, Wigner };

std::string to_string(MeasurePath path);

struct MeasureReport {
  double I = 0.0;
  double C = 0.0;
  double P = 0.0;
  double chi2 = 0.0;
  int num_modes = 1;
  int truncation = 2;
  // |I - (C - M P)/2| with I from the three-term trace and C, P computed
  // separately.
  double identity_residual = 0.0;
  std::string convention_note = kConventionNote;
  MeasurePath path = MeasurePath::Operator;

  // Diagnostics.
  double top_level_population = 0.0;
  double two_term_delta = 0.0;
  std::optional<double> pure_relation_residual;
  // Wigner path only: grid used and estimated relative step-halving change of C.
  std::optional<double> grid_half_width;
  std::optional<int> grid_points;
  std::optional<double> resolution_estimate;
};

// Sum over modes of Tr[rho^2 a^dag a / 2 + rho a^dag a rho / 2 - rho a rho a^dag],
// evaluated term by term as written. The simplified two-term form is computed
// alongside and must agree within tol.three_vs_two_term.
double measure_I(const DensityMatrix& rho, const Tolerances& tol = kTolerances);

// Sum over modes of Tr[rho^2 n] - Tr[rho a rho a^dag].
double measure_I_two_term(const DensityMatrix& rho, const Tolerances& tol = kTolerances);

// Sum over modes of Tr[rho^2 q^2 + rho^2 p^2 - rho q rho q - rho p rho p].
double measure_C(const DensityMatrix& rho, const Tolerances& tol = kTolerances);

// 2 C / P
double measure_chi2(const DensityMatrix& rho, const Tolerances& tol = kTolerances);

// Assembles I, C, P, chi2 and checks I == (C - M P)/2.
MeasureReport measure_report(const DensityMatrix& rho, const Tolerances& tol = kTolerances);

// As measure_report on |psi><psi|, additionally checking I == chi2/4 - M/2.
MeasureReport pure_state_measures(const PureState& psi, const Tolerances& tol = kTolerances);

// exp(beta a^dag - conj(beta) a) on the given mode of the truncated space.
ComplexMatrix displacement_operator(const ModeSpec& spec, int mode, Complex beta);

// D rho D^dag. Throws TruncationError unless the population beyond level
// N - ceil(4 |beta| sqrt(N)) of `mode` is below tol.displacement_guard.
DensityMatrix displace(const DensityMatrix& rho, Complex beta, int mode = 1, const Tolerances& tol = kTolerances);

}  // namespace macroq
