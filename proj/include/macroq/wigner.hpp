#pragma once

#include <optional>
#include <vector>

#include "macroq/measures.hpp"
#include "macroq/states.hpp"
#include "macroq/tolerances.hpp"

namespace macroq {

// Square sampling domain [-L, L]^2 with nq x np points, endpoints included.
struct GridSpec {
  double half_width = 10.0;
  int nq = 256;
  int np = 256;

  void validate() const;

  // L = sqrt(2N) + 5 covers the phase-space support of any state on N levels.
  static GridSpec for_truncation(int truncation, int points = 256);
};

// Samples W(q_i, p_j), stored row-major with q as the slow index.
struct PhaseSpaceGrid {
  double q_min = 0.0, q_max = 0.0, p_min = 0.0, p_max = 0.0;
  int nq = 0, np = 0;
  std::vector<double> values;

  static PhaseSpaceGrid zeros(const GridSpec& gs);

  double dq() const { return (q_max - q_min) / (nq - 1); }
  double dp() const { return (p_max - p_min) / (np - 1); }
  double q(int i) const { return q_min + i * dq(); }
  double p(int j) const { return p_min + j * dp(); }
  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * np + j]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * np + j]; }
};

// Orthonormal Hermite functions psi_0..psi_{count-1} at x.
std::vector<double> hermite_functions(double x, int count);

// <q|rho|q> for a single-mode state.
double position_density(const DensityMatrix& rho, double q);

// W(q, p) from the Fock-basis Laguerre kernel. Single mode.
double wigner_at(const DensityMatrix& rho, double q, double p, const Tolerances& tol = kTolerances);

// Laguerre-kernel transform over a grid; rows are evaluated concurrently.
// Throws InvalidArgument for multimode input and ResolutionError when the
// grid does not integrate to 1 (domain too small or fringes under-sampled).
PhaseSpaceGrid wigner_from_density(const DensityMatrix& rho, const GridSpec& gs, const Tolerances& tol = kTolerances);

// Slow oracle: the defining eta-integral of <q+eta/2|rho|q-eta/2> e^{-i eta p}
// by trapezoidal quadrature over [-H, H]; H defaults to 2L.
PhaseSpaceGrid wigner_direct(const DensityMatrix& rho, const GridSpec& gs, int eta_points = 512,
                             std::optional<double> eta_half_width = std::nullopt,
                             const Tolerances& tol = kTolerances);

// 1/(pi a^2) exp(-(q^2 + p^2)/a^2)
PhaseSpaceGrid gaussian_wigner(const GaussianSpec& g, const GridSpec& gs);

// Composite trapezoidal rule over the grid.
double integrate(const PhaseSpaceGrid& w);
// int W dp at row i.
double q_marginal(const PhaseSpaceGrid& w, int i);

// 2 pi * int W^2 dq dp
double measure_P_wigner(const PhaseSpaceGrid& w);

// pi * int (dW/dq)^2 + (dW/dp)^2 using second-order central differences of
// step stride*h (one-sided second-order stencils at the edges).
double gradient_integral(const PhaseSpaceGrid& w, int stride = 1);

// Number of central-difference steps (h, 2h, .., 4h) combined by
// extrapolation to h -> 0; the result is accurate to O(h^8).
inline constexpr int kExtrapolationNodes = 4;

// As gradient_integral, with each derivative extrapolated from central
// differences at steps stride*h .. 4*stride*h.
double extrapolated_gradient_integral(const PhaseSpaceGrid& w, int stride = 1);

struct GradientEstimate {
  double value = 0.0;               // extrapolated_gradient_integral at stride 1
  double central_difference = 0.0;  // plain second-order, stride 1
  double resolution = 0.0;          // estimated relative change of value when h is halved
  double observed_order = 0.0;      // of the second-order differences, from strides 1, 2, 4
};

GradientEstimate estimate_C_wigner(const PhaseSpaceGrid& w);

// Extrapolated gradient integral. Throws ResolutionError when the
// estimated step-halving change exceeds tol.resolution.
double measure_C_wigner(const PhaseSpaceGrid& w, const Tolerances& tol = kTolerances);

// Report built from a grid: C and P by quadrature, I = (C - P)/2.
MeasureReport wigner_grid_report(const PhaseSpaceGrid& w, int truncation, const Tolerances& tol = kTolerances);

struct PipelineComparison {
  MeasureReport operator_path;
  MeasureReport wigner_path;
  // Relative differences.
  double delta_C = 0.0;
  double delta_P = 0.0;
  double delta_chi2 = 0.0;
  // |I_wigner - I_operator|
  double delta_I = 0.0;

  double max_relative_delta() const;
};

PipelineComparison compare_pipelines(const DensityMatrix& rho, const GridSpec& gs, const Tolerances& tol = kTolerances);

// Wigner-path report for a single-mode state; throws ConsistencyError if C,
// P or chi2 differ from the operator path by more than tol.cross_pipeline
// (relative).
MeasureReport wigner_measure_report(const DensityMatrix& rho, const GridSpec& gs, const Tolerances& tol = kTolerances);

}  // namespace macroq
