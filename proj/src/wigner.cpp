#include "macroq/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "macroq/errors.hpp"
#include "macroq/parallel.hpp"

namespace macroq {

namespace {

constexpr double kPi = std::numbers::pi;
// Recurrences are rescaled by this factor to stay within double range.
constexpr double kRescale = 1e150;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void require_single_mode(const DensityMatrix& rho) {
  if (rho.spec().num_modes != 1) {
    throw InvalidArgument("phase-space grids are single-mode only; state has " +
                          std::to_string(rho.spec().num_modes) + " modes");
  }
}

// Diagonal offsets k = n - m that carry any nonzero rho_{m,n} or rho_{n,m}.
std::vector<int> active_offsets(const ComplexMatrix& rho) {
  const int n = static_cast<int>(rho.rows());
  std::vector<int> out;
  for (int k = 0; k < n; ++k) {
    for (int m = 0; m + k < n; ++m) {
      if (rho(m, m + k) != Complex{} || rho(m + k, m) != Complex{}) {
        out.push_back(k);
        break;
      }
    }
  }
  return out;
}

// Sum over all Fock pairs of rho_{mn} W_{|m><n|}(q, p), times pi. Real for
// Hermitian rho; the imaginary part is returned as a residue.
Complex wigner_kernel_sum(const ComplexMatrix& rho, std::span<const int> offsets, double q, double p) {
  const int n = static_cast<int>(rho.rows());
  const double r2 = q * q + p * p;
  const double x = 2.0 * r2;
  const Complex unit = r2 > 0.0 ? Complex(q, p) / std::sqrt(r2) : Complex(1.0);

  Complex total = 0.0;
  for (const int k : offsets) {
    if (k > 0 && x == 0.0) continue;
    // f_m = sqrt(m!/(m+k)!) x^{k/2} e^{-x/2} L_m^{(k)}(x), tracked as
    // scaled * exp(log_scale).
    double log_scale = -0.5 * x - 0.5 * std::lgamma(k + 1.0);
    if (k > 0) log_scale += 0.5 * k * std::log(x);
    double factor = std::exp(log_scale);
    double f_prev = 0.0, f = 1.0;
    Complex upper = 0.0, lower = 0.0;
    for (int m = 0; m + k < n; ++m) {
      const double value = (m % 2 == 0 ? 1.0 : -1.0) * f * factor;
      upper += rho(m, m + k) * value;
      if (k > 0) lower += rho(m + k, m) * value;
      const double next = ((2.0 * m + 1.0 + k - x) * f - std::sqrt(double(m) * (m + k)) * f_prev) /
                          std::sqrt((m + 1.0) * (m + k + 1.0));
      f_prev = f;
      f = next;
      if (std::abs(f) > kRescale) {
        f /= kRescale;
        f_prev /= kRescale;
        log_scale += std::log(kRescale);
        factor = std::exp(log_scale);
      }
    }
    if (k == 0) {
      total += upper;
    } else {
      const Complex phase = std::pow(unit, k);
      total += phase * upper + std::conj(phase) * lower;
    }
  }
  return total;
}

void check_normalization(const PhaseSpaceGrid& w, const Tolerances& tol) {
  const double norm = integrate(w);
  if (std::abs(norm - 1.0) > tol.grid_normalization) {
    throw ResolutionError("Wigner grid integrates to " + fmt(norm) +
                           " instead of 1; enlarge the half-width or add grid points");
  }
}

double relative_delta(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

void GridSpec::validate() const {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw InvalidArgument("grid half-width must be positive, got " + fmt(half_width));
  }
  if (nq < 32 || np < 32) {
    throw InvalidArgument("grid needs at least 32 points per axis, got " + std::to_string(nq) + "x" +
                          std::to_string(np));
  }
}

GridSpec GridSpec::for_truncation(int truncation, int points) {
  return {std::sqrt(2.0 * truncation) + 5.0, points, points};
}

PhaseSpaceGrid PhaseSpaceGrid::zeros(const GridSpec& gs) {
  gs.validate();
  PhaseSpaceGrid w;
  w.q_min = w.p_min = -gs.half_width;
  w.q_max = w.p_max = gs.half_width;
  w.nq = gs.nq;
  w.np = gs.np;
  w.values.assign(static_cast<std::size_t>(gs.nq) * gs.np, 0.0);
  return w;
}

std::vector<double> hermite_functions(double x, int count) {
  std::vector<double> out(static_cast<std::size_t>(std::max(count, 0)));
  if (out.empty()) return out;
  double log_scale = -0.5 * x * x - 0.25 * std::log(kPi);
  double factor = std::exp(log_scale);
  double f_prev = 0.0, f = 1.0;
  for (int n = 0; n < count; ++n) {
    out[static_cast<std::size_t>(n)] = f * factor;
    const double next = std::sqrt(2.0 / (n + 1.0)) * x * f - std::sqrt(n / (n + 1.0)) * f_prev;
    f_prev = f;
    f = next;
    if (std::abs(f) > kRescale) {
      f /= kRescale;
      f_prev /= kRescale;
      log_scale += std::log(kRescale);
      factor = std::exp(log_scale);
    }
  }
  return out;
}

double position_density(const DensityMatrix& rho, double q) {
  require_single_mode(rho);
  const auto psi = hermite_functions(q, static_cast<int>(rho.dimension()));
  Complex sum = 0.0;
  for (std::size_t m = 0; m < psi.size(); ++m)
    for (std::size_t n = 0; n < psi.size(); ++n) sum += rho.matrix()(m, n) * psi[m] * psi[n];
  return sum.real();
}

double wigner_at(const DensityMatrix& rho, double q, double p, const Tolerances& tol) {
  require_single_mode(rho);
  const auto offsets = active_offsets(rho.matrix());
  const Complex w = wigner_kernel_sum(rho.matrix(), offsets, q, p) / kPi;
  if (std::abs(w.imag()) > tol.wigner_imag_residue) {
    throw ConsistencyError("Wigner kernel sum has imaginary residue " + fmt(w.imag()));
  }
  return w.real();
}

PhaseSpaceGrid wigner_from_density(const DensityMatrix& rho, const GridSpec& gs, const Tolerances& tol) {
  require_single_mode(rho);
  PhaseSpaceGrid w = PhaseSpaceGrid::zeros(gs);
  const auto offsets = active_offsets(rho.matrix());
  parallel_for(w.nq, [&](int i) {
    const double q = w.q(i);
    for (int j = 0; j < w.np; ++j) {
      const Complex value = wigner_kernel_sum(rho.matrix(), offsets, q, w.p(j)) / kPi;
      if (std::abs(value.imag()) > tol.wigner_imag_residue) {
        throw ConsistencyError("Wigner kernel sum has imaginary residue " + fmt(value.imag()) + " at (" + fmt(q) +
                               ", " + fmt(w.p(j)) + ")");
      }
      w.at(i, j) = value.real();
    }
  });
  check_normalization(w, tol);
  return w;
}

PhaseSpaceGrid wigner_direct(const DensityMatrix& rho, const GridSpec& gs, int eta_points,
                             std::optional<double> eta_half_width, const Tolerances& tol) {
  require_single_mode(rho);
  if (eta_points < 256) throw InvalidArgument("wigner_direct needs at least 256 eta points");
  PhaseSpaceGrid w = PhaseSpaceGrid::zeros(gs);
  const double h_eta = eta_half_width.value_or(2.0 * gs.half_width);
  const double d_eta = 2.0 * h_eta / (eta_points - 1);
  const int n = static_cast<int>(rho.dimension());
  const ComplexMatrix& r = rho.matrix();

  parallel_for(w.nq, [&](int i) {
    const double q = w.q(i);
    // Kernel <q + eta/2|rho|q - eta/2> at every eta node.
    std::vector<Complex> kernel(static_cast<std::size_t>(eta_points));
    std::vector<Complex> r_psi(static_cast<std::size_t>(n));
    for (int e = 0; e < eta_points; ++e) {
      const double eta = -h_eta + e * d_eta;
      const auto left = hermite_functions(q + 0.5 * eta, n);
      const auto right = hermite_functions(q - 0.5 * eta, n);
      Complex sum = 0.0;
      for (int a = 0; a < n; ++a) {
        if (left[a] == 0.0) continue;
        Complex row = 0.0;
        for (int b = 0; b < n; ++b) row += r(a, b) * right[b];
        sum += left[a] * row;
      }
      const double weight = (e == 0 || e == eta_points - 1) ? 0.5 * d_eta : d_eta;
      kernel[e] = weight * sum;
    }
    for (int j = 0; j < w.np; ++j) {
      const double p = w.p(j);
      Complex sum = 0.0;
      for (int e = 0; e < eta_points; ++e) sum += kernel[e] * std::polar(1.0, -(-h_eta + e * d_eta) * p);
      sum /= 2.0 * kPi;
      if (std::abs(sum.imag()) > tol.wigner_imag_residue) {
        throw ConsistencyError("direct Wigner integral has imaginary residue " + fmt(sum.imag()));
      }
      w.at(i, j) = sum.real();
    }
  });
  return w;
}

PhaseSpaceGrid gaussian_wigner(const GaussianSpec& g, const GridSpec& gs) {
  g.validate();
  PhaseSpaceGrid w = PhaseSpaceGrid::zeros(gs);
  const double a2 = g.a * g.a;
  for (int i = 0; i < w.nq; ++i)
    for (int j = 0; j < w.np; ++j) {
      const double q = w.q(i), p = w.p(j);
      w.at(i, j) = std::exp(-(q * q + p * p) / a2) / (kPi * a2);
    }
  return w;
}

double q_marginal(const PhaseSpaceGrid& w, int i) {
  double sum = 0.0;
  for (int j = 0; j < w.np; ++j) sum += (j == 0 || j == w.np - 1 ? 0.5 : 1.0) * w.at(i, j);
  return sum * w.dp();
}

double integrate(const PhaseSpaceGrid& w) {
  double sum = 0.0;
  for (int i = 0; i < w.nq; ++i) sum += (i == 0 || i == w.nq - 1 ? 0.5 : 1.0) * q_marginal(w, i);
  return sum * w.dq();
}

double measure_P_wigner(const PhaseSpaceGrid& w) {
  PhaseSpaceGrid squared = w;
  for (auto& v : squared.values) v *= v;
  return 2.0 * kPi * integrate(squared);
}

namespace {

// pi * integral of |grad W|^2 with dW/dx taken from derivative(f, k, n, h).
template <typename Derivative>
double gradient_norm_integral(const PhaseSpaceGrid& w, Derivative derivative) {
  PhaseSpaceGrid grad2 = w;
  for (int i = 0; i < w.nq; ++i) {
    for (int j = 0; j < w.np; ++j) {
      const double dq = derivative([&](int k) { return w.at(k, j); }, i, w.nq, w.dq());
      const double dp = derivative([&](int k) { return w.at(i, k); }, j, w.np, w.dp());
      grad2.at(i, j) = dq * dq + dp * dp;
    }
  }
  return kPi * integrate(grad2);
}

void check_stride(const PhaseSpaceGrid& w, int stride) {
  if (stride < 1 || 2 * stride >= std::min(w.nq, w.np)) {
    throw InvalidArgument("gradient stride " + std::to_string(stride) + " too large for the grid");
  }
}

// Weights extrapolating central differences at steps h, 2h, .., Jh to
// h -> 0 (polynomial extrapolation in h^2).
std::vector<double> extrapolation_weights(int nodes) {
  std::vector<double> weights(static_cast<std::size_t>(nodes));
  for (int j = 1; j <= nodes; ++j) {
    double wj = 1.0;
    for (int i = 1; i <= nodes; ++i)
      if (i != j) wj *= double(i * i) / double(i * i - j * j);
    weights[static_cast<std::size_t>(j - 1)] = wj;
  }
  return weights;
}

}  // namespace

double gradient_integral(const PhaseSpaceGrid& w, int stride) {
  check_stride(w, stride);
  return gradient_norm_integral(w, [stride](auto&& f, int k, int n, double h) {
    const double step = stride * h;
    if (k - stride < 0) return (-3.0 * f(k) + 4.0 * f(k + stride) - f(k + 2 * stride)) / (2.0 * step);
    if (k + stride > n - 1) return (3.0 * f(k) - 4.0 * f(k - stride) + f(k - 2 * stride)) / (2.0 * step);
    return (f(k + stride) - f(k - stride)) / (2.0 * step);
  });
}

double extrapolated_gradient_integral(const PhaseSpaceGrid& w, int stride) {
  check_stride(w, stride);
  std::vector<std::vector<double>> weights;
  for (int nodes = 1; nodes <= kExtrapolationNodes; ++nodes) weights.push_back(extrapolation_weights(nodes));
  return gradient_norm_integral(w, [&](auto&& f, int k, int n, double h) {
    const int room = std::min({k, n - 1 - k}) / stride;
    if (room == 0) {
      const double step = stride * h;
      if (k - stride < 0) return (-3.0 * f(k) + 4.0 * f(k + stride) - f(k + 2 * stride)) / (2.0 * step);
      return (3.0 * f(k) - 4.0 * f(k - stride) + f(k - 2 * stride)) / (2.0 * step);
    }
    // Near the edges fewer nodes fit; W is negligible there by construction
    // of the domain.
    const auto& wts = weights[static_cast<std::size_t>(std::min(room, kExtrapolationNodes) - 1)];
    double d = 0.0;
    for (std::size_t j = 1; j <= wts.size(); ++j) {
      const int off = static_cast<int>(j) * stride;
      d += wts[j - 1] * (f(k + off) - f(k - off)) / (2.0 * off * h);
    }
    return d;
  });
}

GradientEstimate estimate_C_wigner(const PhaseSpaceGrid& w) {
  GradientEstimate out;
  const double c1 = gradient_integral(w, 1);
  const double c2 = gradient_integral(w, 2);
  const double c4 = gradient_integral(w, 4);
  out.central_difference = c1;
  const double fine_change = std::abs(c2 - c1);
  out.observed_order = fine_change > 0.0 ? std::log2(std::abs(c4 - c2) / fine_change) : 0.0;

  out.value = extrapolated_gradient_integral(w, 1);
  const double coarse = extrapolated_gradient_integral(w, 2);
  // Error of the extrapolated value scales as h^(2 * nodes).
  const double ratio = std::ldexp(1.0, 2 * kExtrapolationNodes);
  out.resolution = std::abs(coarse - out.value) / ratio / std::max(std::abs(out.value), 1e-300);
  return out;
}

double measure_C_wigner(const PhaseSpaceGrid& w, const Tolerances& tol) {
  const GradientEstimate est = estimate_C_wigner(w);
  if (!(est.resolution < tol.resolution)) {
    throw ResolutionError("grid too coarse for the gradient integral: halving the step is estimated to change C by " +
                          fmt(est.resolution) + " (relative); use more grid points");
  }
  return est.value;
}

MeasureReport wigner_grid_report(const PhaseSpaceGrid& w, int truncation, const Tolerances& tol) {
  const GradientEstimate est = estimate_C_wigner(w);
  if (!(est.resolution < tol.resolution)) {
    throw ResolutionError("grid too coarse for the gradient integral: halving the step is estimated to change C by " +
                          fmt(est.resolution) + " (relative); use more grid points");
  }
  MeasureReport report;
  report.path = MeasurePath::Wigner;
  report.num_modes = 1;
  report.truncation = truncation;
  report.C = est.value;
  report.P = measure_P_wigner(w);
  report.I = 0.5 * (report.C - report.P);
  report.chi2 = 2.0 * report.C / report.P;
  report.identity_residual = std::abs(report.I - 0.5 * (report.C - report.P));
  report.grid_half_width = w.q_max;
  report.grid_points = w.nq;
  report.resolution_estimate = est.resolution;
  return report;
}

double PipelineComparison::max_relative_delta() const { return std::max({delta_C, delta_P, delta_chi2}); }

PipelineComparison compare_pipelines(const DensityMatrix& rho, const GridSpec& gs, const Tolerances& tol) {
  require_single_mode(rho);
  PipelineComparison out;
  out.operator_path = measure_report(rho, tol);
  out.wigner_path = wigner_grid_report(wigner_from_density(rho, gs, tol), rho.spec().truncation, tol);
  out.wigner_path.top_level_population = out.operator_path.top_level_population;
  out.delta_C = relative_delta(out.wigner_path.C, out.operator_path.C);
  out.delta_P = relative_delta(out.wigner_path.P, out.operator_path.P);
  out.delta_chi2 = relative_delta(out.wigner_path.chi2, out.operator_path.chi2);
  out.delta_I = std::abs(out.wigner_path.I - out.operator_path.I);
  return out;
}

MeasureReport wigner_measure_report(const DensityMatrix& rho, const GridSpec& gs, const Tolerances& tol) {
  const PipelineComparison cmp = compare_pipelines(rho, gs, tol);
  if (cmp.max_relative_delta() > tol.cross_pipeline) {
    throw ConsistencyError("Wigner path disagrees with operator path: C " + fmt(cmp.wigner_path.C) + " vs " +
                           fmt(cmp.operator_path.C) + ", P " + fmt(cmp.wigner_path.P) + " vs " +
                           fmt(cmp.operator_path.P) + ", chi2 " + fmt(cmp.wigner_path.chi2) + " vs " +
                           fmt(cmp.operator_path.chi2));
  }
  return cmp.wigner_path;
}

}  // namespace macroq
