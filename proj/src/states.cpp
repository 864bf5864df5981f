#include "macroq/states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "macroq/errors.hpp"

namespace macroq {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void require_single_mode(const ModeSpec& spec, const char* what) {
  if (spec.num_modes != 1) {
    throw InvalidArgument(std::string(what) + " is a single-mode state; got " + std::to_string(spec.num_modes) +
                          " modes (use product_state for multimode)");
  }
}

// Untruncated Fock coefficients e^{-|alpha|^2/2} alpha^n / sqrt(n!).
std::vector<Complex> coherent_coefficients(Complex alpha, int truncation) {
  std::vector<Complex> c(static_cast<std::size_t>(truncation));
  c[0] = std::exp(-0.5 * std::norm(alpha));
  for (std::size_t n = 1; n < c.size(); ++n) c[n] = c[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  return c;
}

void normalize(std::vector<Complex>& v) {
  double norm2 = 0.0;
  for (const auto& z : v) norm2 += std::norm(z);
  const double scale = 1.0 / std::sqrt(norm2);
  for (auto& z : v) z *= scale;
}

std::vector<double> squared_magnitudes(std::span<const Complex> v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](const Complex& z) { return std::norm(z); });
  return out;
}

void check_tail(const ModeSpec& spec, std::span<const double> populations, double tol, int recommended) {
  const double tail = max_top_level_population(spec, populations);
  if (!(tail < tol)) {
    std::string msg = "population " + fmt(tail) + " on the top Fock level (N=" + std::to_string(spec.truncation) +
                      ") exceeds the tail tolerance " + fmt(tol);
    if (recommended > 0) msg += "; use truncation N >= " + std::to_string(recommended);
    throw TruncationError(msg, recommended);
  }
}

}  // namespace

// ---------------------------------------------------------------------------

PureState::PureState(ModeSpec spec, std::vector<Complex> amplitudes, const Tolerances& tol)
    : spec_(spec), amplitudes_(std::move(amplitudes)) {
  spec_.validate();
  if (amplitudes_.size() != spec_.dimension()) {
    throw ValidationError("pure state has " + std::to_string(amplitudes_.size()) + " amplitudes, expected " +
                          std::to_string(spec_.dimension()));
  }
  for (const auto& z : amplitudes_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw ValidationError("pure state has non-finite amplitudes");
  const auto pops = squared_magnitudes(amplitudes_);
  const double norm2 = std::accumulate(pops.begin(), pops.end(), 0.0);
  if (std::abs(norm2 - 1.0) > tol.norm) throw ValidationError("pure state norm^2 " + fmt(norm2) + " differs from 1");
  check_tail(spec_, pops, tol.tail, 0);
}

DensityMatrix PureState::projector() const {
  return DensityMatrix(spec_, ComplexMatrix::outer(amplitudes_, amplitudes_));
}

DensityMatrix::DensityMatrix(ModeSpec spec, ComplexMatrix matrix, const Tolerances& tol)
    : spec_(spec), matrix_(std::move(matrix)) {
  spec_.validate();
  const std::size_t dim = spec_.dimension();
  if (matrix_.rows() != dim || matrix_.cols() != dim) {
    throw ValidationError("density matrix is " + std::to_string(matrix_.rows()) + "x" +
                          std::to_string(matrix_.cols()) + ", expected " + std::to_string(dim) + "x" +
                          std::to_string(dim));
  }
  if (!matrix_.all_finite()) throw ValidationError("density matrix has non-finite entries");
  const double herm = hermiticity_defect(matrix_);
  if (herm > tol.hermiticity) throw ValidationError("density matrix is not Hermitian (max deviation " + fmt(herm) + ")");
  const Complex tr = trace(matrix_);
  if (std::abs(tr - 1.0) > tol.trace) {
    throw ValidationError("density matrix trace " + fmt(tr.real()) + " differs from 1");
  }
  check_tail(spec_, populations(), tol.tail, 0);
  const auto eig = hermitian_eigenvalues(matrix_);
  if (eig.front() < tol.psd_floor) {
    throw ValidationError("density matrix is not positive semidefinite (min eigenvalue " + fmt(eig.front()) + ")");
  }
}

std::vector<double> DensityMatrix::populations() const {
  std::vector<double> out(matrix_.rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = matrix_(i, i).real();
  return out;
}

void GaussianSpec::validate() const {
  if (!(a >= 1.0) || !std::isfinite(a)) throw InvalidArgument("Gaussian width a must be >= 1, got " + fmt(a));
}

// ---------------------------------------------------------------------------

std::vector<double> top_level_populations(const ModeSpec& spec, std::span<const double> populations) {
  const auto n = static_cast<std::size_t>(spec.truncation);
  std::vector<double> out(static_cast<std::size_t>(spec.num_modes), 0.0);
  for (std::size_t index = 0; index < populations.size(); ++index) {
    std::size_t rest = index;
    // Last mode is the fastest index.
    for (int m = spec.num_modes - 1; m >= 0; --m) {
      if (rest % n == n - 1) out[static_cast<std::size_t>(m)] += populations[index];
      rest /= n;
    }
  }
  return out;
}

double max_top_level_population(const ModeSpec& spec, std::span<const double> populations) {
  const auto tops = top_level_populations(spec, populations);
  return *std::max_element(tops.begin(), tops.end());
}

int minimal_truncation_coherent(Complex alpha, double tail_tol) {
  const double mean = std::norm(alpha);
  if (mean == 0.0) return 2;
  // Poisson weights in log space; N is the first size where the top level,
  // relative to the retained mass, drops below tail_tol.
  double log_p = -mean;
  double retained = std::exp(log_p);
  for (int n = 1; n < 1'000'000; ++n) {
    log_p += std::log(mean) - std::log(static_cast<double>(n));
    const double p = std::exp(log_p);
    retained += p;
    if (p / retained < tail_tol && n >= 1 && static_cast<double>(n) > mean) return n + 1;
  }
  throw TruncationError("no feasible truncation for coherent amplitude " + fmt(std::abs(alpha)));
}

int minimal_truncation_thermal(const GaussianSpec& g, double tail_tol) {
  g.validate();
  const double nbar = g.mean_occupation();
  if (nbar == 0.0) return 2;
  const double r = nbar / (1.0 + nbar);
  for (int n = 1; n < 10'000'000; ++n) {
    // top level n relative to levels 0..n
    const double rel = std::pow(r, n) * (1.0 - r) / (1.0 - std::pow(r, n + 1));
    if (rel < tail_tol) return n + 1;
  }
  throw TruncationError("no feasible truncation for thermal width " + fmt(g.a));
}

int default_truncation_coherent(Complex alpha) {
  const double mag = std::abs(alpha);
  const int heuristic = static_cast<int>(std::ceil(mag * mag + 8.0 * mag + 10.0));
  return std::max(heuristic, minimal_truncation_coherent(alpha));
}

int default_truncation_thermal(const GaussianSpec& g) {
  g.validate();
  const int heuristic = static_cast<int>(std::ceil(g.mean_occupation() * 20.0 + 20.0));
  return std::max(heuristic, minimal_truncation_thermal(g));
}

// ---------------------------------------------------------------------------

PureState fock_state(const ModeSpec& spec, int n) {
  require_single_mode(spec, "fock_state(n)");
  const int occ[] = {n};
  return fock_state(spec, occ);
}

PureState fock_state(const ModeSpec& spec, std::span<const int> occupations) {
  spec.validate();
  if (occupations.size() != static_cast<std::size_t>(spec.num_modes)) {
    throw InvalidArgument("fock_state needs one occupation per mode");
  }
  std::size_t index = 0;
  for (const int n : occupations) {
    if (n < 0) throw InvalidArgument("Fock occupation must be non-negative, got " + std::to_string(n));
    if (n > spec.truncation - 2) {
      throw TruncationError("Fock level " + std::to_string(n) + " needs truncation N >= " + std::to_string(n + 2) +
                                " (one guard level), got N=" + std::to_string(spec.truncation),
                            n + 2);
    }
    index = index * static_cast<std::size_t>(spec.truncation) + static_cast<std::size_t>(n);
  }
  std::vector<Complex> amps(spec.dimension());
  amps[index] = 1.0;
  return PureState(spec, std::move(amps));
}

PureState coherent_state(const ModeSpec& spec, Complex alpha) {
  require_single_mode(spec, "coherent_state");
  spec.validate();
  auto amps = coherent_coefficients(alpha, spec.truncation);
  normalize(amps);
  check_tail(spec, squared_magnitudes(amps), kTolerances.tail, minimal_truncation_coherent(alpha));
  return PureState(spec, std::move(amps));
}

PureState cat_state(const ModeSpec& spec, Complex alpha, double relative_phase) {
  require_single_mode(spec, "cat_state");
  spec.validate();
  const double overlap = std::exp(-2.0 * std::norm(alpha));
  const double analytic_norm2 = 2.0 * (1.0 + std::cos(relative_phase) * overlap);
  if (analytic_norm2 < 1e-10) {
    throw InvalidArgument("cat state norm vanishes (alpha=" + fmt(std::abs(alpha)) +
                          ", phase=" + fmt(relative_phase) + ")");
  }
  const auto plus = coherent_coefficients(alpha, spec.truncation);
  const auto minus = coherent_coefficients(-alpha, spec.truncation);
  const Complex phase = std::polar(1.0, relative_phase);
  std::vector<Complex> amps(plus.size());
  for (std::size_t n = 0; n < amps.size(); ++n) amps[n] = plus[n] + phase * minus[n];
  normalize(amps);
  check_tail(spec, squared_magnitudes(amps), kTolerances.tail, minimal_truncation_coherent(alpha));
  return PureState(spec, std::move(amps));
}

DensityMatrix cat_mixture(const ModeSpec& spec, Complex alpha) {
  const std::pair<double, DensityMatrix> parts[] = {
      {0.5, coherent_state(spec, alpha).projector()},
      {0.5, coherent_state(spec, -alpha).projector()},
  };
  return mix(parts);
}

DensityMatrix fock_mixture(const ModeSpec& spec, int d, bool include_vacuum) {
  require_single_mode(spec, "fock_mixture");
  spec.validate();
  if (d < 1) throw InvalidArgument("fock_mixture needs d >= 1, got " + std::to_string(d));
  const int first = include_vacuum ? 0 : 1;
  const int last = first + d - 1;
  if (last > spec.truncation - 2) {
    throw TruncationError("fock_mixture up to level " + std::to_string(last) + " needs truncation N >= " +
                              std::to_string(last + 2) + ", got N=" + std::to_string(spec.truncation),
                          last + 2);
  }
  std::vector<double> diag(static_cast<std::size_t>(spec.truncation), 0.0);
  for (int n = first; n <= last; ++n) diag[static_cast<std::size_t>(n)] = 1.0 / d;
  return DensityMatrix(spec, ComplexMatrix::diagonal(std::span<const double>(diag)));
}

DensityMatrix thermal_state(const ModeSpec& spec, const GaussianSpec& g) {
  require_single_mode(spec, "thermal_state");
  spec.validate();
  g.validate();
  const double nbar = g.mean_occupation();
  std::vector<double> diag(static_cast<std::size_t>(spec.truncation), 0.0);
  const double r = nbar / (1.0 + nbar);
  double p = 1.0 / (1.0 + nbar);
  double total = 0.0;
  for (auto& v : diag) {
    v = p;
    total += p;
    p *= r;
  }
  for (auto& v : diag) v /= total;
  check_tail(spec, diag, kTolerances.tail, minimal_truncation_thermal(g));
  return DensityMatrix(spec, ComplexMatrix::diagonal(std::span<const double>(diag)));
}

DensityMatrix mix(std::span<const std::pair<double, DensityMatrix>> components) {
  if (components.empty()) throw InvalidArgument("mix needs at least one component");
  const ModeSpec spec = components.front().second.spec();
  double total = 0.0;
  for (const auto& [w, rho] : components) {
    if (!(w >= 0.0)) throw InvalidArgument("mixture weight " + fmt(w) + " is negative");
    if (!(rho.spec() == spec)) throw InvalidArgument("mixture components have different mode specs");
    total += w;
  }
  if (std::abs(total - 1.0) > kTolerances.weight_sum) {
    throw InvalidArgument("mixture weights sum to " + fmt(total) + ", expected 1");
  }
  ComplexMatrix sum(spec.dimension(), spec.dimension());
  for (const auto& [w, rho] : components) sum += rho.matrix() * Complex(w);
  return DensityMatrix(spec, std::move(sum));
}

DensityMatrix product_state(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.spec().truncation != b.spec().truncation) {
    throw InvalidArgument("product_state needs equal truncations, got " + std::to_string(a.spec().truncation) +
                          " and " + std::to_string(b.spec().truncation));
  }
  const ModeSpec spec{a.spec().num_modes + b.spec().num_modes, a.spec().truncation};
  (void)spec.dimension();
  return DensityMatrix(spec, tensor_product(a.matrix(), b.matrix()));
}

PureState product_state(const PureState& a, const PureState& b) {
  if (a.spec().truncation != b.spec().truncation) {
    throw InvalidArgument("product_state needs equal truncations");
  }
  const ModeSpec spec{a.spec().num_modes + b.spec().num_modes, a.spec().truncation};
  (void)spec.dimension();
  std::vector<Complex> amps;
  amps.reserve(a.amplitudes().size() * b.amplitudes().size());
  for (const auto& x : a.amplitudes())
    for (const auto& y : b.amplitudes()) amps.push_back(x * y);
  return PureState(spec, std::move(amps));
}

double purity(const DensityMatrix& rho) {
  const Complex p = trace(matmul(rho.matrix(), rho.matrix()));
  if (std::abs(p.imag()) > kTolerances.imag_residue) {
    throw ValidationError("purity has imaginary residue " + fmt(p.imag()));
  }
  return p.real();
}

Complex coherent_overlap(Complex alpha, Complex beta) {
  return std::exp(-0.5 * std::norm(alpha) - 0.5 * std::norm(beta) + std::conj(alpha) * beta);
}

}  // namespace macroq
