#include "macroq/measures.hpp"

#include <cmath>
#include <sstream>

#include "macroq/errors.hpp"

namespace macroq {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double real_part(Complex value, const char* what, const Tolerances& tol) {
  if (std::abs(value.imag()) > tol.imag_residue) {
    throw ConsistencyError(std::string(what) + " has imaginary residue " + fmt(value.imag()));
  }
  return value.real();
}

double three_term_I(const DensityMatrix& rho, const Tolerances& tol) {
  const ModeSpec& spec = rho.spec();
  const ComplexMatrix& r = rho.matrix();
  OperatorCache ops(spec);
  const ComplexMatrix rho2 = matmul(r, r);
  Complex total = 0.0;
  for (int m = 1; m <= spec.num_modes; ++m) {
    const ComplexMatrix& a = ops.get(OperatorKind::Annihilation, m);
    const ComplexMatrix& ad = ops.get(OperatorKind::Creation, m);
    const ComplexMatrix ada = matmul(ad, a);
    const Complex first = 0.5 * trace_product(rho2, ada);
    const Complex second = 0.5 * trace_product(matmul(r, ada), r);
    const Complex third = trace_product(matmul(matmul(r, a), r), ad);
    total += first + second - third;
  }
  return real_part(total, "I (three-term)", tol);
}

void check_two_term(double three_term, double two_term, const Tolerances& tol) {
  if (std::abs(three_term - two_term) > tol.three_vs_two_term) {
    throw ConsistencyError("three-term I = " + fmt(three_term) + " disagrees with two-term I = " + fmt(two_term));
  }
}

}  // namespace

std::string to_string(MeasurePath path) { return path == MeasurePath::Operator ? "operator" : "wigner"; }

double measure_I(const DensityMatrix& rho, const Tolerances& tol) {
  const double three_term = three_term_I(rho, tol);
  check_two_term(three_term, measure_I_two_term(rho, tol), tol);
  return three_term;
}

double measure_I_two_term(const DensityMatrix& rho, const Tolerances& tol) {
  const ModeSpec& spec = rho.spec();
  const ComplexMatrix& r = rho.matrix();
  OperatorCache ops(spec);
  const ComplexMatrix rho2 = matmul(r, r);
  Complex total = 0.0;
  for (int m = 1; m <= spec.num_modes; ++m) {
    total += trace_product(rho2, ops.get(OperatorKind::Number, m));
    total -= trace_product(matmul(matmul(r, ops.get(OperatorKind::Annihilation, m)), r),
                           ops.get(OperatorKind::Creation, m));
  }
  return real_part(total, "I (two-term)", tol);
}

double measure_C(const DensityMatrix& rho, const Tolerances& tol) {
  const ModeSpec& spec = rho.spec();
  const ComplexMatrix& r = rho.matrix();
  OperatorCache ops(spec);
  const ComplexMatrix rho2 = matmul(r, r);
  Complex total = 0.0;
  for (int m = 1; m <= spec.num_modes; ++m) {
    const ComplexMatrix& q = ops.get(OperatorKind::Q, m);
    const ComplexMatrix& p = ops.get(OperatorKind::P, m);
    const ComplexMatrix rq = matmul(r, q);
    const ComplexMatrix rp = matmul(r, p);
    total += trace_product(rho2, matmul(q, q));
    total += trace_product(rho2, matmul(p, p));
    total -= trace_product(rq, rq);
    total -= trace_product(rp, rp);
  }
  return real_part(total, "C", tol);
}

double measure_chi2(const DensityMatrix& rho, const Tolerances& tol) {
  const double chi2 = 2.0 * measure_C(rho, tol) / purity(rho);
  if (!(chi2 > 0.0)) throw ConsistencyError("chi2 = " + fmt(chi2) + " is not positive");
  return chi2;
}

MeasureReport measure_report(const DensityMatrix& rho, const Tolerances& tol) {
  MeasureReport report;
  report.num_modes = rho.spec().num_modes;
  report.truncation = rho.spec().truncation;
  report.path = MeasurePath::Operator;
  report.top_level_population = max_top_level_population(rho.spec(), rho.populations());

  report.I = three_term_I(rho, tol);
  const double two_term = measure_I_two_term(rho, tol);
  check_two_term(report.I, two_term, tol);
  report.two_term_delta = std::abs(report.I - two_term);
  report.C = measure_C(rho, tol);
  report.P = purity(rho);
  report.chi2 = 2.0 * report.C / report.P;

  report.identity_residual = std::abs(report.I - 0.5 * (report.C - report.num_modes * report.P));
  if (!(report.identity_residual < tol.identity_residual)) {
    throw ConsistencyError("I = " + fmt(report.I) + " but (C - M P)/2 = " +
                           fmt(0.5 * (report.C - report.num_modes * report.P)) +
                           "; truncation too small or corrupted state");
  }
  if (!(report.chi2 > 0.0)) throw ConsistencyError("chi2 = " + fmt(report.chi2) + " is not positive");
  if (!(report.P > 0.0) || report.P > 1.0 + 1e-10) throw ConsistencyError("purity " + fmt(report.P) + " outside (0, 1]");
  return report;
}

MeasureReport pure_state_measures(const PureState& psi, const Tolerances& tol) {
  MeasureReport report = measure_report(psi.projector(), tol);
  const double residual = std::abs(report.I - (report.chi2 / 4.0 - report.num_modes / 2.0));
  report.pure_relation_residual = residual;
  if (!(residual < tol.pure_relation)) {
    throw ConsistencyError("pure state I = " + fmt(report.I) + " but chi2/4 - M/2 = " +
                           fmt(report.chi2 / 4.0 - report.num_modes / 2.0));
  }
  return report;
}

ComplexMatrix displacement_operator(const ModeSpec& spec, int mode, Complex beta) {
  const ComplexMatrix a = annihilation_op(spec, mode).matrix;
  const ComplexMatrix generator = adjoint(a) * beta - a * std::conj(beta);
  return expm(generator);
}

DensityMatrix displace(const DensityMatrix& rho, Complex beta, int mode, const Tolerances& tol) {
  const ModeSpec& spec = rho.spec();
  const int n = spec.truncation;
  const int cutoff = n - static_cast<int>(std::ceil(4.0 * std::abs(beta) * std::sqrt(static_cast<double>(n))));
  if (cutoff <= 0) {
    throw TruncationError("displacement by |beta| = " + fmt(std::abs(beta)) + " needs a larger truncation than N=" +
                          std::to_string(n));
  }
  if (mode < 1 || mode > spec.num_modes) throw InvalidArgument("mode index out of range");

  // Marginal population of `mode` on levels >= cutoff.
  const auto pops = rho.populations();
  std::size_t stride = 1;
  for (int m = spec.num_modes; m > mode; --m) stride *= static_cast<std::size_t>(n);
  double beyond = 0.0;
  for (std::size_t index = 0; index < pops.size(); ++index) {
    const auto level = static_cast<int>((index / stride) % static_cast<std::size_t>(n));
    if (level >= cutoff) beyond += pops[index];
  }
  if (!(beyond < tol.displacement_guard)) {
    throw TruncationError("state population " + fmt(beyond) + " above level " + std::to_string(cutoff) +
                          " is too close to the truncation edge for displacement by |beta| = " +
                          fmt(std::abs(beta)));
  }
  const ComplexMatrix d = displacement_operator(spec, mode, beta);
  ComplexMatrix out = matmul(matmul(d, rho.matrix()), adjoint(d));
  // Restore exact Hermiticity lost to rounding.
  out = (out + adjoint(out)) * Complex(0.5);
  return DensityMatrix(spec, std::move(out));
}

}  // namespace macroq
