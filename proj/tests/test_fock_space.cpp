#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <limits>
#include <thread>

#include "macroq/errors.hpp"
#include "macroq/fock_space.hpp"
#include "macroq/states.hpp"
#include "oracle.hpp"

using namespace macroq;

namespace {

const double kSqrt2 = std::sqrt(2.0);

ComplexMatrix commutator(const ComplexMatrix& x, const ComplexMatrix& y) { return matmul(x, y) - matmul(y, x); }

Complex expectation(const ComplexMatrix& op, std::span<const Complex> psi) {
  const std::vector<Complex> y = macroq::apply(op, psi);
  Complex total = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) total += std::conj(psi[i]) * y[i];
  return total;
}

}  // namespace

TEST_CASE("ModeSpec validation") {
  CHECK_THROWS_AS((ModeSpec{0, 4}).validate(), InvalidArgument);
  CHECK_THROWS_AS((ModeSpec{1, 1}).validate(), InvalidArgument);
  CHECK((ModeSpec{2, 8}).dimension() == 64);
  CHECK_THROWS_AS((ModeSpec{3, 20}).dimension(), TruncationError);
  CHECK_THROWS_AS(annihilation_op({1, 4}, 2), InvalidArgument);
  CHECK_THROWS_AS(annihilation_op({2, 4}, 0), InvalidArgument);
}

TEST_CASE("MACROQ_MAX_DIM caps the dimension") {
  ::setenv("MACROQ_MAX_DIM", "100", 1);
  CHECK_THROWS_AS((ModeSpec{2, 11}).dimension(), TruncationError);
  CHECK((ModeSpec{2, 10}).dimension() == 100);
  ::unsetenv("MACROQ_MAX_DIM");
  CHECK((ModeSpec{2, 11}).dimension() == 121);
}

TEST_CASE("annihilation operator") {
  const ModeOperator a = annihilation_op({1, 3}, 1);
  CHECK(a.kind == OperatorKind::Annihilation);
  CHECK(a.mode == 1);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const Complex expected = (i == 0 && j == 1) ? 1.0 : (i == 1 && j == 2) ? kSqrt2 : 0.0;
      CHECK(std::abs(a.matrix(i, j) - expected) < 1e-15);
    }

  const std::vector<Complex> one = {0.0, 1.0, 0.0};
  const std::vector<Complex> lowered = macroq::apply(a.matrix, one);
  CHECK(lowered[0] == Complex(1.0));
  CHECK(lowered[1] == Complex(0.0));

  const ModeSpec two{2, 4};
  const ComplexMatrix explicit_a2 = tensor_product(ComplexMatrix::identity(4), single_mode_annihilation(4));
  CHECK(max_abs_diff(annihilation_op(two, 2).matrix, explicit_a2) == 0.0);
  CHECK(max_abs_diff(annihilation_op(two, 1).matrix, oracle::from_eigen(oracle::lowering(2, 4, 1))) < 1e-15);
}

TEST_CASE("creation operator") {
  const ModeOperator ad = creation_op({1, 3}, 1);
  CHECK(std::abs(ad.matrix(1, 0) - 1.0) < 1e-15);
  CHECK(std::abs(ad.matrix(2, 1) - kSqrt2) < 1e-15);
  CHECK(max_abs_diff(ad.matrix, adjoint(annihilation_op({1, 3}, 1).matrix)) == 0.0);

  const std::vector<Complex> vac = {1.0, 0.0, 0.0};
  const std::vector<Complex> raised = macroq::apply(ad.matrix, vac);
  CHECK(raised[1] == Complex(1.0));

  const std::vector<Complex> top = {0.0, 0.0, 1.0};
  for (const Complex c : macroq::apply(ad.matrix, top)) CHECK(c == Complex(0.0));

  // Independent construction of a^dagger.
  const oracle::Mat expected = oracle::lowering(3).adjoint();
  CHECK(max_abs_diff(ad.matrix, oracle::from_eigen(expected)) < 1e-15);
}

TEST_CASE("quadratures") {
  const ComplexMatrix q = quadrature_q({1, 2}, 1).matrix;
  const ComplexMatrix p = quadrature_p({1, 2}, 1).matrix;
  const double r = 1.0 / kSqrt2;
  CHECK(max_abs_diff(q, ComplexMatrix(2, 2, {0.0, r, r, 0.0})) < 1e-15);
  CHECK(max_abs_diff(p, ComplexMatrix(2, 2, {0.0, Complex(0, -r), Complex(0, r), 0.0})) < 1e-15);

  for (const ModeSpec spec : {ModeSpec{1, 7}, ModeSpec{2, 5}}) {
    for (int mode = 1; mode <= spec.num_modes; ++mode) {
      CHECK(hermiticity_defect(quadrature_q(spec, mode).matrix) == 0.0);
      CHECK(hermiticity_defect(quadrature_p(spec, mode).matrix) == 0.0);
    }
  }
}

TEST_CASE("quadrature expectations in coherent states") {
  const ModeSpec spec{1, 40};
  const Complex alpha1 = 1.5;
  const PureState c1 = coherent_state(spec, alpha1);
  CHECK(std::abs(expectation(quadrature_q(spec, 1).matrix, c1.amplitudes()) - kSqrt2 * alpha1.real()) < 1e-8);

  const Complex alpha2(1.0, 0.5);
  const PureState c2 = coherent_state(spec, alpha2);
  CHECK(std::abs(expectation(quadrature_p(spec, 1).matrix, c2.amplitudes()) - kSqrt2 * alpha2.imag()) < 1e-8);
  CHECK(std::abs(expectation(quadrature_q(spec, 1).matrix, c2.amplitudes()) - kSqrt2 * alpha2.real()) < 1e-8);
}

TEST_CASE("number operator") {
  const ComplexMatrix n = number_op({1, 4}, 1).matrix;
  for (int k = 0; k < 4; ++k) CHECK(n(k, k) == Complex(k));
  CHECK(n.max_abs() == 3.0);

  for (const ModeSpec spec : {ModeSpec{1, 6}, ModeSpec{2, 4}}) {
    for (int mode = 1; mode <= spec.num_modes; ++mode) {
      const ComplexMatrix product = matmul(creation_op(spec, mode).matrix, annihilation_op(spec, mode).matrix);
      // sqrt(n)^2 rounds in the last bit; the diagonal itself is exact.
      CHECK(max_abs_diff(number_op(spec, mode).matrix, product) < 4 * std::numeric_limits<double>::epsilon() * spec.truncation);
    }
  }

  for (int N : {2, 5, 9}) CHECK(trace(number_op({1, N}, 1).matrix).real() == N * (N - 1) / 2.0);
}

TEST_CASE("canonical commutator on the interior block") {
  const int N = 9;
  const ComplexMatrix c = commutator(quadrature_q({1, N}, 1).matrix, quadrature_p({1, N}, 1).matrix);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (i == N - 1 && j == N - 1) continue;
      const Complex expected = (i == j) ? Complex(0, 1) : Complex(0);
      CHECK(std::abs(c(i, j) - expected) < 1e-12);
    }
  // The truncation corner carries the compensating -i(N-1).
  CHECK(std::abs(c(N - 1, N - 1) - Complex(0, -(N - 1.0))) < 1e-12);
}

TEST_CASE("cross-mode commutators vanish") {
  const ModeSpec spec{2, 5};
  const auto q1 = quadrature_q(spec, 1).matrix, q2 = quadrature_q(spec, 2).matrix;
  const auto p1 = quadrature_p(spec, 1).matrix, p2 = quadrature_p(spec, 2).matrix;
  CHECK(commutator(q1, p2).max_abs() < 1e-12);
  CHECK(commutator(q2, p1).max_abs() < 1e-12);
  CHECK(commutator(annihilation_op(spec, 1).matrix, creation_op(spec, 2).matrix).max_abs() < 1e-12);
}

TEST_CASE("q^2 + p^2 = 2 n + 1 on the interior block") {
  const int N = 10;
  const ModeSpec spec{1, N};
  const auto q = quadrature_q(spec, 1).matrix, p = quadrature_p(spec, 1).matrix;
  const ComplexMatrix lhs = matmul(q, q) + matmul(p, p);
  const ComplexMatrix rhs = number_op(spec, 1).matrix * Complex(2.0) + ComplexMatrix::identity(N);
  for (int i = 0; i < N - 1; ++i)
    for (int j = 0; j < N - 1; ++j) CHECK(std::abs(lhs(i, j) - rhs(i, j)) < 1e-12);
}

TEST_CASE("operator cache returns stable matrices under concurrent lookups") {
  OperatorCache cache({2, 6});
  std::vector<const ComplexMatrix*> seen(8, nullptr);
  {
    std::vector<std::jthread> threads;
    for (int t = 0; t < 8; ++t) threads.emplace_back([&, t] { seen[t] = &cache.get(OperatorKind::Q, 1 + t % 2); });
  }
  for (int t = 0; t < 8; ++t) CHECK(seen[t] == &cache.get(OperatorKind::Q, 1 + t % 2));
  CHECK(max_abs_diff(cache.get(OperatorKind::P, 2), quadrature_p({2, 6}, 2).matrix) == 0.0);
  CHECK(to_string(OperatorKind::Creation) == "a_dag");
}
