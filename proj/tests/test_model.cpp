#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "gibbslim/model.hpp"

using namespace gibbslim;
using namespace gibbslim::model;

namespace {

GridSpec harmonic_grid(Real L, int n) {
  GridSpec g;
  g.half_width = L;
  g.points = n;
  g.exponent_a = 2;
  return g;
}

SpectralModel explicit_model(std::initializer_list<Real> evs) {
  SpectralModel m;
  m.eigenvalues = RealVector::Zero(Index(evs.size()));
  Index j = 0;
  for (Real e : evs) m.eigenvalues(j++) = e;
  m.validate();
  return m;
}

// direct quadrature of one projected-kernel entry, no convolution reuse
Real kernel_entry_direct(const SpectralModel& m, const RealVector& ker, int i, int j,
                         int k, int l) {
  const int P = m.grid->points;
  const Real h = m.grid->spacing();
  const RealMatrix& u = m.eigenfunctions;
  Real acc = 0;
  for (int x = 0; x < P; ++x)
    for (int y = 0; y < P; ++y)
      acc += u(x, i) * u(x, k) * ker(x - y + P - 1) * u(y, j) * u(y, l);
  return h * h * acc;
}

RealVector gaussian_samples(const GridSpec& g, Real amp, Real width) {
  const Real h = g.spacing();
  RealVector ker(2 * g.points - 1);
  for (int d = 0; d < ker.size(); ++d) {
    const Real r = (d - (g.points - 1)) * h;
    ker(d) = amp * std::exp(-r * r / (2 * width * width));
  }
  return ker;
}

}  // namespace

TEST_CASE("harmonic well eigenvalues come out odd") {
  auto m = solve_onebody_spectrum(harmonic_grid(8, 1000), 0, 4);
  REQUIRE(m.modes() == 4);
  for (int j = 0; j < 4; ++j) CHECK(std::abs(m.eigenvalues(j) - (2 * j + 1)) < 1e-3);
  CHECK(m.nu == 0);
  CHECK(m.has_eigenfunctions());
}

TEST_CASE("eigenfunctions are quadrature orthonormal and sign pinned") {
  auto m = solve_onebody_spectrum(harmonic_grid(8, 500), 0, 3);
  const Real h = m.grid->spacing();
  RealMatrix gram = m.eigenfunctions.transpose() * m.eigenfunctions * h;
  CHECK((gram - RealMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
  // ground state positive at its max, even under re-solve
  CHECK(m.eigenfunctions.col(0).maxCoeff() > 0);
  auto m2 = solve_onebody_spectrum(harmonic_grid(8, 500), 0, 3);
  CHECK((m.eigenfunctions - m2.eigenfunctions).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("chemical potential shifts the spectrum rigidly") {
  auto m0 = solve_onebody_spectrum(harmonic_grid(8, 400), 0, 3);
  auto m1 = solve_onebody_spectrum(harmonic_grid(8, 400), 0.5, 3);
  for (int j = 0; j < 3; ++j)
    CHECK(std::abs(m1.eigenvalues(j) - (m0.eigenvalues(j) - 0.5)) < 1e-10);
  CHECK(m1.nu == doctest::Approx(0.5));
}

TEST_CASE("quartic well ground state matches the known value") {
  // reference 1.060362090484183, Richardson from two second-order solves
  GridSpec g = harmonic_grid(6, 800);
  g.exponent_a = 4;
  const Real e800 = solve_onebody_spectrum(g, 0, 1).eigenvalues(0);
  g.points = 1600;
  const Real e1600 = solve_onebody_spectrum(g, 0, 1).eigenvalues(0);
  const Real extrap = (4 * e1600 - e800) / 3;
  CHECK(std::abs(extrap - 1.060362090484183) < 1e-6);
}

TEST_CASE("discretization error shrinks like the grid spacing squared") {
  const Real e200 = solve_onebody_spectrum(harmonic_grid(8, 200), 0, 1).eigenvalues(0);
  const Real e400 = solve_onebody_spectrum(harmonic_grid(8, 400), 0, 1).eigenvalues(0);
  const Real e800 = solve_onebody_spectrum(harmonic_grid(8, 800), 0, 1).eigenvalues(0);
  CHECK(std::abs(e400 - 1) < std::abs(e200 - 1));
  CHECK((e200 - e400) / (e400 - e800) > 3);
}

TEST_CASE("requested tolerance is enforced") {
  CHECK_NOTHROW(solve_onebody_spectrum(harmonic_grid(8, 1000), 0, 2, 1e-3));
  CHECK_THROWS_AS(solve_onebody_spectrum(harmonic_grid(8, 100), 0, 2, 1e-12),
                  DiscretizationTooCoarse);
  // half-resolution check impossible on a tiny grid
  CHECK_THROWS_AS(solve_onebody_spectrum(harmonic_grid(8, 5), 0, 3, 1e-6),
                  DiscretizationTooCoarse);
}

TEST_CASE("overly large chemical potential is rejected") {
  CHECK_THROWS_AS(solve_onebody_spectrum(harmonic_grid(8, 400), 2.0, 2),
                  NonPositiveOperator);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(solve_onebody_spectrum(harmonic_grid(8, 2), 0, 1), ConfigError);
  CHECK_THROWS_AS(solve_onebody_spectrum(harmonic_grid(-1, 100), 0, 1), ConfigError);
  GridSpec g = harmonic_grid(8, 100);
  g.exponent_a = 0;
  CHECK_THROWS_AS(solve_onebody_spectrum(g, 0, 1), ConfigError);
  CHECK_THROWS_AS(solve_onebody_spectrum(harmonic_grid(8, 100), 0, 0), ConfigError);
  CHECK_THROWS_AS(solve_onebody_spectrum(harmonic_grid(8, 100), 0, 100), ConfigError);
}

TEST_CASE("explicit models validate ordering and positivity") {
  CHECK_NOTHROW(explicit_model({1, 2, 4}));
  CHECK_THROWS_AS(explicit_model({2, 1}), ConfigError);
  CHECK_THROWS_AS(explicit_model({0, 1}), NonPositiveOperator);
  CHECK_THROWS_AS(explicit_model({-1, 1}), NonPositiveOperator);
}

TEST_CASE("inverse power traces") {
  auto m = explicit_model({1, 2, 4});
  CHECK(trace_inverse_power(m, 1) == doctest::Approx(1.75).epsilon(1e-14));
  CHECK(trace_inverse_power(m, 2) == doctest::Approx(1.3125).epsilon(1e-14));
  CHECK(trace_inverse_power(m, 1) > trace_inverse_power(m, 2));
  CHECK_THROWS_AS(trace_inverse_power(m, 0), ConfigError);
  CHECK_THROWS_AS(trace_inverse_power(m, -1), ConfigError);
}

TEST_CASE("rank one interaction from a single vector") {
  Vector phi(2);
  phi << 1, 0;
  auto w = build_finite_rank_interaction({phi}, RealVector::Constant(1, 2.0));
  REQUIRE(w.modes == 2);
  CHECK(std::abs(w.matrix(w.pair(0, 0), w.pair(0, 0)) - Complex(2)) < 1e-14);
  CHECK(w.matrix.cwiseAbs().sum() == doctest::Approx(2.0));

  Vector flat(2);
  flat << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  auto wf = build_finite_rank_interaction({flat}, RealVector::Constant(1, 1.0));
  for (Index r = 0; r < 4; ++r)
    for (Index c = 0; c < 4; ++c) CHECK(std::abs(wf.matrix(r, c) - Complex(0.25)) < 1e-14);
}

TEST_CASE("finite rank sums stay positive semidefinite") {
  Vector a(3), b(3);
  a << Complex(1, 0), Complex(0, 1), Complex(0.5, -0.5);
  b << 0.3, -0.7, 2.0;
  RealVector wts(2);
  wts << 0.8, 1.7;
  auto w = build_finite_rank_interaction({a, b}, wts);
  Eigen::SelfAdjointEigenSolver<Matrix> es(w.matrix, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues()(0) > -1e-10);
  CHECK((w.matrix - w.matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("interaction construction rejects bad input") {
  Vector phi(2);
  phi << 1, 1;
  CHECK_THROWS_AS(build_finite_rank_interaction({phi}, RealVector::Constant(1, -1.0)),
                  NegativeWeight);
  Vector shorter(1);
  shorter << 1;
  CHECK_THROWS_AS(build_finite_rank_interaction({phi, shorter}, RealVector::Ones(2)),
                  BadDims);
  CHECK_THROWS_AS(build_finite_rank_interaction({phi}, RealVector::Ones(2)), BadDims);
  CHECK_THROWS_AS(build_finite_rank_interaction({}, RealVector(0)), BadDims);
}

TEST_CASE("constant kernel reduces to the identity by orthonormality") {
  auto m = solve_onebody_spectrum(harmonic_grid(6, 300), 0, 2);
  RealVector ker = RealVector::Constant(2 * 300 - 1, 0.5);
  auto w = project_multiplication_kernel(m, ker);
  CHECK((w.matrix - 0.5 * Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("zero kernel gives the zero operator") {
  auto m = solve_onebody_spectrum(harmonic_grid(6, 200), 0, 2);
  auto w = project_multiplication_kernel(m, RealVector::Zero(2 * 200 - 1));
  CHECK(w.is_zero());
}

TEST_CASE("gaussian kernel projection matches direct quadrature") {
  auto m = solve_onebody_spectrum(harmonic_grid(6, 300), 0, 2);
  RealVector ker = gaussian_samples(*m.grid, 1.0, 0.9);
  auto w = project_multiplication_kernel(m, ker);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          const Real direct = kernel_entry_direct(m, ker, i, j, k, l);
          CHECK(std::abs(w.matrix(w.pair(i, j), w.pair(k, l)) - Complex(direct)) <
                1e-10);
        }
}

TEST_CASE("gaussian kernel ground state overlap has a closed form") {
  // width 1/sqrt(2) against the oscillator ground state integrates to 1/sqrt(3)
  auto m = solve_onebody_spectrum(harmonic_grid(6, 300), 0, 1);
  RealVector ker = gaussian_samples(*m.grid, 1.0, 1.0 / std::sqrt(2.0));
  auto w = project_multiplication_kernel(m, ker);
  CHECK(std::abs(w.matrix(0, 0).real() - 1 / std::sqrt(3.0)) < 2e-3);
}

TEST_CASE("sign indefinite kernels are rejected") {
  auto m = solve_onebody_spectrum(harmonic_grid(6, 200), 0, 2);
  RealVector ker = RealVector::Constant(2 * 200 - 1, -0.5);
  CHECK_THROWS_AS(project_multiplication_kernel(m, ker), NotPositive);
  CHECK_THROWS_AS(project_multiplication_kernel(m, RealVector::Zero(10)), BadDims);
}

TEST_CASE("trace condition report") {
  auto m1 = explicit_model({1});
  Vector one = Vector::Ones(1);

  auto w1 = build_finite_rank_interaction({one}, RealVector::Constant(1, 1.0));
  auto rep = verify_assumptions(m1, w1, 1, 2);
  CHECK(rep.trace_h_inv_p == doctest::Approx(1.0));
  CHECK(rep.w_weighted_trace == doctest::Approx(1.0));
  CHECK(rep.dominated);

  auto w2 = build_finite_rank_interaction({one}, RealVector::Constant(1, 2.0));
  CHECK_FALSE(verify_assumptions(m1, w2, 1, 2).dominated);

  auto m2 = explicit_model({1, 2});
  Vector flat(2);
  flat << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  auto wf = build_finite_rank_interaction({flat}, RealVector::Constant(1, 1.0));
  auto rep2 = verify_assumptions(m2, wf, 1, 2);
  CHECK(rep2.trace_h_inv_p == doctest::Approx(1.5));
  CHECK(rep2.w_weighted_trace == doctest::Approx(0.5625));

  CHECK_THROWS_AS(verify_assumptions(m1, w1, 2, 1), ConfigError);
  CHECK_THROWS_AS(verify_assumptions(m2, w1, 1, 2), BadDims);
}
