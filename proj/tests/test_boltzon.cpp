#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gibbslim/boltzon.hpp"
#include "gibbslim/dense.hpp"

using namespace gibbslim;
using namespace gibbslim::boltzon;

namespace {

MeanFieldProblem standard_problem(Real coupling = 1.0, Real T = 1.0) {
  MeanFieldProblem p;
  p.h0 = Matrix::Zero(2, 2);
  p.h0(0, 0) = 1;
  p.h0(1, 1) = 2;
  Vector phi(2);
  phi << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  p.w = model::build_finite_rank_interaction({phi}, RealVector::Constant(1, 1.0));
  p.coupling = coupling;
  p.temperature = T;
  return p;
}

Matrix gibbs_of_diag(Real e0, Real e1, Real T) {
  const Real z = std::exp(-e0 / T) + std::exp(-e1 / T);
  Matrix g = Matrix::Zero(2, 2);
  g(0, 0) = std::exp(-e0 / T) / z;
  g(1, 1) = std::exp(-e1 / T) / z;
  return g;
}

}  // namespace

TEST_CASE("mean field functional on the flat state") {
  auto p = standard_problem(0.0);
  Matrix half = 0.5 * Matrix::Identity(2, 2);
  // energy 1.5, entropy log 2
  CHECK(mean_field_free_energy(p, half) ==
        doctest::Approx(1.5 - std::log(2.0)).epsilon(1e-13));

  auto pi = standard_problem(1.0);
  // flat rank one coupling adds (1/2) <phi, g phi>^2 = 1/8
  CHECK(mean_field_free_energy(pi, half) ==
        doctest::Approx(1.5 + 0.125 - std::log(2.0)).epsilon(1e-13));

  CHECK_THROWS_AS(mean_field_free_energy(p, Matrix::Identity(2, 2)), NotAState);
}

TEST_CASE("effective field of the flat state") {
  auto p = standard_problem(1.0);
  Matrix half = 0.5 * Matrix::Identity(2, 2);
  Matrix h = effective_hamiltonian(p, half);
  Matrix ref(2, 2);
  ref << 1.25, 0.25, 0.25, 2.25;
  CHECK((h - ref).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("problem validation") {
  auto p = standard_problem();
  p.h0(0, 1) = Complex(0, 1);  // not hermitian
  CHECK_THROWS_AS(p.validate(), NonHermitian);
  p = standard_problem();
  p.temperature = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = standard_problem();
  p.h0 = Matrix::Identity(3, 3);
  CHECK_THROWS_AS(p.validate(), BadDims);
}

TEST_CASE("uncoupled fixed point lands in one step") {
  auto p = standard_problem(0.0);
  auto res = scf_minimize(p);
  CHECK(res.iterations <= 2);
  CHECK(res.residual <= 1e-10);
  CHECK(res.free_energy ==
        doctest::Approx(-std::log(std::exp(-1.0) + std::exp(-2.0))).epsilon(1e-13));
  CHECK((res.gamma - gibbs_of_diag(1, 2, 1)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("coupled minimizer reaches the known value") {
  auto p = standard_problem(1.0);
  auto res = scf_minimize(p);
  CHECK(std::abs(res.free_energy - 0.7883934871520967) < 1e-8);
  CHECK(res.residual <= 1e-10);
  CHECK(std::abs(res.gamma.trace().real() - 1.0) < 1e-12);
  CHECK((res.gamma - res.gamma.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  // the result reproduces its own functional value
  CHECK(mean_field_free_energy(p, res.gamma) ==
        doctest::Approx(res.free_energy).epsilon(1e-12));
  REQUIRE(res.energy_history.size() >= 2);
  for (size_t i = 1; i < res.energy_history.size(); ++i)
    CHECK(res.energy_history[i] <= res.energy_history[i - 1] + 1e-12);
}

TEST_CASE("iteration budget is enforced") {
  CHECK_THROWS_AS(scf_minimize(standard_problem(1.0), 0.5, 1e-10, 1), NoConvergence);
}

TEST_CASE("one particle chain is a plain Gibbs state") {
  auto p = standard_problem(1.0);  // coupling has no pair to act on
  auto res = exact_gibbs_distinguishable(p, 1, 1);
  CHECK(res.free_energy ==
        doctest::Approx(-std::log(std::exp(-1.0) + std::exp(-2.0))).epsilon(1e-12));
  REQUIRE(res.reduced.size() == 1);
  CHECK((res.reduced[0].matrix - gibbs_of_diag(1, 2, 1)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("uncoupled chains factorize") {
  auto p = standard_problem(0.0);
  auto res = exact_gibbs_distinguishable(p, 3, 2);
  const Real f1 = -std::log(std::exp(-1.0) + std::exp(-2.0));
  CHECK(res.free_energy == doctest::Approx(3 * f1).epsilon(1e-12));
  Matrix g = gibbs_of_diag(1, 2, 1);
  CHECK((res.reduced[0].matrix - g).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((res.reduced[1].matrix - kron(g, g)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("reductions are nested consistently") {
  auto p = standard_problem(1.0);
  auto res = exact_gibbs_distinguishable(p, 3, 3);
  REQUIRE(res.reduced.size() == 3);
  for (int k = 1; k < 3; ++k) {
    std::vector<int> keep(k);
    for (int q = 0; q < k; ++q) keep[q] = q;
    auto traced = qgibbs::partial_trace(res.reduced[k], keep);
    CHECK((traced.matrix - res.reduced[k - 1].matrix).cwiseAbs().maxCoeff() < 1e-10);
  }
  for (const auto& rho : res.reduced)
    CHECK(rho.trace_value() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("chain state ignores particle labels") {
  auto p = standard_problem(1.0);
  auto full = exact_gibbs_distinguishable(p, 3, 3).reduced[2];
  const std::vector<std::vector<int>> swaps{{1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
  for (const auto& sigma : swaps) {
    auto moved = permutation_conjugate(full, sigma);
    CHECK((moved.matrix - full.matrix).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("factor relabeling moves product factors") {
  Matrix a(2, 2), b(2, 2);
  a << 0.7, Complex(0.1, 0.05), Complex(0.1, -0.05), 0.3;
  b << 0.2, 0, 0, 0.8;
  qgibbs::DensityMatrix rho;
  rho.matrix = kron(a, b);
  rho.dims = {2, 2};
  auto swapped = permutation_conjugate(rho, {1, 0});
  CHECK((swapped.matrix - kron(b, a)).cwiseAbs().maxCoeff() < 1e-14);
  auto idem = permutation_conjugate(rho, {0, 1});
  CHECK((idem.matrix - rho.matrix).cwiseAbs().maxCoeff() == 0);
  CHECK_THROWS_AS(permutation_conjugate(rho, {0}), BadDims);
  CHECK_THROWS_AS(permutation_conjugate(rho, {0, 0}), BadDims);
}

TEST_CASE("chain free energy sits below the product bound") {
  auto p = standard_problem(1.0);
  auto scf = scf_minimize(p);
  Real prev_gap = -1;
  for (int n = 2; n <= 4; ++n) {
    auto res = exact_gibbs_distinguishable(p, n, 1);
    const Real gap = scf.free_energy - res.free_energy / n;
    CHECK(gap >= -1e-9);
    if (n > 2) CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("reduction approaches the mean field minimizer") {
  auto p = standard_problem(1.0);
  auto scf = scf_minimize(p);
  auto d2 = qgibbs::schatten_distance(
      exact_gibbs_distinguishable(p, 2, 1).reduced[0].matrix, scf.gamma, 1);
  auto d6 = qgibbs::schatten_distance(
      exact_gibbs_distinguishable(p, 6, 1).reduced[0].matrix, scf.gamma, 1);
  CHECK(d6 < d2);
  CHECK(d2 < 0.1);
}

TEST_CASE("pair reduction entropy is subadditive") {
  auto p = standard_problem(1.0);
  auto res = exact_gibbs_distinguishable(p, 3, 2);
  const Real s2 = qgibbs::von_neumann_entropy(res.reduced[1]);
  const Real s1 = qgibbs::von_neumann_entropy(res.reduced[0]);
  CHECK(s2 <= 2 * s1 + 1e-10);
}

TEST_CASE("chain dimension cap") {
  auto p = standard_problem(1.0);
  CHECK_THROWS_AS(exact_gibbs_distinguishable(p, 13, 1), DimensionOverflow);
  CHECK_THROWS_AS(exact_gibbs_distinguishable(p, 0, 1), ConfigError);
  CHECK_THROWS_AS(exact_gibbs_distinguishable(p, 3, 4), OrderTooLarge);
  CHECK_THROWS_AS(exact_gibbs_distinguishable(p, 3, 0), OrderTooLarge);
}
