#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gibbslim/cfield.hpp"

using namespace gibbslim;
using namespace gibbslim::cfield;

namespace {

RealVector evs(std::initializer_list<Real> v) {
  RealVector out(Index(v.size()));
  Index j = 0;
  for (Real e : v) out(j++) = e;
  return out;
}

model::TwoBodyOperator single_mode_w(Real g) {
  model::TwoBodyOperator w;
  w.modes = 1;
  w.matrix = Matrix::Constant(1, 1, Complex(g));
  return w;
}

model::TwoBodyOperator no_w(int modes) {
  model::TwoBodyOperator w;
  w.modes = modes;
  return w;
}

// E[f(s) e^{-c s^2}] for s ~ Exp(rate), Simpson on [0, U]
Real weighted_exp_integral(Real rate, Real c, int power, Real U, int n) {
  auto f = [&](Real s) {
    return rate * std::pow(s, power) * std::exp(-rate * s - c * s * s);
  };
  Real acc = f(0) + f(U);
  const Real h = U / n;
  for (int i = 1; i < n; ++i) acc += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3;
}

}  // namespace

TEST_CASE("counter cipher known answers") {
  using rng::Counter;
  using rng::Key;
  Counter a = rng::philox4x32(Counter{0, 0, 0, 0}, Key{0, 0});
  CHECK(a == Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  Counter b = rng::philox4x32(Counter{~0u, ~0u, ~0u, ~0u}, Key{~0u, ~0u});
  CHECK(b == Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  Counter c = rng::philox4x32(Counter{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                              Key{0xa4093822u, 0x299f31d0u});
  CHECK(c == Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("uniforms stay strictly inside the unit interval") {
  CHECK(rng::uniform_from(0, 0) > 0);
  CHECK(rng::uniform_from(~0u, ~0u) < 1);
  CHECK(rng::uniform_from(~0u, ~0u) > rng::uniform_from(0, 0));
}

TEST_CASE("draws are addressed, not sequential") {
  rng::Stream s{42, 3};
  auto p1 = rng::normal_pair(s, 17, 0);
  auto p2 = rng::normal_pair(s, 17, 0);
  CHECK(p1 == p2);
  CHECK(p1 != rng::normal_pair(s, 18, 0));
  CHECK(p1 != rng::normal_pair(s, 17, 1));
  CHECK(p1 != rng::normal_pair(rng::Stream{42, 4}, 17, 0));
  CHECK(p1 != rng::normal_pair(rng::Stream{43, 3}, 17, 0));

  Vector a = sample_free(evs({1, 4}), s, 5);
  Vector b = sample_free(evs({1, 4}), s, 5);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("free samples have the inverse eigenvalue covariance") {
  rng::Stream s{7, 0};
  const RealVector lam = evs({1, 4});
  const int n = 20000;
  Complex mean0(0), mean1(0), cross(0);
  Real p0 = 0, p1 = 0;
  for (int d = 0; d < n; ++d) {
    Vector a = sample_free(lam, s, d);
    mean0 += a(0);
    mean1 += a(1);
    cross += a(0) * std::conj(a(1));
    p0 += std::norm(a(0));
    p1 += std::norm(a(1));
  }
  const Real rn = n;
  // |alpha_j|^2 is exponential with mean 1/lambda_j, so its stderr is mean/sqrt(n)
  CHECK(std::abs(p0 / rn - 1.0) < 4.0 / std::sqrt(rn));
  CHECK(std::abs(p1 / rn - 0.25) < 4.0 * 0.25 / std::sqrt(rn));
  CHECK(std::abs(mean0 / rn) < 4.0 / std::sqrt(rn));
  CHECK(std::abs(mean1 / rn) < 4.0 * 0.5 / std::sqrt(rn));
  CHECK(std::abs(cross / rn) < 4.0 * 0.5 / std::sqrt(rn));

  CHECK_THROWS_AS(sample_free(evs({1, 0}), s, 0), NonPositiveOperator);
  CHECK_THROWS_AS(sample_free(RealVector(0), s, 0), BadDims);
}

TEST_CASE("quartic energy of explicit coefficient vectors") {
  Vector one = Vector::Ones(1);
  CHECK(interaction_energy(single_mode_w(2.0), one) == doctest::Approx(1.0));
  Vector two = 2.0 * Vector::Ones(1);
  CHECK(interaction_energy(single_mode_w(2.0), two) == doctest::Approx(16.0));

  Vector phi(2);
  phi << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  auto w = model::build_finite_rank_interaction({phi}, RealVector::Constant(1, 1.0));
  Vector flat(2);
  flat << 1, 1;
  CHECK(interaction_energy(w, flat) == doctest::Approx(2.0).epsilon(1e-12));
  Vector anti(2);
  anti << 1, -1;
  CHECK(interaction_energy(w, anti) == doctest::Approx(0.0));
  CHECK(interaction_energy(no_w(2), flat) == 0);
  CHECK_THROWS_AS(interaction_energy(single_mode_w(1.0), flat), BadDims);
}

TEST_CASE("free partition estimate is exactly one") {
  auto est = estimate_partition(evs({1, 2}), no_w(2), 1.0, rng::Stream{1, 0}, 1000);
  CHECK(est.value == 1.0);
  CHECK(est.std_error == 0.0);
  CHECK(est.samples == 1000);
}

TEST_CASE("single mode partition matches quadrature") {
  // unit coupling reweights by exp(-s^2/2) with s ~ Exp(1)
  auto est = estimate_partition(evs({1}), single_mode_w(1.0), 1.0, rng::Stream{11, 2},
                                100000);
  const Real ref = weighted_exp_integral(1.0, 0.5, 0, 40.0, 20000);
  CHECK(ref == doctest::Approx(0.6556795424187986).epsilon(1e-10));
  CHECK(std::abs(est.value - ref) < 4 * est.std_error);
  CHECK(est.std_error > 0);
  CHECK(est.std_error < 0.01);
}

TEST_CASE("error bar shrinks like the square root of the sample count") {
  auto small = estimate_partition(evs({1}), single_mode_w(2.0), 1.0, rng::Stream{5, 0},
                                  20000);
  auto large = estimate_partition(evs({1}), single_mode_w(2.0), 1.0, rng::Stream{5, 0},
                                  80000);
  const Real ratio = small.std_error / large.std_error;
  CHECK(ratio > 1.4);
  CHECK(ratio < 2.8);
}

TEST_CASE("free moments match the closed form") {
  const RealVector lam = evs({1, 2.5});
  rng::Stream s{23, 1};
  for (int order = 1; order <= 2; ++order) {
    auto est = estimate_moment(lam, no_w(2), 1.0, order, s, 100000);
    Matrix ref = free_moment_exact(lam, order);
    REQUIRE(est.matrix.rows() == ref.rows());
    for (Index r = 0; r < ref.rows(); ++r)
      for (Index c = 0; c < ref.cols(); ++c)
        CHECK(std::abs(est.matrix(r, c) - ref(r, c)) <
              4 * est.std_error(r, c) + 1e-12);
    CHECK((est.matrix - est.matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(est.effective_samples == doctest::Approx(100000.0));
  }
}

TEST_CASE("closed form free moments are permanents of the covariance") {
  Matrix m1 = free_moment_exact(evs({1, 2}), 1);
  CHECK(m1(0, 0) == Complex(1));
  CHECK(m1(1, 1) == Complex(0.5));
  CHECK(m1(0, 1) == Complex(0));

  Matrix m2 = free_moment_exact(evs({1, 2}), 2);
  CHECK(m2(0, 0) == Complex(2));        // (00,00): 2/lambda_0^2
  CHECK(m2(3, 3) == Complex(0.5));      // (11,11): 2/lambda_1^2
  CHECK(m2(1, 1) == Complex(0.5));      // (01,01): 1/(lambda_0 lambda_1)
  CHECK(m2(1, 2) == Complex(0.5));      // (01,10): same pairing
  CHECK(m2(0, 3) == Complex(0));        // (00,11): index mismatch
  CHECK(m2.cwiseAbs().sum() == doctest::Approx(2 + 0.5 + 4 * 0.5));
}

TEST_CASE("reweighted single mode occupancy matches quadrature") {
  auto est = estimate_moment(evs({1}), single_mode_w(1.0), 1.0, 1, rng::Stream{11, 2},
                             100000);
  const Real num = weighted_exp_integral(1.0, 0.5, 1, 40.0, 20000);
  const Real den = weighted_exp_integral(1.0, 0.5, 0, 40.0, 20000);
  const Real ref = num / den;
  CHECK(ref == doctest::Approx(0.525135276160981).epsilon(1e-9));
  CHECK(std::abs(est.matrix(0, 0).real() - ref) < 4 * est.std_error(0, 0));
  CHECK(std::abs(est.matrix(0, 0).imag()) < 1e-14);
  CHECK(est.effective_samples < est.samples);
  CHECK(est.effective_samples > est.samples / 4.0);
}

TEST_CASE("weight collapse is reported, not averaged over") {
  // the plain partition mean stays valid; the self-normalized moment must refuse
  auto est = estimate_partition(evs({1}), single_mode_w(2.0), 1e8, rng::Stream{3, 0},
                                1000);
  CHECK(est.value < 1e-2);
  CHECK(est.value >= 0);
  CHECK_THROWS_AS(estimate_moment(evs({1}), single_mode_w(2.0), 1e8, 1,
                                  rng::Stream{3, 0}, 1000),
                  DegenerateWeights);
}

TEST_CASE("estimator input guards") {
  CHECK_THROWS_AS(estimate_partition(evs({1}), single_mode_w(1.0), 1.0,
                                     rng::Stream{1, 0}, 100),
                  ConfigError);
  CHECK_THROWS_AS(estimate_moment(evs({1}), single_mode_w(1.0), 1.0, 1,
                                  rng::Stream{1, 0}, 199),
                  ConfigError);
  CHECK_THROWS_AS(estimate_moment(evs({1, 2}), no_w(2), 1.0, 13, rng::Stream{1, 0},
                                  1000),
                  OrderTooLarge);
  CHECK_THROWS_AS(estimate_moment(evs({1, 2}), no_w(2), 1.0, 0, rng::Stream{1, 0},
                                  1000),
                  ConfigError);
  CHECK_THROWS_AS(free_moment_exact(evs({1, 2}), 13), OrderTooLarge);
  CHECK_NOTHROW(estimate_partition(evs({1}), single_mode_w(1.0), 1.0,
                                   rng::Stream{1, 0}, 1000));
}
