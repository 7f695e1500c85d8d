#include "gibbslim/cfield.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "gibbslim/dense.hpp"

namespace gibbslim::cfield {

namespace {

constexpr int kBatches = 100;
constexpr Real kMinEffectiveSamples = 10.0;
constexpr Index kMomentCap = 4096;

void check_eigenvalues(const RealVector& eigenvalues) {
  if (eigenvalues.size() == 0) throw BadDims("empty eigenvalue list");
  if (eigenvalues.minCoeff() <= 0)
    throw NonPositiveOperator("free covariance needs positive eigenvalues");
}

void check_interaction(const model::TwoBodyOperator& w, Index modes) {
  if (!w.is_zero() && w.modes != modes)
    throw BadDims("interaction mode count does not match eigenvalue list");
}

Index tensor_dim(Index modes, int order) {
  if (order < 1) throw ConfigError("moment order must be at least 1");
  Index d = 1;
  for (int i = 0; i < order; ++i) {
    d *= modes;
    if (d > kMomentCap) throw OrderTooLarge("moment dimension exceeds cap");
  }
  return d;
}

// alpha^{(x)order}, index t reads as base-K digits, leftmost factor first;
// expands in place from the tail so no scratch vector is needed
void tensor_power(const Vector& alpha, int order, Vector& out) {
  const Index k = alpha.size();
  out.resize(tensor_dim(k, order));
  out.head(k) = alpha;
  Index len = k;
  for (int m = 1; m < order; ++m) {
    for (Index i = len - 1; i >= 0; --i)
      out.segment(i * k, k) = out(i) * alpha;
    len *= k;
  }
}

struct BatchTotals {
  std::array<Real, kBatches> w_sum{};
  std::array<std::uint64_t, kBatches> count{};
  Real w2_sum = 0;
};

Real weight_of(const model::TwoBodyOperator& w, Real coupling, const Vector& alpha) {
  if (w.is_zero() || coupling == 0) return 1.0;
  return std::exp(-coupling * interaction_energy(w, alpha));
}

}  // namespace

Vector sample_free(const RealVector& eigenvalues, const rng::Stream& stream,
                   std::uint64_t draw) {
  check_eigenvalues(eigenvalues);
  const Index k = eigenvalues.size();
  Vector alpha(k);
  for (Index j = 0; j < k; ++j) {
    const auto z = rng::normal_pair(stream, draw, static_cast<std::uint32_t>(j));
    alpha(j) = Complex(z[0], z[1]) / std::sqrt(2.0 * eigenvalues(j));
  }
  return alpha;
}

Real interaction_energy(const model::TwoBodyOperator& w, const Vector& alpha) {
  if (w.is_zero()) return 0;
  const Index k = alpha.size();
  check_interaction(w, k);
  Vector pair(k * k);
  for (Index i = 0; i < k; ++i) pair.segment(i * k, k) = alpha(i) * alpha;
  const Real val = 0.5 * (pair.adjoint() * w.matrix * pair).value().real();
  return std::max(Real(0), val);
}

PartitionEstimate estimate_partition(const RealVector& eigenvalues,
                                     const model::TwoBodyOperator& w, Real coupling,
                                     const rng::Stream& stream, std::uint64_t samples) {
  check_eigenvalues(eigenvalues);
  check_interaction(w, eigenvalues.size());
  if (samples < 2 * kBatches) throw ConfigError("need at least 200 samples");

  BatchTotals acc;
  for (std::uint64_t d = 0; d < samples; ++d) {
    const Vector alpha = sample_free(eigenvalues, stream, d);
    const Real wt = weight_of(w, coupling, alpha);
    const int b = static_cast<int>(d % kBatches);
    acc.w_sum[b] += wt;
    acc.count[b] += 1;
    acc.w2_sum += wt * wt;
  }

  Real total = 0;
  std::uint64_t n = 0;
  std::array<Real, kBatches> means{};
  for (int b = 0; b < kBatches; ++b) {
    total += acc.w_sum[b];
    n += acc.count[b];
    means[b] = acc.w_sum[b] / Real(acc.count[b]);
  }
  Real mbar = 0;
  for (Real m : means) mbar += m;
  mbar /= kBatches;
  Real var = 0;
  for (Real m : means) var += (m - mbar) * (m - mbar);
  PartitionEstimate out;
  out.value = total / Real(n);
  out.std_error = std::sqrt(var / (Real(kBatches) * (kBatches - 1)));
  out.samples = samples;
  return out;
}

MomentEstimate estimate_moment(const RealVector& eigenvalues,
                               const model::TwoBodyOperator& w, Real coupling,
                               int order, const rng::Stream& stream,
                               std::uint64_t samples) {
  check_eigenvalues(eigenvalues);
  check_interaction(w, eigenvalues.size());
  if (samples < 2 * kBatches) throw ConfigError("need at least 200 samples");
  const Index dk = tensor_dim(eigenvalues.size(), order);

  std::vector<Matrix> m_sum(kBatches, Matrix::Zero(dk, dk));
  std::array<Real, kBatches> w_sum{};
  Real w2_sum = 0;
  Vector v;
  for (std::uint64_t d = 0; d < samples; ++d) {
    const Vector alpha = sample_free(eigenvalues, stream, d);
    const Real wt = weight_of(w, coupling, alpha);
    tensor_power(alpha, order, v);
    const int b = static_cast<int>(d % kBatches);
    m_sum[b].noalias() += wt * (v * v.adjoint());
    w_sum[b] += wt;
    w2_sum += wt * wt;
  }

  Matrix m_total = Matrix::Zero(dk, dk);
  Real w_total = 0;
  for (int b = 0; b < kBatches; ++b) {
    m_total += m_sum[b];
    w_total += w_sum[b];
  }
  if (!(w_total > 0)) throw DegenerateWeights("all sample weights vanished");
  const Real ess = w_total * w_total / w2_sum;
  if (ess < kMinEffectiveSamples)
    throw DegenerateWeights("effective sample size below 10");

  MomentEstimate out;
  out.order = order;
  out.matrix = m_total / w_total;
  out.effective_samples = ess;
  out.samples = samples;

  std::vector<Matrix> theta(kBatches);
  Matrix theta_bar = Matrix::Zero(dk, dk);
  for (int b = 0; b < kBatches; ++b) {
    const Real w_rest = w_total - w_sum[b];
    if (!(w_rest > 0)) throw DegenerateWeights("one batch carries all the weight");
    theta[b] = (m_total - m_sum[b]) / w_rest;
    theta_bar += theta[b];
  }
  theta_bar /= Real(kBatches);
  RealMatrix se2 = RealMatrix::Zero(dk, dk);
  for (int b = 0; b < kBatches; ++b)
    se2 += (theta[b] - theta_bar).cwiseAbs2();
  out.std_error = (se2 * Real(kBatches - 1) / Real(kBatches)).cwiseSqrt();
  return out;
}

Matrix free_moment_exact(const RealVector& eigenvalues, int order) {
  check_eigenvalues(eigenvalues);
  const Index k = eigenvalues.size();
  const Index dk = tensor_dim(k, order);
  auto digits = [&](Index t) {
    std::vector<Index> d(order);
    for (int m = order - 1; m >= 0; --m) {
      d[m] = t % k;
      t /= k;
    }
    return d;
  };
  Matrix out(dk, dk);
  Matrix sub(order, order);
  for (Index t1 = 0; t1 < dk; ++t1) {
    const auto rows = digits(t1);
    for (Index t2 = 0; t2 < dk; ++t2) {
      const auto cols = digits(t2);
      for (int a = 0; a < order; ++a)
        for (int b = 0; b < order; ++b)
          sub(a, b) = rows[a] == cols[b] ? Complex(1.0 / eigenvalues(rows[a])) : Complex(0);
      out(t1, t2) = permanent(sub);
    }
  }
  return out;
}

}  // namespace gibbslim::cfield
