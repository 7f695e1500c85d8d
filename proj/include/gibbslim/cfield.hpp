#pragma once

// Monte Carlo over classical coefficient fields: the reference Gaussian
// ensemble with covariance h^{-1}, the quartic reweighting, and moment
// matrices of the reweighted ensemble with jackknife error bars.

#include <cstdint>

#include "gibbslim/model.hpp"
#include "gibbslim/rng.hpp"
#include "gibbslim/types.hpp"

namespace gibbslim::cfield {

struct PartitionEstimate {
  Real value = 0;
  Real std_error = 0;
  std::uint64_t samples = 0;
};

struct MomentEstimate {
  int order = 0;
  Matrix matrix;          // K^order x K^order, index digits base K
  RealMatrix std_error;   // per entry, modulus of the (re, im) errors
  Real effective_samples = 0;
  std::uint64_t samples = 0;
};

// one draw alpha with independent complex Gaussian modes, E|alpha_j|^2 = 1/lambda_j
Vector sample_free(const RealVector& eigenvalues, const rng::Stream& stream,
                   std::uint64_t draw);

// (1/2) <alpha (x) alpha, w alpha (x) alpha>, clamped at zero
Real interaction_energy(const model::TwoBodyOperator& w, const Vector& alpha);

// mean of exp(-coupling * interaction_energy) under the free ensemble,
// with a batch-means error bar
PartitionEstimate estimate_partition(const RealVector& eigenvalues,
                                     const model::TwoBodyOperator& w, Real coupling,
                                     const rng::Stream& stream, std::uint64_t samples);

// self-normalized moment E[alpha^{(x)k} (alpha^{(x)k})^*] of the reweighted
// ensemble; jackknife-over-batches error bars, guards against weight collapse
MomentEstimate estimate_moment(const RealVector& eigenvalues,
                               const model::TwoBodyOperator& w, Real coupling,
                               int order, const rng::Stream& stream,
                               std::uint64_t samples);

// closed form for the free ensemble: permanents of 1/lambda submatrices
Matrix free_moment_exact(const RealVector& eigenvalues, int order);

}  // namespace gibbslim::cfield
