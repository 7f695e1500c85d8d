#pragma once

// N distinguishable particles with mean-field pair coupling lambda/(N-1):
// exact Gibbs states on small tensor powers, the one-particle mean-field
// functional, and its damped self-consistent minimizer.

#include <vector>

#include "gibbslim/model.hpp"
#include "gibbslim/qgibbs.hpp"
#include "gibbslim/types.hpp"

namespace gibbslim::boltzon {

struct MeanFieldProblem {
  Matrix h0;               // K x K one-body part
  model::TwoBodyOperator w;
  Real coupling = 0;
  Real temperature = 0;
  int modes() const { return static_cast<int>(h0.rows()); }
  void validate() const;
};

struct SCFResult {
  Matrix gamma;
  Real free_energy = 0;
  int iterations = 0;      // accepted updates
  Real residual = 0;       // trace norm of the final fixed-point defect
  std::vector<Real> energy_history;
};

struct ExactBoltzonResult {
  Real free_energy = 0;    // total, not per particle
  int n = 0;
  std::vector<qgibbs::DensityMatrix> reduced;  // first k particles, k = 1..k_max
};

// tr(h0 g) + (coupling/2) tr[w g (x) g] + T tr[g log g]; g must be a state
Real mean_field_free_energy(const MeanFieldProblem& prob, const Matrix& gamma);

// h0 plus the interaction field of gamma
Matrix effective_hamiltonian(const MeanFieldProblem& prob, const Matrix& gamma);

// damped fixed-point iteration on gamma -> gibbs(h_eff(gamma)); tries the
// full step first and backtracks only when the energy would go up
SCFResult scf_minimize(const MeanFieldProblem& prob, Real damping = 0.5,
                       Real tol = 1e-10, int max_iter = 500);

// dense Gibbs state of the N-particle chain with pair weight
// coupling/(N-1), plus its leading reduced states
ExactBoltzonResult exact_gibbs_distinguishable(const MeanFieldProblem& prob, int n,
                                               int k_max, Index dim_cap = 4096);

// relabels tensor factors: slot q of the result is slot sigma[q] of rho
qgibbs::DensityMatrix permutation_conjugate(const qgibbs::DensityMatrix& rho,
                                            const std::vector<int>& sigma);

}  // namespace gibbslim::boltzon
