#pragma once

// Quantum Gibbs states on the truncated Fock space.  A thermal state is kept
// in spectral form, one eigendecomposition per particle-number sector; the
// dense matrix is materialized on demand for small dimensions.  Reduced
// k-body matrices carry a 1/k! normalization, so k! Gamma^(k) / T^k is the
// object that approaches the classical moment at large T.

#include <vector>

#include "gibbslim/dense.hpp"
#include "gibbslim/errors.hpp"
#include "gibbslim/fock.hpp"
#include "gibbslim/types.hpp"

namespace gibbslim::qgibbs {

struct DensityMatrix {
  Matrix matrix;
  std::vector<Index> dims;  // factor dimensions; {n} for a single factor
  Real trace_value() const { return matrix.trace().real(); }
  void validate(Real herm_tol = 1e-12, Real psd_tol = 1e-10) const;
};

struct SectorSpectrum {
  enum class Kind { Identity, Real, Complex };
  Kind kind = Kind::Identity;
  Index begin = 0;     // first basis ordinal of the sector
  Index dim = 0;
  RealVector energies; // ascending
  RealVector probs;    // Boltzmann weights, normalized over the whole state
  RealMatrix vectors_r;
  Matrix vectors_c;
};

struct ThermalResult {
  fock::BasisPtr basis;  // null when the operator had no sector structure
  std::vector<SectorSpectrum> sectors;
  Index dim = 0;
  Real temperature = 0;
  Real coupling = 0;     // tag recorded by the caller
  Real log_partition = 0;
  Real free_energy = 0;  // -T log Z
  Real ground_energy = 0;

  DensityMatrix state(Index dense_cap = 4096) const;
};

// Gibbs state exp(-H/T)/Z, ground-shifted before exponentiation.  Diagonal
// and real-symmetric sector blocks take cheaper paths.
ThermalResult thermal_state(const fock::FockOperator& H, Real T, Real coupling_tag = 0);

// Gamma^(k)[(i_1..i_k),(j_1..j_k)] = (1/k!) tr[Gamma adag_{j1}..adag_{jk} a_{i1}..a_{ik}]
DensityMatrix reduced_density_matrix(const ThermalResult& r, int k,
                                     Index dim_cap = 4096);

// probability mass on the top particle-number sector
Real truncation_adequacy(const ThermalResult& r);

Real von_neumann_entropy(const DensityMatrix& rho);
Real relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);
Real schatten_distance(const Matrix& a, const Matrix& b, Real p);

// k-th joint moment of a Gaussian family with covariance gamma: the permanent
// of the submatrix gamma[rows, cols]
Complex wick_moment(const Matrix& gamma, const std::vector<int>& rows,
                    const std::vector<int>& cols);

}  // namespace gibbslim::qgibbs
