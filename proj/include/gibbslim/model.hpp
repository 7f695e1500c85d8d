#pragma once

// One-body spectral data h = -d^2/dx^2 + |x|^a - nu and two-body
// interactions w on the truncated mode space, with the positivity and
// trace-domination checks the rest of the toolkit relies on.

#include <optional>
#include <vector>

#include "gibbslim/errors.hpp"
#include "gibbslim/types.hpp"

namespace gibbslim::model {

struct GridSpec {
  Real half_width = 0;   // domain [-L, L]
  int points = 0;        // interior grid points, Dirichlet walls at +-L
  Real exponent_a = 0;   // potential |x|^a
  void validate() const;
  Real spacing() const { return 2.0 * half_width / (points + 1); }
  RealVector abscissae() const;
};

struct SpectralModel {
  RealVector eigenvalues;     // ascending, all > 0 (nu already subtracted)
  Real nu = 0;
  RealMatrix eigenfunctions;  // points x K, quadrature-orthonormal; may be empty
  std::optional<GridSpec> grid;
  int modes() const { return static_cast<int>(eigenvalues.size()); }
  bool has_eigenfunctions() const { return eigenfunctions.size() > 0; }
  void validate() const;
};

struct TwoBodyOperator {
  int modes = 0;
  Matrix matrix;  // K^2 x K^2, pair (i,j) -> row i*K + j
  Index pair(int i, int j) const { return Index(i) * modes + j; }
  bool is_zero() const { return matrix.size() == 0 || matrix.isZero(0); }
  void validate(Real herm_tol = 1e-12, Real psd_tol = 1e-10) const;
};

struct AssumptionReport {
  Real p = 0;
  Real p_prime = 0;
  Real trace_h_inv_p = 0;    // tr h^{-p}
  Real w_weighted_trace = 0; // tr[w h^{-1} (x) h^{-1}]
  bool dominated = false;    // w <= h^{1-p'} (x) h^{1-p'}
};

// K lowest eigenpairs of the symmetric tridiagonal discretization.
// tol > 0 enables a half-resolution error estimate.
SpectralModel solve_onebody_spectrum(const GridSpec& grid, Real nu, int K, Real tol = 0);

Real trace_inverse_power(const SpectralModel& m, Real p);

TwoBodyOperator build_finite_rank_interaction(const std::vector<Vector>& vectors,
                                              const RealVector& weights);

// kernel_samples[d] = w((d - points + 1) * h) for d in [0, 2*points - 1)
TwoBodyOperator project_multiplication_kernel(const SpectralModel& m,
                                              const RealVector& kernel_samples);

AssumptionReport verify_assumptions(const SpectralModel& m, const TwoBodyOperator& w,
                                    Real p, Real p_prime);

}  // namespace gibbslim::model
