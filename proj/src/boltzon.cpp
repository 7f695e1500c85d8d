#include "gibbslim/boltzon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gibbslim/dense.hpp"

namespace gibbslim::boltzon {

namespace {

// Gibbs state and free energy of a small hermitian matrix
struct DenseGibbs {
  Matrix state;
  Real free_energy = 0;
};

DenseGibbs dense_gibbs(const Matrix& h, Real temperature) {
  const Matrix herm = 0.5 * (h + h.adjoint());
  DenseGibbs out;
  RealVector energies;
  if (herm.imag().isZero(0)) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(herm.real());
    energies = es.eigenvalues();
    const Real e0 = energies.minCoeff();
    RealVector p = ((e0 - energies.array()) / temperature).exp().matrix();
    const Real z = p.sum();
    p /= z;
    out.state = (es.eigenvectors() * p.asDiagonal() * es.eigenvectors().transpose())
                    .cast<Complex>();
    out.free_energy = e0 - temperature * std::log(z);
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
    energies = es.eigenvalues();
    const Real e0 = energies.minCoeff();
    RealVector p = ((e0 - energies.array()) / temperature).exp().matrix();
    const Real z = p.sum();
    p /= z;
    out.state = es.eigenvectors() * p.asDiagonal() * es.eigenvectors().adjoint();
    out.free_energy = e0 - temperature * std::log(z);
  }
  return out;
}

int digit_of(Index t, int slot, int n, int k) {
  Index s = 1;
  for (int q = n - 1; q > slot; --q) s *= k;
  return static_cast<int>((t / s) % k);
}

}  // namespace

void MeanFieldProblem::validate() const {
  if (h0.rows() == 0 || h0.rows() != h0.cols())
    throw BadDims("one-body matrix must be square and nonempty");
  const Real scale = std::max(Real(1), h0.cwiseAbs().maxCoeff());
  if (!h0.isApprox(h0.adjoint(), 1e-12 * scale))
    throw NonHermitian("one-body matrix is not hermitian");
  if (!w.is_zero()) {
    if (w.modes != modes()) throw BadDims("interaction mode count mismatch");
    w.validate();
  }
  if (!(temperature > 0)) throw ConfigError("temperature must be positive");
}

Real mean_field_free_energy(const MeanFieldProblem& prob, const Matrix& gamma) {
  prob.validate();
  qgibbs::DensityMatrix g{gamma, {gamma.rows()}};
  const Real entropy = qgibbs::von_neumann_entropy(g);
  Real energy = (prob.h0 * gamma).trace().real();
  if (!prob.w.is_zero() && prob.coupling != 0)
    energy += 0.5 * prob.coupling *
              (prob.w.matrix * kron(gamma, gamma)).trace().real();
  return energy - prob.temperature * entropy;
}

Matrix effective_hamiltonian(const MeanFieldProblem& prob, const Matrix& gamma) {
  const int k = prob.modes();
  Matrix h = prob.h0;
  if (!prob.w.is_zero() && prob.coupling != 0) {
    for (int i = 0; i < k; ++i)
      for (int m = 0; m < k; ++m) {
        Complex acc(0);
        for (int j = 0; j < k; ++j)
          for (int l = 0; l < k; ++l)
            acc += prob.w.matrix(prob.w.pair(i, j), prob.w.pair(m, l)) * gamma(l, j);
        h(i, m) += prob.coupling * acc;
      }
  }
  return 0.5 * (h + h.adjoint());
}

SCFResult scf_minimize(const MeanFieldProblem& prob, Real damping, Real tol,
                       int max_iter) {
  prob.validate();
  if (!(damping > 0 && damping <= 1)) throw ConfigError("damping must lie in (0, 1]");
  if (!(tol > 0)) throw ConfigError("scf tolerance must be positive");
  const int k = prob.modes();

  SCFResult r;
  r.gamma = Matrix::Identity(k, k) / Real(k);
  r.free_energy = mean_field_free_energy(prob, r.gamma);
  r.energy_history.push_back(r.free_energy);

  for (int it = 0; it < max_iter; ++it) {
    const Matrix target =
        dense_gibbs(effective_hamiltonian(prob, r.gamma), prob.temperature).state;
    r.residual = schatten_distance(target, r.gamma, 1);
    if (r.residual <= tol) return r;

    const Real accept = r.free_energy + 1e-15 * (1 + std::abs(r.free_energy));
    Matrix cand = target;  // full step first
    Real f_cand = mean_field_free_energy(prob, cand);
    Real alpha = 1;
    while (f_cand > accept) {
      alpha = (alpha == 1) ? damping : 0.5 * alpha;
      if (alpha < 1e-6)
        throw NoConvergence("scf backtracking failed to descend");
      cand = r.gamma + alpha * (target - r.gamma);
      f_cand = mean_field_free_energy(prob, cand);
    }
    r.gamma = cand;
    r.free_energy = f_cand;
    r.energy_history.push_back(f_cand);
    r.iterations = it + 1;
  }
  throw NoConvergence("scf did not reach the requested tolerance");
}

ExactBoltzonResult exact_gibbs_distinguishable(const MeanFieldProblem& prob, int n,
                                               int k_max, Index dim_cap) {
  prob.validate();
  if (n < 1) throw ConfigError("need at least one particle");
  if (k_max < 1 || k_max > n) throw OrderTooLarge("reduction order out of range");
  const int k = prob.modes();
  Index dim = 1;
  for (int a = 0; a < n; ++a) {
    dim *= k;
    if (dim > dim_cap) throw DimensionOverflow("tensor power exceeds the dense cap");
  }

  Matrix h = Matrix::Zero(dim, dim);
  std::vector<Index> strides(n);
  {
    Index s = 1;
    for (int a = n - 1; a >= 0; --a) {
      strides[a] = s;
      s *= k;
    }
  }
  for (Index c = 0; c < dim; ++c) {
    for (int a = 0; a < n; ++a) {
      const int da = digit_of(c, a, n, k);
      const Index base = c - da * strides[a];
      for (int i = 0; i < k; ++i) h(base + i * strides[a], c) += prob.h0(i, da);
    }
    if (n > 1 && !prob.w.is_zero() && prob.coupling != 0) {
      const Real fac = prob.coupling / Real(n - 1);
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
          const int da = digit_of(c, a, n, k);
          const int db = digit_of(c, b, n, k);
          const Index base = c - da * strides[a] - db * strides[b];
          for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
              h(base + i * strides[a] + j * strides[b], c) +=
                  fac * prob.w.matrix(prob.w.pair(i, j), prob.w.pair(da, db));
        }
    }
  }

  const DenseGibbs gibbs = dense_gibbs(h, prob.temperature);
  ExactBoltzonResult out;
  out.n = n;
  out.free_energy = gibbs.free_energy;
  qgibbs::DensityMatrix full{gibbs.state, std::vector<Index>(n, k)};
  for (int kk = 1; kk <= k_max; ++kk) {
    std::vector<int> keep(kk);
    std::iota(keep.begin(), keep.end(), 0);
    out.reduced.push_back(qgibbs::partial_trace(full, keep));
  }
  return out;
}

qgibbs::DensityMatrix permutation_conjugate(const qgibbs::DensityMatrix& rho,
                                            const std::vector<int>& sigma) {
  const int n = static_cast<int>(rho.dims.size());
  if (static_cast<int>(sigma.size()) != n)
    throw BadDims("permutation length does not match factor count");
  std::vector<int> seen(sigma.begin(), sigma.end());
  std::sort(seen.begin(), seen.end());
  for (int q = 0; q < n; ++q)
    if (seen[q] != q) throw BadDims("not a permutation of the factors");

  Index total_check = 1;
  for (Index d : rho.dims) total_check *= d;
  if (rho.matrix.rows() != total_check || rho.matrix.cols() != total_check)
    throw BadDims("matrix size does not match factor dimensions");

  std::vector<Index> new_dims(n);
  for (int q = 0; q < n; ++q) new_dims[q] = rho.dims[sigma[q]];

  std::vector<Index> old_stride(n), new_stride(n);
  Index s = 1;
  for (int q = n - 1; q >= 0; --q) {
    old_stride[q] = s;
    s *= rho.dims[q];
  }
  const Index total = s;
  s = 1;
  for (int q = n - 1; q >= 0; --q) {
    new_stride[q] = s;
    s *= new_dims[q];
  }

  std::vector<Index> map(total);
  for (Index t = 0; t < total; ++t) {
    Index u = 0;
    for (int q = 0; q < n; ++q)
      u += ((t / old_stride[sigma[q]]) % rho.dims[sigma[q]]) * new_stride[q];
    map[t] = u;
  }

  qgibbs::DensityMatrix out;
  out.dims = new_dims;
  out.matrix.resize(total, total);
  for (Index c = 0; c < total; ++c)
    for (Index r = 0; r < total; ++r) out.matrix(map[r], map[c]) = rho.matrix(r, c);
  return out;
}

}  // namespace gibbslim::boltzon
