#include "gibbslim/qgibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace gibbslim::qgibbs {

void DensityMatrix::validate(Real herm_tol, Real psd_tol) const {
  if (matrix.rows() != matrix.cols()) throw NotAState("density matrix not square");
  const Real scale = std::max<Real>(1, matrix.cwiseAbs().maxCoeff());
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > herm_tol * scale)
    throw NotAState("density matrix not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(matrix, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -psd_tol * scale)
    throw NotAState("density matrix has a negative eigenvalue");
}

namespace {

bool block_is_real(const Matrix& b) {
  const Real scale = std::max<Real>(1, b.cwiseAbs().maxCoeff());
  return b.imag().cwiseAbs().maxCoeff() <= 1e-13 * scale;
}

Matrix dense_block(const SparseC& a, Index begin, Index d) {
  Matrix m = Matrix::Zero(d, d);
  for (Index col = begin; col < begin + d; ++col)
    for (SparseC::InnerIterator it(a, col); it; ++it)
      if (it.row() >= begin && it.row() < begin + d)
        m(it.row() - begin, col - begin) = it.value();
  return m;
}

}  // namespace

ThermalResult thermal_state(const fock::FockOperator& H, Real T, Real coupling_tag) {
  if (!(T > 0)) throw ConfigError("temperature must be positive");
  const SparseC& A = H.entries;
  if (A.rows() != A.cols()) throw BadDims("Hamiltonian not square");
  const Index dim = A.rows();

  {
    SparseC d = SparseC(A - SparseC(A.adjoint()));
    Real worst = 0;
    for (int o = 0; o < d.outerSize(); ++o)
      for (SparseC::InnerIterator it(d, o); it; ++it)
        worst = std::max(worst, std::abs(it.value()));
    Real scale = 1;
    for (int o = 0; o < A.outerSize(); ++o)
      for (SparseC::InnerIterator it(A, o); it; ++it)
        scale = std::max(scale, std::abs(it.value()));
    if (worst > 1e-12 * scale) throw NonHermitian("Hamiltonian is not Hermitian");
  }

  ThermalResult r;
  r.basis = H.basis;
  r.dim = dim;
  r.temperature = T;
  r.coupling = coupling_tag;

  // sector layout; fall back to one block if the operator mixes sectors
  std::vector<Index> cuts;
  bool sectored = false;
  if (H.basis && H.basis->dim == dim) {
    cuts = H.basis->sector_begin;
    sectored = true;
    for (int o = 0; o < A.outerSize() && sectored; ++o)
      for (SparseC::InnerIterator it(A, o); it; ++it)
        if (H.basis->sector_of(it.row()) != H.basis->sector_of(it.col())) {
          sectored = false;
          break;
        }
  }
  if (!sectored) {
    if (dim > 4096)
      throw DimensionOverflow("unsectored Hamiltonian too large for dense solve");
    cuts = {0, dim};
    r.basis = nullptr;
  }

  const int nsec = static_cast<int>(cuts.size()) - 1;

  // one sparse pass finds the diagonal and per-sector off-diagonal mass, so
  // diagonal sectors never get materialized dense
  RealVector diag = RealVector::Zero(dim);
  std::vector<Real> blk_scale(nsec, 0), blk_off(nsec, 0);
  for (int o = 0; o < A.outerSize(); ++o)
    for (SparseC::InnerIterator it(A, o); it; ++it) {
      const int s = static_cast<int>(std::upper_bound(cuts.begin(), cuts.end(),
                                                      it.col()) -
                                     cuts.begin()) -
                    1;
      const Real a = std::abs(it.value());
      blk_scale[s] = std::max(blk_scale[s], a);
      if (it.row() == it.col())
        diag(it.row()) = it.value().real();
      else
        blk_off[s] = std::max(blk_off[s], a);
    }

  Matrix block;
  for (int s = 0; s < nsec; ++s) {
    SectorSpectrum sp;
    sp.begin = cuts[s];
    sp.dim = cuts[s + 1] - cuts[s];
    if (sp.dim == 0) {
      r.sectors.push_back(std::move(sp));
      continue;
    }
    if (blk_off[s] <= 1e-14 * std::max<Real>(1, blk_scale[s])) {
      sp.kind = SectorSpectrum::Kind::Identity;
      sp.energies = diag.segment(sp.begin, sp.dim);
      r.sectors.push_back(std::move(sp));
      continue;
    }
    block = dense_block(A, sp.begin, sp.dim);
    if (block_is_real(block)) {
      sp.kind = SectorSpectrum::Kind::Real;
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(block.real());
      if (es.info() != Eigen::Success) throw NumericalError("sector eigensolver failed");
      sp.energies = es.eigenvalues();
      sp.vectors_r = es.eigenvectors();
    } else {
      sp.kind = SectorSpectrum::Kind::Complex;
      Eigen::SelfAdjointEigenSolver<Matrix> es(block);
      if (es.info() != Eigen::Success) throw NumericalError("sector eigensolver failed");
      sp.energies = es.eigenvalues();
      sp.vectors_c = es.eigenvectors();
    }
    r.sectors.push_back(std::move(sp));
  }

  Real e0 = std::numeric_limits<Real>::infinity();
  for (const auto& sp : r.sectors)
    if (sp.dim > 0) e0 = std::min(e0, sp.energies.minCoeff());
  r.ground_energy = e0;
  Real z = 0;
  for (auto& sp : r.sectors) {
    if (sp.dim == 0) continue;
    sp.probs = ((e0 - sp.energies.array()) / T).exp().matrix();
    z += sp.probs.sum();
  }
  for (auto& sp : r.sectors)
    if (sp.dim > 0) sp.probs /= z;
  r.log_partition = std::log(z) - e0 / T;
  r.free_energy = e0 - T * std::log(z);
  return r;
}

DensityMatrix ThermalResult::state(Index dense_cap) const {
  if (dim > dense_cap)
    throw DimensionOverflow("dense state materialization over cap");
  DensityMatrix rho;
  rho.matrix = Matrix::Zero(dim, dim);
  rho.dims = {dim};
  for (const auto& sp : sectors) {
    if (sp.dim == 0) continue;
    switch (sp.kind) {
      case SectorSpectrum::Kind::Identity:
        rho.matrix.block(sp.begin, sp.begin, sp.dim, sp.dim).diagonal() =
            sp.probs.cast<Complex>();
        break;
      case SectorSpectrum::Kind::Real:
        rho.matrix.block(sp.begin, sp.begin, sp.dim, sp.dim) =
            (sp.vectors_r * sp.probs.asDiagonal() * sp.vectors_r.transpose())
                .cast<Complex>();
        break;
      case SectorSpectrum::Kind::Complex:
        rho.matrix.block(sp.begin, sp.begin, sp.dim, sp.dim) =
            sp.vectors_c * sp.probs.asDiagonal() * sp.vectors_c.adjoint();
        break;
    }
  }
  return rho;
}

Real truncation_adequacy(const ThermalResult& r) {
  if (!r.basis) throw BadDims("tail mass needs a sector-graded state");
  const auto& sp = r.sectors.back();
  return sp.dim == 0 ? 0.0 : sp.probs.sum();
}

namespace {

// per-column annihilation maps for one multi-index string on one sector
struct StringMap {
  std::vector<Index> tgt;  // local index in sector N-k, or -1
  std::vector<Real> amp;
};

StringMap build_string(const fock::FockBasis& basis, int N, const std::vector<int>& modes_ix) {
  const Index begin = basis.sector_begin[N];
  const Index dim = basis.sector_dim(N);
  const int k = static_cast<int>(modes_ix.size());
  const Index tgt_begin = basis.sector_begin[N - k];
  StringMap sm;
  sm.tgt.assign(dim, -1);
  sm.amp.assign(dim, 0);
  std::vector<std::int32_t> occ(basis.modes);
  for (Index c = 0; c < dim; ++c) {
    const std::int32_t* s = basis.state(begin + c);
    std::copy(s, s + basis.modes, occ.begin());
    Real a = 1;
    bool dead = false;
    for (int t = 0; t < k; ++t) {
      const int m = modes_ix[t];
      if (occ[m] == 0) {
        dead = true;
        break;
      }
      a *= std::sqrt(Real(occ[m]));
      occ[m] -= 1;
    }
    if (dead) continue;
    sm.tgt[c] = basis.index(occ) - tgt_begin;
    sm.amp[c] = a;
  }
  return sm;
}

}  // namespace

DensityMatrix reduced_density_matrix(const ThermalResult& r, int k, Index dim_cap) {
  if (k < 1) throw OrderTooLarge("order must be >= 1");
  if (!r.basis) throw BadDims("reduced matrices need a sector-graded state");
  const fock::FockBasis& basis = *r.basis;
  const int K = basis.modes;
  Index dk = 1;
  for (int t = 0; t < k; ++t) {
    dk *= K;
    if (dk > dim_cap) throw OrderTooLarge("K^k exceeds the dense cap");
  }
  if (k > basis.n_max) throw OrderTooLarge("order exceeds the particle cap");

  std::vector<std::vector<int>> tuples(dk, std::vector<int>(k));
  for (Index t = 0; t < dk; ++t) {
    Index v = t;
    for (int d = k - 1; d >= 0; --d) {
      tuples[t][d] = static_cast<int>(v % K);
      v /= K;
    }
  }

  Matrix G = Matrix::Zero(dk, dk);
  std::vector<StringMap> maps(dk);
  for (int N = k; N <= basis.n_max; ++N) {
    const auto& sp = r.sectors[N];
    if (sp.dim == 0) continue;
    for (Index t = 0; t < dk; ++t) maps[t] = build_string(basis, N, tuples[t]);

    if (sp.kind == SectorSpectrum::Kind::Identity) {
      for (Index c = 0; c < sp.dim; ++c) {
        const Real p = sp.probs(c);
        if (p == 0) continue;
        for (Index t1 = 0; t1 < dk; ++t1) {
          if (maps[t1].tgt[c] < 0) continue;
          for (Index t2 = 0; t2 < dk; ++t2) {
            if (maps[t2].tgt[c] != maps[t1].tgt[c]) continue;
            G(t1, t2) += p * maps[t1].amp[c] * maps[t2].amp[c];
          }
        }
      }
      continue;
    }

    const Index low_dim = basis.sector_dim(N - k);
    const Index chunk = std::max<Index>(
        1, (Index(1) << 23) / std::max<Index>(1, dk * low_dim));  // ~64MB of doubles
    const bool realk = sp.kind == SectorSpectrum::Kind::Real;
    RealMatrix xr;
    Matrix xc;
    std::vector<RealMatrix> Xr(realk ? dk : 0);
    std::vector<Matrix> Xc(realk ? 0 : dk);
    const RealVector sqp = sp.probs.cwiseSqrt();
    for (Index m0 = 0; m0 < sp.dim; m0 += chunk) {
      const Index mc = std::min(chunk, sp.dim - m0);
      for (Index t = 0; t < dk; ++t) {
        const StringMap& sm = maps[t];
        if (realk) {
          xr.setZero(low_dim, mc);
          for (Index c = 0; c < sp.dim; ++c)
            if (sm.tgt[c] >= 0)
              xr.row(sm.tgt[c]) +=
                  (sm.amp[c] * sqp.segment(m0, mc).transpose().array() *
                   sp.vectors_r.row(c).segment(m0, mc).array())
                      .matrix();
          Xr[t] = xr;
        } else {
          xc.setZero(low_dim, mc);
          for (Index c = 0; c < sp.dim; ++c)
            if (sm.tgt[c] >= 0)
              xc.row(sm.tgt[c]) +=
                  sm.amp[c] * (sqp.segment(m0, mc).transpose().array() *
                               sp.vectors_c.row(c).segment(m0, mc).array())
                                  .matrix();
          Xc[t] = xc;
        }
      }
      for (Index t1 = 0; t1 < dk; ++t1)
        for (Index t2 = 0; t2 < dk; ++t2) {
          if (realk)
            G(t1, t2) += Xr[t1].cwiseProduct(Xr[t2]).sum();
          else
            G(t1, t2) += Xc[t1].cwiseProduct(Xc[t2].conjugate()).sum();
        }
    }
  }

  DensityMatrix out;
  out.matrix = G / factorial(k);
  out.dims.assign(k, K);
  return out;
}

Real von_neumann_entropy(const DensityMatrix& rho) {
  if (std::abs(rho.trace_value() - 1.0) > 1e-8)
    throw NotAState("entropy requires unit trace");
  rho.validate();
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix, Eigen::EigenvaluesOnly);
  Real s = 0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const Real p = es.eigenvalues()(i);
    if (p > 0) s -= p * std::log(p);
  }
  return s;
}

Real relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.matrix.rows() != sigma.matrix.rows())
    throw BadDims("relative entropy needs equal dimensions");
  rho.validate();
  sigma.validate();
  Eigen::SelfAdjointEigenSolver<Matrix> er(rho.matrix);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma.matrix);
  const Real s_floor = 1e-13 * std::max<Real>(1e-300, es.eigenvalues().maxCoeff());
  const Matrix rho_in_sigma = es.eigenvectors().adjoint() * rho.matrix * es.eigenvectors();
  Real outside = 0, cross = 0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const Real s = es.eigenvalues()(i);
    const Real mass = rho_in_sigma(i, i).real();
    if (s <= s_floor)
      outside += std::max<Real>(mass, 0);
    else
      cross += mass * std::log(s);
  }
  if (outside > 1e-10)
    throw SupportViolation("state has mass outside the reference support");
  Real self = 0;
  for (Index i = 0; i < er.eigenvalues().size(); ++i) {
    const Real p = er.eigenvalues()(i);
    if (p > 0) self += p * std::log(p);
  }
  return self - cross;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  if (rho.dims.empty()) throw BadDims("partial trace needs factor dimensions");
  DensityMatrix out;
  out.matrix = partial_trace_core(rho.matrix, rho.dims, keep);
  std::vector<int> sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  for (int q : sorted) out.dims.push_back(rho.dims[q]);
  return out;
}

Real schatten_distance(const Matrix& a, const Matrix& b, Real p) {
  return gibbslim::schatten_distance<Matrix, Matrix>(a, b, p);
}

Complex wick_moment(const Matrix& gamma, const std::vector<int>& rows,
                    const std::vector<int>& cols) {
  if (rows.size() != cols.size()) throw BadDims("index tuples must have equal length");
  const int k = static_cast<int>(rows.size());
  Matrix sub(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      if (rows[a] < 0 || rows[a] >= gamma.rows() || cols[b] < 0 ||
          cols[b] >= gamma.cols())
        throw BadDims("moment index out of range");
      sub(a, b) = gamma(rows[a], cols[b]);
    }
  return permanent(sub);
}

}  // namespace gibbslim::qgibbs
