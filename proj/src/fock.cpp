#include "gibbslim/fock.hpp"

#include <algorithm>
#include <cmath>

namespace gibbslim::fock {

int FockBasis::sector_of(Index i) const {
  const auto it = std::upper_bound(sector_begin.begin(), sector_begin.end(), i);
  return static_cast<int>(it - sector_begin.begin()) - 1;
}

// Within a sector states are ordered by descending occupation of the first
// mode, then recursively on the rest.  The rank of (n_1..n_K) counts states
// that come earlier: for each position, configurations whose occupation there
// is larger, summed in closed form via a hockey-stick identity.
Index FockBasis::index(const std::int32_t* n) const {
  int total = 0;
  for (int j = 0; j < modes; ++j) {
    if (n[j] < 0) throw BadDims("negative occupation");
    total += n[j];
  }
  if (total > n_max) throw BadDims("occupation exceeds n_max");
  Index r = static_cast<Index>(choose(total + modes - 1, modes));  // earlier sectors
  int t = total;
  for (int j = 0; j < modes - 1; ++j) {
    const int rest = modes - 1 - j;
    if (n[j] < t) r += static_cast<Index>(choose(t - n[j] - 1 + rest, rest));
    t -= n[j];
  }
  return r;
}

BasisPtr enumerate_basis(int K, int n_max, Index dim_cap) {
  if (K < 1) throw ConfigError("need K >= 1");
  if (n_max < 0) throw ConfigError("need n_max >= 0");
  if (dim_cap < 1) throw ConfigError("dimension cap must be positive");

  // dim = C(K + n_max, K); overflow-guard with a log estimate first
  {
    Real lg = 0;
    for (int i = 1; i <= K; ++i)
      lg += std::log(Real(n_max + i)) - std::log(Real(i));
    if (lg > std::log(Real(dim_cap)) + 1e-9)
      throw DimensionOverflow("basis dimension C(K+n_max,K) exceeds cap " +
                              std::to_string(dim_cap));
  }

  auto b = std::make_shared<FockBasis>();
  b->modes = K;
  b->n_max = n_max;
  const int rows = n_max + K + 1;
  b->binom.assign(Index(rows) * (K + 1), 0);
  for (int a = 0; a < rows; ++a) {
    b->binom[Index(a) * (K + 1)] = 1;
    for (int c = 1; c <= std::min(a, K); ++c)
      b->binom[Index(a) * (K + 1) + c] =
          (a ? b->binom[Index(a - 1) * (K + 1) + c - 1] : 0) +
          (a ? b->binom[Index(a - 1) * (K + 1) + c] : 0);
  }
  const std::uint64_t dim64 = b->choose(K + n_max, K);
  if (dim64 > static_cast<std::uint64_t>(dim_cap))
    throw DimensionOverflow("basis dimension " + std::to_string(dim64) +
                            " exceeds cap " + std::to_string(dim_cap));
  b->dim = static_cast<Index>(dim64);

  b->occ.reserve(b->dim * K);
  b->sector_begin.assign(n_max + 2, 0);
  std::vector<std::int32_t> cur(K, 0);
  for (int N = 0; N <= n_max; ++N) {
    b->sector_begin[N] = static_cast<Index>(b->occ.size()) / K;
    // descending lexicographic fill of sector N
    auto emit = [&](auto&& self, int j, int remaining) -> void {
      if (j == K - 1) {
        cur[j] = remaining;
        b->occ.insert(b->occ.end(), cur.begin(), cur.end());
        return;
      }
      for (int v = remaining; v >= 0; --v) {
        cur[j] = v;
        self(self, j + 1, remaining - v);
      }
    };
    emit(emit, 0, N);
  }
  b->sector_begin[n_max + 1] = b->dim;
  return b;
}

SparseR ladder_matrix(const FockBasis& basis, int j) {
  if (j < 0 || j >= basis.modes) throw BadDims("mode index out of range");
  std::vector<Eigen::Triplet<Real>> trip;
  trip.reserve(basis.dim);
  std::vector<std::int32_t> tmp(basis.modes);
  for (Index c = 0; c < basis.dim; ++c) {
    const std::int32_t* s = basis.state(c);
    if (s[j] == 0) continue;
    std::copy(s, s + basis.modes, tmp.begin());
    tmp[j] -= 1;
    trip.emplace_back(basis.index(tmp), c, std::sqrt(Real(s[j])));
  }
  SparseR a(basis.dim, basis.dim);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

FockOperator assemble_H0(const BasisPtr& basis, const model::SpectralModel& m) {
  if (m.modes() != basis->modes) throw BadDims("mode count mismatch");
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(basis->dim);
  for (Index c = 0; c < basis->dim; ++c) {
    const std::int32_t* s = basis->state(c);
    Real e = 0;
    for (int j = 0; j < basis->modes; ++j) e += m.eigenvalues(j) * s[j];
    trip.emplace_back(c, c, Complex(e));
  }
  FockOperator op;
  op.basis = basis;
  op.entries = SparseC(basis->dim, basis->dim);
  op.entries.setFromTriplets(trip.begin(), trip.end());
  return op;
}

// W = 1/2 sum_{ijkl} w_{(i,j),(k,l)} adag_i adag_j a_l a_k, column by column.
// Normal ordering keeps every image state inside the truncated basis.
FockOperator assemble_W(const BasisPtr& basis, const model::TwoBodyOperator& w) {
  if (w.modes != basis->modes) throw BadDims("mode count mismatch");
  const int K = basis->modes;
  std::vector<Eigen::Triplet<Complex>> trip;
  std::vector<std::int32_t> s2(K), s4(K);
  for (Index c = 0; c < basis->dim; ++c) {
    const std::int32_t* s = basis->state(c);
    for (int k = 0; k < K; ++k) {
      if (s[k] == 0) continue;
      for (int l = 0; l < K; ++l) {
        std::copy(s, s + K, s2.begin());
        s2[k] -= 1;
        if (s2[l] == 0) continue;
        const Real amp2 = std::sqrt(Real(s[k])) * std::sqrt(Real(s2[l]));
        s2[l] -= 1;
        for (int j = 0; j < K; ++j) {
          for (int i = 0; i < K; ++i) {
            const Complex coeff = w.matrix(w.pair(i, j), w.pair(k, l));
            if (coeff == Complex(0)) continue;
            std::copy(s2.begin(), s2.end(), s4.begin());
            const Real amp3 = std::sqrt(Real(s4[j] + 1));
            s4[j] += 1;
            const Real amp4 = std::sqrt(Real(s4[i] + 1));
            s4[i] += 1;
            trip.emplace_back(basis->index(s4), c,
                              Real(0.5) * coeff * amp2 * amp3 * amp4);
          }
        }
      }
    }
  }
  FockOperator op;
  op.basis = basis;
  op.entries = SparseC(basis->dim, basis->dim);
  op.entries.setFromTriplets(trip.begin(), trip.end());
  return op;
}

}  // namespace gibbslim::fock
