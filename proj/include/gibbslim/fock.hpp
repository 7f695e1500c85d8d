#pragma once

// Occupation-number basis of the particle-number-truncated bosonic Fock
// space and sparse second-quantized operators on it.  States are graded by
// total particle number; sectors are contiguous, which later allows
// sector-wise diagonalization and tail-mass checks.

#include <cstdint>
#include <memory>
#include <vector>

#include "gibbslim/errors.hpp"
#include "gibbslim/model.hpp"
#include "gibbslim/types.hpp"

namespace gibbslim::fock {

inline constexpr Index kDefaultDimCap = 2'000'000;

struct FockBasis {
  int modes = 0;
  int n_max = 0;
  Index dim = 0;
  std::vector<std::int32_t> occ;      // dim x modes, row-major
  std::vector<Index> sector_begin;    // n_max + 2 entries; sector N is
                                      // [sector_begin[N], sector_begin[N+1])
  std::vector<std::uint64_t> binom;   // (n_max+modes+1) x (modes+1), row-major

  const std::int32_t* state(Index i) const { return occ.data() + Index(modes) * i; }
  Index sector_dim(int N) const { return sector_begin[N + 1] - sector_begin[N]; }
  int sector_of(Index i) const;

  // ordinal of an occupation vector, by combinatorial ranking (no lookup table)
  Index index(const std::int32_t* n) const;
  Index index(const std::vector<std::int32_t>& n) const { return index(n.data()); }

  std::uint64_t choose(int a, int b) const {
    return binom[Index(a) * (modes + 1) + b];
  }
};

using BasisPtr = std::shared_ptr<const FockBasis>;

BasisPtr enumerate_basis(int K, int n_max, Index dim_cap = kDefaultDimCap);

// annihilation operator a_j (0-based mode); creation is the adjoint
SparseR ladder_matrix(const FockBasis& basis, int j);

struct FockOperator {
  BasisPtr basis;
  SparseC entries;
};

FockOperator assemble_H0(const BasisPtr& basis, const model::SpectralModel& m);
FockOperator assemble_W(const BasisPtr& basis, const model::TwoBodyOperator& w);

}  // namespace gibbslim::fock
