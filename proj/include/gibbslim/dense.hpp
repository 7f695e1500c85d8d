#pragma once

// Small expression-friendly helpers on dense Eigen types.

#include <bit>
#include <cstdint>
#include <numeric>
#include <vector>

#include "gibbslim/errors.hpp"
#include "gibbslim/types.hpp"

namespace gibbslim {

inline Real factorial(int n) {
  Real f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = decltype(typename DerivedA::Scalar() * typename DerivedB::Scalar());
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                            a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Ryser formula with Gray-code subset updates, O(2^n n).
template <typename Derived>
typename Derived::Scalar permanent(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const Index n = a.rows();
  if (a.cols() != n) throw BadDims("permanent needs a square matrix");
  if (n == 0) return Scalar(1);
  if (n > 24) throw OrderTooLarge("permanent limited to order 24");
  Eigen::Vector<Scalar, Eigen::Dynamic> rowsum =
      Eigen::Vector<Scalar, Eigen::Dynamic>::Zero(n);
  Scalar total(0);
  std::uint32_t prev = 0;
  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1u);
  for (std::uint32_t g = 1; g <= full; ++g) {
    const std::uint32_t gray = g ^ (g >> 1);
    const std::uint32_t diff = gray ^ prev;
    const int j = std::countr_zero(diff);
    if (gray & diff)
      rowsum += a.col(j);
    else
      rowsum -= a.col(j);
    prev = gray;
    Scalar prod(1);
    for (Index i = 0; i < n; ++i) prod *= rowsum(i);
    const int popcount = std::popcount(gray);
    total += ((n - popcount) % 2 == 0) ? prod : -prod;
  }
  return total;
}

template <typename Derived>
RealVector singular_values(const Eigen::MatrixBase<Derived>& a) {
  Eigen::JacobiSVD<Matrix> svd(a.template cast<Complex>());
  return svd.singularValues();
}

template <typename DerivedA, typename DerivedB>
Real schatten_distance(const Eigen::MatrixBase<DerivedA>& a,
                       const Eigen::MatrixBase<DerivedB>& b, Real p) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw BadDims("schatten_distance needs equal shapes");
  if (p < 1) throw ConfigError("schatten order must satisfy p >= 1");
  RealVector s = singular_values(a.template cast<Complex>() - b.template cast<Complex>());
  if (p == 1) return s.sum();
  Real acc = 0;
  for (Index i = 0; i < s.size(); ++i) acc += std::pow(s(i), p);
  return std::pow(acc, 1.0 / p);
}

// Partial trace over the complement of `keep`, for a matrix on a tensor
// product with the given factor dimensions (slot 0 is the leftmost factor).
inline Matrix partial_trace_core(const Matrix& rho, const std::vector<Index>& dims,
                                 std::vector<int> keep) {
  const int n = static_cast<int>(dims.size());
  Index total = 1;
  for (Index d : dims) {
    if (d < 1) throw BadDims("factor dimensions must be positive");
    total *= d;
  }
  if (rho.rows() != total || rho.cols() != total)
    throw BadDims("matrix size does not match factor dimensions");
  std::sort(keep.begin(), keep.end());
  if (std::unique(keep.begin(), keep.end()) != keep.end())
    throw BadDims("duplicate subsystem index");
  for (int q : keep)
    if (q < 0 || q >= n) throw BadDims("subsystem index out of range");

  std::vector<Index> stride(n);
  Index s = 1;
  for (int q = n - 1; q >= 0; --q) {
    stride[q] = s;
    s *= dims[q];
  }
  std::vector<int> traced;
  for (int q = 0; q < n; ++q)
    if (!std::binary_search(keep.begin(), keep.end(), q)) traced.push_back(q);

  auto offsets = [&](const std::vector<int>& slots) {
    Index count = 1;
    for (int q : slots) count *= dims[q];
    std::vector<Index> off(count, 0);
    Index rep = 1;
    for (int qi = static_cast<int>(slots.size()) - 1; qi >= 0; --qi) {
      const int q = slots[qi];
      for (Index t = 0; t < count; ++t) off[t] += ((t / rep) % dims[q]) * stride[q];
      rep *= dims[q];
    }
    return off;
  };
  const std::vector<Index> keep_off = offsets(keep);
  const std::vector<Index> traced_off = offsets(traced);

  const Index dk = static_cast<Index>(keep_off.size());
  Matrix out = Matrix::Zero(dk, dk);
  for (Index a = 0; a < dk; ++a)
    for (Index b = 0; b < dk; ++b) {
      Complex acc(0);
      for (Index t : traced_off) acc += rho(keep_off[a] + t, keep_off[b] + t);
      out(a, b) = acc;
    }
  return out;
}

}  // namespace gibbslim
