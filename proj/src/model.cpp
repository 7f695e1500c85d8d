#include "gibbslim/model.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace gibbslim::model {

void GridSpec::validate() const {
  if (points < 3) throw ConfigError("grid needs at least 3 points");
  if (!(half_width > 0)) throw ConfigError("grid half_width must be positive");
  if (!(exponent_a > 0)) throw ConfigError("grid exponent_a must be positive");
}

RealVector GridSpec::abscissae() const {
  const Real h = spacing();
  RealVector x(points);
  for (int m = 0; m < points; ++m) x(m) = -half_width + (m + 1) * h;
  return x;
}

void SpectralModel::validate() const {
  const int K = modes();
  if (K < 1) throw ConfigError("model needs at least one mode");
  if (!(eigenvalues(0) > 0))
    throw NonPositiveOperator("smallest eigenvalue must be positive");
  for (int j = 1; j < K; ++j)
    if (eigenvalues(j) < eigenvalues(j - 1))
      throw ConfigError("eigenvalues must be sorted ascending");
  if (has_eigenfunctions()) {
    if (!grid) throw ConfigError("eigenfunctions require a grid");
    if (eigenfunctions.rows() != grid->points || eigenfunctions.cols() != K)
      throw BadDims("eigenfunction array shape mismatch");
    const Real h = grid->spacing();
    RealMatrix gram = eigenfunctions.transpose() * eigenfunctions * h;
    gram -= RealMatrix::Identity(K, K);
    if (gram.cwiseAbs().maxCoeff() > 1e-8)
      throw NumericalError("eigenfunctions not quadrature-orthonormal");
  }
}

void TwoBodyOperator::validate(Real herm_tol, Real psd_tol) const {
  const Index d = Index(modes) * modes;
  if (matrix.rows() != d || matrix.cols() != d)
    throw BadDims("two-body matrix must be K^2 x K^2");
  const Real scale = std::max<Real>(1, matrix.cwiseAbs().maxCoeff());
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > herm_tol * scale)
    throw NonHermitian("two-body operator is not Hermitian");
  for (int i = 0; i < modes; ++i)
    for (int j = 0; j < modes; ++j)
      for (int k = 0; k < modes; ++k)
        for (int l = 0; l < modes; ++l) {
          const Complex a = matrix(pair(i, j), pair(k, l));
          const Complex b = matrix(pair(j, i), pair(l, k));
          if (std::abs(a - b) > herm_tol * scale)
            throw NumericalError("two-body operator is not exchange-symmetric");
        }
  Eigen::SelfAdjointEigenSolver<Matrix> es(matrix, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -psd_tol * scale)
    throw NotPositive("two-body operator has a negative eigenvalue");
}

namespace {

// all eigenvalues of the Dirichlet discretization, ascending
std::pair<RealVector, RealMatrix> tridiag_solve(const GridSpec& g, Real nu,
                                                bool want_vectors) {
  const Real h = g.spacing();
  const RealVector x = g.abscissae();
  RealVector diag(g.points);
  for (int m = 0; m < g.points; ++m)
    diag(m) = 2.0 / (h * h) + std::pow(std::abs(x(m)), g.exponent_a) - nu;
  const RealVector off = RealVector::Constant(g.points - 1, -1.0 / (h * h));
  Eigen::SelfAdjointEigenSolver<RealMatrix> es;
  es.computeFromTridiagonal(diag, off,
                            want_vectors ? Eigen::ComputeEigenvectors
                                         : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("tridiagonal eigensolver failed");
  return {es.eigenvalues(), want_vectors ? es.eigenvectors() : RealMatrix()};
}

}  // namespace

SpectralModel solve_onebody_spectrum(const GridSpec& grid, Real nu, int K, Real tol) {
  grid.validate();
  if (K < 1) throw ConfigError("need K >= 1 modes");
  if (K >= grid.points) throw ConfigError("need K < grid points");

  auto [evals, evecs] = tridiag_solve(grid, nu, true);
  if (!(evals(0) > 0))
    throw NonPositiveOperator("one-body operator not positive; reduce nu");

  if (tol > 0) {
    GridSpec half = grid;
    half.points = grid.points / 2;
    if (half.points < std::max(3, K + 1))
      throw DiscretizationTooCoarse("grid too small for a half-resolution check");
    auto [hvals, hv] = tridiag_solve(half, nu, false);
    Real est = 0;  // second-order scheme: fine-grid error ~ (fine - half)/3
    for (int j = 0; j < K; ++j)
      est = std::max(est, std::abs(evals(j) - hvals(j)) / 3.0);
    if (est > tol)
      throw DiscretizationTooCoarse("estimated eigenvalue error " +
                                    std::to_string(est) + " exceeds tolerance");
  }

  SpectralModel m;
  m.grid = grid;
  m.nu = nu;
  m.eigenvalues = evals.head(K);
  const Real h = grid.spacing();
  m.eigenfunctions = evecs.leftCols(K) / std::sqrt(h);
  for (int j = 0; j < K; ++j) {  // fix the sign deterministically
    Index imax = 0;
    m.eigenfunctions.col(j).cwiseAbs().maxCoeff(&imax);
    if (m.eigenfunctions(imax, j) < 0) m.eigenfunctions.col(j) *= -1.0;
  }
  m.validate();
  return m;
}

Real trace_inverse_power(const SpectralModel& m, Real p) {
  if (!(p > 0)) throw ConfigError("need p > 0");
  Real acc = 0;
  for (int j = 0; j < m.modes(); ++j) acc += std::pow(m.eigenvalues(j), -p);
  return acc;
}

TwoBodyOperator build_finite_rank_interaction(const std::vector<Vector>& vectors,
                                              const RealVector& weights) {
  if (static_cast<Index>(vectors.size()) != weights.size())
    throw BadDims("one weight per vector required");
  if (vectors.empty()) throw BadDims("need at least one vector");
  const int K = static_cast<int>(vectors[0].size());
  TwoBodyOperator w;
  w.modes = K;
  w.matrix = Matrix::Zero(Index(K) * K, Index(K) * K);
  for (size_t t = 0; t < vectors.size(); ++t) {
    if (static_cast<int>(vectors[t].size()) != K)
      throw BadDims("all vectors must have the same length");
    if (weights(t) < 0) throw NegativeWeight("interaction weights must be >= 0");
    Vector v(Index(K) * K);
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < K; ++j) v(w.pair(i, j)) = vectors[t](i) * vectors[t](j);
    w.matrix.noalias() += weights(t) * v * v.adjoint();
  }
  w.matrix = Matrix(0.5 * (w.matrix + w.matrix.adjoint()));
  w.validate();
  return w;
}

TwoBodyOperator project_multiplication_kernel(const SpectralModel& m,
                                              const RealVector& kernel_samples) {
  if (!m.has_eigenfunctions())
    throw ConfigError("kernel projection requires grid eigenfunctions");
  const int P = m.grid->points;
  const int K = m.modes();
  if (kernel_samples.size() != 2 * Index(P) - 1)
    throw BadDims("kernel needs 2*points-1 samples of w(x-y)");
  const Real h = m.grid->spacing();
  const RealMatrix& u = m.eigenfunctions;

  // A(i,k)(x) = u_i(x) u_k(x); B(j,l)(x) = sum_y w(x-y) A(j,l)(y)
  std::vector<RealVector> prod(Index(K) * K);
  std::vector<RealVector> conv(Index(K) * K);
  for (int i = 0; i < K; ++i)
    for (int k = 0; k < K; ++k)
      prod[Index(i) * K + k] = u.col(i).cwiseProduct(u.col(k));
  for (int j = 0; j < K; ++j)
    for (int l = 0; l < K; ++l) {
      RealVector b(P);
      const RealVector& a = prod[Index(j) * K + l];
      for (int x = 0; x < P; ++x) {
        Real acc = 0;
        for (int y = 0; y < P; ++y) acc += kernel_samples(x - y + P - 1) * a(y);
        b(x) = acc;
      }
      conv[Index(j) * K + l] = b;
    }

  TwoBodyOperator w;
  w.modes = K;
  w.matrix = Matrix::Zero(Index(K) * K, Index(K) * K);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j)
      for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l)
          w.matrix(w.pair(i, j), w.pair(k, l)) =
              h * h * prod[Index(i) * K + k].dot(conv[Index(j) * K + l]);
  w.matrix = Matrix(0.5 * (w.matrix + w.matrix.adjoint()));
  for (int i = 0; i < K; ++i)  // exchange symmetrization
    for (int j = 0; j < i; ++j)
      for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l) {
          const Complex mean =
              0.5 * (w.matrix(w.pair(i, j), w.pair(k, l)) +
                     w.matrix(w.pair(j, i), w.pair(l, k)));
          w.matrix(w.pair(i, j), w.pair(k, l)) = mean;
          w.matrix(w.pair(j, i), w.pair(l, k)) = mean;
        }
  w.validate();  // NotPositive when the kernel breaks positivity
  return w;
}

AssumptionReport verify_assumptions(const SpectralModel& m, const TwoBodyOperator& w,
                                    Real p, Real p_prime) {
  if (!(p > 0) || !(p_prime > p)) throw ConfigError("need p' > p > 0");
  if (w.modes != m.modes()) throw BadDims("mode count mismatch");
  AssumptionReport rep;
  rep.p = p;
  rep.p_prime = p_prime;
  rep.trace_h_inv_p = trace_inverse_power(m, p);
  const int K = m.modes();
  Real tr = 0;
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j)
      tr += std::real(w.matrix(w.pair(i, j), w.pair(i, j))) /
            (m.eigenvalues(i) * m.eigenvalues(j));
  rep.w_weighted_trace = tr;
  Matrix dom = -w.matrix;
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j)
      dom(w.pair(i, j), w.pair(i, j)) += std::pow(m.eigenvalues(i), 1 - p_prime) *
                                         std::pow(m.eigenvalues(j), 1 - p_prime);
  Eigen::SelfAdjointEigenSolver<Matrix> es(dom, Eigen::EigenvaluesOnly);
  rep.dominated = es.eigenvalues()(0) >= -1e-10;
  return rep;
}

}  // namespace gibbslim::model
