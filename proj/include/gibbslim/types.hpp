#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace gibbslim {

using Real = double;
using Complex = std::complex<Real>;
using Index = Eigen::Index;

using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using SparseC = Eigen::SparseMatrix<Complex>;
using SparseR = Eigen::SparseMatrix<Real>;

}  // namespace gibbslim
