#pragma once

#include <Eigen/Dense>

namespace sgf {

// n x F node signal, row-major so that one node's features are contiguous.
using SignalMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace sgf
