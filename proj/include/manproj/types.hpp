#pragma once

#include <Eigen/Dense>

namespace manproj {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
// Row-major storage so a point's coordinates are contiguous in memory, as the
// low-level kernels expect.
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

} // namespace manproj
