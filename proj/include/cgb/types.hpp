#pragma once

#include <Eigen/Dense>

namespace cgb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntMatrix = Eigen::MatrixXi;

}  // namespace cgb
