#pragma once

#include <Eigen/Dense>

namespace lapbp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

} // namespace lapbp
