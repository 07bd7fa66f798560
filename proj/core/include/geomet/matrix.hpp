#pragma once

#include <Eigen/Dense>

namespace geomet {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace geomet
