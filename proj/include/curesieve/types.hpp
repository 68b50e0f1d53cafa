#pragma once

#include <Eigen/Core>

namespace curesieve {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace curesieve
