#pragma once

#include <Eigen/Dense>

namespace jcpot {

// Dense double-precision storage used throughout. Point sets are stored one
// point per row.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace jcpot
