#pragma once

#include <Eigen/Dense>

#include "cflow/state.hpp"

namespace cflow {

/// Dense truncations of the second-variation operators L+ and L- together with
/// the diagonal weight M = diag(n+1), about a reference state.
struct OperatorPair {
    Eigen::MatrixXd Lplus;
    Eigen::MatrixXd Lminus;
    Eigen::VectorXd M;
    ReferenceState about;

    Index size() const noexcept { return M.size(); }
};

}  // namespace cflow
