#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>

namespace hnlab {

/// out = A * in, column by column, for a Hermitian positive semidefinite A.
using BlockOperator = std::function<void(const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out)>;

struct EigenPairs {
    Eigen::VectorXd values;   ///< ascending
    Eigen::MatrixXcd vectors; ///< orthonormal columns (Euclidean)
    Eigen::VectorXd residuals;
    int passes = 0;
    bool converged = false;
};

struct SubspaceOptions {
    int degree = 24;          ///< Chebyshev filter degree per pass
    int max_passes = 400;
    double tol = 1e-13;       ///< residual target relative to upper_bound
    int guard = 4;            ///< block size is 2k + guard
    std::uint64_t seed = 0x5eed;
};

/// Lowest k eigenpairs of a PSD operator with spectrum in [0, upper_bound],
/// by Chebyshev-filtered subspace iteration.
EigenPairs lowest_eigenpairs(const BlockOperator& op, Eigen::Index dim, int k, double upper_bound,
                             const SubspaceOptions& opts = {});

} // namespace hnlab
