#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "srivc/hold.hpp"
#include "srivc/transfer_function.hpp"

namespace srivc {

/// State-space realization
///     x' = A x + B u,  y = C x + D u      (continuous, T empty)
///     x+ = A x + B u,  y = C x + D u      (discrete,   T = sample period)
struct StateSpace {
    Eigen::MatrixXd A, B, C, D;
    std::optional<double> T;  // empty = continuous time

    StateSpace(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C,
               Eigen::MatrixXd D, std::optional<double> T = std::nullopt);

    bool discrete() const { return T.has_value(); }
    int states() const { return static_cast<int>(A.rows()); }
    int inputs() const { return static_cast<int>(B.cols()); }
    int outputs() const { return static_cast<int>(C.rows()); }
};

/// Controllable-canonical continuous-time realization. Biproper inputs get a
/// nonzero D via polynomial long division; a zero-order tf becomes a pure
/// gain with no state.
StateSpace tf_to_ss(const TransferFunction& tf);

/// One realization for several proper transfer functions that share the same
/// denominator polynomial exactly: common (A, B), one (C, D) row per filter.
StateSpace stack_shared_den(const std::vector<TransferFunction>& tfs);

/// Exact sampled equivalent under the given hold. ZOH uses the matrix
/// exponential of the augmented [A B; 0 0] block; FOH the triple-block
/// variant for piecewise-linear input reconstruction.
StateSpace c2d(const StateSpace& ss, double T, Hold hold);

/// Runs a discrete system from initial state x0 (zero when omitted);
/// returns outputs-by-samples.
Eigen::MatrixXd simulate(const StateSpace& ss_d, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& x0 = Eigen::VectorXd());

}  // namespace srivc
