#pragma once

#include <Eigen/Core>
#include <vector>

#include "srivc/hold.hpp"
#include "srivc/state_space.hpp"

namespace srivc {

/// Applies the continuous-time filter to a sampled signal under the given
/// hold, zero initial conditions: simulate(c2d(tf_to_ss(tf), T, hold), u, 0).
Eigen::VectorXd filter_ct(const TransferFunction& tf, const Eigen::VectorXd& u,
                          double T, Hold hold);

/// filter_ct for a bank of filters sharing one denominator, realized through
/// a single shared-state system. Row i of the result equals
/// filter_ct(tfs[i], u, T, hold) to machine precision.
Eigen::MatrixXd filter_bank(const std::vector<TransferFunction>& tfs,
                            const Eigen::VectorXd& u, double T, Hold hold);

}  // namespace srivc
