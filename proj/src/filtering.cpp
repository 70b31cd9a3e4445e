#include "srivc/filtering.hpp"

namespace srivc {

Eigen::VectorXd filter_ct(const TransferFunction& tf, const Eigen::VectorXd& u,
                          double T, Hold hold) {
    const StateSpace ss_d = c2d(tf_to_ss(tf), T, hold);
    return simulate(ss_d, u).row(0);
}

Eigen::MatrixXd filter_bank(const std::vector<TransferFunction>& tfs,
                            const Eigen::VectorXd& u, double T, Hold hold) {
    const StateSpace ss_d = c2d(stack_shared_den(tfs), T, hold);
    return simulate(ss_d, u);
}

}  // namespace srivc
