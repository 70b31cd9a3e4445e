#pragma once

#include <Eigen/Core>

#include "srivc/estimator.hpp"

namespace srivc {

// Simulation-only estimator variant that treats the noise-free output as a
// continuous-time signal. Requires the true system and the noise sequence
// separately, so it cannot run on measured data; it exists to check the
// converging-point equivalence with the practical estimator.

/// Regressor rows in theta order. The first n rows are
/// -[p^i B_sys / (A_j A_sys)] u  -  [p^i / A_j] e (the continuous-time reading
/// of -p^i y / A_j with y = x + e), the noise-free part as one composite
/// filter of u under input_hold, the noise part under ZOH; the last m+1 rows
/// are [p^i / A_j] u under input_hold.
Eigen::MatrixXd theoretical_regressor(const Eigen::VectorXd& u, const Eigen::VectorXd& e,
                                      const ThetaVector& theta_sys,
                                      const ThetaVector& theta_j, double T,
                                      Hold input_hold);

/// [1/(A_j) * B_sys/A_sys] u (composite, input_hold) + [1/A_j] e (ZOH).
Eigen::VectorXd theoretical_output(const Eigen::VectorXd& u, const Eigen::VectorXd& e,
                                   const ThetaVector& theta_sys,
                                   const ThetaVector& theta_j, double T,
                                   Hold input_hold);

/// Iterates the theoretical estimator (practical instrument, theoretical
/// regressor and output) under cfg's stopping rule.
SrivcEstimate theoretical_srivc_estimate(const Eigen::VectorXd& u,
                                         const Eigen::VectorXd& e,
                                         const ThetaVector& theta_sys,
                                         const SrivcConfig& cfg);

}  // namespace srivc
