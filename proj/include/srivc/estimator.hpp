#pragma once

#include <Eigen/Core>
#include <limits>
#include <vector>

#include "srivc/errors.hpp"
#include "srivc/filtering.hpp"
#include "srivc/transfer_function.hpp"

namespace srivc {

/// Sampled input-output record with uniform sampling period T.
struct DataRecord {
    Eigen::VectorXd u;
    Eigen::VectorXd y;
    double T = 0.0;

    long samples() const { return u.size(); }
    void validate() const;  // equal lengths, T > 0
};

struct SrivcConfig {
    int max_iter = 200;
    double epsilon = 1e-12;        // relative-error stop threshold
    Hold input_hold = Hold::Zoh;   // hold on u in the regressor
    Hold output_hold = Hold::Zoh;  // hold assumed on y for regressor filtering
    // Hold on u inside the instrument; set different from input_hold to
    // reproduce the inefficient mismatched estimator.
    Hold instrument_input_hold = Hold::Zoh;
    ThetaVector theta_init;
    double T = 0.0;  // 0 = take from the data record
    // Guard on the condition number of the normal matrix.
    double condition_limit = 1.0 / (100.0 * std::numeric_limits<double>::epsilon());

    void validate() const;  // max_iter >= 1, epsilon > 0, Hurwitz init
};

struct SrivcEstimate {
    ThetaVector theta;
    bool converged = false;
    int iterations = 0;
    std::vector<double> relative_errors;    // one per iteration
    std::vector<double> condition_numbers;  // of the normal matrix, per iteration
    int stabilized_iterations = 0;          // unstable iterates reflected back
};

/// y_f = (1/A_j) y under the output hold. A_j must be Hurwitz.
Eigen::VectorXd prefilter_output(const Eigen::VectorXd& y, const Polynomial& a_j,
                                 double T, Hold output_hold);

/// Filtered regressor, rows in theta order:
/// [-p^n y, ..., -p y, p^m u, ..., u], all divided by A_j(p). The y rows use
/// cfg.output_hold, the u rows cfg.input_hold.
Eigen::MatrixXd build_regressor(const DataRecord& data, const ThetaVector& theta_j,
                                const SrivcConfig& cfg);

/// Filtered instrument, rows in theta order:
/// [-p^n B_j/A_j^2 u, ..., -p B_j/A_j^2 u, p^m/A_j u, ..., 1/A_j u], each row
/// one composite filter of u under cfg.instrument_input_hold (never a cascade
/// of two separately discretized passes).
Eigen::MatrixXd build_instrument(const DataRecord& data, const ThetaVector& theta_j,
                                 const SrivcConfig& cfg);

/// Instrument built directly from an input sequence (the instrument never
/// touches y).
Eigen::MatrixXd build_instrument_u(const Eigen::VectorXd& u, double T,
                                   const ThetaVector& theta_j, const SrivcConfig& cfg);

struct SrivcStep {
    ThetaVector theta;
    double condition_number = 0.0;
};

/// One iteration of the normal equations. Throws SingularNormalMatrix when
/// the condition guard trips and NonHurwitzIterate when the new denominator
/// is unstable.
SrivcStep srivc_step(const DataRecord& data, const ThetaVector& theta_j,
                     const SrivcConfig& cfg);

/// Full iteration with the relative-error stopping rule. Unstable iterates
/// are stabilized by reflecting the offending roots across the imaginary
/// axis; exhausting max_iter is reported through converged = false, not an
/// error.
SrivcEstimate srivc_estimate(const DataRecord& data, const SrivcConfig& cfg);

/// Converging-point residual r = (1/N) sum_k instr(t_k) (y(t_k) - [B/A u](t_k)).
/// The model output uses cfg.input_hold on u; y enters unfiltered, so the
/// residual does not depend on any output hold.
Eigen::VectorXd verify_converging_point(const DataRecord& data,
                                        const ThetaVector& theta_bar,
                                        const SrivcConfig& cfg);

namespace detail {
struct RawStep {
    Eigen::VectorXd theta;
    double condition_number;
};
RawStep srivc_step_raw(const DataRecord& data, const ThetaVector& theta_j,
                       const SrivcConfig& cfg);
/// Reflects right-half-plane roots of A across the imaginary axis and
/// rebuilds with unit constant term.
Polynomial stabilize_denominator(const Polynomial& a, bool* changed);
}  // namespace detail

}  // namespace srivc
