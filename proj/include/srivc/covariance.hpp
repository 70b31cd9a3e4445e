#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "srivc/state_space.hpp"
#include "srivc/transfer_function.hpp"

namespace srivc {

enum class CovKind {
    Crlb,             // asymptotic Cramer-Rao lower bound
    SrivcAnalytic,    // matched-hold asymptotic covariance (equals the CRLB)
    SrivcMismatched,  // sandwich covariance, instrument hold != input hold
    LiteratureCrlb,   // the literature's hold-on-sampled-output variant
    Empirical         // Monte Carlo estimate
};

const char* to_string(CovKind kind);

/// Symmetric PSD covariance matrix with provenance.
struct CovarianceReport {
    Eigen::MatrixXd matrix;
    CovKind kind = CovKind::Crlb;
    double lambda = 0.0;          // noise variance
    double T = 0.0;
    double input_variance = 0.0;
    Hold input_hold = Hold::Zoh;
    // Second hold when one applies: instrument hold for SrivcMismatched,
    // assumed output hold for LiteratureCrlb.
    std::optional<Hold> second_hold;
    // Entrywise standard errors (Empirical only).
    std::optional<Eigen::MatrixXd> standard_errors;

    int dim() const { return static_cast<int>(matrix.rows()); }
    void validate() const;  // symmetry within 1e-10 relative, eigmin >= -1e-10 trace
};

/// The n+m+1 sensitivity filters of the information matrix, in theta order:
/// [-p^i B/A^2] (i = n..1, shared denominator A^2) then [p^i/A] (i = m..0,
/// shared denominator A), realized as one stacked discrete system driven by
/// the input under input_hold.
struct SensitivityBank {
    std::vector<TransferFunction> filters;
    double T = 0.0;
    Hold input_hold = Hold::Zoh;
    StateSpace realization;  // discrete, outputs = n+m+1
};

SensitivityBank build_sensitivity_bank(const ThetaVector& theta_sys, double T,
                                       Hold input_hold);

/// Stationary E{y y^T} of a Schur-stable discrete system driven by white
/// noise of the given variance: solve A P A^T + B s2 B^T = P, return
/// C P C^T + D s2 D^T.
Eigen::MatrixXd stationary_second_moment(const StateSpace& ss_d, double input_variance);

/// lambda * E{psi psi^T}^{-1} with psi the sensitivity bank above. Depends on
/// the input hold only; no output hold enters anywhere. The analytic path
/// requires a white stationary input of the given variance.
CovarianceReport crlb_asymptotic(const ThetaVector& theta_sys, double lambda, double T,
                                 Hold input_hold, double input_variance);

/// Time-average fallback for inputs that are stationary but not white: the
/// information matrix is the sample average of psi psi^T over the supplied
/// input realization (use ~1e7 samples). Standard errors of the moment
/// entries are estimated by batch means and propagated to the inverse at
/// first order.
CovarianceReport crlb_time_average(const ThetaVector& theta_sys, double lambda, double T,
                                   Hold input_hold, const Eigen::VectorXd& u);

/// Asymptotic covariance of the estimator. Matched holds give the analytic
/// form identical to the CRLB; mismatched holds give the full sandwich
/// lambda E{hi tr^T}^{-1} E{hi hi^T} E{tr hi^T}^{-1}, computed from one joint
/// realization driven by the same white input under both holds.
CovarianceReport srivc_asymptotic_cov(const ThetaVector& theta_sys, double lambda,
                                      double T, Hold regressor_input_hold,
                                      Hold instrument_input_hold,
                                      double input_variance);

/// The literature's bound: the noise-free output is first produced as a
/// sampled signal, then re-interpolated with output_hold_assumption before
/// the derivative filters are applied (a two-stage cascade by construction).
CovarianceReport literature_crlb(const ThetaVector& theta_sys, double lambda, double T,
                                 Hold input_hold, Hold output_hold_assumption,
                                 double input_variance);

/// Matrix CSV plus a `<path>.meta.json` sidecar carrying kind, lambda, T,
/// holds and input variance.
void save_report_csv(const CovarianceReport& report, const std::string& csv_path);

}  // namespace srivc
