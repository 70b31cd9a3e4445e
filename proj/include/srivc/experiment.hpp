#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "srivc/covariance.hpp"
#include "srivc/estimator.hpp"

namespace srivc {

/// Counter-keyed deterministic random stream: the (seed, trial, role) key
/// fully determines the sequence, so worker count and scheduling never
/// affect results.
class RngStream {
public:
    enum Role : std::uint64_t { kInput = 1, kNoise = 2 };

    RngStream(std::uint64_t seed, std::uint64_t trial, std::uint64_t role);

    std::uint64_t next_u64();
    double uniform();  // [0, 1)
    double normal();   // standard normal, Box-Muller

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct ExperimentConfig {
    ThetaVector theta_sys;
    double T = 0.0;
    std::vector<long> sample_sizes;  // one entry for mc, several for sweep
    int runs = 1;
    double lambda = 1.0;          // output noise variance (0 allowed: noise-free)
    double input_variance = 1.0;  // must be positive
    Hold input_hold = Hold::Zoh;
    SrivcConfig srivc;
    std::uint64_t seed = 1;
    int parallelism = 0;  // 0 = auto
    // Extra leading samples generated and discarded before estimation. The
    // default keeps the zero-state transient: its bias is O(states/N) at the
    // studied sample sizes.
    long warmup = 0;

    void validate() const;
};

struct McResult {
    CovarianceReport empirical_cov;     // kind Empirical, with standard errors
    Eigen::MatrixXd per_run_estimates;  // runs x (n+m+1); NaN rows for failures
    std::vector<bool> run_converged;
    double convergence_rate = 0.0;
    int failed_runs = 0;
    std::vector<std::string> failure_reasons;  // one entry per failed run
    long sample_size = 0;
};

/// i.i.d. Gaussian input samples of the given variance.
Eigen::VectorXd generate_input(long N, double variance, RngStream& stream);

/// y = [B/A u] under input_hold plus i.i.d. Gaussian(0, lambda) noise from an
/// independent stream.
DataRecord simulate_system(const Eigen::VectorXd& u, const ThetaVector& theta_sys,
                           double lambda, double T, Hold input_hold,
                           RngStream& noise_stream);

/// Monte Carlo study at cfg.sample_sizes.front(): independent trials, each
/// with fresh (u, e) streams keyed by (seed, trial); the empirical normalized
/// covariance (N/R) sum (th - th*)(th - th*)^T over converged runs, with
/// entrywise standard errors of the mean. Deterministic in cfg regardless of
/// worker count.
McResult run_experiment(const ExperimentConfig& cfg);

/// run_experiment once per entry of cfg.sample_sizes.
std::vector<McResult> sweep_sample_size(const ExperimentConfig& cfg);

struct ExcitationReport {
    bool persistently_exciting = false;
    int rank = 0;
    Eigen::VectorXd eigenvalues;  // of the Toeplitz autocovariance matrix
};

/// Rank test (relative eigenvalue threshold 1e-8) on the order-by-order
/// Toeplitz autocovariance matrix of u.
ExcitationReport check_excitation(const Eigen::VectorXd& u, int order);

}  // namespace srivc
