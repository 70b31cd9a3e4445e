#pragma once

#include <optional>
#include <string>
#include <vector>

#include "srivc/experiment.hpp"

namespace srivc {

/// CSV with header `t,u,y`, time in seconds, 17 significant digits.
void save_data_csv(const DataRecord& data, const std::string& path);

/// Parses the `t,u,y` format; the sampling period is recovered from the time
/// column and checked for uniformity. Malformed rows are reported by number.
DataRecord load_data_csv(const std::string& path);

/// JSON experiment configuration (schema documented in the README).
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

/// `runs_vs_cov.csv`: empirical covariance entries (value, standard error)
/// over a growing prefix of runs; header runs,row,col,value,stderr.
void write_runs_vs_cov_csv(const McResult& result, const ThetaVector& theta_sys,
                           const std::string& path);

/// `variance_vs_N.csv`: header N,parameter_index,empirical_variance,
/// crlb_variance,variant. One block per sweep point per variant.
struct SweepVariant {
    std::string name;
    std::vector<McResult> results;
};
void write_variance_vs_n_csv(const std::vector<SweepVariant>& variants,
                             const std::vector<long>& sample_sizes,
                             const Eigen::VectorXd& crlb_diagonal,
                             const std::string& path);

/// Metadata sidecar echoing the full config (round-trips through
/// parse_config).
void write_config_sidecar(const ExperimentConfig& cfg, const std::string& path);

/// Estimation report: theta, convergence diagnostics and the converging-point
/// residual norm, as JSON.
void write_estimate_report(const SrivcEstimate& estimate, double residual_norm,
                           double residual_bound, const std::string& path);

/// Canned experiment configurations of the two simulation studies.
/// sim 1: first-order system, covariance versus MC run count.
/// sim 2: second-order system, variance versus sample size, matched and
/// FOH-instrument variants.
ExperimentConfig repro_config(int sim, const std::string& scale);

/// Runs a full reproduction and writes its CSV artifacts into out_dir.
/// Returns the list of files written.
std::vector<std::string> run_repro(int sim, const std::string& scale,
                                   std::optional<std::uint64_t> seed_override,
                                   const std::string& out_dir);

}  // namespace srivc
