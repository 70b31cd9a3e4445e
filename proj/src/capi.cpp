#include "srivc/srivc.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>

#include "srivc/io.hpp"

namespace {

thread_local std::string g_last_error;

srivc_status fail(srivc_status code, const char* what) {
    g_last_error = what ? what : "unknown error";
    return code;
}

template <typename Fn>
srivc_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const srivc::SingularNormalMatrix& ex) {
        return fail(SRIVC_ERR_SINGULAR, ex.what());
    } catch (const srivc::NonHurwitzIterate& ex) {
        return fail(SRIVC_ERR_NOT_HURWITZ, ex.what());
    } catch (const std::invalid_argument& ex) {
        return fail(SRIVC_ERR_INVALID_ARGUMENT, ex.what());
    } catch (const std::exception& ex) {
        return fail(SRIVC_ERR_INTERNAL, ex.what());
    } catch (...) {
        return fail(SRIVC_ERR_INTERNAL, "unknown exception");
    }
}

srivc::Hold to_hold(srivc_hold h) {
    return h == SRIVC_HOLD_FOH ? srivc::Hold::Foh : srivc::Hold::Zoh;
}

}  // namespace

struct srivc_config {
    srivc::ExperimentConfig cfg;
};

struct srivc_estimate {
    srivc::SrivcEstimate estimate;
    double residual_norm = 0.0;
    double residual_bound = 0.0;
};

struct srivc_report {
    srivc::CovarianceReport report;
};

struct srivc_mc_result {
    srivc::McResult result;
    srivc::ThetaVector theta_sys;
};

extern "C" {

const char* srivc_last_error(void) { return g_last_error.c_str(); }

const char* srivc_version(void) { return "1.0.0"; }

srivc_status srivc_config_load(const char* path, srivc_config** out) {
    if (!path || !out) return fail(SRIVC_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() {
        auto handle = new srivc_config{srivc::load_config(path)};
        *out = handle;
        return SRIVC_OK;
    });
}

srivc_status srivc_config_parse(const char* json_text, srivc_config** out) {
    if (!json_text || !out) return fail(SRIVC_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() {
        auto handle = new srivc_config{srivc::parse_config(json_text)};
        *out = handle;
        return SRIVC_OK;
    });
}

void srivc_config_free(srivc_config* cfg) { delete cfg; }

srivc_status srivc_config_set_seed(srivc_config* cfg, uint64_t seed) {
    if (!cfg) return fail(SRIVC_ERR_INVALID_ARGUMENT, "null config");
    cfg->cfg.seed = seed;
    return SRIVC_OK;
}

int srivc_config_param_count(const srivc_config* cfg) {
    return cfg ? cfg->cfg.theta_sys.size() : 0;
}

srivc_status srivc_estimate_csv(const srivc_config* cfg, const char* data_csv_path,
                                srivc_estimate** out) {
    if (!cfg || !data_csv_path || !out)
        return fail(SRIVC_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() {
        srivc::DataRecord data;
        try {
            data = srivc::load_data_csv(data_csv_path);
        } catch (const std::exception& ex) {
            return fail(SRIVC_ERR_PARSE, ex.what());
        }
        srivc::SrivcConfig scfg = cfg->cfg.srivc;
        scfg.T = 0.0;  // take the period from the data file
        auto handle = std::make_unique<srivc_estimate>();
        handle->estimate = srivc::srivc_estimate(data, scfg);
        handle->residual_norm =
            srivc::verify_converging_point(data, handle->estimate.theta, scfg).norm();
        handle->residual_bound =
            1e-8 * data.y.norm() / std::sqrt(static_cast<double>(data.samples()));
        *out = handle.release();
        return SRIVC_OK;
    });
}

int srivc_estimate_converged(const srivc_estimate* est) {
    return est && est->estimate.converged ? 1 : 0;
}

int srivc_estimate_iterations(const srivc_estimate* est) {
    return est ? est->estimate.iterations : 0;
}

int srivc_estimate_param_count(const srivc_estimate* est) {
    return est ? est->estimate.theta.size() : 0;
}

srivc_status srivc_estimate_theta(const srivc_estimate* est, double* buf, int len) {
    if (!est || !buf) return fail(SRIVC_ERR_INVALID_ARGUMENT, "null argument");
    const Eigen::VectorXd v = est->estimate.theta.stacked();
    if (len < v.size()) return fail(SRIVC_ERR_INVALID_ARGUMENT, "buffer too small");
    std::memcpy(buf, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
    return SRIVC_OK;
}

double srivc_estimate_residual_norm(const srivc_estimate* est) {
    return est ? est->residual_norm : 0.0;
}

double srivc_estimate_residual_bound(const srivc_estimate* est) {
    return est ? est->residual_bound : 0.0;
}

srivc_status srivc_estimate_write_report(const srivc_estimate* est, const char* out_dir) {
    if (!est || !out_dir) return fail(SRIVC_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() {
        std::filesystem::create_directories(out_dir);
        const auto path = (std::filesystem::path(out_dir) / "estimate.json").string();
        srivc::write_estimate_report(est->estimate, est->residual_norm, est->residual_bound,
                                     path);
        return SRIVC_OK;
    });
}

void srivc_estimate_free(srivc_estimate* est) { delete est; }

srivc_status srivc_crlb(const srivc_config* cfg, srivc_report** out) {
    if (!cfg || !out) return fail(SRIVC_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() {
        auto handle = new srivc_report{srivc::crlb_asymptotic(
            cfg->cfg.theta_sys, cfg->cfg.lambda, cfg->cfg.T, cfg->cfg.input_hold,
            cfg->cfg.input_variance)};
        *out = handle;
        return SRIVC_OK;
    });
}

srivc_status srivc_literature_crlb(const srivc_config* cfg,
                                   srivc_hold output_hold_assumption, srivc_report** out) {
    if (!cfg || !out) return fail(SRIVC_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() {
        auto handle = new srivc_report{srivc::literature_crlb(
            cfg->cfg.theta_sys, cfg->cfg.lambda, cfg->cfg.T, cfg->cfg.input_hold,
            to_hold(output_hold_assumption), cfg->cfg.input_variance)};
        *out = handle;
        return SRIVC_OK;
    });
}

srivc_status srivc_cov(const srivc_config* cfg, srivc_hold instrument_hold,
                       srivc_report** out) {
    if (!cfg || !out) return fail(SRIVC_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() {
        auto handle = new srivc_report{srivc::srivc_asymptotic_cov(
            cfg->cfg.theta_sys, cfg->cfg.lambda, cfg->cfg.T, cfg->cfg.input_hold,
            to_hold(instrument_hold), cfg->cfg.input_variance)};
        *out = handle;
        return SRIVC_OK;
    });
}

int srivc_report_dim(const srivc_report* report) {
    return report ? report->report.dim() : 0;
}

srivc_status srivc_report_entry(const srivc_report* report, int row, int col, double* out) {
    if (!report || !out) return fail(SRIVC_ERR_INVALID_ARGUMENT, "null argument");
    if (row < 0 || col < 0 || row >= report->report.dim() || col >= report->report.dim())
        return fail(SRIVC_ERR_INVALID_ARGUMENT, "index out of range");
    *out = report->report.matrix(row, col);
    return SRIVC_OK;
}

srivc_status srivc_report_write_csv(const srivc_report* report, const char* csv_path) {
    if (!report || !csv_path) return fail(SRIVC_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() {
        srivc::save_report_csv(report->report, csv_path);
        return SRIVC_OK;
    });
}

void srivc_report_free(srivc_report* report) { delete report; }

srivc_status srivc_mc_run(const srivc_config* cfg, srivc_mc_result** out) {
    if (!cfg || !out) return fail(SRIVC_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() {
        auto handle = new srivc_mc_result{srivc::run_experiment(cfg->cfg),
                                          cfg->cfg.theta_sys};
        *out = handle;
        return SRIVC_OK;
    });
}

double srivc_mc_convergence_rate(const srivc_mc_result* mc) {
    return mc ? mc->result.convergence_rate : 0.0;
}

int srivc_mc_failed_runs(const srivc_mc_result* mc) {
    return mc ? mc->result.failed_runs : 0;
}

srivc_status srivc_mc_empirical_entry(const srivc_mc_result* mc, int row, int col,
                                      double* value, double* stderr_out) {
    if (!mc || !value) return fail(SRIVC_ERR_INVALID_ARGUMENT, "null argument");
    const auto& cov = mc->result.empirical_cov;
    if (row < 0 || col < 0 || row >= cov.dim() || col >= cov.dim())
        return fail(SRIVC_ERR_INVALID_ARGUMENT, "index out of range");
    *value = cov.matrix(row, col);
    if (stderr_out) *stderr_out = (*cov.standard_errors)(row, col);
    return SRIVC_OK;
}

srivc_status srivc_mc_write(const srivc_mc_result* mc, const srivc_config* cfg,
                            const char* out_dir) {
    if (!mc || !cfg || !out_dir) return fail(SRIVC_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() {
        std::filesystem::create_directories(out_dir);
        const std::filesystem::path dir(out_dir);
        srivc::write_runs_vs_cov_csv(mc->result, mc->theta_sys,
                                     (dir / "runs_vs_cov.csv").string());
        srivc::write_config_sidecar(cfg->cfg, (dir / "config.meta.json").string());
        return SRIVC_OK;
    });
}

void srivc_mc_result_free(srivc_mc_result* mc) { delete mc; }

srivc_status srivc_sweep_run(const srivc_config* cfg, const char* out_dir) {
    if (!cfg || !out_dir) return fail(SRIVC_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() {
        const auto results = srivc::sweep_sample_size(cfg->cfg);
        const auto crlb = srivc::crlb_asymptotic(cfg->cfg.theta_sys, cfg->cfg.lambda,
                                                 cfg->cfg.T, cfg->cfg.input_hold,
                                                 cfg->cfg.input_variance);
        std::filesystem::create_directories(out_dir);
        const std::filesystem::path dir(out_dir);
        srivc::write_variance_vs_n_csv({{"matched", results}}, cfg->cfg.sample_sizes,
                                       crlb.matrix.diagonal(),
                                       (dir / "variance_vs_N.csv").string());
        srivc::write_config_sidecar(cfg->cfg, (dir / "config.meta.json").string());
        return SRIVC_OK;
    });
}

srivc_status srivc_repro(int sim, const char* scale, const uint64_t* seed_override,
                         const char* out_dir) {
    if (!scale || !out_dir) return fail(SRIVC_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() {
        std::optional<std::uint64_t> seed;
        if (seed_override) seed = *seed_override;
        srivc::run_repro(sim, scale, seed, out_dir);
        return SRIVC_OK;
    });
}

}  // extern "C"
