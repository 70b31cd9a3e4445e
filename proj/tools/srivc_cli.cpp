// Command-line front end. Links the C library interface only.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "srivc/srivc.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

int report_error(const char* context) {
    std::fprintf(stderr, "error: %s: %s\n", context, srivc_last_error());
    return kExitError;
}

struct ConfigHandle {
    srivc_config* ptr = nullptr;
    ~ConfigHandle() { srivc_config_free(ptr); }
};

int load_config(const std::string& path, std::optional<std::uint64_t> seed,
                ConfigHandle& handle) {
    if (srivc_config_load(path.c_str(), &handle.ptr) != SRIVC_OK)
        return report_error("loading config");
    if (seed && srivc_config_set_seed(handle.ptr, *seed) != SRIVC_OK)
        return report_error("setting seed");
    return kExitOk;
}

int write_report(srivc_report* report, const std::string& path) {
    const srivc_status status = srivc_report_write_csv(report, path.c_str());
    srivc_report_free(report);
    if (status != SRIVC_OK) return report_error("writing report");
    std::printf("wrote %s\n", path.c_str());
    return kExitOk;
}

srivc_hold parse_hold_flag(const std::string& value) {
    return value == "foh" ? SRIVC_HOLD_FOH : SRIVC_HOLD_ZOH;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SRIVC continuous-time estimator, asymptotic bounds and Monte Carlo studies"};
    app.require_subcommand(1);
    app.fallthrough();  // global --seed/--out may follow the subcommand

    std::string config_path;
    std::string data_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    app.add_option("--seed", seed, "override the config seed");
    app.add_option("--out", out_dir, "output directory");

    auto* cmd_estimate = app.add_subcommand("estimate", "estimate a model from a t,u,y CSV file");
    cmd_estimate->add_option("--data", data_path, "input data CSV")->required();
    cmd_estimate->add_option("--config", config_path, "experiment config JSON")->required();

    std::string literature_hold;
    auto* cmd_crlb = app.add_subcommand("crlb", "asymptotic Cramer-Rao lower bound");
    cmd_crlb->add_option("--config", config_path)->required();
    cmd_crlb->add_option("--literature", literature_hold,
                         "also emit the literature variant under this output hold")
        ->check(CLI::IsMember({"zoh", "foh"}));

    std::string instrument_hold = "zoh";
    auto* cmd_cov = app.add_subcommand("cov", "asymptotic covariance of the estimator");
    cmd_cov->add_option("--config", config_path)->required();
    cmd_cov->add_option("--instrument-hold", instrument_hold)
        ->check(CLI::IsMember({"zoh", "foh"}));

    auto* cmd_mc = app.add_subcommand("mc", "Monte Carlo covariance study");
    cmd_mc->add_option("--config", config_path)->required();

    auto* cmd_sweep = app.add_subcommand("sweep", "Monte Carlo sweep over sample sizes");
    cmd_sweep->add_option("--config", config_path)->required();

    int sim = 0;
    std::string scale = "desk";
    auto* cmd_repro = app.add_subcommand("repro", "reproduce a simulation study");
    cmd_repro->add_option("--sim", sim, "study index (1 or 2)")->required();
    cmd_repro->add_option("--scale", scale)->check(CLI::IsMember({"full", "desk"}));

    CLI11_PARSE(app, argc, argv);

    std::error_code dir_error;
    std::filesystem::create_directories(out_dir, dir_error);
    if (dir_error) {
        std::fprintf(stderr, "error: cannot create output directory %s\n", out_dir.c_str());
        return kExitError;
    }

    if (*cmd_repro) {
        const std::uint64_t seed_value = seed.value_or(0);
        const std::uint64_t* seed_ptr = seed ? &seed_value : nullptr;
        if (srivc_repro(sim, scale.c_str(), seed_ptr, out_dir.c_str()) != SRIVC_OK)
            return report_error("repro");
        std::printf("wrote study %d (%s scale) artifacts to %s\n", sim, scale.c_str(),
                    out_dir.c_str());
        return kExitOk;
    }

    ConfigHandle config;
    if (const int rc = load_config(config_path, seed, config); rc != kExitOk) return rc;

    if (*cmd_estimate) {
        srivc_estimate* est = nullptr;
        if (srivc_estimate_csv(config.ptr, data_path.c_str(), &est) != SRIVC_OK)
            return report_error("estimate");
        const int converged = srivc_estimate_converged(est);
        const int iterations = srivc_estimate_iterations(est);
        const int dim = srivc_estimate_param_count(est);
        std::string theta_text;
        std::vector<double> theta(static_cast<std::size_t>(dim));
        srivc_estimate_theta(est, theta.data(), dim);
        for (int i = 0; i < dim; ++i)
            theta_text += (i ? ", " : "") + std::to_string(theta[static_cast<std::size_t>(i)]);
        std::printf("theta = [%s]\nconverged = %s in %d iterations\nresidual = %.6e (bound %.6e)\n",
                    theta_text.c_str(), converged ? "yes" : "no", iterations,
                    srivc_estimate_residual_norm(est), srivc_estimate_residual_bound(est));
        const srivc_status status = srivc_estimate_write_report(est, out_dir.c_str());
        srivc_estimate_free(est);
        if (status != SRIVC_OK) return report_error("writing estimate report");
        return converged ? kExitOk : kExitNotConverged;
    }

    if (*cmd_crlb) {
        srivc_report* crlb = nullptr;
        if (srivc_crlb(config.ptr, &crlb) != SRIVC_OK) return report_error("crlb");
        const int dim = srivc_report_dim(crlb);
        if (const int rc = write_report(crlb, out_dir + "/crlb.csv"); rc != kExitOk) return rc;

        if (!literature_hold.empty()) {
            srivc_report* crlb2 = nullptr;
            srivc_report* lit = nullptr;
            if (srivc_crlb(config.ptr, &crlb2) != SRIVC_OK) return report_error("crlb");
            if (srivc_literature_crlb(config.ptr, parse_hold_flag(literature_hold), &lit) !=
                SRIVC_OK) {
                srivc_report_free(crlb2);
                return report_error("literature crlb");
            }
            // Difference matrix alongside the two bounds.
            FILE* diff = std::fopen((out_dir + "/crlb_difference.csv").c_str(), "w");
            if (!diff) {
                srivc_report_free(crlb2);
                srivc_report_free(lit);
                std::fprintf(stderr, "error: cannot open difference file\n");
                return kExitError;
            }
            for (int i = 0; i < dim; ++i) {
                for (int j = 0; j < dim; ++j) {
                    double a = 0.0, b = 0.0;
                    srivc_report_entry(crlb2, i, j, &a);
                    srivc_report_entry(lit, i, j, &b);
                    std::fprintf(diff, "%.17g%s", a - b, j + 1 < dim ? "," : "\n");
                }
            }
            std::fclose(diff);
            srivc_report_free(crlb2);
            std::printf("wrote %s\n", (out_dir + "/crlb_difference.csv").c_str());
            if (const int rc = write_report(lit, out_dir + "/literature_crlb.csv");
                rc != kExitOk)
                return rc;
        }
        return kExitOk;
    }

    if (*cmd_cov) {
        srivc_report* cov = nullptr;
        if (srivc_cov(config.ptr, parse_hold_flag(instrument_hold), &cov) != SRIVC_OK)
            return report_error("cov");
        return write_report(cov, out_dir + "/srivc_cov.csv");
    }

    if (*cmd_mc) {
        srivc_mc_result* mc = nullptr;
        if (srivc_mc_run(config.ptr, &mc) != SRIVC_OK) return report_error("mc");
        std::printf("convergence rate %.4f, failed runs %d\n", srivc_mc_convergence_rate(mc),
                    srivc_mc_failed_runs(mc));
        const srivc_status status = srivc_mc_write(mc, config.ptr, out_dir.c_str());
        srivc_mc_result_free(mc);
        if (status != SRIVC_OK) return report_error("writing mc outputs");
        std::printf("wrote %s/runs_vs_cov.csv\n", out_dir.c_str());
        return kExitOk;
    }

    if (*cmd_sweep) {
        if (srivc_sweep_run(config.ptr, out_dir.c_str()) != SRIVC_OK)
            return report_error("sweep");
        std::printf("wrote %s/variance_vs_N.csv\n", out_dir.c_str());
        return kExitOk;
    }

    return kExitError;
}
