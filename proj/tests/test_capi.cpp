// Exercises the shared-library C interface end to end.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "srivc/srivc.h"

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("srivc_capi_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static inline int counter = 0;
};

const char* kConfigJson = R"({
  "system": { "a": [0.1], "b": [10.0] },
  "T": 0.01,
  "N": 4000,
  "runs": 10,
  "lambda": 1.0,
  "input_variance": 1.0,
  "seed": 5
})";

// Small noise-free dataset written by hand: y is the exact ZOH response of
// 10/(0.1p+1) to a unit step, y_k = 10 (1 - e^{-0.1 k}).
void write_step_data(const std::string& path, long n) {
    std::ofstream out(path);
    out << "t,u,y\n";
    char buf[128];
    for (long k = 0; k < n; ++k) {
        const double y = 10.0 * (1.0 - std::exp(-0.1 * static_cast<double>(k)));
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", 0.01 * k, 1.0, y);
        out << buf;
    }
}

}  // namespace

TEST_CASE("config lifecycle and errors") {
    srivc_config* cfg = nullptr;
    REQUIRE(srivc_config_parse(kConfigJson, &cfg) == SRIVC_OK);
    CHECK(srivc_config_param_count(cfg) == 2);
    CHECK(srivc_config_set_seed(cfg, 99) == SRIVC_OK);
    srivc_config_free(cfg);

    srivc_config* bad = nullptr;
    CHECK(srivc_config_parse("{ nope", &bad) != SRIVC_OK);
    CHECK(std::string(srivc_last_error()).size() > 0);
    CHECK(srivc_config_load("/nonexistent/cfg.json", &bad) != SRIVC_OK);
}

TEST_CASE("crlb and literature variant reproduce the golden matrices") {
    srivc_config* cfg = nullptr;
    REQUIRE(srivc_config_parse(kConfigJson, &cfg) == SRIVC_OK);

    srivc_report* crlb = nullptr;
    REQUIRE(srivc_crlb(cfg, &crlb) == SRIVC_OK);
    REQUIRE(srivc_report_dim(crlb) == 2);
    double v = 0.0;
    srivc_report_entry(crlb, 0, 0, &v);
    CHECK(v == doctest::Approx(8.0334e-3).epsilon(5e-4));
    srivc_report_entry(crlb, 1, 1, &v);
    CHECK(v == doctest::Approx(40.0333).epsilon(5e-4));

    srivc_report* lit = nullptr;
    REQUIRE(srivc_literature_crlb(cfg, SRIVC_HOLD_ZOH, &lit) == SRIVC_OK);
    srivc_report_entry(lit, 0, 0, &v);
    CHECK(v == doctest::Approx(7.2629e-3).epsilon(5e-4));

    srivc_report* cov = nullptr;
    REQUIRE(srivc_cov(cfg, SRIVC_HOLD_ZOH, &cov) == SRIVC_OK);
    double crlb_entry = 0.0;
    srivc_report_entry(crlb, 0, 1, &crlb_entry);
    srivc_report_entry(cov, 0, 1, &v);
    CHECK(v == doctest::Approx(crlb_entry).epsilon(1e-10));

    TempDir dir;
    CHECK(srivc_report_write_csv(crlb, dir.file("crlb.csv").c_str()) == SRIVC_OK);
    CHECK(std::filesystem::exists(dir.file("crlb.csv")));
    CHECK(std::filesystem::exists(dir.file("crlb.csv") + ".meta.json"));

    CHECK(srivc_report_entry(crlb, 5, 0, &v) == SRIVC_ERR_INVALID_ARGUMENT);

    srivc_report_free(crlb);
    srivc_report_free(lit);
    srivc_report_free(cov);
    srivc_config_free(cfg);
}

TEST_CASE("estimate on a noise-free file recovers the truth") {
    TempDir dir;
    write_step_data(dir.file("data.csv"), 3000);

    srivc_config* cfg = nullptr;
    REQUIRE(srivc_config_parse(kConfigJson, &cfg) == SRIVC_OK);

    srivc_estimate* est = nullptr;
    REQUIRE(srivc_estimate_csv(cfg, dir.file("data.csv").c_str(), &est) == SRIVC_OK);
    CHECK(srivc_estimate_converged(est) == 1);
    double theta[2] = {0, 0};
    REQUIRE(srivc_estimate_theta(est, theta, 2) == SRIVC_OK);
    CHECK(theta[0] == doctest::Approx(0.1).epsilon(1e-8));
    CHECK(theta[1] == doctest::Approx(10.0).epsilon(1e-8));
    CHECK(srivc_estimate_residual_norm(est) < srivc_estimate_residual_bound(est));

    CHECK(srivc_estimate_write_report(est, dir.file("out").c_str()) == SRIVC_OK);
    CHECK(std::filesystem::exists(dir.file("out") + "/estimate.json"));
    srivc_estimate_free(est);

    srivc_estimate* missing = nullptr;
    CHECK(srivc_estimate_csv(cfg, "/nonexistent.csv", &missing) == SRIVC_ERR_PARSE);
    srivc_config_free(cfg);
}

TEST_CASE("monte carlo run and artifacts") {
    TempDir dir;
    srivc_config* cfg = nullptr;
    REQUIRE(srivc_config_parse(kConfigJson, &cfg) == SRIVC_OK);

    srivc_mc_result* mc = nullptr;
    REQUIRE(srivc_mc_run(cfg, &mc) == SRIVC_OK);
    CHECK(srivc_mc_convergence_rate(mc) == doctest::Approx(1.0));
    CHECK(srivc_mc_failed_runs(mc) == 0);
    double value = 0.0, se = 0.0;
    REQUIRE(srivc_mc_empirical_entry(mc, 0, 0, &value, &se) == SRIVC_OK);
    CHECK(value > 0.0);
    CHECK(se > 0.0);
    CHECK(srivc_mc_write(mc, cfg, dir.file("mc").c_str()) == SRIVC_OK);
    CHECK(std::filesystem::exists(dir.file("mc") + "/runs_vs_cov.csv"));
    CHECK(std::filesystem::exists(dir.file("mc") + "/config.meta.json"));
    srivc_mc_result_free(mc);
    srivc_config_free(cfg);
}

TEST_CASE("sweep writes variance_vs_N.csv") {
    TempDir dir;
    srivc_config* cfg = nullptr;
    REQUIRE(srivc_config_parse(R"({
        "system": { "a": [0.1], "b": [10.0] },
        "T": 0.01, "N": [500, 1000], "runs": 6, "seed": 2 })",
                               &cfg) == SRIVC_OK);
    REQUIRE(srivc_sweep_run(cfg, dir.file("sweep").c_str()) == SRIVC_OK);
    CHECK(std::filesystem::exists(dir.file("sweep") + "/variance_vs_N.csv"));
    srivc_config_free(cfg);
}

TEST_CASE("null arguments are rejected not crashed") {
    CHECK(srivc_config_parse(nullptr, nullptr) == SRIVC_ERR_INVALID_ARGUMENT);
    CHECK(srivc_crlb(nullptr, nullptr) == SRIVC_ERR_INVALID_ARGUMENT);
    CHECK(srivc_repro(1, nullptr, nullptr, nullptr) == SRIVC_ERR_INVALID_ARGUMENT);
    CHECK(srivc_repro(7, "desk", nullptr, "/tmp/unused") == SRIVC_ERR_INVALID_ARGUMENT);
    CHECK(srivc_estimate_converged(nullptr) == 0);
    srivc_config_free(nullptr);
    srivc_report_free(nullptr);
}
