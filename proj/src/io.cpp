#include "srivc/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "srivc/theoretical.hpp"

namespace srivc {

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(std::string_view field, const std::string& where) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw std::runtime_error("malformed number '" + std::string(field) + "' at " + where);
    return value;
}

}  // namespace

void save_data_csv(const DataRecord& data, const std::string& path) {
    data.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "t,u,y\n";
    for (long k = 0; k < data.samples(); ++k)
        out << fmt17(static_cast<double>(k) * data.T) << ',' << fmt17(data.u(k)) << ','
            << fmt17(data.y(k)) << '\n';
}

DataRecord load_data_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (line.ends_with('\r')) line.pop_back();
    if (line != "t,u,y") throw std::runtime_error(path + ": expected header 't,u,y'");

    std::vector<double> t, u, y;
    long row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.ends_with('\r')) line.pop_back();
        if (line.empty()) continue;
        const std::string where = path + " row " + std::to_string(row);
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw std::runtime_error("expected three columns at " + where);
        t.push_back(parse_double(std::string_view(line).substr(0, c1), where));
        u.push_back(parse_double(std::string_view(line).substr(c1 + 1, c2 - c1 - 1), where));
        y.push_back(parse_double(std::string_view(line).substr(c2 + 1), where));
    }
    if (t.size() < 2) throw std::runtime_error(path + ": needs at least two samples");

    DataRecord data;
    data.T = t[1] - t[0];
    if (data.T <= 0.0) throw std::runtime_error(path + ": nonincreasing time column");
    for (std::size_t k = 1; k < t.size(); ++k) {
        const double step = t[k] - t[k - 1];
        if (std::abs(step - data.T) > 1e-6 * data.T)
            throw std::runtime_error(path + ": nonuniform sampling at row " +
                                     std::to_string(k + 2));
    }
    data.u = Eigen::Map<Eigen::VectorXd>(u.data(), static_cast<long>(u.size()));
    data.y = Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<long>(y.size()));
    return data;
}

namespace {

ThetaVector theta_from_json(const nlohmann::json& j) {
    ThetaVector theta;
    theta.a = j.value("a", std::vector<double>{});
    theta.b = j.at("b").get<std::vector<double>>();
    return theta;
}

nlohmann::json theta_to_json(const ThetaVector& theta) {
    return {{"a", theta.a}, {"b", theta.b}};
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw std::runtime_error(std::string("config parse error: ") + ex.what());
    }

    ExperimentConfig cfg;
    try {
        cfg.theta_sys = theta_from_json(j.at("system"));
        cfg.T = j.at("T").get<double>();
        const auto& n_node = j.at("N");
        if (n_node.is_array())
            cfg.sample_sizes = n_node.get<std::vector<long>>();
        else
            cfg.sample_sizes = {n_node.get<long>()};
        cfg.runs = j.value("runs", 1);
        cfg.lambda = j.value("lambda", 1.0);
        cfg.input_variance = j.value("input_variance", 1.0);
        cfg.input_hold = hold_from_string(j.value("input_hold", "zoh"));
        cfg.seed = j.value("seed", std::uint64_t{1});
        cfg.parallelism = j.value("parallelism", 0);
        cfg.warmup = j.value("warmup", 0L);

        const nlohmann::json s = j.value("srivc", nlohmann::json::object());
        cfg.srivc.max_iter = s.value("max_iter", 200);
        cfg.srivc.epsilon = s.value("epsilon", 1e-12);
        cfg.srivc.input_hold = hold_from_string(s.value("input_hold", to_string(cfg.input_hold)));
        cfg.srivc.output_hold = hold_from_string(s.value("output_hold", "zoh"));
        cfg.srivc.instrument_input_hold =
            hold_from_string(s.value("instrument_input_hold", to_string(cfg.srivc.input_hold)));
        cfg.srivc.theta_init =
            s.contains("theta_init") ? theta_from_json(s.at("theta_init")) : cfg.theta_sys;
        cfg.srivc.T = cfg.T;
    } catch (const nlohmann::json::exception& ex) {
        throw std::runtime_error(std::string("config field error: ") + ex.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["system"] = theta_to_json(cfg.theta_sys);
    j["T"] = cfg.T;
    if (cfg.sample_sizes.size() == 1)
        j["N"] = cfg.sample_sizes.front();
    else
        j["N"] = cfg.sample_sizes;
    j["runs"] = cfg.runs;
    j["lambda"] = cfg.lambda;
    j["input_variance"] = cfg.input_variance;
    j["input_hold"] = to_string(cfg.input_hold);
    j["seed"] = cfg.seed;
    j["parallelism"] = cfg.parallelism;
    j["warmup"] = cfg.warmup;
    j["srivc"] = {{"max_iter", cfg.srivc.max_iter},
                  {"epsilon", cfg.srivc.epsilon},
                  {"input_hold", to_string(cfg.srivc.input_hold)},
                  {"output_hold", to_string(cfg.srivc.output_hold)},
                  {"instrument_input_hold", to_string(cfg.srivc.instrument_input_hold)},
                  {"theta_init", theta_to_json(cfg.srivc.theta_init)}};
    return j.dump(2) + "\n";
}

void write_runs_vs_cov_csv(const McResult& result, const ThetaVector& theta_sys,
                           const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "runs,row,col,value,stderr\n";

    const int d = theta_sys.size();
    const Eigen::VectorXd theta_star = theta_sys.stacked();
    const long runs = result.per_run_estimates.rows();
    const double N = static_cast<double>(result.sample_size);

    // Log-spaced checkpoints over the converged-run prefix, final count last.
    std::vector<long> order;
    for (long r = 0; r < runs; ++r)
        if (result.run_converged[static_cast<std::size_t>(r)]) order.push_back(r);
    const long total = static_cast<long>(order.size());
    std::vector<long> checkpoints;
    for (int i = 1; i <= 20; ++i) {
        const long c = std::lround(std::pow(10.0, std::log10(static_cast<double>(std::max(total, 2L))) *
                                                       static_cast<double>(i) / 20.0));
        if (c >= 2 && c <= total && (checkpoints.empty() || c > checkpoints.back()))
            checkpoints.push_back(c);
    }
    if (checkpoints.empty() || checkpoints.back() != total) checkpoints.push_back(total);

    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd mean_sq = Eigen::MatrixXd::Zero(d, d);
    long used = 0;
    std::size_t next_cp = 0;
    for (long idx = 0; idx < total && next_cp < checkpoints.size(); ++idx) {
        const Eigen::VectorXd dev =
            result.per_run_estimates.row(order[static_cast<std::size_t>(idx)]).transpose() -
            theta_star;
        const Eigen::MatrixXd z = N * (dev * dev.transpose());
        mean += z;
        mean_sq += z.cwiseProduct(z);
        ++used;
        if (used == checkpoints[next_cp]) {
            const double R = static_cast<double>(used);
            const Eigen::MatrixXd avg = mean / R;
            Eigen::MatrixXd var = (mean_sq / R - avg.cwiseProduct(avg)).cwiseMax(0.0);
            if (used > 1) var *= R / (R - 1.0);
            const Eigen::MatrixXd se = (var / R).cwiseSqrt();
            for (int i = 0; i < d; ++i)
                for (int jcol = i; jcol < d; ++jcol)
                    out << used << ',' << i << ',' << jcol << ',' << fmt17(avg(i, jcol)) << ','
                        << fmt17(se(i, jcol)) << '\n';
            ++next_cp;
        }
    }
}

void write_variance_vs_n_csv(const std::vector<SweepVariant>& variants,
                             const std::vector<long>& sample_sizes,
                             const Eigen::VectorXd& crlb_diagonal,
                             const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "N,parameter_index,empirical_variance,crlb_variance,variant\n";
    for (const auto& variant : variants) {
        if (variant.results.size() != sample_sizes.size())
            throw std::invalid_argument("sweep result count does not match sample sizes");
        for (std::size_t s = 0; s < sample_sizes.size(); ++s) {
            const auto& cov = variant.results[s].empirical_cov.matrix;
            for (int i = 0; i < cov.rows(); ++i)
                out << sample_sizes[s] << ',' << i << ',' << fmt17(cov(i, i)) << ','
                    << fmt17(crlb_diagonal(i)) << ',' << variant.name << '\n';
        }
    }
}

void write_config_sidecar(const ExperimentConfig& cfg, const std::string& path) {
    nlohmann::json j = nlohmann::json::parse(config_to_json(cfg));
    j["stderr_method"] = "sem";  // standard error of the mean of per-run outer products
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

void write_estimate_report(const SrivcEstimate& estimate, double residual_norm,
                           double residual_bound, const std::string& path) {
    nlohmann::json j;
    j["theta"] = theta_to_json(estimate.theta);
    j["converged"] = estimate.converged;
    j["iterations"] = estimate.iterations;
    j["relative_errors"] = estimate.relative_errors;
    j["condition_numbers"] = estimate.condition_numbers;
    j["stabilized_iterations"] = estimate.stabilized_iterations;
    j["residual_norm"] = residual_norm;
    j["residual_bound"] = residual_bound;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

ExperimentConfig repro_config(int sim, const std::string& scale) {
    const bool full = scale == "full";
    if (!full && scale != "desk")
        throw std::invalid_argument("scale must be 'full' or 'desk'");

    ExperimentConfig cfg;
    cfg.lambda = 1.0;
    cfg.input_variance = 1.0;
    cfg.input_hold = Hold::Zoh;
    cfg.seed = 1;
    cfg.srivc.max_iter = 200;
    cfg.srivc.epsilon = 1e-12;
    cfg.srivc.input_hold = Hold::Zoh;
    cfg.srivc.output_hold = Hold::Zoh;
    cfg.srivc.instrument_input_hold = Hold::Zoh;

    if (sim == 1) {
        cfg.theta_sys = ThetaVector{{0.1}, {10.0}};
        cfg.T = 0.01;
        cfg.sample_sizes = {full ? 200000L : 50000L};
        cfg.runs = full ? 50000 : 2000;
    } else if (sim == 2) {
        cfg.theta_sys = ThetaVector{{0.04, 0.2}, {1.0}};
        cfg.T = 0.1;
        if (full) {
            // Eight log-spaced steps from 1e3 to 2e5.
            cfg.sample_sizes.clear();
            for (int i = 0; i < 8; ++i) {
                const double exponent = 3.0 + (std::log10(2e5) - 3.0) * i / 7.0;
                cfg.sample_sizes.push_back(std::lround(std::pow(10.0, exponent)));
            }
            cfg.runs = 10000;
        } else {
            cfg.sample_sizes = {1000, 10000, 100000};
            cfg.runs = 500;
        }
    } else {
        throw std::invalid_argument("sim must be 1 or 2");
    }
    cfg.srivc.theta_init = cfg.theta_sys;
    cfg.srivc.T = cfg.T;
    return cfg;
}

std::vector<std::string> run_repro(int sim, const std::string& scale,
                                   std::optional<std::uint64_t> seed_override,
                                   const std::string& out_dir) {
    ExperimentConfig cfg = repro_config(sim, scale);
    if (seed_override) cfg.seed = *seed_override;
    std::filesystem::create_directories(out_dir);
    const auto join = [&](const std::string& name) {
        return (std::filesystem::path(out_dir) / name).string();
    };

    std::vector<std::string> written;
    const CovarianceReport crlb = crlb_asymptotic(cfg.theta_sys, cfg.lambda, cfg.T,
                                                  cfg.input_hold, cfg.input_variance);
    save_report_csv(crlb, join("crlb.csv"));
    written.push_back(join("crlb.csv"));

    if (sim == 1) {
        const CovarianceReport lit = literature_crlb(cfg.theta_sys, cfg.lambda, cfg.T,
                                                     cfg.input_hold, Hold::Zoh,
                                                     cfg.input_variance);
        save_report_csv(lit, join("literature_crlb.csv"));
        written.push_back(join("literature_crlb.csv"));

        const McResult result = run_experiment(cfg);
        write_runs_vs_cov_csv(result, cfg.theta_sys, join("runs_vs_cov.csv"));
        written.push_back(join("runs_vs_cov.csv"));
    } else {
        const std::vector<McResult> matched = sweep_sample_size(cfg);
        ExperimentConfig foh_cfg = cfg;  // same seed: paired trials
        foh_cfg.srivc.instrument_input_hold = Hold::Foh;
        const std::vector<McResult> mismatched = sweep_sample_size(foh_cfg);

        write_variance_vs_n_csv(
            {{"matched", matched}, {"foh_instrument", mismatched}}, cfg.sample_sizes,
            crlb.matrix.diagonal(), join("variance_vs_N.csv"));
        written.push_back(join("variance_vs_N.csv"));
    }

    write_config_sidecar(cfg, join("config.meta.json"));
    written.push_back(join("config.meta.json"));
    return written;
}

}  // namespace srivc
