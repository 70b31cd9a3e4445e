#include "srivc/experiment.hpp"

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "srivc/filtering.hpp"

namespace srivc {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t trial, std::uint64_t role) {
    std::uint64_t h = mix64(seed + kGolden);
    h = mix64(h ^ (trial + kGolden));
    h = mix64(h ^ (role + kGolden));
    state_ = h;
}

std::uint64_t RngStream::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

double RngStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
}

void ExperimentConfig::validate() const {
    if (theta_sys.b.empty()) throw std::invalid_argument("config: system is unset");
    if (T <= 0.0) throw std::invalid_argument("config: sample period must be positive");
    if (sample_sizes.empty()) throw std::invalid_argument("config: no sample size given");
    for (long N : sample_sizes)
        if (N < theta_sys.size())
            throw std::invalid_argument("config: sample size below parameter count");
    if (runs < 1) throw std::invalid_argument("config: runs must be at least 1");
    if (lambda < 0.0) throw std::invalid_argument("config: negative noise variance");
    if (!(input_variance > 0.0)) throw std::invalid_argument("config: input variance must be positive");
    if (parallelism < 0) throw std::invalid_argument("config: negative parallelism");
    if (warmup < 0) throw std::invalid_argument("config: negative warmup");
    srivc.validate();
}

Eigen::VectorXd generate_input(long N, double variance, RngStream& stream) {
    if (N < 1) throw std::invalid_argument("input length must be positive");
    const double scale = std::sqrt(variance);
    Eigen::VectorXd u(N);
    for (long k = 0; k < N; ++k) u(k) = scale * stream.normal();
    return u;
}

DataRecord simulate_system(const Eigen::VectorXd& u, const ThetaVector& theta_sys,
                           double lambda, double T, Hold input_hold,
                           RngStream& noise_stream) {
    if (!is_hurwitz(theta_sys.denominator()))
        throw std::invalid_argument("system denominator is not Hurwitz");
    DataRecord data;
    data.u = u;
    data.T = T;
    data.y = filter_ct(theta_to_tf(theta_sys), u, T, input_hold);
    if (lambda > 0.0) {
        const double scale = std::sqrt(lambda);
        for (long k = 0; k < data.y.size(); ++k) data.y(k) += scale * noise_stream.normal();
    }
    return data;
}

namespace {

struct TrialOutcome {
    Eigen::VectorXd theta;
    bool converged = false;
    bool failed = false;
    std::string reason;
};

TrialOutcome run_trial(const ExperimentConfig& cfg, long N, int trial) {
    TrialOutcome outcome;
    try {
        RngStream input_stream(cfg.seed, static_cast<std::uint64_t>(trial), RngStream::kInput);
        RngStream noise_stream(cfg.seed, static_cast<std::uint64_t>(trial), RngStream::kNoise);
        const Eigen::VectorXd u =
            generate_input(N + cfg.warmup, cfg.input_variance, input_stream);
        DataRecord data =
            simulate_system(u, cfg.theta_sys, cfg.lambda, cfg.T, cfg.input_hold, noise_stream);
        if (cfg.warmup > 0) {
            data.u = data.u.tail(N).eval();
            data.y = data.y.tail(N).eval();
        }
        SrivcConfig scfg = cfg.srivc;
        scfg.T = cfg.T;
        const SrivcEstimate estimate = srivc_estimate(data, scfg);
        outcome.theta = estimate.theta.stacked();
        outcome.converged = estimate.converged;
        if (!estimate.converged) outcome.reason = "did not converge within max_iter";
    } catch (const std::exception& ex) {
        outcome.failed = true;
        outcome.reason = ex.what();
    }
    return outcome;
}

McResult aggregate(const ExperimentConfig& cfg, long N,
                   const std::vector<TrialOutcome>& outcomes) {
    const int d = cfg.theta_sys.size();
    const int runs = cfg.runs;
    const Eigen::VectorXd theta_star = cfg.theta_sys.stacked();

    McResult result;
    result.sample_size = N;
    result.per_run_estimates =
        Eigen::MatrixXd::Constant(runs, d, std::numeric_limits<double>::quiet_NaN());
    result.run_converged.assign(static_cast<std::size_t>(runs), false);

    long converged_count = 0;
    for (int r = 0; r < runs; ++r) {
        const auto& o = outcomes[static_cast<std::size_t>(r)];
        if (o.failed) {
            ++result.failed_runs;
            result.failure_reasons.push_back("run " + std::to_string(r) + ": " + o.reason);
            continue;
        }
        result.per_run_estimates.row(r) = o.theta.transpose();
        result.run_converged[static_cast<std::size_t>(r)] = o.converged;
        if (o.converged) {
            ++converged_count;
        } else {
            ++result.failed_runs;
            result.failure_reasons.push_back("run " + std::to_string(r) + ": " + o.reason);
        }
    }
    result.convergence_rate = static_cast<double>(converged_count) / runs;
    if (converged_count == 0) {
        std::string detail = "all runs failed";
        if (!result.failure_reasons.empty()) detail += "; first: " + result.failure_reasons.front();
        throw std::runtime_error(detail);
    }

    // Normalized covariance (N/R) sum (th - th*)(th - th*)^T over converged
    // runs; standard error of the mean per entry.
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd mean_sq = Eigen::MatrixXd::Zero(d, d);
    for (int r = 0; r < runs; ++r) {
        if (!result.run_converged[static_cast<std::size_t>(r)]) continue;
        const Eigen::VectorXd dev =
            result.per_run_estimates.row(r).transpose() - theta_star;
        const Eigen::MatrixXd z = static_cast<double>(N) * (dev * dev.transpose());
        mean += z;
        mean_sq += z.cwiseProduct(z);
    }
    const double R = static_cast<double>(converged_count);
    mean /= R;
    mean_sq /= R;
    Eigen::MatrixXd variance = (mean_sq - mean.cwiseProduct(mean)).cwiseMax(0.0);
    if (converged_count > 1) variance *= R / (R - 1.0);

    result.empirical_cov.matrix = 0.5 * (mean + mean.transpose());
    result.empirical_cov.kind = CovKind::Empirical;
    result.empirical_cov.lambda = cfg.lambda;
    result.empirical_cov.T = cfg.T;
    result.empirical_cov.input_variance = cfg.input_variance;
    result.empirical_cov.input_hold = cfg.input_hold;
    result.empirical_cov.standard_errors = (variance / R).cwiseSqrt();
    return result;
}

McResult run_at_sample_size(const ExperimentConfig& cfg, long N) {
    const int runs = cfg.runs;
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(runs));

    int workers = cfg.parallelism > 0
                      ? cfg.parallelism
                      : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = std::min(workers, runs);

    if (workers == 1) {
        for (int r = 0; r < runs; ++r)
            outcomes[static_cast<std::size_t>(r)] = run_trial(cfg, N, r);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int r = next.fetch_add(1); r < runs; r = next.fetch_add(1))
                    outcomes[static_cast<std::size_t>(r)] = run_trial(cfg, N, r);
            });
        }
        for (auto& t : pool) t.join();
    }
    return aggregate(cfg, N, outcomes);
}

}  // namespace

McResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    return run_at_sample_size(cfg, cfg.sample_sizes.front());
}

std::vector<McResult> sweep_sample_size(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<McResult> results;
    results.reserve(cfg.sample_sizes.size());
    for (long N : cfg.sample_sizes) results.push_back(run_at_sample_size(cfg, N));
    return results;
}

ExcitationReport check_excitation(const Eigen::VectorXd& u, int order) {
    if (order < 1) throw std::invalid_argument("excitation order must be positive");
    if (u.size() < 10L * order)
        throw std::invalid_argument("insufficient data length for the requested order");

    // Circular autocovariance: for periodic inputs the Toeplitz matrix then
    // has the exact algebraic rank (a truncated estimate leaks O(1/N) into
    // the null space, far above the 1e-8 threshold).
    const long N = u.size();
    Eigen::VectorXd autocov(order);
    for (int lag = 0; lag < order; ++lag) {
        double acc = 0.0;
        for (long k = 0; k < N; ++k) acc += u(k) * u((k + lag) % N);
        autocov(lag) = acc / static_cast<double>(N);
    }
    Eigen::MatrixXd toeplitz(order, order);
    for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j) toeplitz(i, j) = autocov(std::abs(i - j));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(toeplitz);
    ExcitationReport report;
    report.eigenvalues = es.eigenvalues();
    const double emax = report.eigenvalues.cwiseAbs().maxCoeff();
    const double threshold = 1e-8 * emax;
    report.rank = static_cast<int>((report.eigenvalues.array() > threshold).count());
    report.persistently_exciting = report.rank == order;
    return report;
}

}  // namespace srivc
