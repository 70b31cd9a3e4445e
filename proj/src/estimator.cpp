#include "srivc/estimator.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace srivc {

void DataRecord::validate() const {
    if (u.size() != y.size()) throw std::invalid_argument("u and y lengths differ");
    if (u.size() == 0) throw std::invalid_argument("empty data record");
    if (T <= 0.0) throw std::invalid_argument("sample period must be positive");
}

void SrivcConfig::validate() const {
    if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (theta_init.b.empty()) throw std::invalid_argument("theta_init is unset");
    if (theta_init.n() < theta_init.m())
        throw std::invalid_argument("theta_init is improper (n < m)");
    if (!is_hurwitz(theta_init.denominator()))
        throw NonHurwitzIterate();
    if (condition_limit <= 1.0) throw std::invalid_argument("condition_limit must exceed 1");
}

namespace {

double effective_period(const DataRecord& data, const SrivcConfig& cfg) {
    data.validate();
    if (cfg.T > 0.0 && std::abs(cfg.T - data.T) > 1e-9 * data.T)
        throw std::invalid_argument("config sample period disagrees with the data record");
    return data.T;
}

std::vector<TransferFunction> derivative_bank(const Polynomial& den, int high, int low,
                                              double sign) {
    std::vector<TransferFunction> bank;
    bank.reserve(static_cast<std::size_t>(high - low + 1));
    for (int i = high; i >= low; --i)
        bank.emplace_back(sign * Polynomial::power(i), den);
    return bank;
}

}  // namespace

Eigen::VectorXd prefilter_output(const Eigen::VectorXd& y, const Polynomial& a_j,
                                 double T, Hold output_hold) {
    if (!is_hurwitz(a_j)) throw NonHurwitzIterate();
    return filter_ct(TransferFunction(Polynomial::one(), a_j), y, T, output_hold);
}

Eigen::MatrixXd build_regressor(const DataRecord& data, const ThetaVector& theta_j,
                                const SrivcConfig& cfg) {
    const double T = effective_period(data, cfg);
    const Polynomial a_j = theta_j.denominator();
    if (!is_hurwitz(a_j)) throw NonHurwitzIterate();

    const int n = theta_j.n();
    const int m = theta_j.m();
    Eigen::MatrixXd phi(n + m + 1, data.samples());
    if (n > 0)
        phi.topRows(n) = filter_bank(derivative_bank(a_j, n, 1, -1.0), data.y, T,
                                     cfg.output_hold);
    phi.bottomRows(m + 1) = filter_bank(derivative_bank(a_j, m, 0, 1.0), data.u, T,
                                        cfg.input_hold);
    return phi;
}

Eigen::MatrixXd build_instrument_u(const Eigen::VectorXd& u, double T,
                                   const ThetaVector& theta_j, const SrivcConfig& cfg) {
    const Polynomial a_j = theta_j.denominator();
    if (!is_hurwitz(a_j)) throw NonHurwitzIterate();
    const Polynomial b_j = theta_j.numerator();
    const int n = theta_j.n();
    const int m = theta_j.m();

    Eigen::MatrixXd instr(n + m + 1, u.size());
    if (n > 0) {
        // -p^i B_j / A_j^2 as single composite filters (one shared realization).
        const Polynomial a_sq = a_j * a_j;
        std::vector<TransferFunction> bank;
        bank.reserve(static_cast<std::size_t>(n));
        for (int i = n; i >= 1; --i)
            bank.emplace_back(-1.0 * (Polynomial::power(i) * b_j), a_sq);
        instr.topRows(n) = filter_bank(bank, u, T, cfg.instrument_input_hold);
    }
    instr.bottomRows(m + 1) = filter_bank(derivative_bank(a_j, m, 0, 1.0), u, T,
                                          cfg.instrument_input_hold);
    return instr;
}

Eigen::MatrixXd build_instrument(const DataRecord& data, const ThetaVector& theta_j,
                                 const SrivcConfig& cfg) {
    const double T = effective_period(data, cfg);
    return build_instrument_u(data.u, T, theta_j, cfg);
}

namespace detail {

RawStep srivc_step_raw(const DataRecord& data, const ThetaVector& theta_j,
                       const SrivcConfig& cfg) {
    const double T = effective_period(data, cfg);
    const double N = static_cast<double>(data.samples());

    const Eigen::MatrixXd phi = build_regressor(data, theta_j, cfg);
    const Eigen::MatrixXd instr = build_instrument(data, theta_j, cfg);
    const Eigen::VectorXd y_f =
        prefilter_output(data.y, theta_j.denominator(), T, cfg.output_hold);

    const Eigen::MatrixXd normal = (instr * phi.transpose()) / N;
    const Eigen::VectorXd rhs = (instr * y_f) / N;

    // The normal matrix is not symmetric (instrument != regressor); use a
    // rank-revealing factorization and report the SVD condition number.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(normal);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!std::isfinite(cond) || cond > cfg.condition_limit)
        throw SingularNormalMatrix(cond);

    RawStep step;
    step.theta = normal.colPivHouseholderQr().solve(rhs);
    step.condition_number = cond;
    if (!step.theta.allFinite()) throw SingularNormalMatrix(cond);
    return step;
}

Polynomial stabilize_denominator(const Polynomial& a, bool* changed) {
    if (changed) *changed = false;
    if (is_hurwitz(a)) return a;
    auto roots = a.roots();
    double scale = 0.0;
    for (const auto& r : roots) scale = std::max(scale, std::abs(r));
    const double floor_re = std::max(1e-8, 1e-8 * scale);
    for (auto& r : roots) {
        double re = r.real();
        if (re >= 0.0) re = -re;
        if (re > -floor_re) re = -floor_re;
        r = {re, r.imag()};
    }
    if (changed) *changed = true;
    return Polynomial::from_roots_unit_constant(roots);
}

}  // namespace detail

SrivcStep srivc_step(const DataRecord& data, const ThetaVector& theta_j,
                     const SrivcConfig& cfg) {
    const auto raw = detail::srivc_step_raw(data, theta_j, cfg);
    ThetaVector theta = ThetaVector::from_stacked(raw.theta, theta_j.n(), theta_j.m());
    if (!is_hurwitz(theta.denominator())) throw NonHurwitzIterate();
    return SrivcStep{std::move(theta), raw.condition_number};
}

SrivcEstimate srivc_estimate(const DataRecord& data, const SrivcConfig& cfg) {
    cfg.validate();
    effective_period(data, cfg);
    const int n = cfg.theta_init.n();
    const int m = cfg.theta_init.m();

    SrivcEstimate estimate;
    estimate.theta = cfg.theta_init;

    for (int j = 0; j < cfg.max_iter; ++j) {
        const auto raw = detail::srivc_step_raw(data, estimate.theta, cfg);
        ThetaVector next = ThetaVector::from_stacked(raw.theta, n, m);
        if (next.denominator().degree() != n)
            throw std::invalid_argument("iterate lost denominator degree (leading coefficient hit zero)");

        bool stabilized = false;
        const Polynomial a_next = detail::stabilize_denominator(next.denominator(), &stabilized);
        if (stabilized) {
            ++estimate.stabilized_iterations;
            const auto& coeffs = a_next.coeffs();
            for (int i = 0; i < n; ++i) next.a[static_cast<std::size_t>(i)] =
                coeffs[static_cast<std::size_t>(i)];
        }

        const Eigen::VectorXd prev = estimate.theta.stacked();
        const Eigen::VectorXd cur = next.stacked();
        const double step_norm = (cur - prev).norm();
        const double rel = cur.norm() > 0.0 ? step_norm / cur.norm()
                                            : (step_norm == 0.0 ? 0.0
                                                                : std::numeric_limits<double>::infinity());

        estimate.relative_errors.push_back(rel);
        estimate.condition_numbers.push_back(raw.condition_number);
        estimate.theta = std::move(next);
        estimate.iterations = j + 1;
        if (rel < cfg.epsilon) {
            estimate.converged = true;
            break;
        }
    }
    return estimate;
}

Eigen::VectorXd verify_converging_point(const DataRecord& data,
                                        const ThetaVector& theta_bar,
                                        const SrivcConfig& cfg) {
    const double T = effective_period(data, cfg);
    if (!is_hurwitz(theta_bar.denominator())) throw NonHurwitzIterate();

    const Eigen::MatrixXd instr = build_instrument(data, theta_bar, cfg);
    const Eigen::VectorXd model_output =
        filter_ct(theta_to_tf(theta_bar), data.u, T, cfg.input_hold);
    const Eigen::VectorXd residual_signal = data.y - model_output;
    return (instr * residual_signal) / static_cast<double>(data.samples());
}

}  // namespace srivc
