#include "srivc/theoretical.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace srivc {

namespace {

void check_inputs(const Eigen::VectorXd& u, const Eigen::VectorXd& e) {
    if (u.size() != e.size()) throw std::invalid_argument("u and e lengths differ");
    if (u.size() == 0) throw std::invalid_argument("empty input");
}

}  // namespace

Eigen::MatrixXd theoretical_regressor(const Eigen::VectorXd& u, const Eigen::VectorXd& e,
                                      const ThetaVector& theta_sys,
                                      const ThetaVector& theta_j, double T,
                                      Hold input_hold) {
    check_inputs(u, e);
    const Polynomial a_j = theta_j.denominator();
    if (!is_hurwitz(a_j)) throw NonHurwitzIterate();
    const Polynomial a_sys = theta_sys.denominator();
    const Polynomial b_sys = theta_sys.numerator();

    const int n = theta_j.n();
    const int m = theta_j.m();
    Eigen::MatrixXd rows(n + m + 1, u.size());

    if (n > 0) {
        // Noise-free part: -p^i B_sys / (A_j A_sys) as composite filters of u.
        const Polynomial den = a_j * a_sys;
        std::vector<TransferFunction> bank_u;
        std::vector<TransferFunction> bank_e;
        bank_u.reserve(static_cast<std::size_t>(n));
        bank_e.reserve(static_cast<std::size_t>(n));
        for (int i = n; i >= 1; --i) {
            bank_u.emplace_back(-1.0 * (Polynomial::power(i) * b_sys), den);
            bank_e.emplace_back(-1.0 * Polynomial::power(i), a_j);
        }
        rows.topRows(n) = filter_bank(bank_u, u, T, input_hold) +
                          filter_bank(bank_e, e, T, Hold::Zoh);
    }

    std::vector<TransferFunction> bank_tail;
    bank_tail.reserve(static_cast<std::size_t>(m) + 1);
    for (int i = m; i >= 0; --i) bank_tail.emplace_back(Polynomial::power(i), a_j);
    rows.bottomRows(m + 1) = filter_bank(bank_tail, u, T, input_hold);
    return rows;
}

Eigen::VectorXd theoretical_output(const Eigen::VectorXd& u, const Eigen::VectorXd& e,
                                   const ThetaVector& theta_sys,
                                   const ThetaVector& theta_j, double T,
                                   Hold input_hold) {
    check_inputs(u, e);
    const Polynomial a_j = theta_j.denominator();
    if (!is_hurwitz(a_j)) throw NonHurwitzIterate();

    const TransferFunction noise_free(theta_sys.numerator(),
                                      a_j * theta_sys.denominator());
    const TransferFunction noise_path(Polynomial::one(), a_j);
    return filter_ct(noise_free, u, T, input_hold) +
           filter_ct(noise_path, e, T, Hold::Zoh);
}

SrivcEstimate theoretical_srivc_estimate(const Eigen::VectorXd& u,
                                         const Eigen::VectorXd& e,
                                         const ThetaVector& theta_sys,
                                         const SrivcConfig& cfg) {
    cfg.validate();
    check_inputs(u, e);
    const double T = cfg.T;
    if (T <= 0.0) throw std::invalid_argument("theoretical estimator needs cfg.T > 0");
    const int n = cfg.theta_init.n();
    const int m = cfg.theta_init.m();
    const double N = static_cast<double>(u.size());

    SrivcEstimate estimate;
    estimate.theta = cfg.theta_init;

    for (int j = 0; j < cfg.max_iter; ++j) {
        const Eigen::MatrixXd phi =
            theoretical_regressor(u, e, theta_sys, estimate.theta, T, cfg.input_hold);
        const Eigen::VectorXd y_f =
            theoretical_output(u, e, theta_sys, estimate.theta, T, cfg.input_hold);
        const Eigen::MatrixXd instr = build_instrument_u(u, T, estimate.theta, cfg);

        const Eigen::MatrixXd normal = (instr * phi.transpose()) / N;
        const Eigen::VectorXd rhs = (instr * y_f) / N;

        Eigen::JacobiSVD<Eigen::MatrixXd> svd(normal);
        const double smin = svd.singularValues().minCoeff();
        const double smax = svd.singularValues().maxCoeff();
        const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
        if (!std::isfinite(cond) || cond > cfg.condition_limit)
            throw SingularNormalMatrix(cond);

        ThetaVector next =
            ThetaVector::from_stacked(normal.colPivHouseholderQr().solve(rhs), n, m);

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
        const double rel = (cur - prev).norm() / cur.norm();

        estimate.relative_errors.push_back(rel);
        estimate.condition_numbers.push_back(cond);
        estimate.theta = std::move(next);
        estimate.iterations = j + 1;
        if (rel < cfg.epsilon) {
            estimate.converged = true;
            break;
        }
    }
    return estimate;
}

}  // namespace srivc
