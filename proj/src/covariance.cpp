#include "srivc/covariance.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace srivc {

const char* to_string(CovKind kind) {
    switch (kind) {
        case CovKind::Crlb: return "crlb";
        case CovKind::SrivcAnalytic: return "srivc_analytic";
        case CovKind::SrivcMismatched: return "srivc_mismatched";
        case CovKind::LiteratureCrlb: return "literature_crlb";
        case CovKind::Empirical: return "empirical";
    }
    return "unknown";
}

void CovarianceReport::validate() const {
    if (matrix.rows() != matrix.cols()) throw std::invalid_argument("covariance must be square");
    const double scale = matrix.cwiseAbs().maxCoeff();
    const double asym = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
    if (scale > 0.0 && asym > 1e-10 * scale)
        throw std::invalid_argument("covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (matrix + matrix.transpose()));
    if (es.eigenvalues().minCoeff() < -1e-10 * std::abs(matrix.trace()))
        throw std::invalid_argument("covariance has a significantly negative eigenvalue");
}

namespace {

// Proper and stable; enough to realize the sensitivity filters.
void check_realizable(const ThetaVector& theta_sys) {
    if (theta_sys.n() < theta_sys.m())
        throw std::invalid_argument("system is improper (n < m)");
    if (!is_hurwitz(theta_sys.denominator()))
        throw std::invalid_argument("system denominator is not Hurwitz");
}

// Coprimality and stability guard for the covariance computations.
void check_system(const ThetaVector& theta_sys) {
    check_realizable(theta_sys);
    const Polynomial a = theta_sys.denominator();
    const Polynomial b = theta_sys.numerator();
    if (b.is_zero()) throw std::invalid_argument("system numerator is zero (coprimality violated)");
    if (theta_sys.n() > 0 && !are_coprime(a, b))
        throw std::invalid_argument("system numerator and denominator share a root");
}

// Stacked continuous-time sensitivity filters in theta order.
std::vector<TransferFunction> sensitivity_filters(const ThetaVector& theta_sys) {
    const Polynomial a = theta_sys.denominator();
    const Polynomial b = theta_sys.numerator();
    const Polynomial a_sq = a * a;
    std::vector<TransferFunction> filters;
    filters.reserve(static_cast<std::size_t>(theta_sys.size()));
    for (int i = theta_sys.n(); i >= 1; --i)
        filters.emplace_back(-1.0 * (Polynomial::power(i) * b), a_sq);
    for (int i = theta_sys.m(); i >= 0; --i)
        filters.emplace_back(Polynomial::power(i), a);
    return filters;
}

// Block-diagonal join of discrete single-input systems sharing the input.
StateSpace join_shared_input(const std::vector<StateSpace>& blocks) {
    int states = 0, outputs = 0;
    for (const auto& s : blocks) {
        states += s.states();
        outputs += s.outputs();
    }
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(states, states);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(states, 1);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(outputs, states);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(outputs, 1);
    int so = 0, oo = 0;
    for (const auto& s : blocks) {
        A.block(so, so, s.states(), s.states()) = s.A;
        B.block(so, 0, s.states(), 1) = s.B;
        C.block(oo, so, s.outputs(), s.states()) = s.C;
        D.block(oo, 0, s.outputs(), 1) = s.D;
        so += s.states();
        oo += s.outputs();
    }
    return StateSpace(std::move(A), std::move(B), std::move(C), std::move(D),
                      blocks.front().T);
}

// Discrete realization of the sensitivity bank: the A^2 section and the A
// section each share one state block.
StateSpace discrete_bank(const ThetaVector& theta_sys, double T, Hold hold) {
    const auto filters = sensitivity_filters(theta_sys);
    const int n = theta_sys.n();
    std::vector<StateSpace> blocks;
    if (n > 0) {
        std::vector<TransferFunction> head(filters.begin(), filters.begin() + n);
        blocks.push_back(c2d(stack_shared_den(head), T, hold));
    }
    std::vector<TransferFunction> tail(filters.begin() + n, filters.end());
    blocks.push_back(c2d(stack_shared_den(tail), T, hold));
    return blocks.size() == 1 ? blocks.front() : join_shared_input(blocks);
}

Eigen::MatrixXd invert_information(const Eigen::MatrixXd& info, double lambda) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info);
    const double emin = es.eigenvalues().minCoeff();
    const double emax = es.eigenvalues().maxCoeff();
    if (!(emin > 0.0) || emax / emin > 1e12)
        throw std::invalid_argument(
            "information matrix is singular: deficient excitation or parameterization "
            "(eigenvalue ratio " +
            std::to_string(emin > 0.0 ? emax / emin : std::numeric_limits<double>::infinity()) +
            ")");
    Eigen::MatrixXd inv = es.eigenvectors() *
                          es.eigenvalues().cwiseInverse().asDiagonal() *
                          es.eigenvectors().transpose();
    return lambda * 0.5 * (inv + inv.transpose());
}

}  // namespace

SensitivityBank build_sensitivity_bank(const ThetaVector& theta_sys, double T,
                                       Hold input_hold) {
    check_realizable(theta_sys);
    if (T <= 0.0) throw std::invalid_argument("sample period must be positive");
    return SensitivityBank{sensitivity_filters(theta_sys), T, input_hold,
                           discrete_bank(theta_sys, T, input_hold)};
}

Eigen::MatrixXd stationary_second_moment(const StateSpace& ss_d, double input_variance) {
    if (!ss_d.discrete()) throw std::invalid_argument("moment computation needs a discrete system");
    if (ss_d.inputs() != 1) throw std::invalid_argument("white input must be scalar");
    if (input_variance < 0.0) throw std::invalid_argument("negative input variance");

    const int n = ss_d.states();
    if (n == 0) return ss_d.D * ss_d.D.transpose() * input_variance;

    const Eigen::VectorXcd eig = ss_d.A.eigenvalues();
    if (eig.cwiseAbs().maxCoeff() >= 1.0)
        throw std::invalid_argument("discrete system is not Schur-stable");

    // A P A^T - P = -Q via the Kronecker form; dimensions here stay tiny.
    const Eigen::MatrixXd Q = ss_d.B * ss_d.B.transpose() * input_variance;
    Eigen::MatrixXd K = Eigen::MatrixXd::Identity(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            K.block(i * n, j * n, n, n) -= ss_d.A(i, j) * ss_d.A;
    const Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(Q.data(), n * n);
    const Eigen::VectorXd p = K.partialPivLu().solve(q);
    if (!p.allFinite()) throw std::runtime_error("Lyapunov solve failed");
    Eigen::MatrixXd P = Eigen::Map<const Eigen::MatrixXd>(p.data(), n, n);
    P = 0.5 * (P + P.transpose());

    // State and contemporaneous input are uncorrelated for white input.
    Eigen::MatrixXd moment = ss_d.C * P * ss_d.C.transpose() +
                             ss_d.D * ss_d.D.transpose() * input_variance;
    return 0.5 * (moment + moment.transpose());
}

CovarianceReport crlb_asymptotic(const ThetaVector& theta_sys, double lambda, double T,
                                 Hold input_hold, double input_variance) {
    check_system(theta_sys);
    const SensitivityBank bank = build_sensitivity_bank(theta_sys, T, input_hold);
    const Eigen::MatrixXd info = stationary_second_moment(bank.realization, input_variance);
    CovarianceReport report;
    report.matrix = invert_information(info, lambda);
    report.kind = CovKind::Crlb;
    report.lambda = lambda;
    report.T = T;
    report.input_variance = input_variance;
    report.input_hold = input_hold;
    report.validate();
    return report;
}

CovarianceReport crlb_time_average(const ThetaVector& theta_sys, double lambda, double T,
                                   Hold input_hold, const Eigen::VectorXd& u) {
    check_system(theta_sys);
    if (T <= 0.0) throw std::invalid_argument("sample period must be positive");
    const long N = u.size();
    const int d = theta_sys.size();
    if (N < 100L * d) throw std::invalid_argument("input realization too short");

    const StateSpace bank = discrete_bank(theta_sys, T, input_hold);
    const Eigen::MatrixXd psi = simulate(bank, u);
    const Eigen::MatrixXd info = (psi * psi.transpose()) / static_cast<double>(N);

    // Batch-means standard errors of the moment entries (the series is
    // autocorrelated, so a plain i.i.d. SEM would be optimistic).
    const int batches = 200;
    const long batch_len = N / batches;
    Eigen::MatrixXd batch_mean = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd batch_sq = Eigen::MatrixXd::Zero(d, d);
    for (int b = 0; b < batches; ++b) {
        const Eigen::MatrixXd block = psi.middleCols(b * batch_len, batch_len);
        const Eigen::MatrixXd m =
            (block * block.transpose()) / static_cast<double>(batch_len);
        batch_mean += m;
        batch_sq += m.cwiseProduct(m);
    }
    batch_mean /= batches;
    batch_sq /= batches;
    const Eigen::MatrixXd info_se =
        (((batch_sq - batch_mean.cwiseProduct(batch_mean)).cwiseMax(0.0) *
          (static_cast<double>(batches) / (batches - 1.0))) /
         batches)
            .cwiseSqrt();

    CovarianceReport report;
    report.matrix = invert_information(0.5 * (info + info.transpose()), lambda);
    report.kind = CovKind::Crlb;
    report.lambda = lambda;
    report.T = T;
    report.input_variance = u.squaredNorm() / static_cast<double>(N);
    report.input_hold = input_hold;
    // First-order propagation dP = -P dE P applied entrywise.
    const Eigen::MatrixXd P = report.matrix / lambda;
    Eigen::MatrixXd se = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double acc = 0.0;
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    const double g = P(i, k) * P(l, j) * info_se(k, l);
                    acc += g * g;
                }
            se(i, j) = lambda * std::sqrt(acc);
        }
    report.standard_errors = se;
    report.validate();
    return report;
}

CovarianceReport srivc_asymptotic_cov(const ThetaVector& theta_sys, double lambda,
                                      double T, Hold regressor_input_hold,
                                      Hold instrument_input_hold,
                                      double input_variance) {
    if (regressor_input_hold == instrument_input_hold) {
        CovarianceReport report = crlb_asymptotic(theta_sys, lambda, T,
                                                  regressor_input_hold, input_variance);
        report.kind = CovKind::SrivcAnalytic;
        return report;
    }

    check_system(theta_sys);
    if (T <= 0.0) throw std::invalid_argument("sample period must be positive");

    // One joint realization driven by the same white input: the regressor
    // path under its hold stacked over the instrument path under its hold.
    const StateSpace reg = discrete_bank(theta_sys, T, regressor_input_hold);
    const StateSpace ins = discrete_bank(theta_sys, T, instrument_input_hold);
    const StateSpace both = join_shared_input({reg, ins});
    const Eigen::MatrixXd moment = stationary_second_moment(both, input_variance);

    const int d = theta_sys.size();
    const Eigen::MatrixXd E_tt = moment.topLeftCorner(d, d);
    const Eigen::MatrixXd E_th = moment.topRightCorner(d, d);   // E{tilde hat^T}
    const Eigen::MatrixXd E_hh = moment.bottomRightCorner(d, d);
    const Eigen::MatrixXd E_ht = E_th.transpose();

    // lambda * E_ht^{-1} E_hh E_th^{-1}; both outer factors are nonsymmetric.
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_ht(E_ht);
    const Eigen::MatrixXd Y = lu_ht.solve(E_hh);
    const Eigen::MatrixXd P = lu_ht.solve(Y.transpose()).transpose();
    if (!P.allFinite())
        throw std::invalid_argument("sandwich covariance solve failed (singular cross moment)");

    CovarianceReport report;
    report.matrix = lambda * 0.5 * (P + P.transpose());
    report.kind = CovKind::SrivcMismatched;
    report.lambda = lambda;
    report.T = T;
    report.input_variance = input_variance;
    report.input_hold = regressor_input_hold;
    report.second_hold = instrument_input_hold;
    report.validate();
    return report;
}

CovarianceReport literature_crlb(const ThetaVector& theta_sys, double lambda, double T,
                                 Hold input_hold, Hold output_hold_assumption,
                                 double input_variance) {
    check_system(theta_sys);
    if (T <= 0.0) throw std::invalid_argument("sample period must be positive");

    const Polynomial a = theta_sys.denominator();
    const int n = theta_sys.n();
    const int m = theta_sys.m();

    std::vector<StateSpace> blocks;
    if (n > 0) {
        // Stage one: the sampled noise-free output from the system under the
        // input hold. Stage two: the derivative filters applied to that
        // sampled signal under the assumed output hold. The two stages are
        // discretized separately on purpose; this reproduces the literature's
        // interpolation of an already-sampled signal.
        const StateSpace sys_d =
            c2d(tf_to_ss(theta_to_tf(theta_sys)), T, input_hold);
        std::vector<TransferFunction> deriv;
        deriv.reserve(static_cast<std::size_t>(n));
        for (int i = n; i >= 1; --i)
            deriv.emplace_back(-1.0 * Polynomial::power(i), a);
        const StateSpace bank_d = c2d(stack_shared_den(deriv), T, output_hold_assumption);

        // Series: u -> sys_d -> bank_d.
        const int n1 = sys_d.states();
        const int n2 = bank_d.states();
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
        A.topLeftCorner(n1, n1) = sys_d.A;
        A.bottomLeftCorner(n2, n1) = bank_d.B * sys_d.C;
        A.bottomRightCorner(n2, n2) = bank_d.A;
        Eigen::MatrixXd B(n1 + n2, 1);
        B.topRows(n1) = sys_d.B;
        B.bottomRows(n2) = bank_d.B * sys_d.D;
        Eigen::MatrixXd C(n, n1 + n2);
        C.leftCols(n1) = bank_d.D * sys_d.C;
        C.rightCols(n2) = bank_d.C;
        Eigen::MatrixXd D = bank_d.D * sys_d.D;
        blocks.emplace_back(std::move(A), std::move(B), std::move(C), std::move(D), T);
    }

    std::vector<TransferFunction> tail;
    tail.reserve(static_cast<std::size_t>(m) + 1);
    for (int i = m; i >= 0; --i) tail.emplace_back(Polynomial::power(i), a);
    blocks.push_back(c2d(stack_shared_den(tail), T, input_hold));

    const StateSpace joint = blocks.size() == 1 ? blocks.front() : join_shared_input(blocks);
    const Eigen::MatrixXd info = stationary_second_moment(joint, input_variance);

    CovarianceReport report;
    report.matrix = invert_information(info, lambda);
    report.kind = CovKind::LiteratureCrlb;
    report.lambda = lambda;
    report.T = T;
    report.input_variance = input_variance;
    report.input_hold = input_hold;
    report.second_hold = output_hold_assumption;
    report.validate();
    return report;
}

void save_report_csv(const CovarianceReport& report, const std::string& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot open " + csv_path + " for writing");
    char buf[64];
    for (int i = 0; i < report.dim(); ++i) {
        for (int j = 0; j < report.dim(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", report.matrix(i, j));
            out << buf << (j + 1 < report.dim() ? "," : "\n");
        }
    }
    out.close();

    nlohmann::json meta;
    meta["kind"] = to_string(report.kind);
    meta["lambda"] = report.lambda;
    meta["T"] = report.T;
    meta["input_variance"] = report.input_variance;
    meta["input_hold"] = to_string(report.input_hold);
    if (report.second_hold) meta["second_hold"] = to_string(*report.second_hold);
    if (report.standard_errors) {
        auto& se = *report.standard_errors;
        std::vector<std::vector<double>> rows;
        for (int i = 0; i < se.rows(); ++i)
            rows.emplace_back(se.row(i).begin(), se.row(i).end());
        meta["standard_errors"] = rows;
    }
    std::ofstream meta_out(csv_path + ".meta.json");
    if (!meta_out) throw std::runtime_error("cannot open sidecar for " + csv_path);
    meta_out << meta.dump(2) << "\n";
}

}  // namespace srivc
