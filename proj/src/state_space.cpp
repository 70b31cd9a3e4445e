#include "srivc/state_space.hpp"

#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

namespace srivc {

StateSpace::StateSpace(Eigen::MatrixXd A_, Eigen::MatrixXd B_, Eigen::MatrixXd C_,
                       Eigen::MatrixXd D_, std::optional<double> T_)
    : A(std::move(A_)), B(std::move(B_)), C(std::move(C_)), D(std::move(D_)), T(T_) {
    if (A.rows() != A.cols()) throw std::invalid_argument("A must be square");
    if (B.rows() != A.rows()) throw std::invalid_argument("B row count mismatch");
    if (C.cols() != A.rows()) throw std::invalid_argument("C column count mismatch");
    if (D.rows() != C.rows() || D.cols() != B.cols())
        throw std::invalid_argument("D dimension mismatch");
    if (T.has_value() && *T <= 0.0) throw std::invalid_argument("sample period must be positive");
}

namespace {

// Row of padded numerator coefficients (length n) and feedthrough after
// monic normalization and, for biproper inputs, one long-division step.
void canonical_row(const TransferFunction& tf, const Eigen::VectorXd& monic_den_tail,
                   Eigen::RowVectorXd& c_row, double& d) {
    const int n = tf.den.degree();
    const double lead = tf.den.leading();
    c_row = Eigen::RowVectorXd::Zero(n);
    if (tf.num.is_zero()) {
        d = 0.0;
        return;
    }
    const auto& nc = tf.num.coeffs();
    const int m = tf.num.degree();
    Eigen::VectorXd padded = Eigen::VectorXd::Zero(n + 1);
    for (int i = 0; i <= m; ++i) padded(n - m + i) = nc[static_cast<std::size_t>(i)] / lead;
    d = padded(0);
    for (int i = 0; i < n; ++i) c_row(i) = padded(i + 1) - d * monic_den_tail(i);
}

}  // namespace

StateSpace tf_to_ss(const TransferFunction& tf) {
    return stack_shared_den({tf});
}

StateSpace stack_shared_den(const std::vector<TransferFunction>& tfs) {
    if (tfs.empty()) throw std::invalid_argument("empty filter bank");
    const Polynomial& den = tfs.front().den;
    for (const auto& tf : tfs)
        if (!(tf.den == den))
            throw std::invalid_argument("filter bank denominators must match exactly");

    const int n = den.degree();
    const int p = static_cast<int>(tfs.size());
    const double lead = den.leading();

    Eigen::VectorXd monic_tail(n);
    for (int i = 0; i < n; ++i) monic_tail(i) = den.coeffs()[static_cast<std::size_t>(i) + 1] / lead;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    if (n > 0) {
        A.row(0) = -monic_tail.transpose();
        for (int i = 1; i < n; ++i) A(i, i - 1) = 1.0;
    }
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, 1);
    if (n > 0) B(0, 0) = 1.0;

    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(p, n);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(p, 1);
    for (int i = 0; i < p; ++i) {
        Eigen::RowVectorXd c_row;
        double d = 0.0;
        canonical_row(tfs[static_cast<std::size_t>(i)], monic_tail, c_row, d);
        C.row(i) = c_row;
        D(i, 0) = d;
    }
    return StateSpace(std::move(A), std::move(B), std::move(C), std::move(D));
}

StateSpace c2d(const StateSpace& ss, double T, Hold hold) {
    if (ss.discrete()) throw std::invalid_argument("c2d input must be continuous-time");
    if (T <= 0.0) throw std::invalid_argument("sample period must be positive");

    const int n = ss.states();
    const int m = ss.inputs();
    if (n == 0) return StateSpace(ss.A, ss.B, ss.C, ss.D, T);

    if (hold == Hold::Zoh) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + m, n + m);
        M.topLeftCorner(n, n) = ss.A * T;
        M.topRightCorner(n, m) = ss.B * T;
        const Eigen::MatrixXd E = M.exp();
        return StateSpace(E.topLeftCorner(n, n), E.topRightCorner(n, m), ss.C, ss.D, T);
    }

    // FOH: triple-block exponential; gamma2 is the triangle-hold correction.
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + 2 * m, n + 2 * m);
    M.topLeftCorner(n, n) = ss.A * T;
    M.block(0, n, n, m) = ss.B * T;
    M.block(n, n + m, m, m) = Eigen::MatrixXd::Identity(m, m);
    const Eigen::MatrixXd E = M.exp();
    const Eigen::MatrixXd Ad = E.topLeftCorner(n, n);
    const Eigen::MatrixXd gamma1 = E.block(0, n, n, m);
    const Eigen::MatrixXd gamma2 = E.block(0, n + m, n, m);
    Eigen::MatrixXd Bd = gamma1 + Ad * gamma2 - gamma2;
    Eigen::MatrixXd Dd = ss.D + ss.C * gamma2;
    return StateSpace(Ad, std::move(Bd), ss.C, std::move(Dd), T);
}

Eigen::MatrixXd simulate(const StateSpace& ss_d, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& x0) {
    if (!ss_d.discrete()) throw std::invalid_argument("simulate requires a discrete system");
    if (ss_d.inputs() != 1) throw std::invalid_argument("simulate expects a single input");
    const int n = ss_d.states();
    Eigen::VectorXd x;
    if (x0.size() == 0) {
        x = Eigen::VectorXd::Zero(n);
    } else {
        if (x0.size() != n) throw std::invalid_argument("initial state dimension mismatch");
        x = x0;
    }

    const long N = u.size();
    Eigen::MatrixXd out(ss_d.outputs(), N);
    Eigen::VectorXd x_next(n);
    for (long k = 0; k < N; ++k) {
        const double uk = u(k);
        out.col(k).noalias() = ss_d.C * x;
        out.col(k).noalias() += ss_d.D.col(0) * uk;
        if (n > 0) {
            x_next.noalias() = ss_d.A * x;
            x_next.noalias() += ss_d.B.col(0) * uk;
            x.swap(x_next);
        }
    }
    return out;
}

}  // namespace srivc
