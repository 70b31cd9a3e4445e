#include "srivc/transfer_function.hpp"

#include <cmath>
#include <stdexcept>

namespace srivc {

TransferFunction::TransferFunction(Polynomial numerator, Polynomial denominator)
    : num(std::move(numerator)), den(std::move(denominator)) {
    if (den.is_zero()) throw std::invalid_argument("transfer function denominator is zero");
    if (!num.is_zero() && num.degree() > den.degree())
        throw std::invalid_argument("improper transfer function: deg(num) > deg(den)");
    if (den(0.0) == 0.0)
        throw std::invalid_argument("denominator vanishes at p = 0 (constant term required)");
}

Eigen::VectorXd ThetaVector::stacked() const {
    Eigen::VectorXd v(size());
    for (int i = 0; i < n(); ++i) v(i) = a[static_cast<std::size_t>(i)];
    for (int i = 0; i <= m(); ++i) v(n() + i) = b[static_cast<std::size_t>(i)];
    return v;
}

ThetaVector ThetaVector::from_stacked(const Eigen::VectorXd& v, int n, int m) {
    if (v.size() != n + m + 1) throw std::invalid_argument("stacked vector length mismatch");
    ThetaVector theta;
    theta.a.assign(v.data(), v.data() + n);
    theta.b.assign(v.data() + n, v.data() + n + m + 1);
    return theta;
}

Polynomial ThetaVector::denominator() const {
    std::vector<double> c = a;
    c.push_back(1.0);
    return Polynomial(std::move(c));
}

Polynomial ThetaVector::numerator() const {
    return Polynomial(b);
}

TransferFunction theta_to_tf(const ThetaVector& theta) {
    if (theta.b.empty()) throw std::invalid_argument("theta requires at least one b coefficient");
    if (theta.n() < theta.m())
        throw std::invalid_argument("improper parameterization: n < m");
    return TransferFunction(theta.numerator(), theta.denominator());
}

ThetaVector tf_to_theta(const TransferFunction& tf) {
    const double constant = tf.den(0.0);
    // constant != 0 is a construction invariant of TransferFunction
    const auto& dc = tf.den.coeffs();
    const auto& nc = tf.num.coeffs();
    ThetaVector theta;
    theta.a.resize(dc.size() - 1);
    for (std::size_t i = 0; i + 1 < dc.size(); ++i) theta.a[i] = dc[i] / constant;
    if (tf.num.is_zero()) {
        theta.b = {0.0};
    } else {
        theta.b.resize(nc.size());
        for (std::size_t i = 0; i < nc.size(); ++i) theta.b[i] = nc[i] / constant;
    }
    return theta;
}

}  // namespace srivc
