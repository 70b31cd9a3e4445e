#include "srivc/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srivc {

namespace {
std::vector<double> trim_leading_zeros(std::vector<double> c) {
    std::size_t first = 0;
    while (first < c.size() && c[first] == 0.0) ++first;
    c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(first));
    return c;
}
}  // namespace

Polynomial::Polynomial(std::initializer_list<double> coeffs_descending)
    : coeffs_(trim_leading_zeros(std::vector<double>(coeffs_descending))) {}

Polynomial::Polynomial(std::vector<double> coeffs_descending)
    : coeffs_(trim_leading_zeros(std::move(coeffs_descending))) {}

Polynomial Polynomial::power(int exponent) {
    if (exponent < 0) throw std::invalid_argument("negative power");
    std::vector<double> c(static_cast<std::size_t>(exponent) + 1, 0.0);
    c[0] = 1.0;
    return Polynomial(std::move(c));
}

double Polynomial::leading() const {
    if (is_zero()) throw std::invalid_argument("zero polynomial has no leading coefficient");
    return coeffs_.front();
}

double Polynomial::operator()(double x) const {
    double acc = 0.0;
    for (double c : coeffs_) acc = acc * x + c;
    return acc;
}

std::complex<double> Polynomial::operator()(std::complex<double> x) const {
    std::complex<double> acc = 0.0;
    for (double c : coeffs_) acc = acc * x + c;
    return acc;
}

std::vector<std::complex<double>> Polynomial::roots() const {
    if (is_zero()) throw std::invalid_argument("zero polynomial has no well-defined roots");
    const int n = degree();
    if (n <= 0) return {};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) companion(0, i) = -coeffs_[static_cast<std::size_t>(i) + 1] / coeffs_[0];
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

Polynomial Polynomial::from_roots_unit_constant(const std::vector<std::complex<double>>& roots) {
    std::vector<std::complex<double>> c{1.0};
    for (const auto& r : roots) {
        std::vector<std::complex<double>> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i] += c[i];
            next[i + 1] -= c[i] * r;
        }
        c = std::move(next);
    }
    std::vector<double> real(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) real[i] = c[i].real();
    const double constant = real.back();
    if (std::abs(constant) < 1e-300)
        throw std::invalid_argument("root set yields zero constant term; cannot normalize");
    for (double& v : real) v /= constant;
    return Polynomial(std::move(real));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return Polynomial();
    std::vector<double> r(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
            r[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Polynomial(std::move(r));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    const std::size_t n = std::max(a.coeffs_.size(), b.coeffs_.size());
    std::vector<double> r(n, 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
        r[n - a.coeffs_.size() + i] += a.coeffs_[i];
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i)
        r[n - b.coeffs_.size() + i] += b.coeffs_[i];
    return Polynomial(std::move(r));
}

Polynomial operator*(double s, const Polynomial& a) {
    std::vector<double> r = a.coeffs_;
    for (double& v : r) v *= s;
    return Polynomial(std::move(r));
}

bool are_coprime(const Polynomial& a, const Polynomial& b, double tol) {
    if (a.is_zero() || b.is_zero())
        throw std::invalid_argument("coprimality is undefined for the zero polynomial");
    const auto ra = a.roots();
    const auto rb = b.roots();
    for (const auto& x : ra)
        for (const auto& y : rb)
            if (std::abs(x - y) <= tol) return false;
    return true;
}

bool is_hurwitz(const Polynomial& a, double tol) {
    if (a.is_zero()) throw std::invalid_argument("stability is undefined for the zero polynomial");
    for (const auto& r : a.roots())
        if (r.real() >= -tol) return false;
    return true;
}

}  // namespace srivc
