#pragma once

#include <Eigen/Core>
#include <vector>

#include "srivc/polynomial.hpp"

namespace srivc {

/// Proper rational function num/den in the differential operator p.
/// The denominator must be nonzero at p = 0 (the constant-term-one
/// convention of the parameterization below makes this automatic).
struct TransferFunction {
    Polynomial num;
    Polynomial den;

    TransferFunction(Polynomial numerator, Polynomial denominator);

    int order() const { return den.degree(); }
    std::complex<double> eval(std::complex<double> p) const { return num(p) / den(p); }
};

/// Stacked parameter vector [a_1 .. a_n  b_0 .. b_m]^T of the model
///     B(p)/A(p),  A(p) = a_1 p^n + ... + a_n p + 1,  B(p) = b_0 p^m + ... + b_m.
/// The unit constant term of A is fixed by convention and not stored.
struct ThetaVector {
    std::vector<double> a;  // [a_1 .. a_n], descending
    std::vector<double> b;  // [b_0 .. b_m], descending

    int n() const { return static_cast<int>(a.size()); }
    int m() const { return static_cast<int>(b.size()) - 1; }
    int size() const { return n() + m() + 1; }

    Eigen::VectorXd stacked() const;
    static ThetaVector from_stacked(const Eigen::VectorXd& v, int n, int m);

    Polynomial denominator() const;  // A(p)
    Polynomial numerator() const;    // B(p)
};

/// B(p)/A(p) from theta. Rejects improper parameterizations (n < m).
TransferFunction theta_to_tf(const ThetaVector& theta);

/// Inverse of theta_to_tf. Normalizes by den(0); rejects den(0) == 0.
ThetaVector tf_to_theta(const TransferFunction& tf);

}  // namespace srivc
