#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace srivc {

/// Real polynomial in the differential operator p, stored in descending
/// power order: coeffs()[0] multiplies p^degree().
class Polynomial {
public:
    Polynomial() : coeffs_{} {}  // identically zero
    Polynomial(std::initializer_list<double> coeffs_descending);
    explicit Polynomial(std::vector<double> coeffs_descending);

    static Polynomial one() { return Polynomial({1.0}); }
    static Polynomial power(int exponent);  // p^exponent

    bool is_zero() const { return coeffs_.empty(); }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }  // -1 for zero
    const std::vector<double>& coeffs() const { return coeffs_; }
    double leading() const;

    double operator()(double x) const;  // Horner
    std::complex<double> operator()(std::complex<double> x) const;

    /// Roots via eigenvalues of the monic companion matrix. Empty for
    /// degree <= 0.
    std::vector<std::complex<double>> roots() const;

    /// Rebuilds a real polynomial from a closed-under-conjugation root set,
    /// scaled so the constant term equals one.
    static Polynomial from_roots_unit_constant(
        const std::vector<std::complex<double>>& roots);

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(double s, const Polynomial& a);
    bool operator==(const Polynomial& other) const { return coeffs_ == other.coeffs_; }

private:
    std::vector<double> coeffs_;  // empty iff zero polynomial
};

/// True iff a and b share no root within tol (roots extracted independently).
/// Throws if either polynomial is identically zero.
bool are_coprime(const Polynomial& a, const Polynomial& b, double tol = 1e-8);

/// True iff every root has real part < -tol. Constants are vacuously stable.
/// Throws on the zero polynomial.
bool is_hurwitz(const Polynomial& a, double tol = 1e-8);

}  // namespace srivc
