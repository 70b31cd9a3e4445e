#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "srivc/polynomial.hpp"

using namespace srivc;

TEST_CASE("construction trims leading zeros and tracks degree") {
    Polynomial p({0.0, 0.0, 2.0, 1.0});
    CHECK(p.degree() == 1);
    CHECK(p.coeffs() == std::vector<double>{2.0, 1.0});
    CHECK(Polynomial().is_zero());
    CHECK(Polynomial({0.0, 0.0}).is_zero());
    CHECK(Polynomial::power(3).degree() == 3);
}

TEST_CASE("evaluation matches Horner recomputation") {
    Polynomial p({0.04, 0.2, 1.0});
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    for (int i = 0; i < 50; ++i) {
        const double x = dist(rng);
        double horner = 0.0;
        for (double c : p.coeffs()) horner = horner * x + c;
        CHECK(p(x) == doctest::Approx(horner).epsilon(1e-15));
    }
}

TEST_CASE("roots of a quadratic match the closed form") {
    // 0.04 p^2 + 0.2 p + 1 has roots -2.5 +/- 4.330127...i
    Polynomial p({0.04, 0.2, 1.0});
    auto roots = p.roots();
    REQUIRE(roots.size() == 2);
    std::sort(roots.begin(), roots.end(),
              [](auto a, auto b) { return a.imag() < b.imag(); });
    CHECK(roots[0].real() == doctest::Approx(-2.5).epsilon(1e-12));
    CHECK(roots[0].imag() == doctest::Approx(-std::sqrt(75.0) / 2.0).epsilon(1e-12));
    CHECK(roots[1].imag() == doctest::Approx(std::sqrt(75.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("arithmetic") {
    Polynomial a({1.0, 1.0});   // p + 1
    Polynomial b({1.0, 2.0});   // p + 2
    CHECK((a * b).coeffs() == std::vector<double>{1.0, 3.0, 2.0});
    CHECK((a + b).coeffs() == std::vector<double>{2.0, 3.0});
    CHECK((a + (-1.0 * a)).is_zero());
    CHECK((a * Polynomial()).is_zero());
}

TEST_CASE("are_coprime") {
    CHECK(are_coprime(Polynomial({1.0, 1.0}), Polynomial({1.0, 2.0})));
    CHECK_FALSE(are_coprime(Polynomial({1.0, 3.0, 2.0}), Polynomial({1.0, 1.0})));
    // constant numerator shares no roots
    CHECK(are_coprime(Polynomial({0.1, 1.0}), Polynomial({10.0})));
    CHECK_THROWS_AS(are_coprime(Polynomial(), Polynomial({1.0})), std::invalid_argument);
}

TEST_CASE("is_hurwitz") {
    CHECK(is_hurwitz(Polynomial({0.1, 1.0})));          // root -10
    CHECK_FALSE(is_hurwitz(Polynomial({1.0, 0.0, -1.0})));  // p^2 - 1, root +1
    CHECK(is_hurwitz(Polynomial({0.04, 0.2, 1.0})));    // roots -2.5 +/- 4.33i
    CHECK(is_hurwitz(Polynomial({1.0})));               // constant: vacuous
    CHECK_THROWS_AS(is_hurwitz(Polynomial()), std::invalid_argument);
}

TEST_CASE("is_hurwitz agrees with the max real part of random root sets") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> re(-3.0, 3.0);
    std::uniform_real_distribution<double> im(0.1, 4.0);
    std::uniform_int_distribution<int> pairs(1, 3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::complex<double>> roots;
        double max_re = -1e300;
        const int np = pairs(rng);
        for (int i = 0; i < np; ++i) {
            const double r = re(rng);
            const double w = im(rng);
            roots.emplace_back(r, w);
            roots.emplace_back(r, -w);
            max_re = std::max(max_re, r);
        }
        if (std::abs(max_re) < 1e-3) continue;  // avoid the tolerance boundary
        // monic polynomial from the roots, constant term arbitrary nonzero
        std::vector<std::complex<double>> c{1.0};
        for (const auto& root : roots) {
            std::vector<std::complex<double>> next(c.size() + 1, 0.0);
            for (std::size_t k = 0; k < c.size(); ++k) {
                next[k] += c[k];
                next[k + 1] -= c[k] * root;
            }
            c = next;
        }
        std::vector<double> coeffs(c.size());
        for (std::size_t k = 0; k < c.size(); ++k) coeffs[k] = c[k].real();
        CHECK(is_hurwitz(Polynomial(coeffs)) == (max_re < 0.0));
    }
}

TEST_CASE("from_roots_unit_constant rebuilds with constant term one") {
    const Polynomial rebuilt =
        Polynomial::from_roots_unit_constant({{-2.5, 4.3}, {-2.5, -4.3}});
    CHECK(rebuilt.coeffs().back() == doctest::Approx(1.0));
    CHECK(rebuilt.degree() == 2);
    const auto roots = rebuilt.roots();
    for (const auto& r : roots) CHECK(r.real() == doctest::Approx(-2.5).epsilon(1e-10));
}
