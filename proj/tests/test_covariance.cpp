#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "srivc/covariance.hpp"
#include "srivc/experiment.hpp"
#include "srivc/filtering.hpp"

using namespace srivc;

namespace {
const ThetaVector kFirstOrder{{0.1}, {10.0}};       // G = 10/(0.1p+1), T = 0.01
const ThetaVector kSecondOrder{{0.04, 0.2}, {1.0}};  // G = 1/(0.04p^2+0.2p+1), T = 0.1

double max_rel_err(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
    return ((got - want).cwiseAbs().array() / want.cwiseAbs().array()).maxCoeff();
}
}  // namespace

TEST_CASE("sensitivity bank layout for the first-order system") {
    const SensitivityBank bank = build_sensitivity_bank(kFirstOrder, 0.01, Hold::Zoh);
    REQUIRE(bank.filters.size() == 2);
    // -10 p / (0.1p+1)^2 then 1/(0.1p+1)
    CHECK(bank.filters[0].num.coeffs() == std::vector<double>{-10.0, 0.0});
    CHECK(bank.filters[0].den.degree() == 2);
    CHECK(bank.filters[1].num.coeffs() == std::vector<double>{1.0});
    CHECK(bank.filters[1].den.coeffs() == std::vector<double>{0.1, 1.0});
    CHECK(bank.realization.outputs() == 2);
    CHECK(bank.realization.discrete());

    SUBCASE("zero numerator degenerate zeroes the derivative filters") {
        const SensitivityBank degenerate =
            build_sensitivity_bank(ThetaVector{{0.1}, {0.0}}, 0.01, Hold::Zoh);
        CHECK(degenerate.filters[0].num.is_zero());
        RngStream stream(81, 0, RngStream::kInput);
        const Eigen::MatrixXd psi =
            simulate(degenerate.realization, generate_input(64, 1.0, stream));
        CHECK(psi.row(0).cwiseAbs().maxCoeff() == 0.0);
        CHECK(psi.row(1).cwiseAbs().maxCoeff() > 0.0);
    }
    SUBCASE("unstable system rejected") {
        CHECK_THROWS_AS(build_sensitivity_bank(ThetaVector{{-0.1}, {1.0}}, 0.01, Hold::Zoh),
                        std::invalid_argument);
    }
}

TEST_CASE("stationary_second_moment") {
    SUBCASE("pure gain") {
        const StateSpace gain(Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, 1),
                              Eigen::MatrixXd(1, 0), Eigen::MatrixXd::Ones(1, 1), 0.1);
        const Eigen::MatrixXd moment = stationary_second_moment(gain, 1.0);
        CHECK(moment(0, 0) == doctest::Approx(1.0));
    }
    SUBCASE("scalar AR(1): x+ = 0.5x + u gives variance 4/3") {
        const StateSpace ar(0.5 * Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1),
                            Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Zero(1, 1), 1.0);
        const Eigen::MatrixXd moment = stationary_second_moment(ar, 1.0);
        CHECK(moment(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("unstable system rejected") {
        const StateSpace bad(1.1 * Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1),
                             Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Zero(1, 1), 1.0);
        CHECK_THROWS_AS(stationary_second_moment(bad, 1.0), std::invalid_argument);
    }
    SUBCASE("Lyapunov agrees with a long time average") {
        // 1e7-sample simulation of the first-order sensitivity bank.
        const SensitivityBank bank = build_sensitivity_bank(kFirstOrder, 0.01, Hold::Zoh);
        const Eigen::MatrixXd analytic = stationary_second_moment(bank.realization, 1.0);
        RngStream stream(424242, 0, RngStream::kInput);
        const long N = 10000000;
        const Eigen::VectorXd u = generate_input(N, 1.0, stream);
        const Eigen::MatrixXd psi = simulate(bank.realization, u);
        const Eigen::MatrixXd timeavg = (psi * psi.transpose()) / static_cast<double>(N);
        CHECK(max_rel_err(timeavg, analytic) < 0.005);
    }
}

TEST_CASE("CRLB reproduces the first-order golden matrix") {
    const CovarianceReport report = crlb_asymptotic(kFirstOrder, 1.0, 0.01, Hold::Zoh, 1.0);
    Eigen::MatrixXd expected(2, 2);
    expected << 8.0334e-3, 0.4010, 0.4010, 40.0333;
    CHECK(max_rel_err(report.matrix, expected) < 5e-4);
    CHECK(report.kind == CovKind::Crlb);

    SUBCASE("doubling lambda doubles every entry") {
        const CovarianceReport doubled =
            crlb_asymptotic(kFirstOrder, 2.0, 0.01, Hold::Zoh, 1.0);
        CHECK((doubled.matrix - 2.0 * report.matrix).cwiseAbs().maxCoeff() <
              1e-12 * report.matrix.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("literature variant reproduces its golden matrix and differs from the CRLB") {
    const CovarianceReport lit =
        literature_crlb(kFirstOrder, 1.0, 0.01, Hold::Zoh, Hold::Zoh, 1.0);
    Eigen::MatrixXd expected(2, 2);
    expected << 7.2629e-3, 0.3813, 0.3813, 40.0333;
    CHECK(max_rel_err(lit.matrix, expected) < 5e-4);
    CHECK(lit.kind == CovKind::LiteratureCrlb);

    const CovarianceReport crlb = crlb_asymptotic(kFirstOrder, 1.0, 0.01, Hold::Zoh, 1.0);
    SUBCASE("the (2,2) input-only entry is unaffected") {
        CHECK(lit.matrix(1, 1) == doctest::Approx(crlb.matrix(1, 1)).epsilon(1e-9));
    }
    SUBCASE("the (1,1) entry disagrees by more than 9 percent") {
        CHECK(std::abs(lit.matrix(0, 0) - crlb.matrix(0, 0)) > 0.09 * crlb.matrix(0, 0));
    }
    SUBCASE("ZOH and FOH output assumptions give different matrices") {
        const CovarianceReport foh =
            literature_crlb(kFirstOrder, 1.0, 0.01, Hold::Zoh, Hold::Foh, 1.0);
        CHECK(max_rel_err(foh.matrix, lit.matrix) > 1e-3);
    }
}

TEST_CASE("coprimality and stability guards on the covariance operations") {
    SUBCASE("zero numerator rejected") {
        CHECK_THROWS_AS(crlb_asymptotic(ThetaVector{{0.1}, {0.0}}, 1.0, 0.01, Hold::Zoh, 1.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(srivc_asymptotic_cov(ThetaVector{{0.1}, {0.0}}, 1.0, 0.01,
                                             Hold::Zoh, Hold::Foh, 1.0),
                        std::invalid_argument);
    }
    SUBCASE("shared root rejected") {
        // B = p + 10 shares the root of A = 0.1 p + 1
        CHECK_THROWS_AS(
            crlb_asymptotic(ThetaVector{{0.1}, {1.0, 10.0}}, 1.0, 0.01, Hold::Zoh, 1.0),
            std::invalid_argument);
    }
    SUBCASE("near pole-zero cancellation surfaces as a singular information matrix") {
        // Second-order system with an almost-cancelling zero: coprime at the
        // 1e-8 root tolerance, but the sensitivity directions collapse.
        const double eps = 1e-7;
        const Polynomial a = Polynomial({0.1, 1.0}) * Polynomial({0.2, 1.0});
        ThetaVector theta;
        theta.a = {a.coeffs()[0], a.coeffs()[1]};
        theta.b = {0.1, 1.0 + eps};  // zero at -10(1+eps) vs pole at -10
        CHECK_THROWS_WITH_AS(crlb_asymptotic(theta, 1.0, 0.01, Hold::Zoh, 1.0),
                             doctest::Contains("singular"), std::invalid_argument);
    }
}

TEST_CASE("matched-hold covariance equals the CRLB entrywise") {
    const CovarianceReport crlb = crlb_asymptotic(kSecondOrder, 1.0, 0.1, Hold::Zoh, 1.0);
    const CovarianceReport matched =
        srivc_asymptotic_cov(kSecondOrder, 1.0, 0.1, Hold::Zoh, Hold::Zoh, 1.0);
    CHECK(matched.kind == CovKind::SrivcAnalytic);
    CHECK(max_rel_err(matched.matrix, crlb.matrix) < 1e-10);
}

TEST_CASE("mismatched instrument hold inflates the covariance above the CRLB") {
    const CovarianceReport crlb = crlb_asymptotic(kSecondOrder, 1.0, 0.1, Hold::Zoh, 1.0);
    const CovarianceReport mismatched =
        srivc_asymptotic_cov(kSecondOrder, 1.0, 0.1, Hold::Zoh, Hold::Foh, 1.0);
    CHECK(mismatched.kind == CovKind::SrivcMismatched);
    CHECK(mismatched.matrix(0, 0) > crlb.matrix(0, 0));

    SUBCASE("difference to the CRLB is positive semidefinite") {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mismatched.matrix - crlb.matrix);
        CHECK(es.eigenvalues().minCoeff() > -1e-9 * crlb.matrix.trace());
    }
    SUBCASE("sandwich cross-checked by a long paired time average") {
        // Drive the regressor (ZOH) and instrument (FOH) paths with the same
        // white input and average the three moments directly.
        const long N = 2000000;
        RngStream stream(515151, 0, RngStream::kInput);
        const Eigen::VectorXd u = generate_input(N, 1.0, stream);
        const auto filters = build_sensitivity_bank(kSecondOrder, 0.1, Hold::Zoh).filters;
        std::vector<TransferFunction> head(filters.begin(), filters.begin() + 2);
        std::vector<TransferFunction> tail(filters.begin() + 2, filters.end());
        auto run = [&](Hold hold) {
            Eigen::MatrixXd rows(3, N);
            rows.topRows(2) = filter_bank(head, u, 0.1, hold);
            rows.bottomRows(1) = filter_bank(tail, u, 0.1, hold);
            return rows;
        };
        const Eigen::MatrixXd tr = run(Hold::Zoh);
        const Eigen::MatrixXd hi = run(Hold::Foh);
        const Eigen::MatrixXd E_ht = (hi * tr.transpose()) / static_cast<double>(N);
        const Eigen::MatrixXd E_hh = (hi * hi.transpose()) / static_cast<double>(N);
        const Eigen::MatrixXd sandwich =
            E_ht.inverse() * E_hh * E_ht.transpose().inverse();
        CHECK(max_rel_err(sandwich, mismatched.matrix) < 0.02);
    }
}

TEST_CASE("time-average fallback matches the analytic path on white input") {
    RngStream stream(616161, 0, RngStream::kInput);
    const Eigen::VectorXd u = generate_input(2000000, 1.0, stream);
    const CovarianceReport fallback =
        crlb_time_average(kFirstOrder, 1.0, 0.01, Hold::Zoh, u);
    const CovarianceReport analytic = crlb_asymptotic(kFirstOrder, 1.0, 0.01, Hold::Zoh, 1.0);
    CHECK(max_rel_err(fallback.matrix, analytic.matrix) < 0.02);
    REQUIRE(fallback.standard_errors.has_value());
    // the reported standard errors should cover the actual deviation
    const Eigen::MatrixXd deviation = (fallback.matrix - analytic.matrix).cwiseAbs();
    CHECK((deviation.array() <= 5.0 * fallback.standard_errors->array()).all());

    SUBCASE("coloured input gives a different, still valid bound") {
        const Eigen::VectorXd coloured =
            filter_ct(TransferFunction({{1.0}}, {{0.05, 1.0}}), u, 0.01, Hold::Zoh);
        const CovarianceReport shaped =
            crlb_time_average(kFirstOrder, 1.0, 0.01, Hold::Zoh, coloured);
        CHECK_NOTHROW(shaped.validate());
        CHECK(max_rel_err(shaped.matrix, analytic.matrix) > 0.05);
    }
    SUBCASE("too-short realizations rejected") {
        CHECK_THROWS_AS(
            crlb_time_average(kFirstOrder, 1.0, 0.01, Hold::Zoh, Eigen::VectorXd::Ones(50)),
            std::invalid_argument);
    }
}

TEST_CASE("all analytic reports are symmetric PSD and validate") {
    for (const CovarianceReport& report :
         {crlb_asymptotic(kFirstOrder, 1.0, 0.01, Hold::Zoh, 1.0),
          crlb_asymptotic(kSecondOrder, 0.5, 0.1, Hold::Foh, 2.0),
          srivc_asymptotic_cov(kSecondOrder, 1.0, 0.1, Hold::Zoh, Hold::Foh, 1.0),
          literature_crlb(kFirstOrder, 1.0, 0.01, Hold::Zoh, Hold::Foh, 1.0)}) {
        CHECK_NOTHROW(report.validate());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(report.matrix);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("lambda scaling is linear for every report kind") {
    auto scaled = [](const CovarianceReport& one, const CovarianceReport& two) {
        return (two.matrix - 2.0 * one.matrix).cwiseAbs().maxCoeff() /
               one.matrix.cwiseAbs().maxCoeff();
    };
    CHECK(scaled(crlb_asymptotic(kSecondOrder, 1.0, 0.1, Hold::Zoh, 1.0),
                 crlb_asymptotic(kSecondOrder, 2.0, 0.1, Hold::Zoh, 1.0)) < 1e-14);
    CHECK(scaled(srivc_asymptotic_cov(kSecondOrder, 1.0, 0.1, Hold::Zoh, Hold::Foh, 1.0),
                 srivc_asymptotic_cov(kSecondOrder, 2.0, 0.1, Hold::Zoh, Hold::Foh, 1.0)) <
          1e-14);
    CHECK(scaled(literature_crlb(kFirstOrder, 1.0, 0.01, Hold::Zoh, Hold::Zoh, 1.0),
                 literature_crlb(kFirstOrder, 2.0, 0.01, Hold::Zoh, Hold::Zoh, 1.0)) < 1e-14);
}
