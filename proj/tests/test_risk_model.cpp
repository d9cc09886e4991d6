#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "bivruin/risk_model.hpp"
#include "bivruin/rng.hpp"

using namespace bivruin;
using cd = std::complex<double>;

namespace {

RiskProcess det_line(double c, double lambda) {
    return RiskProcess::with_claims(c, lambda, ClaimDistribution::deterministic(1.0));
}

RiskProcess exp_line(double c, double lambda, double theta) {
    return RiskProcess::with_claims(c, lambda, ClaimDistribution::exponential(theta));
}

CoverageModel two_lines(RiskProcess a, RiskProcess b, double r1, double r2) {
    CoverageModel m;
    m.line1 = std::move(a);
    m.line2 = std::move(b);
    m.r1 = TransferCost::finite(r1);
    m.r2 = TransferCost::finite(r2);
    return m;
}

std::vector<RiskProcess> model_zoo() {
    return {
        det_line(1.0, 0.5),
        det_line(1.0, 0.9),
        exp_line(1.0, 0.5, 1.0),
        exp_line(1.0, 2.0, 1.0),  // negative drift
        RiskProcess::with_claims(1.3, 0.8, ClaimDistribution::erlang(2, 3.0)),
        RiskProcess::with_claims(
            2.0, 1.1,
            ClaimDistribution::mixture({{0.4, ClaimDistribution::deterministic(0.5)},
                                        {0.6, ClaimDistribution::exponential(2.0)}})),
        RiskProcess::drift_only(0.7),
    };
}

}  // namespace

TEST_CASE("exponent values") {
    const RiskProcess line = det_line(1.0, 0.5);
    CHECK(line.exponent(0.0) == 0.0);
    // s c - lambda (1 - exp(-s)) at s = 1
    CHECK(line.exponent(1.0) ==
          doctest::Approx(1.0 - 0.5 * (1.0 - std::exp(-1.0))).epsilon(1e-15));
    const RiskProcess drift = RiskProcess::drift_only(0.25);
    for (const double s : {0.1, 1.0, 7.0}) {
        CHECK(drift.exponent(s) == doctest::Approx(0.25 * s).epsilon(1e-15));
    }
}

TEST_CASE("exponent derivative matches finite differences") {
    const double h = 1e-6;
    for (const RiskProcess& proc : model_zoo()) {
        for (const double s : {0.2, 1.0, 3.0}) {
            const double numeric = (proc.exponent(s + h) - proc.exponent(s - h)) / (2.0 * h);
            CHECK(proc.exponent_derivative(s) == doctest::Approx(numeric).epsilon(1e-6));
        }
        CHECK(proc.exponent_derivative(0.0) == doctest::Approx(proc.drift()).epsilon(1e-12));
    }
}

TEST_CASE("drift values") {
    CHECK(det_line(1.0, 0.5).drift() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(det_line(1.0, 0.9).drift() == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(det_line(1.0, 1.0).drift() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("process validation") {
    CHECK_THROWS_AS(RiskProcess::drift_only(0.0), std::invalid_argument);
    RiskProcess bad;
    bad.premium_rate = 1.0;
    bad.claim_rate = 1.0;  // rate without a law
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    RiskProcess bad2;
    bad2.premium_rate = 1.0;
    bad2.claims = ClaimDistribution::deterministic(1.0);  // law without a rate
    CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
}

TEST_CASE("bivariate exponent") {
    const CoverageModel indep = two_lines(det_line(1.0, 0.5), exp_line(1.0, 0.9, 2.0), 1.1, 1.1);
    CHECK(bivariate_exponent(indep, 0.0, 0.0) == cd{0.0, 0.0});
    auto rng = substream(5, StreamRole::generic, 0);
    for (int i = 0; i < 5; ++i) {
        const double s1 = 3.0 * uniform01(rng);
        const double s2 = 3.0 * uniform01(rng);
        const cd want = indep.line1.exponent(cd{s1, 0.0}) + indep.line2.exponent(cd{s2, 0.0});
        CHECK(std::abs(bivariate_exponent(indep, s1, s2) - want) <= 1e-14);
    }

    CoverageModel shock;
    shock.line1 = RiskProcess::drift_only(1.0);
    shock.line2 = RiskProcess::drift_only(1.0);
    shock.r1 = TransferCost::finite(1.0);
    shock.r2 = TransferCost::finite(1.0);
    shock.joint = CommonStream{
        1.0, JointClaimDistribution({{1.0, ClaimDistribution::deterministic(1.0),
                                      ClaimDistribution::deterministic(1.0)}})};
    // s1 c1 + s2 c2 - lambda (1 - exp(-2)) at s1 = s2 = 1
    CHECK(bivariate_exponent(shock, 1.0, 1.0).real() ==
          doctest::Approx(2.0 - (1.0 - std::exp(-2.0))).epsilon(1e-15));
    // partials against finite differences
    const double h = 1e-6;
    const double d1 =
        (bivariate_exponent(shock, 1.0 + h, 1.0) - bivariate_exponent(shock, 1.0 - h, 1.0))
            .real() /
        (2.0 * h);
    CHECK(bivariate_exponent_d1(shock, 1.0, 1.0).real() == doctest::Approx(d1).epsilon(1e-7));
    const double d2 =
        (bivariate_exponent(shock, 1.0, 1.0 + h) - bivariate_exponent(shock, 1.0, 1.0 - h))
            .real() /
        (2.0 * h);
    CHECK(bivariate_exponent_d2(shock, 1.0, 1.0).real() == doctest::Approx(d2).epsilon(1e-7));
}

TEST_CASE("net profit condition") {
    // drifts 0.5 and 0.1, costs 1.1: 0.61 > 0 and 0.65 > 0
    const CoverageModel good = two_lines(det_line(1.0, 0.5), det_line(1.0, 0.9), 1.1, 1.1);
    CHECK(net_profit(good).holds);

    // mu1 = -1, mu2 = 0
    const CoverageModel bad = two_lines(det_line(1.0, 2.0), det_line(1.0, 1.0), 1.0, 1.0);
    const NetProfitResult res = net_profit(bad);
    CHECK_FALSE(res.holds);
    CHECK_FALSE(res.first_holds);
    CHECK_FALSE(res.second_holds);

    // r2 disabled: mu2 > 0 and mu2 + r1 mu1 > 0
    CoverageModel restricted = two_lines(exp_line(1.0, 1.05, 1.0), det_line(1.0, 0.9), 1.0, 1.0);
    restricted.r2 = TransferCost::disabled();
    CHECK(restricted.line1.drift() == doctest::Approx(-0.05));
    CHECK(net_profit(restricted).holds);
    restricted.line1 = exp_line(1.0, 1.2, 1.0);  // mu1 = -0.2 breaks the second one
    CHECK_FALSE(net_profit(restricted).holds);
}

TEST_CASE("net profit agrees with direct drift arithmetic") {
    auto rng = substream(9, StreamRole::generic, 4);
    for (int i = 0; i < 200; ++i) {
        const double c1 = 0.5 + uniform01(rng);
        const double c2 = 0.5 + uniform01(rng);
        const double l1 = 2.0 * uniform01(rng);
        const double l2 = 2.0 * uniform01(rng);
        const double r1 = 0.5 + 2.0 * uniform01(rng);
        const double r2 = std::max(1.0 / r1, 0.5 + 2.0 * uniform01(rng));
        CoverageModel m;
        m.line1 = l1 > 0.0 ? det_line(c1, l1) : RiskProcess::drift_only(c1);
        m.line2 = l2 > 0.0 ? det_line(c2, l2) : RiskProcess::drift_only(c2);
        m.r1 = TransferCost::finite(r1);
        m.r2 = TransferCost::finite(r2);
        const double mu1 = c1 - l1;
        const double mu2 = c2 - l2;
        const NetProfitResult res = net_profit(m);
        CHECK(res.first_holds == (mu1 + r2 * mu2 > 0.0));
        CHECK(res.second_holds == (mu2 + r1 * mu1 > 0.0));
        CHECK(res.holds == (res.first_holds && res.second_holds));
    }
}

TEST_CASE("inverse exponent on pure drift is exact") {
    const RiskProcess drift = RiskProcess::drift_only(0.4);
    for (const double q : {0.0, 0.1, 2.0, 1e6}) {
        CHECK(drift.exponent_inverse(q) == doctest::Approx(q / 0.4).epsilon(1e-15));
    }
    const cd q{1.5, 2.5};
    CHECK(std::abs(drift.exponent_inverse(q) - q / 0.4) <= 1e-14);
}

TEST_CASE("inverse exponent quadratic oracle") {
    // c=1, lambda=0.5, exponential(1): psi(s) = s - 0.5 s / (1 + s), so
    // psi(s) = 1/4 means s^2 + s/4 - 1/4 = 0
    const RiskProcess proc = exp_line(1.0, 0.5, 1.0);
    const double root = (-0.25 + std::sqrt(0.0625 + 1.0)) / 2.0;
    CHECK(proc.exponent_inverse(0.25) == doctest::Approx(root).epsilon(1e-12));
    CHECK(proc.exponent_inverse_at_zero() == 0.0);
}

TEST_CASE("inverse exponent at zero with negative drift") {
    // c=1, lambda=2, exponential(1): psi(s) = s - 2 s / (1 + s) = 0 at s = 1
    const RiskProcess proc = exp_line(1.0, 2.0, 1.0);
    CHECK(proc.drift() == doctest::Approx(-1.0));
    CHECK(proc.exponent_inverse_at_zero() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(proc.exponent_inverse(0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("inverse exponent residuals on real and complex grids") {
    for (const RiskProcess& proc : model_zoo()) {
        for (int i = 1; i <= 20; ++i) {
            const double q = 0.5 * i;
            const double s = proc.exponent_inverse(q);
            CHECK(std::abs(proc.exponent(s) - q) <= 1e-10 * std::max(1.0, q));
            CHECK(s >= proc.exponent_inverse_at_zero());
        }
        for (const double re : {0.0, 1.0, 2.5, 5.0}) {
            for (const double im : {-10.0, -3.0, -0.5, 0.5, 3.0, 10.0}) {
                const cd q{re, im};
                const cd s = proc.exponent_inverse(q);
                CHECK(std::abs(proc.exponent(s) - q) <= 1e-10 * std::max(1.0, std::abs(q)));
                CHECK(s.real() >= -1e-9 * (1.0 + std::abs(s)));
            }
        }
    }
}

TEST_CASE("inverse exponent is increasing and concave, with premium-rate asymptote") {
    // the exponent is convex and increasing past its zero, so its inverse is
    // increasing and concave
    for (const RiskProcess& proc : model_zoo()) {
        std::vector<double> phi;
        for (int i = 1; i <= 40; ++i) phi.push_back(proc.exponent_inverse(0.25 * i));
        for (std::size_t i = 1; i < phi.size(); ++i) CHECK(phi[i] > phi[i - 1]);
        for (std::size_t i = 1; i + 1 < phi.size(); ++i) {
            CHECK(phi[i + 1] - 2.0 * phi[i] + phi[i - 1] <= 1e-9);
        }
        const double q = 1e6 * proc.premium_rate;
        CHECK(q / proc.exponent_inverse(q) ==
              doctest::Approx(proc.premium_rate).epsilon(0.01));
    }
}

TEST_CASE("inverse exponent domain errors") {
    const RiskProcess proc = exp_line(1.0, 0.5, 1.0);
    CHECK_THROWS_AS(proc.exponent_inverse(-0.5), std::domain_error);
    CHECK_THROWS_AS(proc.exponent_inverse(cd{-0.5, 1.0}), std::domain_error);
    CHECK_THROWS_AS(proc.exponent(-1.0), std::domain_error);
}

TEST_CASE("transfer cost representation") {
    const TransferCost r = TransferCost::finite(1.5);
    CHECK_FALSE(r.is_disabled());
    CHECK(r.ratio() == 1.5);
    const TransferCost inf = TransferCost::disabled();
    CHECK(inf.is_disabled());
    CHECK_THROWS_AS(inf.ratio(), std::logic_error);
    CHECK_THROWS_AS(TransferCost::finite(-0.5), std::invalid_argument);
}

TEST_CASE("coverage model validation") {
    CoverageModel cheap = two_lines(det_line(1.0, 0.5), det_line(1.0, 0.5), 0.5, 0.5);
    CHECK_THROWS_AS(cheap.validate(), std::invalid_argument);
    cheap.allow_low_cost = true;
    CHECK_NOTHROW(cheap.validate());

    CoverageModel shock;
    shock.line1 = det_line(1.0, 0.5);  // stray per-line stream next to a joint one
    shock.line2 = RiskProcess::drift_only(1.0);
    shock.joint = CommonStream{
        1.0, JointClaimDistribution({{1.0, ClaimDistribution::deterministic(1.0),
                                      ClaimDistribution::deterministic(1.0)}})};
    CHECK_THROWS_AS(shock.validate(), std::invalid_argument);
    shock.line1 = RiskProcess::drift_only(1.0);
    CHECK_NOTHROW(shock.validate());
    const auto [mu1, mu2] = shock.drifts();
    CHECK(mu1 == doctest::Approx(0.0));
    CHECK(mu2 == doctest::Approx(0.0));
}
