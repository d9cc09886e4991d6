#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "bivruin/simulator.hpp"

using namespace bivruin;

namespace {

RiskProcess det_line(double c, double lambda) {
    return RiskProcess::with_claims(c, lambda, ClaimDistribution::deterministic(1.0));
}

RiskProcess exp_line(double c, double lambda, double theta) {
    return RiskProcess::with_claims(c, lambda, ClaimDistribution::exponential(theta));
}

CoverageModel headline() {
    CoverageModel m;
    m.line1 = det_line(1.0, 0.5);
    m.line2 = det_line(1.0, 0.9);
    m.r1 = TransferCost::finite(1.1);
    m.r2 = TransferCost::finite(1.1);
    return m;
}

CoverageModel doomed() {
    CoverageModel m;
    m.line1 = det_line(1.0, 2.0);
    m.line2 = det_line(1.0, 1.5);
    m.r1 = TransferCost::finite(1.0);
    m.r2 = TransferCost::finite(1.0);
    return m;
}

SurplusState fresh(double s1, double s2) {
    SurplusState st;
    st.s1 = s1;
    st.s2 = s2;
    return st;
}

}  // namespace

TEST_CASE("claim application cases") {
    const TransferCost one = TransferCost::finite(1.0);
    const TransferCost two = TransferCost::finite(2.0);

    SUBCASE("no deficit, no transfers") {
        SurplusState st = fresh(3.0, 4.0);
        apply_claim(st, 1.0, 2.0, one, one);
        CHECK(st.s1 == 2.0);
        CHECK(st.s2 == 2.0);
        CHECK(st.l1 == 0.0);
        CHECK(st.l2 == 0.0);
        CHECK_FALSE(st.ruined);
    }
    SUBCASE("line 2 rescues line 1") {
        // x1 = -1, x2 + r1 x1 = 5 - 2 = 3 >= 0
        SurplusState st = fresh(1.0, 5.0);
        apply_claim(st, 2.0, 0.0, two, one);
        CHECK(st.s1 == 0.0);
        CHECK(st.s2 == 3.0);
        CHECK(st.l1 == 1.0);
        CHECK(st.e1 == 0.0);
        CHECK_FALSE(st.ruined);
    }
    SUBCASE("partial rescue then injection") {
        // x1 = -2, x2 = 1, x2 + r1 x1 = -1 < 0 with r1 = 1
        SurplusState st = fresh(1.0, 1.0);
        apply_claim(st, 3.0, 0.0, one, one);
        CHECK(st.s1 == 0.0);
        CHECK(st.s2 == 0.0);
        CHECK(st.l1 == 1.0);  // x2 / r1
        CHECK(st.e1 == 1.0);  // -x1 - x2/r1
        CHECK(st.ruined);
    }
    SUBCASE("both lines under water") {
        SurplusState st = fresh(1.0, 1.0);
        apply_claim(st, 2.5, 3.0, one, one);
        CHECK(st.e1 == 1.5);
        CHECK(st.e2 == 2.0);
        CHECK(st.s1 == 0.0);
        CHECK(st.s2 == 0.0);
        CHECK(st.ruined);
    }
    SUBCASE("tie counts as no deficit") {
        SurplusState st = fresh(2.0, 1.0);
        apply_claim(st, 2.0, 0.0, one, one);
        CHECK(st.s1 == 0.0);
        CHECK(st.l1 == 0.0);
        CHECK_FALSE(st.ruined);
    }
    SUBCASE("disabled direction: rescuer keeps its capital") {
        SurplusState st = fresh(1.0, 5.0);
        apply_claim(st, 2.0, 0.0, TransferCost::disabled(), one);
        CHECK(st.s1 == 0.0);
        CHECK(st.s2 == 5.0);
        CHECK(st.l1 == 0.0);
        CHECK(st.e1 == 1.0);
        CHECK(st.ruined);
    }
    SUBCASE("symmetric case for line 2") {
        // x2 = -1, x1 + r2 x2 = 4 - 2 = 2 >= 0 with r2 = 2
        SurplusState st = fresh(4.0, 1.0);
        apply_claim(st, 0.0, 2.0, one, two);
        CHECK(st.s1 == 2.0);
        CHECK(st.s2 == 0.0);
        CHECK(st.l2 == 1.0);
        CHECK_FALSE(st.ruined);
    }
}

TEST_CASE("pure drift paths always survive") {
    CoverageModel m;
    m.line1 = RiskProcess::drift_only(1.0);
    m.line2 = RiskProcess::drift_only(0.5);
    auto rng = substream(1, StreamRole::generic, 0);
    const PathResult res = simulate_path(m, 2.0, 3.0, 100.0, rng);
    CHECK_FALSE(res.ruin_time.has_value());
    CHECK(res.final_state.s1 == doctest::Approx(2.0 + 100.0));
    CHECK(res.final_state.s2 == doctest::Approx(3.0 + 50.0));
}

TEST_CASE("violated net profit forces ruin as the horizon grows") {
    const CompiledModel cm = CompiledModel::compile(doomed());
    int ruined_short = 0, ruined_long = 0;
    const int n = 500;
    for (int i = 0; i < n; ++i) {
        auto rng_a = substream(2, StreamRole::generic, i);
        if (simulate_path(cm, 0.0, 0.0, 5.0, rng_a).ruin_time) ++ruined_short;
        auto rng_b = substream(2, StreamRole::generic, i);
        if (simulate_path(cm, 0.0, 0.0, 2000.0, rng_b).ruin_time) ++ruined_long;
    }
    CHECK(ruined_short <= ruined_long);
    CHECK(ruined_long >= static_cast<int>(0.99 * n));
}

TEST_CASE("a crushing common shock ruins at the first arrival") {
    CoverageModel m;
    m.line1 = RiskProcess::drift_only(1.0);
    m.line2 = RiskProcess::drift_only(1.0);
    m.joint = CommonStream{
        2.0, JointClaimDistribution({{1.0, ClaimDistribution::deterministic(100.0),
                                      ClaimDistribution::deterministic(100.0)}})};
    auto rng = substream(3, StreamRole::generic, 0);
    std::vector<PathEvent> log;
    const PathResult res = simulate_path(m, 1.0, 1.0, 1000.0, rng, &log);
    REQUIRE(res.ruin_time.has_value());
    REQUIRE(log.size() == 1);
    CHECK(*res.ruin_time == log[0].t);
    CHECK(res.final_state.e1 > 0.0);
    CHECK(res.final_state.e2 > 0.0);
}

TEST_CASE("headline survival estimate from zero capital") {
    SimConfig cfg;
    cfg.n_paths = 10'000;
    const MCEstimate est = estimate_survival(headline(), 0.0, 0.0, cfg);
    CHECK(est.n == 10'000);
    CHECK(std::abs(est.value - 0.279) <= 0.014);  // three binomial standard errors
    CHECK(est.std_error == doctest::Approx(std::sqrt(est.value * (1 - est.value) / 1e4)));
}

TEST_CASE("dichotomy extremes") {
    SimConfig big;
    big.n_paths = 2'000;
    const MCEstimate rich = estimate_survival(headline(), 1000.0, 1000.0, big);
    CHECK(rich.value >= 0.999);
    SimConfig long_run;
    long_run.n_paths = 2'000;
    long_run.t_max = 1e4;
    const MCEstimate broke = estimate_survival(doomed(), 5.0, 5.0, long_run);
    CHECK(broke.value <= 0.01);
}

TEST_CASE("transform estimates: pure drift gives one, limits connect") {
    CoverageModel drift;
    drift.line1 = RiskProcess::drift_only(1.0);
    drift.line2 = RiskProcess::drift_only(1.0);
    SimConfig cfg;
    cfg.n_paths = 500;
    const TransformEstimates est = estimate_transforms(drift, 1.0, 1.0, cfg);
    CHECK(est.f_hat.value == 1.0);
    CHECK(est.f1_hat.value == 1.0);
    CHECK(est.f2_hat.value == 1.0);

    SimConfig mc;
    mc.n_paths = 5'000;
    const TransformEstimates wide = estimate_transforms(headline(), 1.0, 1e6, mc);
    const TransformEstimates line1_only = estimate_transforms(headline(), 1.0, 1.0, mc);
    const double se =
        std::hypot(wide.f_hat.std_error, line1_only.f1_hat.std_error);
    CHECK(std::abs(wide.f_hat.value - line1_only.f1_hat.value) <= 3.0 * se);

    const TransformEstimates tiny = estimate_transforms(headline(), 1e6, 1e6, mc);
    const MCEstimate at_zero = estimate_survival(headline(), 0.0, 0.0, mc);
    CHECK(std::abs(tiny.f_hat.value - at_zero.value) <=
          3.0 * std::hypot(tiny.f_hat.std_error, at_zero.std_error));
}

TEST_CASE("estimates are deterministic and worker-count independent") {
    SimConfig a;
    a.n_paths = 2'000;
    a.workers = 1;
    SimConfig b = a;
    b.workers = 4;
    const MCEstimate ea = estimate_survival(headline(), 0.5, 0.5, a);
    const MCEstimate eb = estimate_survival(headline(), 0.5, 0.5, b);
    CHECK(ea.value == eb.value);
    const TransformEstimates ta = estimate_transforms(headline(), 1.0, 2.0, a);
    const TransformEstimates tb = estimate_transforms(headline(), 1.0, 2.0, b);
    CHECK(ta.f_hat.value == tb.f_hat.value);
    CHECK(ta.f1_hat.value == tb.f1_hat.value);
    CHECK(ta.f2_hat.value == tb.f2_hat.value);
}

TEST_CASE("horizon check brackets the truncation bias") {
    SimConfig cfg;
    cfg.n_paths = 4'000;
    cfg.t_max = 50.0;
    const auto [at_t, at_2t] = survival_horizon_check(headline(), 0.0, 0.0, cfg);
    CHECK(at_t.value >= at_2t.value);  // coupled paths, same draws
    CHECK(at_2t.value > 0.2);
}

TEST_CASE("accounting identity rebuilt from the event log") {
    const CoverageModel m = headline();
    const CompiledModel cm = CompiledModel::compile(m);
    const double u = 0.5, v = 0.3, t_max = 200.0;
    double worst = 0.0;
    for (int p = 0; p < 200; ++p) {
        auto rng = substream(11, StreamRole::generic, p);
        std::vector<PathEvent> log;
        simulate_path(cm, u, v, t_max, rng, &log);
        double claims1 = 0.0, claims2 = 0.0;
        for (const PathEvent& ev : log) {
            claims1 += ev.claim1;
            claims2 += ev.claim2;
            const auto& a = ev.after;
            const double want1 = u + ev.t - claims1 - 1.1 * a.l2 + a.l1 + a.e1;
            const double want2 = v + ev.t - claims2 - 1.1 * a.l1 + a.l2 + a.e2;
            worst = std::max({worst, std::abs(a.s1 - want1), std::abs(a.s2 - want2)});
        }
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("path log csv shape") {
    const CoverageModel m = headline();
    auto rng = substream(12, StreamRole::generic, 7);
    std::vector<PathEvent> log;
    simulate_path(m, 0.2, 0.2, 50.0, rng, &log);
    REQUIRE(!log.empty());
    std::string csv;
    write_path_log_csv(log, 0.2, 0.2, csv);
    CHECK(csv.rfind("t,event,S1,S2,L1,L2,E1,E2\n", 0) == 0);
    std::size_t lines = 0;
    for (const char c : csv) lines += c == '\n' ? 1 : 0;
    CHECK(lines == log.size() + 1);
}

TEST_CASE("survival indicator is monotone in the initial capitals") {
    const CompiledModel cm = CompiledModel::compile(headline());
    const std::vector<std::pair<double, double>> ladder = {
        {0.0, 0.0}, {1.0, 0.0}, {1.0, 2.0}, {5.0, 5.0}};
    for (int p = 0; p < 100; ++p) {
        int prev = -1;
        for (const auto& [u, v] : ladder) {
            auto rng = substream(13, StreamRole::generic, p);  // same draws per path
            const int alive = simulate_path(cm, u, v, 500.0, rng).ruin_time ? 0 : 1;
            CHECK(alive >= prev);
            prev = alive;
        }
    }
}

TEST_CASE("unit cost product reduces to the one-dimensional process") {
    CoverageModel m;
    m.line1 = exp_line(1.0, 0.5, 1.0);
    m.line2 = exp_line(1.0, 0.6, 2.0);
    m.r1 = TransferCost::finite(2.0);
    m.r2 = TransferCost::finite(0.5);
    const CompiledModel cm = CompiledModel::compile(m);
    const double u = 0.4, v = 0.8, r2 = 0.5, t_max = 300.0;
    for (int p = 0; p < 200; ++p) {
        auto rng = substream(14, StreamRole::generic, p);
        std::vector<PathEvent> log;
        const PathResult res = simulate_path(cm, u, v, t_max, rng, &log);
        // replay the same claims through Z = X1 + r2 X2 started at u + r2 v
        double z_ruin = -1.0;
        double claims = 0.0;
        for (const PathEvent& ev : log) {
            claims += ev.claim1 + r2 * ev.claim2;
            const double z = u + r2 * v + (1.0 + r2) * ev.t - claims;
            if (z < 0.0) {
                z_ruin = ev.t;
                break;
            }
        }
        if (res.ruin_time) {
            CHECK(z_ruin == *res.ruin_time);
        } else {
            CHECK(z_ruin < 0.0);
        }
    }
}
