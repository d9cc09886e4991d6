#include "bivruin/validation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>

#include <json.hpp>

#include "bivruin/parallel.hpp"
#include "bivruin/simulator.hpp"
#include "bivruin/transforms.hpp"

namespace bivruin {

namespace {

using nlohmann::json;

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), pattern, args...);
    return std::string(buf);
}

CoverageModel exp_claims_model(double r1, double r2) {
    CoverageModel m;
    m.line1 = RiskProcess::with_claims(1.0, 0.5, ClaimDistribution::exponential(1.0));
    m.line2 = RiskProcess::with_claims(1.0, 0.6, ClaimDistribution::exponential(2.0));
    m.r1 = TransferCost::finite(r1);
    m.r2 = TransferCost::finite(r2);
    return m;
}

// Second line is a capital backstop earning pure premium.
CoverageModel backstop_model(TransferCost r2) {
    CoverageModel m;
    m.line1 = RiskProcess::with_claims(1.0, 0.5, ClaimDistribution::exponential(1.0));
    m.line2 = RiskProcess::drift_only(0.3);
    m.r1 = TransferCost::finite(2.0);
    m.r2 = r2;
    return m;
}

CoverageModel common_shock_model() {
    std::vector<JointAtom> atoms;
    atoms.push_back({0.5, ClaimDistribution::exponential(1.0), ClaimDistribution::exponential(1.0)});
    atoms.push_back({0.3, ClaimDistribution::deterministic(0.5), std::nullopt});
    atoms.push_back({0.2, std::nullopt, ClaimDistribution::erlang(2, 2.0)});
    CoverageModel m;
    m.line1 = RiskProcess::drift_only(1.0);
    m.line2 = RiskProcess::drift_only(1.0);
    m.r1 = TransferCost::finite(1.2);
    m.r2 = TransferCost::finite(1.2);
    m.joint = CommonStream{0.6, JointClaimDistribution(std::move(atoms))};
    return m;
}

CoverageModel violated_model() {
    CoverageModel m;
    m.line1 = RiskProcess::with_claims(1.0, 2.0, ClaimDistribution::deterministic(1.0));
    m.line2 = RiskProcess::with_claims(1.0, 1.5, ClaimDistribution::deterministic(1.0));
    m.r1 = TransferCost::finite(1.0);
    m.r2 = TransferCost::finite(1.0);
    return m;
}

std::vector<std::pair<double, double>> grid20() {
    std::vector<std::pair<double, double>> pts;
    for (const double s1 : {0.5, 1.625, 2.75, 3.875, 5.0}) {
        for (const double s2 : {0.5, 2.0, 3.5, 5.0}) pts.emplace_back(s1, s2);
    }
    return pts;
}

struct Tracker {
    bool ok = true;
    double worst = 0.0;
    void add(double err, bool pass) {
        ok = ok && pass;
        if (err > worst) worst = err;
    }
};

// ---- check 1: benchmark model, survival from zero capital both ways -------

CheckResult check_headline(const ValidationOptions& opt) {
    CheckResult res;
    res.name = "headline_zero_capital";
    const auto start = std::chrono::steady_clock::now();
    const CoverageModel model = headline_model();

    WhConfig wh;
    wh.n_samples = 10'000;
    wh.seed = opt.seed;
    wh.workers = opt.workers;
    const MonteCarloFactors factors = MonteCarloFactors::estimate(model, wh);
    const ZeroCapitalSurvival zero = zero_capital_survival(model, factors);

    SimConfig sim;
    sim.n_paths = 10'000;
    sim.seed = opt.seed;
    sim.workers = opt.workers;
    const auto [sim_t, sim_2t] = survival_horizon_check(model, 0.0, 0.0, sim);

    const double lo = 0.25, hi = 0.31, gap = 0.02;
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = zero.via_plus >= lo && zero.via_plus <= hi;
    ok = ok && zero.via_minus >= lo && zero.via_minus <= hi;
    ok = ok && sim_t.value >= lo && sim_t.value <= hi;
    ok = ok && std::abs(zero.via_plus - sim_t.value) <= gap;
    ok = ok && std::abs(zero.via_minus - sim_t.value) <= gap;
    ok = ok && elapsed <= 300.0;
    res.passed = ok;
    res.detail = fmt("via+=%.4f via-=%.4f sim=%.4f (range [%.2f,%.2f], gap<=%.2f, horizon bias %.4f)",
                     zero.via_plus, zero.via_minus, sim_t.value, lo, hi, gap,
                     sim_t.value - sim_2t.value);
    res.values_json = json{{"via_plus", zero.via_plus},
                           {"via_minus", zero.via_minus},
                           {"se_plus", zero.se_plus},
                           {"se_minus", zero.se_minus},
                           {"simulation", sim_t.value},
                           {"simulation_se", sim_t.std_error},
                           {"simulation_2tmax", sim_2t.value},
                           {"range", {lo, hi}},
                           {"max_gap", gap}}
                          .dump();
    return res;
}

// ---- check 2: transform sweep against direct simulation -------------------

CheckResult check_transform_sweep(const ValidationOptions& opt) {
    CheckResult res;
    res.name = "transform_sweep";
    const auto start = std::chrono::steady_clock::now();
    const CoverageModel model = headline_model();
    WhConfig wh;
    wh.n_samples = 10'000;
    wh.seed = opt.seed;
    wh.workers = opt.workers;
    const MonteCarloFactors factors = MonteCarloFactors::estimate(model, wh);
    SimConfig sim;
    sim.n_paths = 10'000;
    sim.seed = opt.seed;
    sim.workers = opt.workers;

    bool monotone = true;
    bool within = true;
    double prev = 2.0;
    double worst_sigma = 0.0;
    json points = json::array();
    for (int s1 = 1; s1 <= 10; ++s1) {
        const TransformValue thm = survival_transform(model, factors, s1, 1.0);
        const MCEstimate direct = estimate_transforms(model, s1, 1.0, sim).f_hat;
        const double value = thm.f_hat.real();
        const double se = std::hypot(thm.std_error, direct.std_error);
        const double sigmas = se > 0.0 ? std::abs(value - direct.value) / se : 0.0;
        worst_sigma = std::max(worst_sigma, sigmas);
        monotone = monotone && value < prev;
        within = within && sigmas <= 3.0;
        prev = value;
        points.push_back({{"s1", s1},
                          {"analytic", value},
                          {"analytic_se", thm.std_error},
                          {"simulated", direct.value},
                          {"simulated_se", direct.std_error}});
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    res.passed = monotone && within && elapsed <= 600.0;
    res.detail = fmt("10 points, monotone=%s, worst deviation %.2f se (limit 3)",
                     monotone ? "yes" : "no", worst_sigma);
    res.values_json = json{{"points", points}, {"monotone", monotone}}.dump();
    return res;
}

// ---- check 3: exactness against the pure-drift-backstop closed form -------

CheckResult check_backstop_exact(const ValidationOptions& opt) {
    CheckResult res;
    res.name = "backstop_exact";
    const CoverageModel model = backstop_model(TransferCost::finite(1.0));
    const SurplusNoteFactors factors(model);
    PrimeConstants pc = prime_constants(model);
    pc.p_l_prime *= opt.p_l_prime_scale;
    Tracker track;
    for (const auto& [s1, s2] : grid20()) {
        const TransformValue thm = survival_transform(model, factors, s1, s2, pc);
        const std::complex<double> oracle = surplus_note_transform_oracle(model, s1, s2);
        const double rel = std::abs(thm.f - oracle) / std::abs(oracle);
        track.add(rel, rel <= 1e-8);
    }
    res.passed = track.ok;
    res.detail = fmt("20 grid points, worst relative error %.3g (limit 1e-8)", track.worst);
    res.values_json = json{{"worst_rel_error", track.worst}, {"tolerance", 1e-8}}.dump();
    return res;
}

// ---- check 4: exactness at unit transfer-cost product ----------------------

CheckResult check_unit_cost_exact(const ValidationOptions&) {
    CheckResult res;
    res.name = "unit_cost_exact";
    const CoverageModel model = exp_claims_model(2.0, 0.5);
    const UnitCostFactors factors(model);
    Tracker track;
    auto pts = grid20();
    pts.emplace_back(2.0, 1.0);  // sits exactly on the degenerate diagonal
    for (const auto& [s1, s2] : pts) {
        const TransformValue thm = survival_transform(model, factors, s1, s2);
        const std::complex<double> oracle = unit_cost_transform_oracle(model, s1, s2);
        const double rel = std::abs(thm.f - oracle) / std::abs(oracle);
        track.add(rel, rel <= 1e-10);
    }
    res.passed = track.ok;
    res.detail = fmt("21 grid points, worst relative error %.3g (limit 1e-10)", track.worst);
    res.values_json = json{{"worst_rel_error", track.worst}, {"tolerance", 1e-10}}.dump();
    return res;
}

// ---- check 5: restricted and fully-disabled limits -------------------------

CheckResult check_product_limit(const ValidationOptions&) {
    CheckResult res;
    res.name = "product_formula";
    Tracker product;
    {
        CoverageModel model = exp_claims_model(1.0, 1.0);
        model.r1 = TransferCost::disabled();
        model.r2 = TransferCost::disabled();
        for (const double s1 : {0.5, 1.0, 2.0, 3.0}) {
            for (const double s2 : {0.5, 1.2, 2.4, 3.0}) {
                const TransformValue val = restricted_survival_transform(model, nullptr, s1, s2);
                const std::complex<double> want =
                    one_line_survival_transform(model.line1, s1) *
                    one_line_survival_transform(model.line2, s2);
                const double rel = std::abs(val.f - want) / std::abs(want);
                product.add(rel, rel <= 1e-8);
            }
        }
    }
    Tracker limit;
    {
        const CoverageModel restricted = backstop_model(TransferCost::disabled());
        const CoverageModel approx = backstop_model(TransferCost::finite(1e6));
        const SurplusNoteFactors restricted_factors(restricted);
        const SurplusNoteFactors approx_factors(approx);
        for (const double s1 : {0.5, 1.0, 2.0}) {
            for (const double s2 : {0.5, 1.0, 2.0}) {
                const TransformValue a =
                    restricted_survival_transform(restricted, &restricted_factors, s1, s2);
                const TransformValue b = survival_transform(approx, approx_factors, s1, s2);
                const double rel = std::abs(a.f - b.f) / std::abs(b.f);
                limit.add(rel, rel <= 1e-3);
            }
        }
    }
    res.passed = product.ok && limit.ok;
    res.detail = fmt("product worst rel %.3g (limit 1e-8); r2=1e6 agreement worst rel %.3g (limit 1e-3)",
                     product.worst, limit.worst);
    res.values_json =
        json{{"product_worst_rel", product.worst}, {"limit_worst_rel", limit.worst}}.dump();
    return res;
}

// ---- check 6: factorization identity on the imaginary axis ----------------

CheckResult check_wh_identity(const ValidationOptions& opt) {
    CheckResult res;
    res.name = "wh_identity";
    WhConfig wh;
    wh.n_samples = 10'000;
    wh.seed = opt.seed;
    wh.workers = opt.workers;
    Tracker track;
    double worst_sigma = 0.0;
    for (const CoverageModel& model : {headline_model(), exp_claims_model(2.0, 0.5)}) {
        const AuxiliaryPair pair = AuxiliaryPair::from(model, wh.rejection_factor);
        const MonteCarloFactors factors = MonteCarloFactors::estimate(pair, wh);
        for (int k = 0; k < 10; ++k) {
            const double t = 0.1 + (10.0 - 0.1) * k / 9.0;
            for (const Side side : {Side::left, Side::right}) {
                const FactorEstimate resid =
                    wh_identity_residual(factors, pair, side, {0.0, t});
                const double sigmas =
                    resid.std_error > 0.0 ? std::abs(resid.value) / resid.std_error : 0.0;
                worst_sigma = std::max(worst_sigma, sigmas);
                track.add(sigmas, sigmas <= 3.0);
            }
        }
    }
    res.passed = track.ok;
    res.detail =
        fmt("2 models x 10 arguments x 2 sides, worst residual %.2f se (limit 3)", worst_sigma);
    res.values_json = json{{"worst_sigma", worst_sigma}}.dump();
    return res;
}

// ---- check 7: kernel identity against simulated transforms ----------------

CheckResult check_kernel_residual(const ValidationOptions& opt) {
    CheckResult res;
    res.name = "kernel_residual";
    SimConfig sim;
    sim.n_paths = 10'000;
    sim.seed = opt.seed;
    sim.workers = opt.workers;
    Tracker track;
    double worst_sigma = 0.0;
    for (const CoverageModel& model : {headline_model(), common_shock_model()}) {
        for (const double s1 : {0.5, 1.125, 1.75, 2.375, 3.0}) {
            for (const double s2 : {1.0, 2.5}) {
                const TransformEstimates est = estimate_transforms(model, s1, s2, sim);
                const KernelTerms terms = kernel_terms(model, s1, s2);
                const double f = est.f_hat.value / (s1 * s2);
                const double f1 = est.f1_hat.value / s1;
                const double f2 = est.f2_hat.value / s2;
                const double resid = (terms.psi * f - terms.coeff1 * f1 - terms.coeff2 * f2).real();
                const double se =
                    std::sqrt(std::norm(terms.psi) * est.f_hat.std_error * est.f_hat.std_error /
                                  (s1 * s1 * s2 * s2) +
                              std::norm(terms.coeff1) * est.f1_hat.std_error *
                                  est.f1_hat.std_error / (s1 * s1) +
                              std::norm(terms.coeff2) * est.f2_hat.std_error *
                                  est.f2_hat.std_error / (s2 * s2));
                const double sigmas = se > 0.0 ? std::abs(resid) / se : 0.0;
                worst_sigma = std::max(worst_sigma, sigmas);
                track.add(sigmas, sigmas <= 3.0);
            }
        }
    }
    res.passed = track.ok;
    res.detail = fmt("2 models x 10 points, worst residual %.2f se (limit 3)", worst_sigma);
    res.values_json = json{{"worst_sigma", worst_sigma}}.dump();
    return res;
}

// ---- check 8: survival dichotomy -------------------------------------------

CheckResult check_dichotomy(const ValidationOptions& opt) {
    CheckResult res;
    res.name = "survival_dichotomy";
    SimConfig doomed;
    doomed.n_paths = 10'000;
    doomed.seed = opt.seed;
    doomed.workers = opt.workers;
    doomed.t_max = 1e4;
    const MCEstimate lost = estimate_survival(violated_model(), 5.0, 5.0, doomed);
    SimConfig safe;
    safe.n_paths = 10'000;
    safe.seed = opt.seed;
    safe.workers = opt.workers;
    const MCEstimate kept = estimate_survival(headline_model(), 1000.0, 1000.0, safe);
    res.passed = lost.value <= 0.01 && kept.value >= 0.99;
    res.detail = fmt("violated model survival %.4f (<=0.01), satisfied model %.4f (>=0.99)",
                     lost.value, kept.value);
    res.values_json = json{{"violated", lost.value}, {"satisfied", kept.value}}.dump();
    return res;
}

// ---- check 9: path-level identities ----------------------------------------

CheckResult check_path_invariants(const ValidationOptions& opt) {
    CheckResult res;
    res.name = "path_invariants";
    struct Run {
        CoverageModel model;
        std::uint64_t paths;
    };
    CoverageModel restricted = headline_model();
    restricted.r2 = TransferCost::disabled();
    const Run runs[] = {{headline_model(), 400}, {common_shock_model(), 300}, {restricted, 300}};
    const double u = 0.5, v = 0.3, t_max = 200.0;
    double worst = 0.0;
    bool conditions_ok = true;
    std::uint64_t events = 0;
    std::uint64_t stream = 0;
    for (const auto& run : runs) {
        const CompiledModel cm = CompiledModel::compile(run.model);
        const double c1 = run.model.line1.premium_rate;
        const double c2 = run.model.line2.premium_rate;
        for (std::uint64_t i = 0; i < run.paths; ++i) {
            auto rng = substream(opt.seed, StreamRole::generic, stream++);
            std::vector<PathEvent> log;
            simulate_path(cm, u, v, t_max, rng, &log);
            double claims1 = 0.0, claims2 = 0.0;
            SurplusState prev;
            prev.s1 = u;
            prev.s2 = v;
            for (const PathEvent& ev : log) {
                ++events;
                claims1 += ev.claim1;
                claims2 += ev.claim2;
                const auto& a = ev.after;
                // rebuild both surpluses from the additive decomposition
                double want1 = u + c1 * ev.t - claims1 + a.l1 + a.e1;
                if (!run.model.r2.is_disabled()) want1 -= run.model.r2.ratio() * a.l2;
                double want2 = v + c2 * ev.t - claims2 + a.l2 + a.e2;
                if (!run.model.r1.is_disabled()) want2 -= run.model.r1.ratio() * a.l1;
                worst = std::max({worst, std::abs(a.s1 - want1), std::abs(a.s2 - want2)});
                // reflection conditions, re-checked from the log
                const bool dl1 = a.l1 > prev.l1, dl2 = a.l2 > prev.l2;
                const bool de1 = a.e1 > prev.e1, de2 = a.e2 > prev.e2;
                if (a.s1 < 0.0 || a.s2 < 0.0) conditions_ok = false;
                if (a.l1 < prev.l1 || a.l2 < prev.l2 || a.e1 < prev.e1 || a.e2 < prev.e2) {
                    conditions_ok = false;
                }
                if (dl1 && a.s1 != 0.0) conditions_ok = false;
                if (dl2 && a.s2 != 0.0) conditions_ok = false;
                if (de1 && (a.s1 != 0.0 || (!run.model.r1.is_disabled() && a.s2 != 0.0))) {
                    conditions_ok = false;
                }
                if (de2 && (a.s2 != 0.0 || (!run.model.r2.is_disabled() && a.s1 != 0.0))) {
                    conditions_ok = false;
                }
                if ((dl1 && (dl2 || de2)) || (dl2 && de1)) conditions_ok = false;
                if (run.model.r2.is_disabled() && a.l2 != 0.0) conditions_ok = false;
                prev = a;
            }
        }
    }
    res.passed = worst <= 1e-9 && conditions_ok;
    res.detail = fmt("1000 paths, %llu events, worst accounting error %.3g (limit 1e-9), "
                     "conditions %s",
                     static_cast<unsigned long long>(events), worst,
                     conditions_ok ? "ok" : "violated");
    res.values_json =
        json{{"worst_accounting_error", worst}, {"conditions_ok", conditions_ok}}.dump();
    return res;
}

// ---- check 10: ladder sampler and its exponent ------------------------------

CheckResult check_ladder(const ValidationOptions& opt) {
    CheckResult res;
    res.name = "ladder_construction";
    const CoverageModel model = headline_model();
    const LadderProcess ladder = LadderProcess::from(model.line1);
    const std::size_t n = 100'000;
    std::vector<double> draws(n, 0.0);
    LadderStats stats;
    std::mutex mu;
    parallel_blocks(n, opt.workers, [&](std::uint64_t begin, std::uint64_t end) {
        LadderStats local;
        for (std::uint64_t i = begin; i < end; ++i) {
            auto rng = substream(opt.seed, StreamRole::ladder, i);
            const std::uint64_t jumps = poisson_draw(rng, ladder.rate());
            double y = 0.0;
            for (std::uint64_t k = 0; k < jumps; ++k) y += ladder.sample_jump(rng, &local);
            draws[i] = y;
        }
        std::lock_guard<std::mutex> lock(mu);
        stats.merge(local);
    });

    const double exact = ladder.acceptance_probability();
    const double emp = static_cast<double>(stats.accepted) / static_cast<double>(stats.attempts);
    const double acc_se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(stats.attempts));
    const bool acc_ok = std::abs(emp - exact) <= 3.0 * acc_se;

    bool transform_ok = true;
    double worst_sigma = 0.0;
    json qs = json::array();
    for (const double q : {0.5, 1.0, 2.0}) {
        double mean = 0.0;
        for (const double y : draws) mean += std::exp(-q * y);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (const double y : draws) {
            const double d = std::exp(-q * y) - mean;
            var += d * d;
        }
        var /= static_cast<double>(n - 1);
        const double se = std::sqrt(var / static_cast<double>(n));
        const double want = std::exp(ladder.exponent(q).real());
        const double sigmas = std::abs(mean - want) / se;
        worst_sigma = std::max(worst_sigma, sigmas);
        transform_ok = transform_ok && sigmas <= 4.0;
        qs.push_back({{"q", q}, {"empirical", mean}, {"expected", want}, {"se", se}});
    }
    res.passed = acc_ok && transform_ok;
    res.detail = fmt("acceptance %.4f vs exact %.4f (3se=%.4f); transform worst %.2f se (limit 4)",
                     emp, exact, 3.0 * acc_se, worst_sigma);
    res.values_json = json{{"acceptance", emp},
                           {"acceptance_exact", exact},
                           {"acceptance_se", acc_se},
                           {"transforms", qs}}
                          .dump();
    return res;
}

}  // namespace

CoverageModel headline_model() {
    CoverageModel m;
    m.line1 = RiskProcess::with_claims(1.0, 0.5, ClaimDistribution::deterministic(1.0));
    m.line2 = RiskProcess::with_claims(1.0, 0.9, ClaimDistribution::deterministic(1.0));
    m.r1 = TransferCost::finite(1.1);
    m.r2 = TransferCost::finite(1.1);
    return m;
}

namespace {

using Runner = CheckResult (*)(const ValidationOptions&);

struct NamedCheck {
    const char* name;
    Runner runner;
};

const NamedCheck* check_registry(std::size_t& count) {
    static const NamedCheck registry[] = {
        {"headline_zero_capital", check_headline},
        {"transform_sweep", check_transform_sweep},
        {"backstop_exact", check_backstop_exact},
        {"unit_cost_exact", check_unit_cost_exact},
        {"product_formula", check_product_limit},
        {"wh_identity", check_wh_identity},
        {"kernel_residual", check_kernel_residual},
        {"survival_dichotomy", check_dichotomy},
        {"path_invariants", check_path_invariants},
        {"ladder_construction", check_ladder},
    };
    count = sizeof(registry) / sizeof(registry[0]);
    return registry;
}

CheckResult run_one(const NamedCheck& check, const ValidationOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult res;
    try {
        res = check.runner(options);
    } catch (const std::exception& e) {
        res.passed = false;
        res.detail = std::string("exception: ") + e.what();
        res.values_json = json{{"exception", e.what()}}.dump();
    }
    res.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    res.name = check.name;
    return res;
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidationOptions& options,
                                        const std::function<void(const CheckResult&)>& on_check) {
    std::size_t count = 0;
    const NamedCheck* registry = check_registry(count);
    std::vector<CheckResult> results;
    for (std::size_t i = 0; i < count; ++i) {
        results.push_back(run_one(registry[i], options));
        if (on_check) on_check(results.back());
    }
    return results;
}

std::vector<CheckResult> run_validation_subset(
    const ValidationOptions& options, const std::vector<std::string>& names,
    const std::function<void(const CheckResult&)>& on_check) {
    std::size_t count = 0;
    const NamedCheck* registry = check_registry(count);
    std::vector<CheckResult> results;
    for (const std::string& name : names) {
        for (std::size_t i = 0; i < count; ++i) {
            if (name == registry[i].name) {
                results.push_back(run_one(registry[i], options));
                if (on_check) on_check(results.back());
            }
        }
    }
    return results;
}

}  // namespace bivruin
