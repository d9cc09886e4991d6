#include "bivruin/simulator.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "bivruin/parallel.hpp"

namespace bivruin {

CompiledModel CompiledModel::compile(const CoverageModel& model) {
    model.validate();
    CompiledModel cm;
    cm.premium1 = model.line1.premium_rate;
    cm.premium2 = model.line2.premium_rate;
    cm.r1 = model.r1;
    cm.r2 = model.r2;
    if (model.joint) {
        cm.rate = model.joint->rate;
        double cum = 0.0;
        for (const auto& atom : model.joint->jumps.atoms()) {
            cum += atom.weight;
            cm.atoms_.push_back({cum, atom.law1, atom.law2});
        }
    } else {
        cm.rate = model.line1.claim_rate + model.line2.claim_rate;
        if (cm.rate > 0.0) {
            double cum = 0.0;
            if (model.line1.claim_rate > 0.0) {
                cum += model.line1.claim_rate / cm.rate;
                cm.atoms_.push_back({cum, model.line1.claims, std::nullopt});
            }
            if (model.line2.claim_rate > 0.0) {
                cm.atoms_.push_back({1.0, std::nullopt, model.line2.claims});
            }
        }
    }
    return cm;
}

std::pair<double, double> CompiledModel::sample_jump(std::mt19937_64& rng) const {
    const double u = uniform01(rng);
    const Atom* chosen = &atoms_.back();
    for (const auto& atom : atoms_) {
        if (u <= atom.cumulative) {
            chosen = &atom;
            break;
        }
    }
    const double j1 = chosen->law1 ? chosen->law1->sample(rng) : 0.0;
    const double j2 = chosen->law2 ? chosen->law2->sample(rng) : 0.0;
    return {j1, j2};
}

void apply_claim(SurplusState& st, double jump1, double jump2, const TransferCost& r1,
                 const TransferCost& r2) {
    if (st.ruined) throw std::logic_error("apply_claim called on a ruined state");
    const double x1 = st.s1 - jump1;
    const double x2 = st.s2 - jump2;
    if (x1 >= 0.0 && x2 >= 0.0) {  // both lines stand on their own
        st.s1 = x1;
        st.s2 = x2;
        return;
    }
    if (x1 < 0.0 && x2 < 0.0) {  // nobody can rescue anybody
        st.e1 += -x1;
        st.e2 += -x2;
        st.s1 = 0.0;
        st.s2 = 0.0;
        st.ruined = true;
        return;
    }
    if (x1 < 0.0) {  // x2 >= 0: line 2 rescues line 1 if that direction is open
        if (r1.is_disabled()) {
            st.e1 += -x1;
            st.s1 = 0.0;
            st.s2 = x2;
            st.ruined = true;
            return;
        }
        const double cost = r1.ratio();
        if (x2 + cost * x1 >= 0.0) {
            st.l1 += -x1;
            st.s1 = 0.0;
            st.s2 = x2 + cost * x1;
            return;
        }
        // line 2 hands over everything it has, the rest is injected
        st.l1 += x2 / cost;
        st.e1 += -x1 - x2 / cost;
        st.s1 = 0.0;
        st.s2 = 0.0;
        st.ruined = true;
        return;
    }
    // x2 < 0, x1 >= 0: line 1 rescues line 2
    if (r2.is_disabled()) {
        st.e2 += -x2;
        st.s2 = 0.0;
        st.s1 = x1;
        st.ruined = true;
        return;
    }
    const double cost = r2.ratio();
    if (x1 + cost * x2 >= 0.0) {
        st.l2 += -x2;
        st.s2 = 0.0;
        st.s1 = x1 + cost * x2;
        return;
    }
    st.l2 += x1 / cost;
    st.e2 += -x2 - x1 / cost;
    st.s1 = 0.0;
    st.s2 = 0.0;
    st.ruined = true;
}

namespace {

// Reflection conditions checked after every claim. An injection normally
// requires both surpluses at zero; when a transfer direction is disabled the
// would-be rescuer keeps its capital, so only the stricken line must be flat.
void enforce_event_conditions(const SurplusState& before, const SurplusState& after,
                              const TransferCost& r1, const TransferCost& r2) {
    const bool dl1 = after.l1 > before.l1;
    const bool dl2 = after.l2 > before.l2;
    const bool de1 = after.e1 > before.e1;
    const bool de2 = after.e2 > before.e2;
    auto fail = [](const char* what) {
        throw std::logic_error(std::string("event condition violated: ") + what);
    };
    if (after.s1 < 0.0 || after.s2 < 0.0) fail("negative surplus");
    if (after.l1 < before.l1 || after.l2 < before.l2 || after.e1 < before.e1 ||
        after.e2 < before.e2) {
        fail("cumulative process decreased");
    }
    if (dl1 && after.s1 != 0.0) fail("transfer to line 1 away from zero surplus");
    if (dl2 && after.s2 != 0.0) fail("transfer to line 2 away from zero surplus");
    if (de1) {
        if (after.s1 != 0.0) fail("injection into line 1 away from zero surplus");
        if (!r1.is_disabled() && after.s2 != 0.0) fail("injection while rescue was possible");
    }
    if (de2) {
        if (after.s2 != 0.0) fail("injection into line 2 away from zero surplus");
        if (!r2.is_disabled() && after.s1 != 0.0) fail("injection while rescue was possible");
    }
    // legal joint jumps: singletons, (L1,E1), (L2,E2), (E1,E2)
    if (dl1 && (dl2 || de2)) fail("illegal simultaneous jumps");
    if (dl2 && (dl1 || de1)) fail("illegal simultaneous jumps");
    if ((after.e1 + after.e2 > 0.0) != after.ruined) fail("ruin flag out of sync");
}

}  // namespace

PathResult simulate_path(const CompiledModel& m, double u, double v, double t_max,
                         std::mt19937_64& rng, std::vector<PathEvent>* log) {
    if (u < 0.0 || v < 0.0) throw std::invalid_argument("initial capitals must be nonnegative");
    if (!(t_max > 0.0)) throw std::invalid_argument("horizon must be positive");
    SurplusState st;
    st.s1 = u;
    st.s2 = v;
    if (m.rate <= 0.0) {  // pure drift: nothing ever happens
        st.t = t_max;
        st.s1 += m.premium1 * t_max;
        st.s2 += m.premium2 * t_max;
        return {std::nullopt, st};
    }
    for (;;) {
        const double dt = exponential_draw(rng, m.rate);
        if (st.t + dt >= t_max) {
            const double rest = t_max - st.t;
            st.t = t_max;
            st.s1 += m.premium1 * rest;
            st.s2 += m.premium2 * rest;
            return {std::nullopt, st};
        }
        st.t += dt;
        st.s1 += m.premium1 * dt;
        st.s2 += m.premium2 * dt;
        const auto [j1, j2] = m.sample_jump(rng);
        const SurplusState before = st;
        apply_claim(st, j1, j2, m.r1, m.r2);
        enforce_event_conditions(before, st, m.r1, m.r2);
        if (log) log->push_back({st.t, j1, j2, st});
        if (st.ruined) return {st.t, st};
    }
}

PathResult simulate_path(const CoverageModel& model, double u, double v, double t_max,
                         std::mt19937_64& rng, std::vector<PathEvent>* log) {
    return simulate_path(CompiledModel::compile(model), u, v, t_max, rng, log);
}

namespace {

MCEstimate bernoulli_estimate(std::uint64_t successes, std::uint64_t n) {
    MCEstimate out;
    out.n = n;
    out.value = n == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(n);
    out.std_error = n == 0 ? 0.0 : std::sqrt(out.value * (1.0 - out.value) / n);
    return out;
}

}  // namespace

MCEstimate estimate_survival(const CoverageModel& model, double u, double v,
                             const SimConfig& cfg) {
    const CompiledModel cm = CompiledModel::compile(model);
    std::atomic<std::uint64_t> survived{0};
    parallel_blocks(cfg.n_paths, cfg.workers, [&](std::uint64_t begin, std::uint64_t end) {
        std::uint64_t local = 0;
        for (std::uint64_t i = begin; i < end; ++i) {
            auto rng = substream(cfg.seed, StreamRole::survival, i);
            if (!simulate_path(cm, u, v, cfg.t_max, rng).ruin_time) ++local;
        }
        survived.fetch_add(local, std::memory_order_relaxed);
    });
    return bernoulli_estimate(survived.load(), cfg.n_paths);
}

std::pair<MCEstimate, MCEstimate> survival_horizon_check(const CoverageModel& model, double u,
                                                         double v, const SimConfig& cfg) {
    const CompiledModel cm = CompiledModel::compile(model);
    std::atomic<std::uint64_t> beyond_t{0};
    std::atomic<std::uint64_t> beyond_2t{0};
    parallel_blocks(cfg.n_paths, cfg.workers, [&](std::uint64_t begin, std::uint64_t end) {
        std::uint64_t local_t = 0, local_2t = 0;
        for (std::uint64_t i = begin; i < end; ++i) {
            auto rng = substream(cfg.seed, StreamRole::survival, i);
            const auto res = simulate_path(cm, u, v, 2.0 * cfg.t_max, rng);
            if (!res.ruin_time) {
                ++local_t;
                ++local_2t;
            } else if (*res.ruin_time > cfg.t_max) {
                ++local_t;
            }
        }
        beyond_t.fetch_add(local_t, std::memory_order_relaxed);
        beyond_2t.fetch_add(local_2t, std::memory_order_relaxed);
    });
    return {bernoulli_estimate(beyond_t.load(), cfg.n_paths),
            bernoulli_estimate(beyond_2t.load(), cfg.n_paths)};
}

TransformEstimates estimate_transforms(const CoverageModel& model, double s1, double s2,
                                       const SimConfig& cfg) {
    if (!(s1 > 0.0) || !(s2 > 0.0)) {
        throw std::domain_error("transform estimation requires s1, s2 > 0");
    }
    const CompiledModel cm = CompiledModel::compile(model);
    TransformEstimates out;
    out.s1 = s1;
    out.s2 = s2;
    struct Variant {
        StreamRole role;
        bool draw_u, draw_v;
        MCEstimate* slot;
    };
    Variant variants[3] = {
        {StreamRole::transform_joint, true, true, &out.f_hat},
        {StreamRole::transform_line1, true, false, &out.f1_hat},
        {StreamRole::transform_line2, false, true, &out.f2_hat},
    };
    for (const auto& var : variants) {
        std::atomic<std::uint64_t> survived{0};
        parallel_blocks(cfg.n_paths, cfg.workers, [&](std::uint64_t begin, std::uint64_t end) {
            std::uint64_t local = 0;
            for (std::uint64_t i = begin; i < end; ++i) {
                auto rng = substream(cfg.seed, var.role, i);
                const double u = var.draw_u ? exponential_draw(rng, s1) : 0.0;
                const double v = var.draw_v ? exponential_draw(rng, s2) : 0.0;
                if (!simulate_path(cm, u, v, cfg.t_max, rng).ruin_time) ++local;
            }
            survived.fetch_add(local, std::memory_order_relaxed);
        });
        *var.slot = bernoulli_estimate(survived.load(), cfg.n_paths);
    }
    return out;
}

void write_path_log_csv(const std::vector<PathEvent>& events, double u, double v,
                        std::string& out) {
    out += "t,event,S1,S2,L1,L2,E1,E2\n";
    char buf[256];
    SurplusState prev;
    prev.s1 = u;
    prev.s2 = v;
    auto kind = [&](const PathEvent& ev) -> const char* {
        const auto& a = ev.after;
        if (a.e1 > prev.e1 || a.e2 > prev.e2) return "external";
        if (a.l1 > prev.l1) return "transfer1";
        if (a.l2 > prev.l2) return "transfer2";
        return "claim";
    };
    for (const auto& ev : events) {
        std::snprintf(buf, sizeof(buf), "%.17g,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", ev.t,
                      kind(ev), ev.after.s1, ev.after.s2, ev.after.l1, ev.after.l2, ev.after.e1,
                      ev.after.e2);
        out += buf;
        prev = ev.after;
    }
}

}  // namespace bivruin
