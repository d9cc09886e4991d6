#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "bivruin/risk_model.hpp"
#include "bivruin/rng.hpp"

namespace bivruin {

// Surplus pair plus the cumulative transfer and injection amounts. The two
// surpluses never go below zero at event epochs; ruined flips exactly when an
// external injection happens (e1 + e2 > 0).
struct SurplusState {
    double t = 0.0;
    double s1 = 0.0, s2 = 0.0;  // surpluses
    double l1 = 0.0, l2 = 0.0;  // capital received from the other line
    double e1 = 0.0, e2 = 0.0;  // capital injected from outside
    bool ruined = false;
};

struct SimConfig {
    double t_max = 2000.0;
    std::uint64_t n_paths = 10'000;
    std::uint64_t seed = 42;
    int workers = 0;  // 0: hardware concurrency
    bool record_transfers = false;
};

struct MCEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t n = 0;
};

struct PathEvent {
    double t = 0.0;
    double claim1 = 0.0, claim2 = 0.0;  // jump sizes before transfers
    SurplusState after;                 // state once transfers/injections settled
};

// Flattened event-loop form of a model: premium drift plus one claim stream
// of product atoms. Independent streams are folded into the equivalent
// two-atom mixture, so both model flavours share one loop.
class CompiledModel {
  public:
    static CompiledModel compile(const CoverageModel& model);

    double premium1 = 0.0, premium2 = 0.0;
    double rate = 0.0;  // total claim arrival rate; 0 means no claims at all
    TransferCost r1, r2;

    std::pair<double, double> sample_jump(std::mt19937_64& rng) const;

  private:
    struct Atom {
        double cumulative = 0.0;
        std::optional<ClaimDistribution> law1;
        std::optional<ClaimDistribution> law2;
    };
    std::vector<Atom> atoms_;
};

struct PathResult {
    std::optional<double> ruin_time;  // empty: no injection needed before t_max
    SurplusState final_state;
};

// One claim event: both lines absorb their jump, then the transfer rules
// settle deficits. Covers the six sign cases plus disabled directions, where
// the would-be rescuer keeps its capital and the injection covers the whole
// deficit. Ties x == 0 count as "no deficit".
void apply_claim(SurplusState& state, double jump1, double jump2, const TransferCost& r1,
                 const TransferCost& r2);

// Exact event-driven simulation until the first injection or t_max. Each
// event is checked against the reflection conditions (surpluses nonnegative,
// transfers only at zero surplus, injections only when no rescue is possible,
// only the legal jump combinations); a violation throws std::logic_error
// since it can only mean a bug, never a model state.
PathResult simulate_path(const CompiledModel& model, double u, double v, double t_max,
                         std::mt19937_64& rng, std::vector<PathEvent>* log = nullptr);
PathResult simulate_path(const CoverageModel& model, double u, double v, double t_max,
                         std::mt19937_64& rng, std::vector<PathEvent>* log = nullptr);

// P(no injection before t_max) from n_paths Bernoulli trials; deterministic
// given (seed, n_paths) for any worker count.
MCEstimate estimate_survival(const CoverageModel& model, double u, double v,
                             const SimConfig& cfg);

// Survival frequencies at t_max and 2 t_max from the same paths; the gap is
// an estimate of the finite-horizon truncation bias.
std::pair<MCEstimate, MCEstimate> survival_horizon_check(const CoverageModel& model, double u,
                                                         double v, const SimConfig& cfg);

// Survival probability averaged over independent exponential initial
// capitals: f_hat = E phi(e_{s1}, e_{s2}), plus the one-sided versions with
// v = 0 resp. u = 0. Fresh capitals are drawn per path.
struct TransformEstimates {
    double s1 = 0.0, s2 = 0.0;
    MCEstimate f_hat;   // capitals (e_{s1}, e_{s2})
    MCEstimate f1_hat;  // capitals (e_{s1}, 0)
    MCEstimate f2_hat;  // capitals (0, e_{s2})
};

TransformEstimates estimate_transforms(const CoverageModel& model, double s1, double s2,
                                       const SimConfig& cfg);

// Path log in CSV form: t, event, S1, S2, L1, L2, E1, E2.
void write_path_log_csv(const std::vector<PathEvent>& events, double u, double v,
                        std::string& out);

}  // namespace bivruin
