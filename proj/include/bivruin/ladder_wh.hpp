#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>

#include "bivruin/risk_model.hpp"
#include "bivruin/rng.hpp"

namespace bivruin {

// Raised when a construction needs a strictly positive drift and the model
// does not have one.
struct UnsupportedDriftError : std::domain_error {
    using std::domain_error::domain_error;
};

struct LadderStats {
    std::uint64_t attempts = 0;
    std::uint64_t accepted = 0;
    void merge(const LadderStats& other) {
        attempts += other.attempts;
        accepted += other.accepted;
    }
};

// Descending ladder time process of one line: a driftless compound Poisson
// subordinator with rate c - mu whose jumps are first-passage times of the
// parent below zero, conditioned on that passage happening. Lines without
// claims give the zero process.
class LadderProcess {
  public:
    // Requires drift > 0; rejection attempts whose parent path survives past
    // rejection_factor mean inter-claim times count as "never passing".
    static LadderProcess from(const RiskProcess& parent, double rejection_factor = 1e4);

    double rate() const { return rate_; }        // c - mu
    bool is_zero() const { return rate_ == 0; }  // pure-drift parent

    // psi_Y(q) = log E exp(-q Y(1)) = mu^+ - q / Phi(q); 0 at q = 0.
    std::complex<double> exponent(std::complex<double> q) const;

    // One conditional first-passage time, by simulating the parent from zero
    // and rejecting paths that never pass below it.
    double sample_jump(std::mt19937_64& rng, LadderStats* stats = nullptr) const;

    // Exact acceptance rate of the rejection sampler: the probability that
    // the parent started at zero ever goes below it, 1 - mu/c.
    double acceptance_probability() const;

    double rejection_cutoff() const { return cutoff_; }
    const RiskProcess& parent() const { return parent_; }

  private:
    RiskProcess parent_;
    double rate_ = 0.0;
    double cutoff_ = 0.0;
};

enum class Side { left, right };

// The two-sided difference processes built from the ladder processes:
//   X_left(t)  = Y1(r1 t) - Y2(t),    horizon rate p_left  = mu2^+ + r1 mu1^+
//   X_right(t) = Y1(t)    - Y2(r2 t), horizon rate p_right = mu1^+ + r2 mu2^+
// The right process only exists while r2 is finite; restricted models keep
// the left one.
struct AuxiliaryPair {
    LadderProcess y1;
    LadderProcess y2;
    double r1 = 1.0;
    double r2 = 1.0;  // ignored when right_present is false
    double p_left = 0.0;
    double p_right = 0.0;
    bool right_present = true;

    // Requires independent streams, finite r1 and positive drifts.
    static AuxiliaryPair from(const CoverageModel& model, double rejection_factor = 1e4);
};

// log E exp(-w X_side(1)) for w on the imaginary axis (0 at w = 0):
//   left:  p_left  - r1 w / Phi1(w) + w / Phi2(-w)
//   right: p_right - w / Phi1(w) + r2 w / Phi2(-w)
std::complex<double> auxiliary_exponent(const AuxiliaryPair& pair, Side side,
                                        std::complex<double> w);

struct WhConfig {
    std::size_t n_samples = 10'000;
    std::uint64_t seed = 42;
    int workers = 0;
    double rejection_factor = 1e4;
};

}  // namespace bivruin
