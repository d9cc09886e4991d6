#include "bivruin/ladder_wh.hpp"

#include <cmath>
#include <stdexcept>

namespace bivruin {

LadderProcess LadderProcess::from(const RiskProcess& parent, double rejection_factor) {
    parent.validate();
    const double mu = parent.drift();
    if (!(mu > 0.0)) {
        throw UnsupportedDriftError(
            "ladder process construction requires a strictly positive drift");
    }
    if (!(rejection_factor > 0.0)) {
        throw std::invalid_argument("rejection factor must be positive");
    }
    LadderProcess y;
    y.parent_ = parent;
    y.rate_ = parent.premium_rate - mu;  // lambda E[C]
    y.cutoff_ =
        parent.claim_rate > 0.0 ? rejection_factor / parent.claim_rate : 0.0;
    return y;
}

std::complex<double> LadderProcess::exponent(std::complex<double> q) const {
    // mu^+ - q / Phi(q); the q -> 0 limit of the ratio is mu^+, so the value
    // vanishes there, and it vanishes identically for a zero process.
    return std::max(parent_.drift(), 0.0) - parent_.inverse_ratio(q);
}

double LadderProcess::sample_jump(std::mt19937_64& rng, LadderStats* stats) const {
    if (is_zero()) throw std::logic_error("zero ladder process has no jumps");
    const double c = parent_.premium_rate;
    const double lam = parent_.claim_rate;
    const ClaimDistribution& claims = *parent_.claims;
    for (;;) {
        if (stats) ++stats->attempts;
        double t = 0.0;
        double x = 0.0;
        for (;;) {
            const double dt = exponential_draw(rng, lam);
            t += dt;
            if (t > cutoff_) break;  // treated as never passing below zero
            x += c * dt - claims.sample(rng);
            if (x < 0.0) {
                if (stats) ++stats->accepted;
                return t;
            }
        }
    }
}

double LadderProcess::acceptance_probability() const {
    return 1.0 - parent_.drift() / parent_.premium_rate;
}

AuxiliaryPair AuxiliaryPair::from(const CoverageModel& model, double rejection_factor) {
    model.validate();
    if (!model.independent()) {
        throw std::invalid_argument("auxiliary processes need independent claim streams");
    }
    if (model.r1.is_disabled()) {
        throw std::invalid_argument("auxiliary processes need a finite r1");
    }
    AuxiliaryPair pair{LadderProcess::from(model.line1, rejection_factor),
                       LadderProcess::from(model.line2, rejection_factor)};
    pair.r1 = model.r1.ratio();
    const double mu1 = model.line1.drift();
    const double mu2 = model.line2.drift();
    pair.p_left = std::max(mu2, 0.0) + pair.r1 * std::max(mu1, 0.0);
    if (model.r2.is_disabled()) {
        pair.right_present = false;
        pair.p_right = 0.0;
    } else {
        pair.r2 = model.r2.ratio();
        pair.p_right = std::max(mu1, 0.0) + pair.r2 * std::max(mu2, 0.0);
    }
    if (!(pair.p_left > 0.0) || (pair.right_present && !(pair.p_right > 0.0))) {
        throw std::invalid_argument("auxiliary horizon rates must be positive");
    }
    return pair;
}

std::complex<double> auxiliary_exponent(const AuxiliaryPair& pair, Side side,
                                        std::complex<double> w) {
    if (std::abs(w.real()) > 1e-12 * (1.0 + std::abs(w))) {
        throw std::domain_error("auxiliary exponent is defined on the imaginary axis");
    }
    if (w == std::complex<double>(0.0, 0.0)) return {0.0, 0.0};
    const std::complex<double> up = pair.y1.parent().inverse_ratio(w);     // w / Phi1(w)
    const std::complex<double> down = pair.y2.parent().inverse_ratio(-w);  // -w / Phi2(-w)
    if (side == Side::left) return pair.p_left - pair.r1 * up - down;
    if (!pair.right_present) throw std::logic_error("right auxiliary process is not defined");
    return pair.p_right - up - pair.r2 * down;
}

}  // namespace bivruin
