#include "bivruin/risk_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bivruin {

namespace {

void require_nonneg_real(std::complex<double> s, const char* what) {
    if (s.real() < -1e-12 * (1.0 + std::abs(s))) {
        throw std::domain_error(std::string(what) + " requires Re >= 0");
    }
}

}  // namespace

RiskProcess RiskProcess::drift_only(double premium_rate) {
    RiskProcess p;
    p.premium_rate = premium_rate;
    p.claim_rate = 0.0;
    p.validate();
    return p;
}

RiskProcess RiskProcess::with_claims(double premium_rate, double claim_rate,
                                     ClaimDistribution claims) {
    RiskProcess p;
    p.premium_rate = premium_rate;
    p.claim_rate = claim_rate;
    p.claims = std::move(claims);
    p.validate();
    return p;
}

void RiskProcess::validate() const {
    if (!(premium_rate > 0.0) || !std::isfinite(premium_rate)) {
        throw std::invalid_argument("premium rate must be positive and finite");
    }
    if (claim_rate < 0.0 || !std::isfinite(claim_rate)) {
        throw std::invalid_argument("claim rate must be nonnegative and finite");
    }
    if ((claim_rate > 0.0) != claims.has_value()) {
        throw std::invalid_argument("claim law must be present exactly when claim rate > 0");
    }
}

double RiskProcess::mean_claim() const { return claims ? claims->mean() : 0.0; }

double RiskProcess::drift() const { return premium_rate - claim_rate * mean_claim(); }

std::complex<double> RiskProcess::exponent(std::complex<double> s) const {
    require_nonneg_real(s, "exponent");
    std::complex<double> out = s * premium_rate;
    if (claim_rate > 0.0) out -= claim_rate * (1.0 - claims->lt(s));
    return out;
}

double RiskProcess::exponent(double s) const {
    return exponent(std::complex<double>(s, 0.0)).real();
}

std::complex<double> RiskProcess::exponent_derivative(std::complex<double> s) const {
    require_nonneg_real(s, "exponent derivative");
    std::complex<double> out{premium_rate, 0.0};
    if (claim_rate > 0.0) out += claim_rate * claims->lt_derivative(s);
    return out;
}

double RiskProcess::exponent_derivative(double s) const {
    return exponent_derivative(std::complex<double>(s, 0.0)).real();
}

namespace {

// Root of psi(s) = q on [lo, hi] where psi is increasing, psi(lo) <= q and
// psi(hi) >= q. Newton steps guarded by the bracket, bisection otherwise.
double solve_on_bracket(const RiskProcess& proc, double q, double lo, double hi) {
    const double tol = 1e-13 * std::max(1.0, std::abs(q));
    double s = 0.5 * (lo + hi);
    double best = s;
    double best_err = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 200; ++iter) {
        const double f = proc.exponent(s) - q;
        const double err = std::abs(f);
        if (err < best_err) {
            best = s;
            best_err = err;
        }
        if (err <= tol) return s;
        if (f > 0.0) {
            hi = s;
        } else {
            lo = s;
        }
        const double d = proc.exponent_derivative(s);
        double next = d > 0.0 ? s - f / d : std::numeric_limits<double>::quiet_NaN();
        if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
        if (hi - lo <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) {
            return best;
        }
        s = next;
    }
    if (best_err <= 1e-10 * std::max(1.0, std::abs(q))) return best;
    throw std::runtime_error("exponent inverse did not converge (real branch)");
}

}  // namespace

double RiskProcess::exponent_inverse_at_zero() const {
    if (drift() >= 0.0) return 0.0;
    // negative drift: psi dips below zero, take the positive root of psi = 0
    double lo = 0.0;
    double hi = 1.0;
    while (exponent(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw std::runtime_error("no positive root of the exponent found");
    }
    return solve_on_bracket(*this, 0.0, lo, hi);
}

double RiskProcess::exponent_inverse(double q) const {
    if (q < 0.0) throw std::domain_error("exponent inverse requires q >= 0");
    if (claim_rate == 0.0) return q / premium_rate;  // psi(s) = c s exactly
    const double root0 = exponent_inverse_at_zero();
    if (q == 0.0) return root0;
    double lo = root0;
    double hi = std::max(1.0, 2.0 * root0);
    while (exponent(hi) <= q) {
        hi *= 2.0;
        if (hi > 1e300) throw std::runtime_error("exponent inverse bracket grew unbounded");
    }
    return solve_on_bracket(*this, q, lo, hi);
}

namespace {

// Newton for psi(s) = target in the complex plane, seeded at s. Fails (false)
// instead of throwing so the continuation driver can retry with smaller steps.
bool newton_complex(const RiskProcess& proc, std::complex<double> target,
                    std::complex<double>& s) {
    const double tol = 1e-13 * std::max(1.0, std::abs(target));
    for (int iter = 0; iter < 60; ++iter) {
        if (s.real() < -1e-9 * (1.0 + std::abs(s))) return false;  // wrong half plane
        std::complex<double> f;
        try {
            f = proc.exponent(s) - target;
        } catch (const std::domain_error&) {
            return false;
        }
        if (std::abs(f) <= tol) return true;
        const std::complex<double> d = proc.exponent_derivative(s);
        if (!(std::abs(d) > 0.0)) return false;
        const std::complex<double> step = f / d;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return false;
        s -= step;
    }
    return std::abs(proc.exponent(s) - target) <= 1e-12 * std::max(1.0, std::abs(target));
}

}  // namespace

std::complex<double> RiskProcess::exponent_inverse(std::complex<double> q) const {
    if (q.imag() == 0.0 && q.real() >= 0.0) return {exponent_inverse(q.real()), 0.0};
    if (q.real() < 0.0) throw std::domain_error("exponent inverse requires Re(q) >= 0");
    if (claim_rate == 0.0) return q / premium_rate;
    // Walk from a real anchor of the same magnitude towards q; the inverse is
    // analytic on Re(q) >= 0 with Re >= 0, so small enough steps always track
    // the right branch.
    const double anchor = std::abs(q);
    for (int steps = 16; steps <= 65536; steps *= 4) {
        std::complex<double> s{exponent_inverse(anchor), 0.0};
        bool ok = true;
        for (int k = 1; k <= steps && ok; ++k) {
            const std::complex<double> target =
                anchor + (q - anchor) * (static_cast<double>(k) / steps);
            ok = newton_complex(*this, target, s);
        }
        if (ok && std::abs(exponent(s) - q) <= 1e-12 * std::max(1.0, std::abs(q))) {
            if (s.real() < 0.0 && s.real() > -1e-9 * (1.0 + std::abs(s))) {
                s = {0.0, s.imag()};  // round-off on the boundary Re(q) = 0
            }
            return s;
        }
    }
    throw std::runtime_error("exponent inverse continuation failed");
}

std::complex<double> RiskProcess::inverse_ratio(std::complex<double> q) const {
    if (q == std::complex<double>(0.0, 0.0)) return {std::max(drift(), 0.0), 0.0};
    const double mu = drift();
    // Root-finding loses the ratio's accuracy near the origin (1 - lt(s)
    // cancels), so switch to the expansion mu + psi''(0) q / (2 mu) there.
    if (mu > 0.0 && std::abs(q) <= 1e-6) {
        const double curvature = claim_rate > 0.0 ? claim_rate * claims->second_moment() : 0.0;
        return mu + curvature * q / (2.0 * mu);
    }
    return q / exponent_inverse(q);
}

TransferCost TransferCost::finite(double ratio) {
    if (!(ratio >= 0.0) || !std::isfinite(ratio)) {
        throw std::invalid_argument("transfer cost must be nonnegative and finite");
    }
    TransferCost r;
    r.ratio_ = ratio;
    r.disabled_ = false;
    return r;
}

TransferCost TransferCost::disabled() {
    TransferCost r;
    r.disabled_ = true;
    return r;
}

double TransferCost::ratio() const {
    if (disabled_) throw std::logic_error("transfer direction is disabled");
    return ratio_;
}

void CoverageModel::validate() const {
    line1.validate();
    line2.validate();
    if (joint) {
        if (!(joint->rate > 0.0) || !std::isfinite(joint->rate)) {
            throw std::invalid_argument("common claim stream rate must be positive");
        }
        if (line1.claim_rate != 0.0 || line2.claim_rate != 0.0) {
            throw std::invalid_argument(
                "a common claim stream carries all claims; per-line streams must be empty");
        }
    }
    if (!r1.is_disabled() && !r2.is_disabled() && !allow_low_cost) {
        if (r1.ratio() * r2.ratio() < 1.0 - 1e-12) {
            throw std::invalid_argument(
                "transfer cost product below one; set allow_low_cost to permit it");
        }
    }
}

std::pair<double, double> CoverageModel::drifts() const {
    if (!joint) return {line1.drift(), line2.drift()};
    return {line1.premium_rate - joint->rate * joint->jumps.mean1(),
            line2.premium_rate - joint->rate * joint->jumps.mean2()};
}

std::complex<double> bivariate_exponent(const CoverageModel& model, std::complex<double> s1,
                                        std::complex<double> s2) {
    if (!model.joint) return model.line1.exponent(s1) + model.line2.exponent(s2);
    return s1 * model.line1.premium_rate + s2 * model.line2.premium_rate -
           model.joint->rate * (1.0 - model.joint->jumps.lt(s1, s2));
}

std::complex<double> bivariate_exponent_d1(const CoverageModel& model, std::complex<double> s1,
                                           std::complex<double> s2) {
    if (!model.joint) return model.line1.exponent_derivative(s1);
    return model.line1.premium_rate + model.joint->rate * model.joint->jumps.lt_d1(s1, s2);
}

std::complex<double> bivariate_exponent_d2(const CoverageModel& model, std::complex<double> s1,
                                           std::complex<double> s2) {
    if (!model.joint) return model.line2.exponent_derivative(s2);
    return model.line2.premium_rate + model.joint->rate * model.joint->jumps.lt_d2(s1, s2);
}

NetProfitResult net_profit(const CoverageModel& model) {
    const auto [mu1, mu2] = model.drifts();
    NetProfitResult out;
    out.first_holds = model.r2.is_disabled() ? mu2 > 0.0 : mu1 + model.r2.ratio() * mu2 > 0.0;
    out.second_holds = model.r1.is_disabled() ? mu1 > 0.0 : mu2 + model.r1.ratio() * mu1 > 0.0;
    out.holds = out.first_holds && out.second_holds;
    return out;
}

}  // namespace bivruin
