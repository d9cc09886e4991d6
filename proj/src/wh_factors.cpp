#include "bivruin/wh_factors.hpp"

#include <cmath>
#include <cstdio>
#include <mutex>
#include <stdexcept>

#include "bivruin/parallel.hpp"

namespace bivruin {

namespace {

constexpr double kReSlack = 1e-12;

// Mean and standard error of exp(-w x) over a sample vector.
FactorEstimate transform_of_samples(const std::vector<double>& xs, std::complex<double> w) {
    const std::size_t n = xs.size();
    std::complex<double> sum{0.0, 0.0};
    for (const double x : xs) sum += std::exp(-w * x);
    const std::complex<double> mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (const double x : xs) var += std::norm(std::exp(-w * x) - mean);
    var /= n > 1 ? static_cast<double>(n - 1) : 1.0;
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

FactorEstimate ratio_estimate(const FactorEstimate& num, const FactorEstimate& den) {
    const std::complex<double> value = num.value / den.value;
    const double rel_num = num.std_error / std::abs(num.value);
    const double rel_den = den.std_error / std::abs(den.value);
    return {value, std::abs(value) * std::hypot(rel_num, rel_den)};
}

}  // namespace

FactorEstimate WienerHopfFactorModel::plus_ratio(std::complex<double> w) const {
    return ratio_estimate(plus(Side::left, w), plus(Side::right, w));
}

FactorEstimate WienerHopfFactorModel::minus_ratio(std::complex<double> w) const {
    return ratio_estimate(minus(Side::right, w), minus(Side::left, w));
}

FactorEstimate WienerHopfFactorModel::plus_tail_ratio() const {
    return ratio_estimate(plus_tail(Side::left), plus_tail(Side::right));
}

FactorEstimate WienerHopfFactorModel::minus_tail_ratio() const {
    return ratio_estimate(minus_tail(Side::right), minus_tail(Side::left));
}

MonteCarloFactors MonteCarloFactors::estimate(const CoverageModel& model, const WhConfig& cfg) {
    return estimate(AuxiliaryPair::from(model, cfg.rejection_factor), cfg);
}

MonteCarloFactors MonteCarloFactors::estimate(const AuxiliaryPair& pair, const WhConfig& cfg) {
    if (cfg.n_samples == 0) throw std::invalid_argument("factor estimation needs samples");
    MonteCarloFactors out;
    std::mutex stats_mu;

    auto run_side = [&](SideSamples& dst, double up_rate, double down_rate, double p,
                        StreamRole role) {
        dst.present = true;
        dst.p = p;
        dst.sup.assign(cfg.n_samples, 0.0);
        dst.inf.assign(cfg.n_samples, 0.0);
        const double total = up_rate + down_rate;
        parallel_blocks(cfg.n_samples, cfg.workers, [&](std::uint64_t begin, std::uint64_t end) {
            LadderStats local1, local2;
            for (std::uint64_t i = begin; i < end; ++i) {
                auto rng = substream(cfg.seed, role, i);
                const double horizon = exponential_draw(rng, p);
                double t = 0.0, x = 0.0, sup = 0.0, inf = 0.0;
                if (total > 0.0) {
                    for (;;) {
                        t += exponential_draw(rng, total);
                        if (t >= horizon) break;
                        if (uniform01(rng) * total <= up_rate) {
                            x += pair.y1.sample_jump(rng, &local1);
                            if (x > sup) sup = x;
                        } else {
                            x -= pair.y2.sample_jump(rng, &local2);
                            if (x < inf) inf = x;
                        }
                    }
                }
                dst.sup[i] = sup;
                dst.inf[i] = inf;
            }
            std::lock_guard<std::mutex> lock(stats_mu);
            out.stats1_.merge(local1);
            out.stats2_.merge(local2);
        });
    };

    run_side(out.left_, pair.r1 * pair.y1.rate(), pair.y2.rate(), pair.p_left,
             StreamRole::wh_left);
    if (pair.right_present) {
        run_side(out.right_, pair.y1.rate(), pair.r2 * pair.y2.rate(), pair.p_right,
                 StreamRole::wh_right);
    }

    // Flag a rejection sampler whose empirical acceptance rate strays from
    // the exact first-passage probability; that points at cutoff bias.
    auto check_stats = [&](const LadderStats& st, const LadderProcess& y, int line) {
        if (st.attempts == 0) return;
        const double exact = y.acceptance_probability();
        const double emp = static_cast<double>(st.accepted) / static_cast<double>(st.attempts);
        const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(st.attempts));
        if (std::abs(emp - exact) > 3.0 * se) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "line %d ladder sampler: acceptance %.5f vs exact %.5f (3se=%.5f)",
                          line, emp, exact, 3.0 * se);
            out.warnings_.emplace_back(buf);
        }
    };
    check_stats(out.stats1_, pair.y1, 1);
    check_stats(out.stats2_, pair.y2, 2);
    return out;
}

const MonteCarloFactors::SideSamples& MonteCarloFactors::side_samples(Side side) const {
    const SideSamples& s = side == Side::left ? left_ : right_;
    if (!s.present) throw std::logic_error("factor samples for this side were not simulated");
    return s;
}

bool MonteCarloFactors::has_side(Side side) const {
    return (side == Side::left ? left_ : right_).present;
}

FactorEstimate MonteCarloFactors::plus(Side side, std::complex<double> w) const {
    if (w.real() < -kReSlack * (1.0 + std::abs(w))) {
        throw std::domain_error("plus factor requires Re(w) >= 0");
    }
    return transform_of_samples(side_samples(side).sup, w);
}

FactorEstimate MonteCarloFactors::minus(Side side, std::complex<double> w) const {
    if (w.real() > kReSlack * (1.0 + std::abs(w))) {
        throw std::domain_error("minus factor requires Re(w) <= 0");
    }
    return transform_of_samples(side_samples(side).inf, w);
}

namespace {

FactorEstimate zero_fraction(const std::vector<double>& xs) {
    std::size_t zeros = 0;
    for (const double x : xs) {
        if (x == 0.0) ++zeros;
    }
    const double n = static_cast<double>(xs.size());
    const double p = static_cast<double>(zeros) / n;
    return {{p, 0.0}, std::sqrt(p * (1.0 - p) / n)};
}

}  // namespace

FactorEstimate MonteCarloFactors::plus_tail(Side side) const {
    return zero_fraction(side_samples(side).sup);
}

FactorEstimate MonteCarloFactors::minus_tail(Side side) const {
    return zero_fraction(side_samples(side).inf);
}

double MonteCarloFactors::plus_minus_cov(Side side, double a, double b) const {
    const SideSamples& s = side_samples(side);
    const std::size_t n = s.sup.size();
    double mean_y = 0.0, mean_z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_y += std::exp(-a * s.sup[i]);
        mean_z += std::exp(-b * s.inf[i]);
    }
    mean_y /= static_cast<double>(n);
    mean_z /= static_cast<double>(n);
    double cov = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cov += (std::exp(-a * s.sup[i]) - mean_y) * (std::exp(-b * s.inf[i]) - mean_z);
    }
    cov /= n > 1 ? static_cast<double>(n - 1) : 1.0;
    return cov / static_cast<double>(n);  // covariance of the two means
}

const std::vector<double>& MonteCarloFactors::sup_samples(Side side) const {
    return side_samples(side).sup;
}

const std::vector<double>& MonteCarloFactors::inf_samples(Side side) const {
    return side_samples(side).inf;
}

double MonteCarloFactors::horizon_rate(Side side) const { return side_samples(side).p; }

std::size_t MonteCarloFactors::sample_count() const { return left_.sup.size(); }

const LadderStats& MonteCarloFactors::ladder_stats(int line) const {
    if (line == 1) return stats1_;
    if (line == 2) return stats2_;
    throw std::invalid_argument("line index must be 1 or 2");
}

SurplusNoteFactors::SurplusNoteFactors(const CoverageModel& model) {
    model.validate();
    if (!model.independent()) {
        throw std::invalid_argument("closed-form factors need independent streams");
    }
    if (model.line2.claim_rate != 0.0) {
        throw std::invalid_argument("closed-form factors need a pure-drift second line");
    }
    if (model.r1.is_disabled()) {
        throw std::invalid_argument("closed-form factors need a finite r1");
    }
    if (!net_profit(model).holds) {
        throw std::domain_error("closed-form factors need the net profit condition");
    }
    line1_ = model.line1;
    mu2_ = model.line2.premium_rate;
    r1_ = model.r1.ratio();
    const double mu1p = std::max(model.line1.drift(), 0.0);
    p_left_ = mu2_ + r1_ * mu1p;
    if (model.r2.is_disabled()) {
        r2_ = -1.0;  // right factors undefined in the restricted model
        p_right_ = 0.0;
    } else {
        r2_ = model.r2.ratio();
        p_right_ = mu1p + r2_ * mu2_;
    }
}

FactorEstimate SurplusNoteFactors::plus(Side side, std::complex<double> w) const {
    if (w.real() < -kReSlack * (1.0 + std::abs(w))) {
        throw std::domain_error("plus factor requires Re(w) >= 0");
    }
    const std::complex<double> ratio = line1_.inverse_ratio(w);  // w / Phi1(w)
    if (side == Side::left) return {p_left_ / (mu2_ + r1_ * ratio), 0.0};
    if (r2_ < 0.0) throw std::logic_error("right factors are undefined while r2 is disabled");
    return {p_right_ / (r2_ * mu2_ + ratio), 0.0};
}

FactorEstimate SurplusNoteFactors::minus(Side, std::complex<double> w) const {
    if (w.real() > kReSlack * (1.0 + std::abs(w))) {
        throw std::domain_error("minus factor requires Re(w) <= 0");
    }
    return {{1.0, 0.0}, 0.0};  // the difference processes never go below zero
}

FactorEstimate SurplusNoteFactors::plus_tail(Side side) const {
    const double c1 = line1_.premium_rate;  // w / Phi1(w) -> c1 at infinity
    if (side == Side::left) return {{p_left_ / (mu2_ + r1_ * c1), 0.0}, 0.0};
    if (r2_ < 0.0) throw std::logic_error("right factors are undefined while r2 is disabled");
    return {{p_right_ / (r2_ * mu2_ + c1), 0.0}, 0.0};
}

FactorEstimate SurplusNoteFactors::minus_tail(Side) const { return {{1.0, 0.0}, 0.0}; }

UnitCostFactors::UnitCostFactors(const CoverageModel& model) {
    model.validate();
    if (!model.independent()) {
        throw std::invalid_argument("unit-cost factors need independent streams");
    }
    if (model.r1.is_disabled() || model.r2.is_disabled() ||
        std::abs(model.r1.ratio() * model.r2.ratio() - 1.0) > 1e-9) {
        throw std::invalid_argument("unit-cost factors need r1 r2 = 1");
    }
}

FactorEstimate UnitCostFactors::plus(Side, std::complex<double>) const {
    throw std::logic_error("unit-cost symmetry pins factor ratios, not factor values");
}
FactorEstimate UnitCostFactors::minus(Side, std::complex<double>) const {
    throw std::logic_error("unit-cost symmetry pins factor ratios, not factor values");
}
FactorEstimate UnitCostFactors::plus_tail(Side) const {
    throw std::logic_error("unit-cost symmetry pins factor ratios, not factor values");
}
FactorEstimate UnitCostFactors::minus_tail(Side) const {
    throw std::logic_error("unit-cost symmetry pins factor ratios, not factor values");
}

FactorEstimate UnitCostFactors::plus_ratio(std::complex<double>) const { return {{1.0, 0.0}, 0.0}; }
FactorEstimate UnitCostFactors::minus_ratio(std::complex<double>) const {
    return {{1.0, 0.0}, 0.0};
}
FactorEstimate UnitCostFactors::plus_tail_ratio() const { return {{1.0, 0.0}, 0.0}; }
FactorEstimate UnitCostFactors::minus_tail_ratio() const { return {{1.0, 0.0}, 0.0}; }

FactorEstimate wh_identity_residual(const MonteCarloFactors& factors, const AuxiliaryPair& pair,
                                    Side side, std::complex<double> w) {
    const auto& sup = factors.sup_samples(side);
    const auto& inf = factors.inf_samples(side);
    const std::size_t n = sup.size();
    std::complex<double> mean_a{0.0, 0.0}, mean_b{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        mean_a += std::exp(-w * sup[i]);
        mean_b += std::exp(-w * inf[i]);
    }
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);
    double var_a = 0.0, var_b = 0.0;
    std::complex<double> cov{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        const std::complex<double> da = std::exp(-w * sup[i]) - mean_a;
        const std::complex<double> db = std::exp(-w * inf[i]) - mean_b;
        var_a += std::norm(da);
        var_b += std::norm(db);
        cov += da * std::conj(db);
    }
    const double bessel = n > 1 ? static_cast<double>(n - 1) : 1.0;
    var_a /= bessel;
    var_b /= bessel;
    cov /= bessel;
    // product of the two sample means; sup and inf share paths, hence the
    // covariance term in the delta-method variance
    const std::complex<double> product = mean_a * mean_b;
    const double var_prod =
        (std::norm(mean_b) * var_a + std::norm(mean_a) * var_b +
         2.0 * (mean_b * std::conj(mean_a) * cov).real()) /
        static_cast<double>(n);
    const double p = factors.horizon_rate(side);
    const std::complex<double> rhs = p / (p - auxiliary_exponent(pair, side, w));
    return {product - rhs, std::sqrt(std::max(var_prod, 0.0))};
}

}  // namespace bivruin
