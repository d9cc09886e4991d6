#include "bivruin/distributions.hpp"

#include <cmath>
#include <stdexcept>

#include "bivruin/rng.hpp"

namespace bivruin {

namespace {

constexpr double kWeightTol = 1e-12;

void require_nonneg_real(std::complex<double> s) {
    if (s.real() < -1e-12 * (1.0 + std::abs(s))) {
        throw std::domain_error("claim transform requires Re(s) >= 0");
    }
}

}  // namespace

ClaimDistribution ClaimDistribution::deterministic(double value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw std::invalid_argument("deterministic claim size must be positive and finite");
    }
    ClaimDistribution d;
    d.kind_ = Kind::deterministic;
    d.value_ = value;
    return d;
}

ClaimDistribution ClaimDistribution::exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw std::invalid_argument("exponential claim rate must be positive and finite");
    }
    ClaimDistribution d;
    d.kind_ = Kind::exponential;
    d.rate_ = rate;
    return d;
}

ClaimDistribution ClaimDistribution::erlang(int shape, double rate) {
    if (shape < 1) throw std::invalid_argument("erlang shape must be a positive integer");
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw std::invalid_argument("erlang claim rate must be positive and finite");
    }
    ClaimDistribution d;
    d.kind_ = Kind::erlang;
    d.shape_ = shape;
    d.rate_ = rate;
    return d;
}

ClaimDistribution ClaimDistribution::mixture(std::vector<Weighted> components) {
    if (components.empty()) throw std::invalid_argument("mixture needs at least one component");
    double total = 0.0;
    for (const auto& part : components) {
        if (!(part.weight >= 0.0) || !std::isfinite(part.weight)) {
            throw std::invalid_argument("mixture weights must be nonnegative");
        }
        total += part.weight;
    }
    if (std::abs(total - 1.0) > kWeightTol) {
        throw std::invalid_argument("mixture weights must sum to one");
    }
    ClaimDistribution d;
    d.kind_ = Kind::mixture;
    d.parts_ = std::move(components);
    return d;
}

double ClaimDistribution::mean() const {
    switch (kind_) {
        case Kind::deterministic: return value_;
        case Kind::exponential: return 1.0 / rate_;
        case Kind::erlang: return static_cast<double>(shape_) / rate_;
        case Kind::mixture: {
            double m = 0.0;
            for (const auto& part : parts_) m += part.weight * part.dist.mean();
            return m;
        }
    }
    return 0.0;
}

double ClaimDistribution::second_moment() const {
    switch (kind_) {
        case Kind::deterministic: return value_ * value_;
        case Kind::exponential: return 2.0 / (rate_ * rate_);
        case Kind::erlang:
            return static_cast<double>(shape_) * (shape_ + 1) / (rate_ * rate_);
        case Kind::mixture: {
            double m = 0.0;
            for (const auto& part : parts_) m += part.weight * part.dist.second_moment();
            return m;
        }
    }
    return 0.0;
}

std::complex<double> ClaimDistribution::lt(std::complex<double> s) const {
    require_nonneg_real(s);
    switch (kind_) {
        case Kind::deterministic: return std::exp(-s * value_);
        case Kind::exponential: return rate_ / (rate_ + s);
        case Kind::erlang: {
            const std::complex<double> base = rate_ / (rate_ + s);
            std::complex<double> out{1.0, 0.0};
            for (int i = 0; i < shape_; ++i) out *= base;
            return out;
        }
        case Kind::mixture: {
            std::complex<double> out{0.0, 0.0};
            for (const auto& part : parts_) out += part.weight * part.dist.lt(s);
            return out;
        }
    }
    return {0.0, 0.0};
}

double ClaimDistribution::lt(double s) const { return lt(std::complex<double>(s, 0.0)).real(); }

std::complex<double> ClaimDistribution::lt_derivative(std::complex<double> s) const {
    require_nonneg_real(s);
    switch (kind_) {
        case Kind::deterministic: return -value_ * std::exp(-s * value_);
        case Kind::exponential: {
            const std::complex<double> den = rate_ + s;
            return -rate_ / (den * den);
        }
        case Kind::erlang: {
            // d/ds (rate/(rate+s))^k = -(k/rate) (rate/(rate+s))^(k+1)
            const std::complex<double> base = rate_ / (rate_ + s);
            std::complex<double> pw{1.0, 0.0};
            for (int i = 0; i < shape_ + 1; ++i) pw *= base;
            return -(static_cast<double>(shape_) / rate_) * pw;
        }
        case Kind::mixture: {
            std::complex<double> out{0.0, 0.0};
            for (const auto& part : parts_) out += part.weight * part.dist.lt_derivative(s);
            return out;
        }
    }
    return {0.0, 0.0};
}

double ClaimDistribution::sample(std::mt19937_64& rng) const {
    switch (kind_) {
        case Kind::deterministic: return value_;
        case Kind::exponential: return exponential_draw(rng, rate_);
        case Kind::erlang: {
            double sum = 0.0;
            for (int i = 0; i < shape_; ++i) sum += exponential_draw(rng, rate_);
            return sum;
        }
        case Kind::mixture: {
            const double u = uniform01(rng);
            double cum = 0.0;
            for (const auto& part : parts_) {
                cum += part.weight;
                if (u <= cum) return part.dist.sample(rng);
            }
            return parts_.back().dist.sample(rng);
        }
    }
    return 0.0;
}

std::optional<double> ClaimDistribution::exponential_rate() const {
    if (kind_ == Kind::exponential) return rate_;
    return std::nullopt;
}

JointClaimDistribution::JointClaimDistribution(std::vector<JointAtom> atoms)
    : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw std::invalid_argument("joint claim law needs at least one atom");
    double total = 0.0;
    cumulative_.reserve(atoms_.size());
    for (const auto& atom : atoms_) {
        if (!(atom.weight >= 0.0) || !std::isfinite(atom.weight)) {
            throw std::invalid_argument("joint atom weights must be nonnegative");
        }
        if (!atom.law1 && !atom.law2) {
            throw std::invalid_argument("joint atom must hit at least one line");
        }
        total += atom.weight;
        cumulative_.push_back(total);
    }
    if (std::abs(total - 1.0) > kWeightTol) {
        throw std::invalid_argument("joint atom weights must sum to one");
    }
}

JointClaimDistribution JointClaimDistribution::independent(
    double rate1, const std::optional<ClaimDistribution>& law1, double rate2,
    const std::optional<ClaimDistribution>& law2) {
    if (rate1 < 0.0 || rate2 < 0.0 || rate1 + rate2 <= 0.0) {
        throw std::invalid_argument("independent merge needs nonnegative rates, not both zero");
    }
    if ((rate1 > 0.0) != law1.has_value() || (rate2 > 0.0) != law2.has_value()) {
        throw std::invalid_argument("claim law must be present exactly when its rate is positive");
    }
    const double total = rate1 + rate2;
    std::vector<JointAtom> atoms;
    if (rate1 > 0.0) atoms.push_back({rate1 / total, law1, std::nullopt});
    if (rate2 > 0.0) atoms.push_back({rate2 / total, std::nullopt, law2});
    return JointClaimDistribution(std::move(atoms));
}

std::complex<double> JointClaimDistribution::lt(std::complex<double> s1,
                                                std::complex<double> s2) const {
    require_nonneg_real(s1);
    require_nonneg_real(s2);
    std::complex<double> out{0.0, 0.0};
    for (const auto& atom : atoms_) {
        const std::complex<double> a = atom.law1 ? atom.law1->lt(s1) : 1.0;
        const std::complex<double> b = atom.law2 ? atom.law2->lt(s2) : 1.0;
        out += atom.weight * a * b;
    }
    return out;
}

std::complex<double> JointClaimDistribution::lt_d1(std::complex<double> s1,
                                                   std::complex<double> s2) const {
    require_nonneg_real(s1);
    require_nonneg_real(s2);
    std::complex<double> out{0.0, 0.0};
    for (const auto& atom : atoms_) {
        if (!atom.law1) continue;
        const std::complex<double> b = atom.law2 ? atom.law2->lt(s2) : 1.0;
        out += atom.weight * atom.law1->lt_derivative(s1) * b;
    }
    return out;
}

std::complex<double> JointClaimDistribution::lt_d2(std::complex<double> s1,
                                                   std::complex<double> s2) const {
    require_nonneg_real(s1);
    require_nonneg_real(s2);
    std::complex<double> out{0.0, 0.0};
    for (const auto& atom : atoms_) {
        if (!atom.law2) continue;
        const std::complex<double> a = atom.law1 ? atom.law1->lt(s1) : 1.0;
        out += atom.weight * a * atom.law2->lt_derivative(s2);
    }
    return out;
}

double JointClaimDistribution::mean1() const {
    double m = 0.0;
    for (const auto& atom : atoms_) {
        if (atom.law1) m += atom.weight * atom.law1->mean();
    }
    return m;
}

double JointClaimDistribution::mean2() const {
    double m = 0.0;
    for (const auto& atom : atoms_) {
        if (atom.law2) m += atom.weight * atom.law2->mean();
    }
    return m;
}

std::pair<double, double> JointClaimDistribution::sample(std::mt19937_64& rng) const {
    const double u = uniform01(rng);
    std::size_t idx = atoms_.size() - 1;
    for (std::size_t i = 0; i < cumulative_.size(); ++i) {
        if (u <= cumulative_[i]) {
            idx = i;
            break;
        }
    }
    const auto& atom = atoms_[idx];
    const double j1 = atom.law1 ? atom.law1->sample(rng) : 0.0;
    const double j2 = atom.law2 ? atom.law2->sample(rng) : 0.0;
    return {j1, j2};
}

}  // namespace bivruin
