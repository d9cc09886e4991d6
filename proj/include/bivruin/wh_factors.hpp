#pragma once

#include <complex>
#include <string>
#include <vector>

#include "bivruin/ladder_wh.hpp"

namespace bivruin {

struct FactorEstimate {
    std::complex<double> value{0.0, 0.0};
    double std_error = 0.0;  // 0 for closed forms
};

// Transforms of the running supremum/infimum of X_left / X_right over an
// independent exponential horizon:
//   plus(side, w)  = E exp(-w sup),  Re(w) >= 0
//   minus(side, w) = E exp(-w inf),  Re(w) <= 0
// plus_tail / minus_tail are the w -> +-infinity limits P(sup = 0), P(inf = 0).
// The transform layer only consumes the left/right ratios, which closed-form
// models may pin exactly even when the individual factors are unknown.
class WienerHopfFactorModel {
  public:
    virtual ~WienerHopfFactorModel() = default;

    virtual FactorEstimate plus(Side side, std::complex<double> w) const = 0;
    virtual FactorEstimate minus(Side side, std::complex<double> w) const = 0;
    virtual FactorEstimate plus_tail(Side side) const = 0;
    virtual FactorEstimate minus_tail(Side side) const = 0;

    virtual FactorEstimate plus_ratio(std::complex<double> w) const;    // left / right
    virtual FactorEstimate minus_ratio(std::complex<double> w) const;   // right / left
    virtual FactorEstimate plus_tail_ratio() const;
    virtual FactorEstimate minus_tail_ratio() const;

    // Covariance of the estimators mean exp(-a sup) and mean exp(-b inf) of
    // one side, for real a >= 0 >= b. Zero for closed forms.
    virtual double plus_minus_cov(Side, double, double) const { return 0.0; }
};

// Empirical factors from simulated (sup, inf) samples. Raw samples are kept
// so the factors can be evaluated later at any argument, including the
// model-dependent complex ones the transform layer asks for.
class MonteCarloFactors : public WienerHopfFactorModel {
  public:
    static MonteCarloFactors estimate(const CoverageModel& model, const WhConfig& cfg);
    static MonteCarloFactors estimate(const AuxiliaryPair& pair, const WhConfig& cfg);

    FactorEstimate plus(Side side, std::complex<double> w) const override;
    FactorEstimate minus(Side side, std::complex<double> w) const override;
    FactorEstimate plus_tail(Side side) const override;
    FactorEstimate minus_tail(Side side) const override;
    double plus_minus_cov(Side side, double a, double b) const override;

    bool has_side(Side side) const;
    const std::vector<double>& sup_samples(Side side) const;
    const std::vector<double>& inf_samples(Side side) const;
    double horizon_rate(Side side) const;
    std::size_t sample_count() const;

    // Rejection-sampler diagnostics per line (1-based), plus any warning
    // raised when the empirical acceptance rate drifts off the exact one.
    const LadderStats& ladder_stats(int line) const;
    const std::vector<std::string>& warnings() const { return warnings_; }

  private:
    struct SideSamples {
        bool present = false;
        double p = 0.0;
        std::vector<double> sup;
        std::vector<double> inf;
    };
    const SideSamples& side_samples(Side side) const;

    SideSamples left_;
    SideSamples right_;
    LadderStats stats1_;
    LadderStats stats2_;
    std::vector<std::string> warnings_;
};

// Closed forms for a model whose second line is pure drift: the right ladder
// process vanishes, both minus factors are one and the plus factors reduce to
//   plus(left, w)  = p_left  / (mu2 + r1 w / Phi1(w))
//   plus(right, w) = p_right / (r2 mu2 + w / Phi1(w))
class SurplusNoteFactors : public WienerHopfFactorModel {
  public:
    explicit SurplusNoteFactors(const CoverageModel& model);

    FactorEstimate plus(Side side, std::complex<double> w) const override;
    FactorEstimate minus(Side side, std::complex<double> w) const override;
    FactorEstimate plus_tail(Side side) const override;
    FactorEstimate minus_tail(Side side) const override;

  private:
    RiskProcess line1_;
    double mu2_ = 0.0;
    double r1_ = 1.0, r2_ = 1.0;
    double p_left_ = 0.0, p_right_ = 0.0;
};

// r1 r2 = 1: the right process is the left one on a rescaled clock, so all
// four factors coincide and every ratio is exactly one. Individual factor
// values are not pinned by that symmetry and are unavailable here.
class UnitCostFactors : public WienerHopfFactorModel {
  public:
    explicit UnitCostFactors(const CoverageModel& model);

    FactorEstimate plus(Side side, std::complex<double> w) const override;
    FactorEstimate minus(Side side, std::complex<double> w) const override;
    FactorEstimate plus_tail(Side side) const override;
    FactorEstimate minus_tail(Side side) const override;

    FactorEstimate plus_ratio(std::complex<double> w) const override;
    FactorEstimate minus_ratio(std::complex<double> w) const override;
    FactorEstimate plus_tail_ratio() const override;
    FactorEstimate minus_tail_ratio() const override;
};

// LHS - RHS of the factorization identity
//   plus(w) minus(w) = p / (p - log E exp(-w X(1)))
// at w on the imaginary axis, with the standard error of the product estimate
// (covariance-aware, since sup and inf come from the same paths).
FactorEstimate wh_identity_residual(const MonteCarloFactors& factors, const AuxiliaryPair& pair,
                                    Side side, std::complex<double> w);

}  // namespace bivruin
