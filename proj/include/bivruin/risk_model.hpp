#pragma once

#include <complex>
#include <optional>
#include <utility>

#include "bivruin/distributions.hpp"

namespace bivruin {

// One insurance line: linear premium income minus a compound Poisson claim
// stream. claims is absent exactly when claim_rate == 0 (pure drift).
struct RiskProcess {
    double premium_rate = 1.0;  // c > 0
    double claim_rate = 0.0;    // lambda >= 0
    std::optional<ClaimDistribution> claims;

    static RiskProcess drift_only(double premium_rate);
    static RiskProcess with_claims(double premium_rate, double claim_rate,
                                   ClaimDistribution claims);

    void validate() const;  // throws std::invalid_argument

    double mean_claim() const;  // 0 for pure drift
    double drift() const;       // c - lambda E[C]

    // psi(s) = log E exp(s X(1)) = s c - lambda (1 - E exp(-s C)), Re(s) >= 0.
    std::complex<double> exponent(std::complex<double> s) const;
    double exponent(double s) const;
    std::complex<double> exponent_derivative(std::complex<double> s) const;
    double exponent_derivative(double s) const;

    // Phi(q), the inverse of psi. For real q > 0 this is the unique root of
    // psi(s) = q beyond Phi(0); Phi(0) is 0 when the drift is nonnegative and
    // the positive root of psi(s) = 0 otherwise. For complex q with
    // Re(q) >= 0 the analytic continuation with Re(Phi) >= 0 is followed by
    // stepping from a real anchor; psi(Phi(q)) = q is enforced to 1e-12
    // relative in all cases.
    double exponent_inverse(double q) const;
    std::complex<double> exponent_inverse(std::complex<double> q) const;
    double exponent_inverse_at_zero() const;

    // q / Phi(q) with its q -> 0 limit max(drift, 0); the ladder layer and the
    // closed-form factor models evaluate this ratio constantly.
    std::complex<double> inverse_ratio(std::complex<double> q) const;
};

// Transfer price for one direction. disabled() encodes "this line can never
// receive capital" without putting a float infinity into the event logic.
class TransferCost {
  public:
    TransferCost() = default;
    static TransferCost finite(double ratio);
    static TransferCost disabled();

    bool is_disabled() const { return disabled_; }
    double ratio() const;  // throws std::logic_error when disabled

  private:
    double ratio_ = 1.0;
    bool disabled_ = false;
};

// Claims arriving as a single stream with bivariate jumps.
struct CommonStream {
    double rate;
    JointClaimDistribution jumps;
};

// Two lines covering each other's deficits at proportional transfer cost.
// joint present: one claim stream hits both lines (the per-line claim fields
// must then be empty). joint absent: the two lines run independent streams.
struct CoverageModel {
    RiskProcess line1;
    RiskProcess line2;
    TransferCost r1 = TransferCost::finite(1.0);
    TransferCost r2 = TransferCost::finite(1.0);
    std::optional<CommonStream> joint;
    // r1*r2 >= 1 is required unless this flag is set; below that product the
    // survival dichotomy checks stop being meaningful.
    bool allow_low_cost = false;

    void validate() const;
    bool independent() const { return !joint.has_value(); }

    // Marginal drifts of the two lines; handles the common-stream case.
    std::pair<double, double> drifts() const;
};

// log E exp(s1 X1(1) + s2 X2(1)); sum of the line exponents for independent
// streams, s1 c1 + s2 c2 - lambda (1 - joint transform) for a common stream.
std::complex<double> bivariate_exponent(const CoverageModel& model, std::complex<double> s1,
                                        std::complex<double> s2);
std::complex<double> bivariate_exponent_d1(const CoverageModel& model, std::complex<double> s1,
                                           std::complex<double> s2);
std::complex<double> bivariate_exponent_d2(const CoverageModel& model, std::complex<double> s1,
                                           std::complex<double> s2);

struct NetProfitResult {
    bool holds = false;
    bool first_holds = false;   // mu1 + r2 mu2 > 0, or mu2 > 0 when r2 is disabled
    bool second_holds = false;  // mu2 + r1 mu1 > 0, or mu1 > 0 when r1 is disabled
};

NetProfitResult net_profit(const CoverageModel& model);

}  // namespace bivruin
