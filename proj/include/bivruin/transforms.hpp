#pragma once

#include <complex>

#include "bivruin/wh_factors.hpp"

namespace bivruin {

// Constants entering the boundary transforms:
//   p_l_prime = r1 mu1 + mu2^+ - r1 r2 mu2^-
//   p_r_prime = r2 mu2 + mu1^+ - r1 r2 mu1^-
struct PrimeConstants {
    double p_l_prime = 0.0;
    double p_r_prime = 0.0;
};

PrimeConstants prime_constants(const CoverageModel& model);

// The kernel identity ties the transforms together:
//   psi F(s1,s2) = coeff1 F1(s1) + coeff2 F2(s2)
// with coeff1 = (psi(s1,s2) - psi(s1,r2 s1)) / (s2 - r2 s1) and symmetrically
// for coeff2; a degenerate denominator is replaced by the partial derivative
// of psi at the midpoint, and a disabled direction turns the coefficient into
// the other line's premium rate.
struct KernelTerms {
    std::complex<double> psi;
    std::complex<double> coeff1;
    std::complex<double> coeff2;
};

KernelTerms kernel_terms(const CoverageModel& model, std::complex<double> s1,
                         std::complex<double> s2);
std::complex<double> kernel_rhs(const CoverageModel& model, std::complex<double> f1,
                                std::complex<double> f2, std::complex<double> s1,
                                std::complex<double> s2);
// RHS / psi(s1,s2); throws std::domain_error when the kernel is singular.
std::complex<double> kernel_implied_f(const CoverageModel& model, std::complex<double> f1,
                                      std::complex<double> f2, std::complex<double> s1,
                                      std::complex<double> s2);

struct TransformValue {
    std::complex<double> f{0.0, 0.0};      // F(s1, s2)
    std::complex<double> f_hat{0.0, 0.0};  // s1 s2 F, the survival probability
                                           // at exponential initial capitals
    std::complex<double> term1{0.0, 0.0};  // the two summands of (psi1+psi2) F
    std::complex<double> term2{0.0, 0.0};
    double std_error = 0.0;                // delta-method SE of f_hat
    bool diagonal1 = false;                // limiting branch used at s2 = r2 s1
    bool diagonal2 = false;                // limiting branch used at s1 = r1 s2
};

// The main solution for independent streams under the net profit condition,
// evaluated at real s1 > Phi1(0), s2 > Phi2(0):
//   (psi1(s1)+psi2(s2)) F =
//       p_r' / (s2 - r2 s1) * (psi2(s2)-psi2(r2 s1)) / (psi1(s1)+psi2(r2 s1))
//           * plus_ratio(psi1(s1))
//     + p_l' / (s1 - r1 s2) * (psi1(s1)-psi1(r1 s2)) / (psi2(s2)+psi1(r1 s2))
//           * minus_ratio(-psi2(s2))
TransformValue survival_transform(const CoverageModel& model,
                                  const WienerHopfFactorModel& factors, double s1, double s2);
// Same evaluation with the constants supplied by the caller (the validation
// suite uses this to prove it notices a corrupted constant).
TransformValue survival_transform(const CoverageModel& model,
                                  const WienerHopfFactorModel& factors, double s1, double s2,
                                  const PrimeConstants& constants);

// The two boundary transforms F1(s) = int exp(-su) phi(u,0) du and F2:
//   F1(s1) = p_r' / (psi1(s1) + psi2(r2 s1)) * plus_ratio(psi1(s1))
//   F2(s2) = p_l' / (psi2(s2) + psi1(r1 s2)) * minus_ratio(-psi2(s2))
struct BoundaryTransforms {
    std::complex<double> f1{0.0, 0.0};
    std::complex<double> f2{0.0, 0.0};
    double se1 = 0.0;
    double se2 = 0.0;
};

BoundaryTransforms boundary_transforms(const CoverageModel& model,
                                       const WienerHopfFactorModel& factors, double s1,
                                       double s2);

// Survival probability from zero initial capitals, through both factor tails:
//   via_plus  = p_r' / (c1 + r2 c2) * plus_tail_ratio
//   via_minus = p_l' / (c2 + r1 c1) * minus_tail_ratio
struct ZeroCapitalSurvival {
    double via_plus = 0.0;
    double via_minus = 0.0;
    double se_plus = 0.0;
    double se_minus = 0.0;
};

ZeroCapitalSurvival zero_capital_survival(const CoverageModel& model,
                                          const WienerHopfFactorModel& factors);

// Restricted agreement, r2 disabled (line 1 never rescues line 2). Requires
// mu2 > 0 and mu2 + r1 mu1 > 0. With r1 finite this uses the left factors
//   (psi1+psi2) F = (mu2 - r1 mu1^-) plus(left, psi1(s1)) / s1
//     + mu2 (mu2 + r1 mu1) * s2 / (s1 - r1 s2)
//       * (psi1(s1) - psi1(r1 s2)) / (psi2(s2) + psi1(r1 s2))
//       * 1 / (psi2(s2) minus(left, -psi2(s2)));
// with both directions disabled it degenerates to the product form, where no
// factors are needed and left_factors may be null.
TransformValue restricted_survival_transform(const CoverageModel& model,
                                             const WienerHopfFactorModel* left_factors,
                                             double s1, double s2);

// Closed form for a pure-drift second line, via the one-dimensional reduction
// Z = X1 + (mu2/r1) t started at u + v/r1:
//   F(s1,s2) = (mu2 + r1 mu1) / (r1 s2 - s1) * (1/psi_Z(s1) - 1/psi_Z(r1 s2))
std::complex<double> surplus_note_transform_oracle(const CoverageModel& model, double s1,
                                                   double s2);

// Closed form for r1 r2 = 1, via the reduction Z = X1 + r2 X2 started at
// u + r2 v:
//   F(s1,s2) = (mu1 + r2 mu2) / (s2 - r2 s1) * (1/psi_Z(s1) - 1/psi_Z(r1 s2))
// with psi_Z(s) = psi1(s) + psi2(r2 s).
std::complex<double> unit_cost_transform_oracle(const CoverageModel& model, double s1,
                                                double s2);

// One-line survival probability transform int exp(-su) phi(u) du = mu/psi(s);
// zero when the drift is nonpositive.
std::complex<double> one_line_survival_transform(const RiskProcess& proc,
                                                 std::complex<double> s);

// Pointwise one-line survival for exponential claims:
//   phi(u) = 1 - lambda/(c theta) exp(-(theta - lambda/c) u)
double one_line_survival_exponential(const RiskProcess& proc, double u);

}  // namespace bivruin
