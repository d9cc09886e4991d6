#include "bivruin/transforms.hpp"

#include <cmath>
#include <stdexcept>

namespace bivruin {

namespace {

double pos(double x) { return std::max(x, 0.0); }
double neg(double x) { return std::max(-x, 0.0); }

struct Quotient {
    double value;
    bool limited;
};

// (psi(a) - psi(b)) / (a - b), replaced by psi'((a+b)/2) when the denominator
// degenerates.
Quotient diff_quotient(const RiskProcess& line, double a, double b) {
    if (std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(a))) {
        return {line.exponent_derivative(0.5 * (a + b)), true};
    }
    return {(line.exponent(a) - line.exponent(b)) / (a - b), false};
}

void require_transform_domain(const CoverageModel& model, double s1, double s2) {
    model.validate();
    if (!model.independent()) {
        throw std::domain_error("the transform solution needs independent claim streams");
    }
    if (!net_profit(model).holds) {
        throw std::domain_error("the transform solution needs the net profit condition");
    }
    if (!(s1 > model.line1.exponent_inverse_at_zero()) ||
        !(s2 > model.line2.exponent_inverse_at_zero())) {
        throw std::domain_error("transform arguments must exceed the zero of each exponent");
    }
}

}  // namespace

PrimeConstants prime_constants(const CoverageModel& model) {
    model.validate();
    if (model.r1.is_disabled() || model.r2.is_disabled()) {
        throw std::domain_error("prime constants need finite transfer costs");
    }
    const auto [mu1, mu2] = model.drifts();
    const double r1 = model.r1.ratio();
    const double r2 = model.r2.ratio();
    PrimeConstants pc;
    pc.p_l_prime = r1 * mu1 + pos(mu2) - r1 * r2 * neg(mu2);
    pc.p_r_prime = r2 * mu2 + pos(mu1) - r1 * r2 * neg(mu1);
    // Both routes to the normalizing constant must agree with the prime form.
    if (mu1 >= 0.0 && std::abs((mu1 + r2 * mu2) - pc.p_r_prime) >
                          1e-12 * std::max(1.0, std::abs(pc.p_r_prime))) {
        throw std::logic_error("prime constant inconsistent with the mu1 >= 0 route");
    }
    if (mu2 >= 0.0 && std::abs((mu2 + r1 * mu1) - pc.p_l_prime) >
                          1e-12 * std::max(1.0, std::abs(pc.p_l_prime))) {
        throw std::logic_error("prime constant inconsistent with the mu2 >= 0 route");
    }
    return pc;
}

KernelTerms kernel_terms(const CoverageModel& model, std::complex<double> s1,
                         std::complex<double> s2) {
    model.validate();
    KernelTerms out;
    out.psi = bivariate_exponent(model, s1, s2);
    if (model.r2.is_disabled()) {
        out.coeff1 = model.line2.premium_rate;
    } else {
        const double r2 = model.r2.ratio();
        const std::complex<double> d = s2 - r2 * s1;
        if (std::abs(d) <= 1e-6 * std::max(1.0, std::abs(s2))) {
            out.coeff1 = bivariate_exponent_d2(model, s1, 0.5 * (s2 + r2 * s1));
        } else {
            out.coeff1 = (out.psi - bivariate_exponent(model, s1, r2 * s1)) / d;
        }
    }
    if (model.r1.is_disabled()) {
        out.coeff2 = model.line1.premium_rate;
    } else {
        const double r1 = model.r1.ratio();
        const std::complex<double> d = s1 - r1 * s2;
        if (std::abs(d) <= 1e-6 * std::max(1.0, std::abs(s1))) {
            out.coeff2 = bivariate_exponent_d1(model, 0.5 * (s1 + r1 * s2), s2);
        } else {
            out.coeff2 = (out.psi - bivariate_exponent(model, r1 * s2, s2)) / d;
        }
    }
    return out;
}

std::complex<double> kernel_rhs(const CoverageModel& model, std::complex<double> f1,
                                std::complex<double> f2, std::complex<double> s1,
                                std::complex<double> s2) {
    const KernelTerms terms = kernel_terms(model, s1, s2);
    return terms.coeff1 * f1 + terms.coeff2 * f2;
}

std::complex<double> kernel_implied_f(const CoverageModel& model, std::complex<double> f1,
                                      std::complex<double> f2, std::complex<double> s1,
                                      std::complex<double> s2) {
    const KernelTerms terms = kernel_terms(model, s1, s2);
    const std::complex<double> rhs = terms.coeff1 * f1 + terms.coeff2 * f2;
    if (std::abs(terms.psi) <= 1e-12 * (1.0 + std::abs(rhs))) {
        throw std::domain_error("kernel is singular at this argument pair");
    }
    return rhs / terms.psi;
}

TransformValue survival_transform(const CoverageModel& model,
                                  const WienerHopfFactorModel& factors, double s1, double s2) {
    return survival_transform(model, factors, s1, s2, prime_constants(model));
}

TransformValue survival_transform(const CoverageModel& model,
                                  const WienerHopfFactorModel& factors, double s1, double s2,
                                  const PrimeConstants& pc) {
    require_transform_domain(model, s1, s2);
    if (model.r1.is_disabled() || model.r2.is_disabled()) {
        throw std::domain_error("use the restricted transform for disabled directions");
    }
    const double r1 = model.r1.ratio();
    const double r2 = model.r2.ratio();
    const double psi1 = model.line1.exponent(s1);
    const double psi2 = model.line2.exponent(s2);

    const Quotient q2 = diff_quotient(model.line2, s2, r2 * s1);
    const Quotient q1 = diff_quotient(model.line1, s1, r1 * s2);
    const double den1 = psi1 + model.line2.exponent(r2 * s1);
    const double den2 = psi2 + model.line1.exponent(r1 * s2);
    const double a1 = pc.p_r_prime * q2.value / den1;
    const double a2 = pc.p_l_prime * q1.value / den2;

    const FactorEstimate rho_plus = factors.plus_ratio(psi1);
    const FactorEstimate rho_minus = factors.minus_ratio(-psi2);

    TransformValue out;
    out.diagonal1 = q2.limited;
    out.diagonal2 = q1.limited;
    out.term1 = a1 * rho_plus.value;
    out.term2 = a2 * rho_minus.value;
    out.f = (out.term1 + out.term2) / (psi1 + psi2);
    out.f_hat = s1 * s2 * out.f;

    if (rho_plus.std_error > 0.0 || rho_minus.std_error > 0.0) {
        const double scale = s1 * s2 / (psi1 + psi2);
        double var = 0.0;
        try {
            // full delta method over the four factor estimators, with the
            // within-side covariances (sup and inf share sample paths)
            const FactorEstimate lp = factors.plus(Side::left, psi1);
            const FactorEstimate rp = factors.plus(Side::right, psi1);
            const FactorEstimate rm = factors.minus(Side::right, -psi2);
            const FactorEstimate lm = factors.minus(Side::left, -psi2);
            const double g_lp = scale * a1 / rp.value.real();
            const double g_rp = -scale * a1 * rho_plus.value.real() / rp.value.real();
            const double g_rm = scale * a2 / lm.value.real();
            const double g_lm = -scale * a2 * rho_minus.value.real() / lm.value.real();
            const double cov_l = factors.plus_minus_cov(Side::left, psi1, -psi2);
            const double cov_r = factors.plus_minus_cov(Side::right, psi1, -psi2);
            var = g_lp * g_lp * lp.std_error * lp.std_error +
                  g_rp * g_rp * rp.std_error * rp.std_error +
                  g_rm * g_rm * rm.std_error * rm.std_error +
                  g_lm * g_lm * lm.std_error * lm.std_error + 2.0 * g_lp * g_lm * cov_l +
                  2.0 * g_rp * g_rm * cov_r;
        } catch (const std::logic_error&) {
            // ratio-only factor model: combine the ratio errors directly
            var = scale * scale * (a1 * a1 * rho_plus.std_error * rho_plus.std_error +
                                   a2 * a2 * rho_minus.std_error * rho_minus.std_error);
        }
        out.std_error = std::sqrt(std::max(var, 0.0));
    }
    return out;
}

BoundaryTransforms boundary_transforms(const CoverageModel& model,
                                       const WienerHopfFactorModel& factors, double s1,
                                       double s2) {
    require_transform_domain(model, s1, s2);
    if (model.r1.is_disabled() || model.r2.is_disabled()) {
        throw std::domain_error("boundary transforms need finite transfer costs");
    }
    const double r1 = model.r1.ratio();
    const double r2 = model.r2.ratio();
    const PrimeConstants pc = prime_constants(model);
    const double psi1 = model.line1.exponent(s1);
    const double psi2 = model.line2.exponent(s2);
    const FactorEstimate rho_plus = factors.plus_ratio(psi1);
    const FactorEstimate rho_minus = factors.minus_ratio(-psi2);
    BoundaryTransforms out;
    out.f1 = pc.p_r_prime / (psi1 + model.line2.exponent(r2 * s1)) * rho_plus.value;
    out.f2 = pc.p_l_prime / (psi2 + model.line1.exponent(r1 * s2)) * rho_minus.value;
    if (std::abs(rho_plus.value) > 0.0) {
        out.se1 = std::abs(out.f1) * rho_plus.std_error / std::abs(rho_plus.value);
    }
    if (std::abs(rho_minus.value) > 0.0) {
        out.se2 = std::abs(out.f2) * rho_minus.std_error / std::abs(rho_minus.value);
    }
    return out;
}

ZeroCapitalSurvival zero_capital_survival(const CoverageModel& model,
                                          const WienerHopfFactorModel& factors) {
    model.validate();
    if (!model.independent() || model.r1.is_disabled() || model.r2.is_disabled()) {
        throw std::domain_error(
            "zero-capital survival needs independent streams and finite transfer costs");
    }
    if (!net_profit(model).holds) {
        throw std::domain_error("zero-capital survival needs the net profit condition");
    }
    const double c1 = model.line1.premium_rate;
    const double c2 = model.line2.premium_rate;
    const double r1 = model.r1.ratio();
    const double r2 = model.r2.ratio();
    const PrimeConstants pc = prime_constants(model);
    const FactorEstimate plus = factors.plus_tail_ratio();
    const FactorEstimate minus = factors.minus_tail_ratio();
    ZeroCapitalSurvival out;
    // The scales are the large-argument slopes of the kernel denominators:
    // psi1(s)+psi2(r2 s) grows like (c1 + r2 c2) s along the first boundary
    // and psi2(s)+psi1(r1 s) like (c2 + r1 c1) s along the second.
    out.via_plus = pc.p_r_prime / (c1 + r2 * c2) * plus.value.real();
    out.via_minus = pc.p_l_prime / (c2 + r1 * c1) * minus.value.real();
    out.se_plus = pc.p_r_prime / (c1 + r2 * c2) * plus.std_error;
    out.se_minus = pc.p_l_prime / (c2 + r1 * c1) * minus.std_error;
    return out;
}

TransformValue restricted_survival_transform(const CoverageModel& model,
                                             const WienerHopfFactorModel* left_factors,
                                             double s1, double s2) {
    require_transform_domain(model, s1, s2);
    if (!model.r2.is_disabled()) {
        throw std::domain_error("the restricted transform needs r2 disabled");
    }
    const auto [mu1, mu2] = model.drifts();
    const double psi1 = model.line1.exponent(s1);
    const double psi2 = model.line2.exponent(s2);
    TransformValue out;
    if (model.r1.is_disabled()) {
        // no transfers at all: the lines survive independently
        out.term1 = mu1 * mu2 / psi1;
        out.term2 = mu1 * mu2 / psi2;
        out.f = (out.term1 + out.term2) / (psi1 + psi2);
        out.f_hat = s1 * s2 * out.f;
        return out;
    }
    if (left_factors == nullptr) {
        throw std::invalid_argument("left factors are required while r1 is finite");
    }
    const double r1 = model.r1.ratio();
    const FactorEstimate lp = left_factors->plus(Side::left, psi1);
    const FactorEstimate lm = left_factors->minus(Side::left, -psi2);
    const Quotient q1 = diff_quotient(model.line1, s1, r1 * s2);
    const double den = psi2 + model.line1.exponent(r1 * s2);
    out.diagonal2 = q1.limited;
    out.term1 = (mu2 - r1 * neg(mu1)) * lp.value / s1;
    const std::complex<double> b2 = mu2 * (mu2 + r1 * mu1) * s2 * q1.value / (den * psi2);
    out.term2 = b2 / lm.value;
    out.f = (out.term1 + out.term2) / (psi1 + psi2);
    out.f_hat = s1 * s2 * out.f;
    if (lp.std_error > 0.0 || lm.std_error > 0.0) {
        const double scale = s1 * s2 / (psi1 + psi2);
        const double g_p = scale * (mu2 - r1 * neg(mu1)) / s1;
        const double g_m = -scale * out.term2.real() / lm.value.real();
        const double cov = left_factors->plus_minus_cov(Side::left, psi1, -psi2);
        const double var = g_p * g_p * lp.std_error * lp.std_error +
                           g_m * g_m * lm.std_error * lm.std_error + 2.0 * g_p * g_m * cov;
        out.std_error = std::sqrt(std::max(var, 0.0));
    }
    return out;
}

std::complex<double> surplus_note_transform_oracle(const CoverageModel& model, double s1,
                                                   double s2) {
    model.validate();
    if (!model.independent() || model.line2.claim_rate != 0.0) {
        throw std::domain_error("this closed form needs a pure-drift second line");
    }
    if (model.r1.is_disabled()) throw std::domain_error("this closed form needs a finite r1");
    if (!net_profit(model).holds) {
        throw std::domain_error("this closed form needs the net profit condition");
    }
    const double r1 = model.r1.ratio();
    const double mu2 = model.line2.premium_rate;
    const auto psi_z = [&](double a) { return model.line1.exponent(a) + (mu2 / r1) * a; };
    const auto psi_z_deriv = [&](double a) {
        return model.line1.exponent_derivative(a) + mu2 / r1;
    };
    const double scale = model.line1.drift() * r1 + mu2;  // r1 mu_Z
    if (std::abs(s1 - r1 * s2) <= 1e-6 * std::max(1.0, std::abs(s1))) {
        const double mid = 0.5 * (s1 + r1 * s2);
        const double pz = psi_z(mid);
        return scale * psi_z_deriv(mid) / (pz * pz);
    }
    return scale / (r1 * s2 - s1) * (1.0 / psi_z(s1) - 1.0 / psi_z(r1 * s2));
}

std::complex<double> unit_cost_transform_oracle(const CoverageModel& model, double s1,
                                                double s2) {
    model.validate();
    if (!model.independent()) throw std::domain_error("this closed form needs independence");
    if (model.r1.is_disabled() || model.r2.is_disabled() ||
        std::abs(model.r1.ratio() * model.r2.ratio() - 1.0) > 1e-9) {
        throw std::domain_error("this closed form needs r1 r2 = 1");
    }
    if (!net_profit(model).holds) {
        throw std::domain_error("this closed form needs the net profit condition");
    }
    const double r1 = model.r1.ratio();
    const double r2 = model.r2.ratio();
    const auto psi_z = [&](double a) {
        return model.line1.exponent(a) + model.line2.exponent(r2 * a);
    };
    const auto psi_z_deriv = [&](double a) {
        return model.line1.exponent_derivative(a) + r2 * model.line2.exponent_derivative(r2 * a);
    };
    const double mu_z = model.line1.drift() + r2 * model.line2.drift();
    if (std::abs(s2 - r2 * s1) <= 1e-6 * std::max(1.0, std::abs(s2))) {
        const double mid = 0.5 * (s1 + r1 * s2);
        const double pz = psi_z(mid);
        return mu_z * r1 * psi_z_deriv(mid) / (pz * pz);
    }
    return mu_z / (s2 - r2 * s1) * (1.0 / psi_z(s1) - 1.0 / psi_z(r1 * s2));
}

std::complex<double> one_line_survival_transform(const RiskProcess& proc,
                                                 std::complex<double> s) {
    proc.validate();
    const double mu = proc.drift();
    if (mu <= 0.0) return {0.0, 0.0};  // certain ruin, the transform vanishes
    const std::complex<double> psi = proc.exponent(s);
    if (std::abs(psi) == 0.0) throw std::domain_error("exponent vanishes at this argument");
    return mu / psi;
}

double one_line_survival_exponential(const RiskProcess& proc, double u) {
    proc.validate();
    if (u < 0.0) return 0.0;
    if (proc.claim_rate == 0.0) return 1.0;
    const auto theta = proc.claims->exponential_rate();
    if (!theta) throw std::domain_error("this closed form needs exponential claims");
    const double mu = proc.drift();
    if (mu <= 0.0) return 0.0;
    const double c = proc.premium_rate;
    const double lam = proc.claim_rate;
    return 1.0 - lam / (c * *theta) * std::exp(-(*theta - lam / c) * u);
}

}  // namespace bivruin
