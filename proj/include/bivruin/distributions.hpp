#pragma once

#include <complex>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace bivruin {

// Nonnegative claim-size law with exact sampling, moments and Laplace
// transform. Restricted to variants whose transform has a closed form: the
// analytic layer evaluates E exp(-s C) at complex arguments and cannot afford
// approximation error there.
class ClaimDistribution {
  public:
    struct Weighted;

    static ClaimDistribution deterministic(double value);
    static ClaimDistribution exponential(double rate);
    static ClaimDistribution erlang(int shape, double rate);
    // Weights must be nonnegative and sum to one within 1e-12.
    static ClaimDistribution mixture(std::vector<Weighted> components);

    double mean() const;
    double second_moment() const;

    // E exp(-s C); requires Re(s) >= 0.
    std::complex<double> lt(std::complex<double> s) const;
    double lt(double s) const;
    // d/ds E exp(-s C) = -E[C exp(-s C)]
    std::complex<double> lt_derivative(std::complex<double> s) const;

    double sample(std::mt19937_64& rng) const;

    // Rate parameter when the law is a plain exponential, empty otherwise.
    std::optional<double> exponential_rate() const;

  private:
    enum class Kind { deterministic, exponential, erlang, mixture };

    ClaimDistribution() = default;

    Kind kind_ = Kind::deterministic;
    double value_ = 0.0;  // deterministic
    double rate_ = 0.0;   // exponential / erlang
    int shape_ = 1;       // erlang
    std::vector<Weighted> parts_;
};

struct ClaimDistribution::Weighted {
    double weight;
    ClaimDistribution dist;
};

// One product atom of a bivariate claim law. A missing coordinate is a point
// mass at zero: that claim event does not hit the line.
struct JointAtom {
    double weight = 0.0;
    std::optional<ClaimDistribution> law1;
    std::optional<ClaimDistribution> law2;
};

// Bivariate claim law mu(dx, dy) as a finite mixture of product atoms. Covers
// two independent streams (two atoms, each with one zero coordinate) as well
// as common shocks hitting both lines at once. No atom may have both
// coordinates at zero.
class JointClaimDistribution {
  public:
    explicit JointClaimDistribution(std::vector<JointAtom> atoms);

    // Two-atom mixture merging independent streams with rates rate1, rate2
    // into a single stream of rate rate1 + rate2.
    static JointClaimDistribution independent(double rate1,
                                              const std::optional<ClaimDistribution>& law1,
                                              double rate2,
                                              const std::optional<ClaimDistribution>& law2);

    // E exp(-s1 C1 - s2 C2); requires Re(s1), Re(s2) >= 0.
    std::complex<double> lt(std::complex<double> s1, std::complex<double> s2) const;
    // partial derivatives of the transform in each argument
    std::complex<double> lt_d1(std::complex<double> s1, std::complex<double> s2) const;
    std::complex<double> lt_d2(std::complex<double> s1, std::complex<double> s2) const;

    double mean1() const;
    double mean2() const;

    std::pair<double, double> sample(std::mt19937_64& rng) const;

    const std::vector<JointAtom>& atoms() const { return atoms_; }

  private:
    std::vector<JointAtom> atoms_;
    std::vector<double> cumulative_;
};

}  // namespace bivruin
