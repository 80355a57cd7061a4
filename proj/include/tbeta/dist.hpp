#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tbeta/rng.hpp"

namespace tbeta {

// Shape parameters and truncation support of one truncated beta law.
struct TbetaParams {
    double theta1 = 1.0;
    double theta2 = 1.0;
    double a = 0.0;
    double b = 1.0;
};

// Smallest accepted support width b - a.
inline constexpr double kMinSupportWidth = 1e-6;

// Throws DomainError unless theta1, theta2 > 0 and 0 <= a < b <= 1 with
// b - a >= kMinSupportWidth.
void validate(const TbetaParams& params);

// Natural log of the complete beta function B(theta1, theta2).
double log_beta(double theta1, double theta2);

// Both tails of the regularized incomplete beta function, in log space.
// Whichever tail is smaller comes straight from the continued fraction; the
// other is its log1p complement.
struct LogBetaTails {
    double lower; // ln I_x(theta1, theta2) / B(theta1, theta2)
    double upper; // ln (1 - that)
};

LogBetaTails log_regularized_beta(double x, double theta1, double theta2);

// Regularized incomplete beta I_x(theta1, theta2) in [0, 1].
double regularized_beta(double x, double theta1, double theta2);

// Unnormalized incomplete beta integral: int_0^c u^(theta1-1) (1-u)^(theta2-1) du.
// Equals B(theta1, theta2) at c = 1.
double incomplete_beta_unnorm(double c, double theta1, double theta2);

// A validated truncated beta distribution with its normalizer cached.
// Construction throws ConvergenceError when the support mass underflows.
class Tbeta {
public:
    explicit Tbeta(const TbetaParams& params);

    const TbetaParams& params() const noexcept { return params_; }

    // ln(I_b - I_a), the log of the unnormalized support mass.
    double log_normalizer() const noexcept { return log_beta_ + log_mass_; }

    // 0 outside [a, b]. At an endpoint where the kernel diverges the result is
    // +infinity.
    double pdf(double x) const;
    double log_pdf(double x) const;

    double cdf(double x) const;

    // Inverse cdf by bracketed root finding on [a, b]; throws DomainError for
    // p outside (0, 1) and ConvergenceError if the solver stalls.
    double quantile(double p) const;

    // Inverse-transform draws into out.
    void sample(Rng& rng, std::span<double> out) const;

private:
    // Regularized mass of [a, x] for a <= x <= b.
    double mass_from_a(const LogBetaTails& at_x) const;

    TbetaParams params_;
    double log_beta_;
    LogBetaTails at_a_;
    LogBetaTails at_b_;
    double log_mass_; // ln(I_b - I_a) in regularized units
};

double pdf(double x, const TbetaParams& params);
double cdf(double x, const TbetaParams& params);
double quantile(double p, const TbetaParams& params);

// count draws from params; identical seeds give identical sequences.
std::vector<double> sample(const TbetaParams& params, std::size_t count, std::uint64_t seed);

namespace detail {

// Non-throwing ln(I_b - I_a) in unnormalized units; -inf when the mass
// underflows, NaN when the continued fraction fails. Used by likelihood code.
double log_support_mass(double theta1, double theta2, double a, double b) noexcept;

} // namespace detail

} // namespace tbeta
