#include "tbeta/dist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "tbeta/error.hpp"

namespace tbeta {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kLogHalf = -0.69314718055994530942;

constexpr int kMaxFractionTerms = 20000;
constexpr double kFractionEps = 1e-16;
constexpr double kTiny = 1e-300;

constexpr std::uintmax_t kMaxQuantileIterations = 200;
constexpr int kQuantileBits = 50;

double lgamma_threadsafe(double x)
{
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

// Modified Lentz evaluation of the continued fraction for I_x(p, q).
// Converges quickly for x < (p + 1) / (p + q + 2). NaN on failure.
double beta_fraction(double p, double q, double x) noexcept
{
    const double qab = p + q;
    const double qap = p + 1.0;
    const double qam = p - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny)
        d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxFractionTerms; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (q - m) * x / ((qam + m2) * (p + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(p + m) * (qab + m) * x / ((p + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kFractionEps)
            return h;
    }
    return kNaN;
}

LogBetaTails log_tails(double x, double theta1, double theta2, double lbeta) noexcept
{
    if (x <= 0.0)
        return {-kInf, 0.0};
    if (x >= 1.0)
        return {0.0, -kInf};
    const double front = theta1 * std::log(x) + theta2 * std::log1p(-x) - lbeta;
    if (x < (theta1 + 1.0) / (theta1 + theta2 + 2.0)) {
        const double cf = beta_fraction(theta1, theta2, x);
        if (!(cf > 0.0))
            return {kNaN, kNaN};
        const double lower = front + std::log(cf) - std::log(theta1);
        return {lower, std::log1p(-std::exp(lower))};
    }
    const double cf = beta_fraction(theta2, theta1, 1.0 - x);
    if (!(cf > 0.0))
        return {kNaN, kNaN};
    const double upper = front + std::log(cf) - std::log(theta2);
    return {std::log1p(-std::exp(upper)), upper};
}

// ln(exp(hi) - exp(lo)) for hi >= lo.
double log_diff(double hi, double lo) noexcept
{
    if (lo == -kInf)
        return hi;
    if (!(lo < hi))
        return -kInf;
    return hi + std::log1p(-std::exp(lo - hi));
}

// ln of the regularized mass between two points, choosing the tail that
// avoids cancellation.
double log_mass_between(const LogBetaTails& lo, const LogBetaTails& hi) noexcept
{
    if (hi.lower <= kLogHalf)
        return log_diff(hi.lower, lo.lower);
    return log_diff(lo.upper, hi.upper);
}

void check_shapes(double theta1, double theta2)
{
    if (!(theta1 > 0.0) || !(theta2 > 0.0) || !std::isfinite(theta1) || !std::isfinite(theta2))
        throw DomainError("shape parameters must be finite and positive (theta1=" + std::to_string(theta1) +
                          ", theta2=" + std::to_string(theta2) + ")");
}

} // namespace

void validate(const TbetaParams& params)
{
    check_shapes(params.theta1, params.theta2);
    if (!(params.a >= 0.0) || !(params.b <= 1.0) || !(params.a < params.b))
        throw DomainError("support must satisfy 0 <= a < b <= 1 (a=" + std::to_string(params.a) +
                          ", b=" + std::to_string(params.b) + ")");
    if (params.b - params.a < kMinSupportWidth)
        throw DomainError("support width b - a is below 1e-6");
}

double log_beta(double theta1, double theta2)
{
    return lgamma_threadsafe(theta1) + lgamma_threadsafe(theta2) - lgamma_threadsafe(theta1 + theta2);
}

LogBetaTails log_regularized_beta(double x, double theta1, double theta2)
{
    check_shapes(theta1, theta2);
    if (!(x >= 0.0 && x <= 1.0))
        throw DomainError("incomplete beta argument must lie in [0, 1]");
    const auto tails = log_tails(x, theta1, theta2, log_beta(theta1, theta2));
    if (std::isnan(tails.lower))
        throw ConvergenceError("incomplete beta continued fraction did not converge");
    return tails;
}

double regularized_beta(double x, double theta1, double theta2)
{
    return std::exp(log_regularized_beta(x, theta1, theta2).lower);
}

double incomplete_beta_unnorm(double c, double theta1, double theta2)
{
    const auto tails = log_regularized_beta(c, theta1, theta2);
    return std::exp(log_beta(theta1, theta2) + tails.lower);
}

Tbeta::Tbeta(const TbetaParams& params)
    : params_(params)
{
    validate(params_);
    log_beta_ = log_beta(params_.theta1, params_.theta2);
    at_a_ = log_tails(params_.a, params_.theta1, params_.theta2, log_beta_);
    at_b_ = log_tails(params_.b, params_.theta1, params_.theta2, log_beta_);
    if (std::isnan(at_a_.lower) || std::isnan(at_b_.lower))
        throw ConvergenceError("incomplete beta continued fraction did not converge");
    log_mass_ = log_mass_between(at_a_, at_b_);
    if (!std::isfinite(log_mass_) || !std::isfinite(log_normalizer()))
        throw DomainError("support mass I_b - I_a underflows to zero");
}

double Tbeta::log_pdf(double x) const
{
    if (!(x >= params_.a && x <= params_.b))
        return -kInf;
    const double t1 = params_.theta1 - 1.0;
    const double t2 = params_.theta2 - 1.0;
    const double left = t1 == 0.0 ? 0.0 : t1 * std::log(x);
    const double right = t2 == 0.0 ? 0.0 : t2 * std::log1p(-x);
    return left + right - log_beta_ - log_mass_;
}

double Tbeta::pdf(double x) const
{
    return std::exp(log_pdf(x));
}

double Tbeta::mass_from_a(const LogBetaTails& at_x) const
{
    const double f = std::exp(log_mass_between(at_a_, at_x) - log_mass_);
    return std::clamp(f, 0.0, 1.0);
}

double Tbeta::cdf(double x) const
{
    if (std::isnan(x))
        throw DomainError("cdf argument is NaN");
    if (x <= params_.a)
        return 0.0;
    if (x >= params_.b)
        return 1.0;
    const auto at_x = log_tails(x, params_.theta1, params_.theta2, log_beta_);
    if (std::isnan(at_x.lower))
        throw ConvergenceError("incomplete beta continued fraction did not converge");
    return mass_from_a(at_x);
}

double Tbeta::quantile(double p) const
{
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("quantile probability must lie in (0, 1)");
    const auto gap = [&](double x) { return cdf(x) - p; };
    std::uintmax_t iterations = kMaxQuantileIterations;
    std::pair<double, double> bracket;
    try {
        bracket = boost::math::tools::toms748_solve(gap, params_.a, params_.b, -p, 1.0 - p,
                                                    boost::math::tools::eps_tolerance<double>(kQuantileBits),
                                                    iterations);
    } catch (const std::exception& e) {
        throw ConvergenceError(std::string("quantile root finding failed: ") + e.what());
    }
    if (iterations >= kMaxQuantileIterations)
        throw ConvergenceError("quantile root finding hit the iteration cap");
    const double mid = 0.5 * (bracket.first + bracket.second);
    return std::clamp(mid, params_.a, params_.b);
}

void Tbeta::sample(Rng& rng, std::span<double> out) const
{
    for (double& x : out)
        x = quantile(rng.uniform());
}

double pdf(double x, const TbetaParams& params)
{
    return Tbeta(params).pdf(x);
}

double cdf(double x, const TbetaParams& params)
{
    return Tbeta(params).cdf(x);
}

double quantile(double p, const TbetaParams& params)
{
    return Tbeta(params).quantile(p);
}

std::vector<double> sample(const TbetaParams& params, std::size_t count, std::uint64_t seed)
{
    if (count == 0)
        throw DomainError("sample count must be at least 1");
    const Tbeta dist(params);
    Rng rng(seed);
    std::vector<double> out(count);
    dist.sample(rng, out);
    return out;
}

namespace detail {

double log_support_mass(double theta1, double theta2, double a, double b) noexcept
{
    const double lbeta = lgamma_threadsafe(theta1) + lgamma_threadsafe(theta2) - lgamma_threadsafe(theta1 + theta2);
    const auto lo = log_tails(a, theta1, theta2, lbeta);
    const auto hi = log_tails(b, theta1, theta2, lbeta);
    if (std::isnan(lo.lower) || std::isnan(hi.lower))
        return kNaN;
    return lbeta + log_mass_between(lo, hi);
}

} // namespace detail

} // namespace tbeta
