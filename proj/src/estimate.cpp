#include "tbeta/estimate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "parallel.hpp"
#include "simplex.hpp"
#include "tbeta/error.hpp"
#include "tbeta/rng.hpp"

namespace tbeta {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinVariance = 1e-12;
// ln(theta) is confined to this box; outside it the objective is +inf.
constexpr double kLogShapeBound = 15.0;

void check_support(std::span<const double> data, double a, double b)
{
    std::ostringstream bad;
    std::size_t count = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!(data[i] >= a && data[i] <= b)) {
            if (count < 5)
                bad << (count ? ", " : "") << "#" << i + 1 << "=" << data[i];
            ++count;
        }
    }
    if (count > 0)
        throw DataError(std::to_string(count) + " observation(s) outside the support [" + std::to_string(a) + ", " +
                        std::to_string(b) + "]: " + bad.str());
}

// Contribution (theta - 1) * sum_log, with theta == 1 contributing nothing
// even when sum_log is -inf.
double kernel_term(double theta, double sum_log)
{
    return theta == 1.0 ? 0.0 : (theta - 1.0) * sum_log;
}

struct SufficientStats {
    double sum_log_x = 0.0;
    double sum_log_1mx = 0.0;
    double count = 0.0;
};

SufficientStats sufficient_stats(std::span<const double> data)
{
    SufficientStats s;
    for (double x : data) {
        s.sum_log_x += std::log(x);
        s.sum_log_1mx += std::log1p(-x);
    }
    s.count = static_cast<double>(data.size());
    return s;
}

double loglik_from_stats(const SufficientStats& s, double theta1, double theta2, double a, double b)
{
    const double log_norm = detail::log_support_mass(theta1, theta2, a, b);
    if (!std::isfinite(log_norm))
        return -kInf;
    return kernel_term(theta1, s.sum_log_x) + kernel_term(theta2, s.sum_log_1mx) - s.count * log_norm;
}

} // namespace

SubgroupData::SubgroupData(std::vector<double> values, std::size_t n)
    : values_(std::move(values)), n_(n)
{
    if (n_ < 2)
        throw DataError("subgroup size must be at least 2");
    if (values_.empty())
        throw DataError("no observations");
    if (values_.size() % n_ != 0)
        throw DataError(std::to_string(values_.size()) + " observations cannot be split into subgroups of size " +
                        std::to_string(n_));
}

std::span<const double> SubgroupData::subgroup(std::size_t i) const
{
    if (i >= k())
        throw DomainError("subgroup index out of range");
    return std::span<const double>(values_).subspan(i * n_, n_);
}

double log_likelihood(std::span<const double> data, const TbetaParams& params)
{
    validate(params);
    check_support(data, params.a, params.b);
    const Tbeta dist(params);
    const auto s = sufficient_stats(data);
    return kernel_term(params.theta1, s.sum_log_x) + kernel_term(params.theta2, s.sum_log_1mx) -
           s.count * dist.log_normalizer();
}

std::pair<double, double> moment_start(std::span<const double> data, double a, double b)
{
    double mean = 0.0;
    for (double x : data)
        mean += (x - a) / (b - a);
    mean /= static_cast<double>(data.size());
    double var = 0.0;
    for (double x : data) {
        const double d = (x - a) / (b - a) - mean;
        var += d * d;
    }
    var /= static_cast<double>(std::max<std::size_t>(data.size() - 1, 1));
    double t1 = 1.0;
    double t2 = 1.0;
    if (var > 0.0 && mean > 0.0 && mean < 1.0) {
        const double common = mean * (1.0 - mean) / var - 1.0;
        t1 = mean * common;
        t2 = (1.0 - mean) * common;
    }
    const auto clamp = [](double t) { return std::isfinite(t) ? std::clamp(t, 0.1, 100.0) : 1.0; };
    return {clamp(t1), clamp(t2)};
}

FitResult fit_mle(std::span<const double> data, double a, double b, std::optional<std::pair<double, double>> init)
{
    validate(TbetaParams{1.0, 1.0, a, b});
    if (data.size() < 2)
        throw DataError("at least two observations are needed for a fit");
    check_support(data, a, b);

    double mean = 0.0;
    for (double x : data)
        mean += x;
    mean /= static_cast<double>(data.size());
    double var = 0.0;
    for (double x : data)
        var += (x - mean) * (x - mean);
    var /= static_cast<double>(data.size() - 1);
    if (var < kMinVariance)
        throw DataError("observations are degenerate (sample variance below 1e-12)");

    const auto start = init ? *init : moment_start(data, a, b);
    if (!(start.first > 0.0) || !(start.second > 0.0))
        throw DomainError("initial shape values must be positive");

    const auto stats = sufficient_stats(data);
    const auto objective = [&](const std::array<double, 2>& u) {
        if (std::fabs(u[0]) > kLogShapeBound || std::fabs(u[1]) > kLogShapeBound)
            return kInf;
        return -loglik_from_stats(stats, std::exp(u[0]), std::exp(u[1]), a, b);
    };
    const auto found = detail::minimize_simplex<2>(objective, {std::log(start.first), std::log(start.second)});

    FitResult fit;
    fit.params = TbetaParams{std::exp(found.x[0]), std::exp(found.x[1]), a, b};
    fit.loglik = -found.value;
    fit.iterations = found.iterations;
    fit.converged = found.converged && std::isfinite(fit.loglik);
    return fit;
}

double percentile_estimate(const FitResult& fit, double p)
{
    if (!fit.converged)
        throw ConvergenceError("percentile requested from a fit that did not converge");
    return quantile(p, fit.params);
}

double ks_statistic(std::span<const double> data, const TbetaParams& params)
{
    if (data.empty())
        throw DataError("K-S statistic needs at least one observation");
    const Tbeta dist(params);
    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = dist.cdf(sorted[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

KsPValue ks_pvalue(double stat, std::size_t sample_size, const TbetaParams& params, std::size_t reps,
                   std::uint64_t seed, unsigned threads)
{
    if (reps < 1000)
        throw DomainError("K-S bootstrap needs at least 1000 replicates");
    if (sample_size < 2)
        throw DomainError("K-S bootstrap sample size must be at least 2");
    const Tbeta dist(params);

    // 1 = exceeds, 0 = below, -1 = dropped
    std::vector<signed char> outcome(reps, -1);
    detail::parallel_for(reps, threads, [&](std::size_t r) {
        Rng rng(derive_seed(seed, {r}));
        std::vector<double> draw(sample_size);
        dist.sample(rng, draw);
        try {
            const auto fit = fit_mle(draw, params.a, params.b);
            if (!fit.converged)
                return;
            outcome[r] = ks_statistic(draw, fit.params) >= stat ? 1 : 0;
        } catch (const Error&) {
        }
    });

    KsPValue result;
    std::size_t exceed = 0;
    for (auto o : outcome) {
        if (o < 0) {
            ++result.failed;
            continue;
        }
        ++result.used;
        exceed += static_cast<std::size_t>(o);
    }
    if (result.used == 0)
        throw ConvergenceError("every K-S bootstrap replicate failed to fit");
    result.pvalue = static_cast<double>(exceed) / static_cast<double>(result.used);
    return result;
}

double ks_asymptotic_pvalue(double stat, std::size_t sample_size)
{
    if (sample_size == 0)
        throw DataError("K-S p-value needs a positive sample size");
    if (!(stat >= 0.0))
        throw DomainError("K-S statistic must be nonnegative");
    const double lambda = std::sqrt(static_cast<double>(sample_size)) * stat;
    if (lambda < 0.2)
        return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-17)
            break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

} // namespace tbeta
