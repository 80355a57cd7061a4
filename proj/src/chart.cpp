#include "tbeta/chart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "parallel.hpp"
#include "tbeta/error.hpp"
#include "tbeta/rng.hpp"

namespace tbeta {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMaxFailureShare = 0.10;
constexpr std::size_t kMaxAttemptsPerReplicate = 50;

} // namespace

void validate(const ChartConfig& config)
{
    if (!(config.p > 0.0 && config.p < 1.0))
        throw DomainError("percentile p must lie in (0, 1)");
    if (!(config.far > 0.0 && config.far < 0.5))
        throw DomainError("false alarm rate must lie in (0, 0.5)");
    if (config.boot_reps < kMinBootReps)
        throw DomainError("bootstrap size B must be at least " + std::to_string(kMinBootReps) + " (got " +
                          std::to_string(config.boot_reps) + ")");
}

double empirical_quantile(std::span<const double> sorted, double prob)
{
    if (sorted.empty())
        throw DomainError("empirical quantile of an empty sequence");
    if (!(prob >= 0.0 && prob <= 1.0))
        throw DomainError("empirical quantile probability must lie in [0, 1]");
    const double h = prob * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BootstrapDistribution bootstrap_percentiles(const SubgroupData& phase1, double a, double b,
                                            const ChartConfig& config)
{
    validate(config);
    if (phase1.m() < 10)
        throw DataError("Phase-I data needs at least 10 observations");

    BootstrapDistribution boot;
    boot.phase1_fit = fit_mle(phase1, a, b);
    if (!boot.phase1_fit.converged)
        throw ConvergenceError("maximum likelihood fit of the Phase-I data did not converge");
    const Tbeta fitted(boot.phase1_fit.params);
    boot.phase1_estimate = fitted.quantile(config.p);

    const std::size_t n = phase1.n();
    const auto pooled = phase1.pooled();
    const std::size_t reps = config.boot_reps;
    boot.estimates.assign(reps, kNaN);
    std::vector<std::size_t> failures(reps, 0);

    detail::parallel_for(reps, config.threads, [&](std::size_t i) {
        std::vector<double> draw(n);
        for (std::size_t attempt = 0; attempt < kMaxAttemptsPerReplicate; ++attempt) {
            Rng rng(derive_seed(config.seed, {i, attempt}));
            if (config.boot_mode == BootMode::parametric) {
                fitted.sample(rng, draw);
            } else {
                for (double& x : draw)
                    x = pooled[rng.below(pooled.size())];
            }
            try {
                const auto fit = fit_mle(draw, a, b);
                if (fit.converged) {
                    boot.estimates[i] = Tbeta(fit.params).quantile(config.p);
                    return;
                }
            } catch (const Error&) {
            }
            ++failures[i];
        }
    });

    for (std::size_t i = 0; i < reps; ++i) {
        boot.failed_attempts += failures[i];
        if (std::isnan(boot.estimates[i]))
            throw ConvergenceError("bootstrap replicate " + std::to_string(i) + " failed on every redraw");
    }
    if (static_cast<double>(boot.failed_attempts) > kMaxFailureShare * static_cast<double>(reps))
        throw ConvergenceError(std::to_string(boot.failed_attempts) + " of " + std::to_string(reps) +
                               " bootstrap refits failed (more than 10%)");
    return boot;
}

ControlLimits limits_from_bootstrap(const BootstrapDistribution& boot, double far, CenterMode center)
{
    if (!(far > 0.0 && far < 0.5))
        throw DomainError("false alarm rate must lie in (0, 0.5)");
    const auto& est = boot.estimates;
    if (est.empty())
        throw DomainError("no bootstrap estimates");
    const double count = static_cast<double>(est.size());

    double mean = 0.0;
    for (double e : est)
        mean += e;
    mean /= count;
    double ss = 0.0;
    for (double e : est)
        ss += (e - mean) * (e - mean);
    const double se = std::sqrt(ss / count);

    ControlLimits lim;
    lim.boot_mean = mean;
    lim.boot_se = se;
    lim.phase1_estimate = boot.phase1_estimate;
    lim.phase1_params = boot.phase1_fit.params;
    lim.far = far;
    lim.boot_reps = est.size();
    lim.failed_attempts = boot.failed_attempts;

    const double centre = center == CenterMode::bootstrap_mean ? mean : boot.phase1_estimate;
    lim.cl = centre;
    if (se > 0.0) {
        std::vector<double> t(est.size());
        for (std::size_t i = 0; i < est.size(); ++i)
            t[i] = (est[i] - boot.phase1_estimate) / se;
        std::sort(t.begin(), t.end());
        lim.t_lower = empirical_quantile(t, far / 2.0);
        lim.t_upper = empirical_quantile(t, 1.0 - far / 2.0);
    }
    lim.lcl = centre + lim.t_lower * se;
    lim.ucl = centre + lim.t_upper * se;

    const auto& fitted = boot.phase1_fit.params;
    lim.lcl_outside_support = lim.lcl < fitted.a || lim.lcl > fitted.b;
    lim.ucl_outside_support = lim.ucl < fitted.a || lim.ucl > fitted.b;
    return lim;
}

ControlLimits build_limits(const SubgroupData& phase1, double a, double b, const ChartConfig& config)
{
    auto limits = limits_from_bootstrap(bootstrap_percentiles(phase1, a, b, config), config.far, config.center_mode);
    limits.p = config.p;
    return limits;
}

SignalVerdict evaluate_subgroup(std::span<const double> test, const ControlLimits& limits, double a, double b,
                                double p, std::size_t index)
{
    if (test.size() < 2)
        throw DataError("a test subgroup needs at least two observations");
    for (double x : test)
        if (!(x >= a && x <= b))
            throw DataError("test subgroup " + std::to_string(index) + " has a value outside [" + std::to_string(a) +
                            ", " + std::to_string(b) + "]: " + std::to_string(x));

    SignalVerdict verdict;
    verdict.subgroup_index = index;
    try {
        const auto fit = fit_mle(test, a, b);
        if (fit.converged)
            verdict.statistic = Tbeta(fit.params).quantile(p);
        else
            verdict.statistic = kNaN;
    } catch (const Error&) {
        verdict.statistic = kNaN;
    }
    if (std::isnan(verdict.statistic)) {
        verdict.in_control = false;
        verdict.breach = Breach::indeterminate;
    } else if (verdict.statistic < limits.lcl) {
        verdict.in_control = false;
        verdict.breach = Breach::below_lcl;
    } else if (verdict.statistic > limits.ucl) {
        verdict.in_control = false;
        verdict.breach = Breach::above_ucl;
    }
    return verdict;
}

std::vector<SignalVerdict> monitor_stream(std::span<const double> values, std::size_t n, const ControlLimits& limits,
                                          double a, double b, double p)
{
    if (n < 2)
        throw DataError("subgroup size must be at least 2");
    if (values.size() % n != 0)
        throw DataError(std::to_string(values.size()) + " values cannot be split into subgroups of size " +
                        std::to_string(n));
    std::vector<SignalVerdict> verdicts;
    verdicts.reserve(values.size() / n);
    for (std::size_t j = 0; j * n < values.size(); ++j)
        verdicts.push_back(evaluate_subgroup(values.subspan(j * n, n), limits, a, b, p, j + 1));
    return verdicts;
}

const char* to_string(Breach breach) noexcept
{
    switch (breach) {
    case Breach::none: return "none";
    case Breach::below_lcl: return "below-lcl";
    case Breach::above_ucl: return "above-ucl";
    case Breach::indeterminate: return "indeterminate";
    }
    return "?";
}

const char* to_string(BootMode mode) noexcept
{
    return mode == BootMode::parametric ? "parametric" : "pooled-resample";
}

const char* to_string(CenterMode mode) noexcept
{
    return mode == CenterMode::bootstrap_mean ? "bootstrap-mean" : "phase1-estimate";
}

} // namespace tbeta
