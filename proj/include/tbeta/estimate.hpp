#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tbeta/dist.hpp"

namespace tbeta {

// k subgroups of n observations each, stored row-major in one buffer.
class SubgroupData {
public:
    // Splits values in order into subgroups of size n. Throws DataError unless
    // n >= 2 and values.size() is a positive multiple of n.
    SubgroupData(std::vector<double> values, std::size_t n);

    std::size_t n() const noexcept { return n_; }
    std::size_t k() const noexcept { return values_.size() / n_; }
    std::size_t m() const noexcept { return values_.size(); }

    std::span<const double> subgroup(std::size_t i) const;
    std::span<const double> pooled() const noexcept { return values_; }

private:
    std::vector<double> values_;
    std::size_t n_;
};

struct FitResult {
    TbetaParams params;
    double loglik = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Sum of ln pdf over data. -inf when some observation has zero density.
// Throws DataError if an observation lies outside [a, b].
double log_likelihood(std::span<const double> data, const TbetaParams& params);

// Maximum likelihood estimate of (theta1, theta2) with the support held fixed.
// The search runs in (ln theta1, ln theta2) from `init` or, when absent, from
// method-of-moments estimates on the data rescaled to [0, 1].
// Throws DataError for observations outside [a, b] or sample variance below
// 1e-12. Returns converged = false with the best point at the iteration cap.
FitResult fit_mle(std::span<const double> data, double a, double b,
                  std::optional<std::pair<double, double>> init = std::nullopt);

inline FitResult fit_mle(const SubgroupData& data, double a, double b,
                         std::optional<std::pair<double, double>> init = std::nullopt)
{
    return fit_mle(data.pooled(), a, b, init);
}

// Moment-based starting point used by fit_mle, clamped to [0.1, 100].
std::pair<double, double> moment_start(std::span<const double> data, double a, double b);

// Quantile of the fitted law. Throws ConvergenceError if the fit did not
// converge.
double percentile_estimate(const FitResult& fit, double p);

// Two-sided Kolmogorov-Smirnov distance between the empirical cdf of data
// and the model cdf.
double ks_statistic(std::span<const double> data, const TbetaParams& params);

struct KsPValue {
    double pvalue = 1.0;
    std::size_t used = 0;   // replicates whose refit converged
    std::size_t failed = 0; // replicates dropped
};

// Parametric bootstrap p-value: share of `reps` samples of size sample_size
// drawn from params, each refitted, whose K-S distance to its own fit is at
// least stat. Replicate r uses seed derive_seed(seed, {r}). reps >= 1000.
KsPValue ks_pvalue(double stat, std::size_t sample_size, const TbetaParams& params, std::size_t reps,
                   std::uint64_t seed, unsigned threads = 0);

// Classical asymptotic Kolmogorov tail P(K > sqrt(n) stat), treating the
// parameters as known rather than estimated.
double ks_asymptotic_pvalue(double stat, std::size_t sample_size);

} // namespace tbeta
