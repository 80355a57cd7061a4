#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tbeta/dist.hpp"
#include "tbeta/estimate.hpp"

namespace tbeta {

enum class BootMode {
    parametric,      // size-n draws from the fitted Phase-I law
    pooled_resample, // size-n draws with replacement from the m Phase-I values
};

enum class CenterMode {
    bootstrap_mean,  // limits and CL around the mean of the bootstrap percentiles
    phase1_estimate, // limits and CL around the Phase-I percentile estimate
};

struct ChartConfig {
    double p = 0.9;     // monitored percentile
    double far = 0.0027; // false alarm rate
    std::size_t boot_reps = 5000;
    BootMode boot_mode = BootMode::parametric;
    CenterMode center_mode = CenterMode::phase1_estimate;
    std::uint64_t seed = 1;
    unsigned threads = 0; // 0 = hardware concurrency; does not affect results
};

inline constexpr std::size_t kMinBootReps = 100;

// Throws DomainError unless p in (0, 1), far in (0, 0.5) and boot_reps >= 100.
void validate(const ChartConfig& config);

// Percentile estimates from the Phase-I fit and from every bootstrap replicate.
struct BootstrapDistribution {
    FitResult phase1_fit;
    double phase1_estimate = 0.0;
    std::vector<double> estimates; // one per replicate, replicate order
    std::size_t failed_attempts = 0; // refits that failed and were redrawn
};

struct ControlLimits {
    double lcl = 0.0;
    double cl = 0.0;
    double ucl = 0.0;
    double boot_mean = 0.0;
    double boot_se = 0.0;
    double t_lower = 0.0;
    double t_upper = 0.0;
    double phase1_estimate = 0.0;

    TbetaParams phase1_params;
    double p = 0.0;
    double far = 0.0;
    std::size_t boot_reps = 0;
    std::size_t failed_attempts = 0;
    // Limits are never clamped to [a, b]; these record when they leave it.
    bool lcl_outside_support = false;
    bool ucl_outside_support = false;
};

enum class Breach { none, below_lcl, above_ucl, indeterminate };

struct SignalVerdict {
    double statistic = 0.0; // NaN when indeterminate
    bool in_control = true;
    Breach breach = Breach::none;
    std::size_t subgroup_index = 0;
};

// Type-7 (linear interpolation) empirical quantile of an ascending sequence.
double empirical_quantile(std::span<const double> sorted, double prob);

// Phase-I fit plus B bootstrap percentile estimates. Replicate i, attempt j
// draws from derive_seed(config.seed, {i, j}); a failed refit is redrawn.
// Throws ConvergenceError if the Phase-I fit fails or more than 10% of the B
// replicates needed a redraw.
BootstrapDistribution bootstrap_percentiles(const SubgroupData& phase1, double a, double b,
                                            const ChartConfig& config);

// Studentizes the bootstrap estimates around the Phase-I estimate and turns
// their far/2 and 1 - far/2 empirical quantiles back into limits.
ControlLimits limits_from_bootstrap(const BootstrapDistribution& boot, double far, CenterMode center);

ControlLimits build_limits(const SubgroupData& phase1, double a, double b, const ChartConfig& config);

// Fits one Phase-II subgroup and compares its percentile estimate with the
// limits (bounds inclusive). A failed fit gives an indeterminate verdict.
// Throws DataError if a value lies outside [a, b] or test.size() < 2.
SignalVerdict evaluate_subgroup(std::span<const double> test, const ControlLimits& limits, double a, double b,
                                double p, std::size_t index);

// evaluate_subgroup over consecutive size-n blocks of values, indices from 1.
std::vector<SignalVerdict> monitor_stream(std::span<const double> values, std::size_t n, const ControlLimits& limits,
                                          double a, double b, double p);

const char* to_string(Breach breach) noexcept;
const char* to_string(BootMode mode) noexcept;
const char* to_string(CenterMode mode) noexcept;

} // namespace tbeta
