#include "tbeta/runlength.hpp"

#include <bit>
#include <cmath>
#include <optional>
#include <ostream>

#include "parallel.hpp"
#include "tbeta/datasets.hpp"
#include "tbeta/error.hpp"
#include "tbeta/rng.hpp"

namespace tbeta {

namespace {

constexpr std::uint64_t kFixedLimitsStream = 0xf1f1f1f1ULL;

void check_options(const SimulationOptions& options)
{
    if (options.replications < 1)
        throw DomainError("at least one replication is required");
    if (options.run_cap < 100)
        throw DomainError("run cap must be at least 100");
    if (options.n < 2 || options.k < 1)
        throw DomainError("subgroup size must be >= 2 and subgroup count >= 1");
}

ControlLimits phase1_limits(const Tbeta& ic, const ChartConfig& config, const SimulationOptions& options,
                            std::uint64_t phase1_seed, std::uint64_t boot_seed)
{
    Rng rng(phase1_seed);
    std::vector<double> phase1(options.n * options.k);
    ic.sample(rng, phase1);
    ChartConfig cfg = config;
    cfg.seed = boot_seed;
    cfg.threads = 1;
    return build_limits(SubgroupData(std::move(phase1), options.n), ic.params().a, ic.params().b, cfg);
}

std::uint64_t bits(double v)
{
    return std::bit_cast<std::uint64_t>(v == 0.0 ? 0.0 : v); // -0.0 and 0.0 are the same cell
}

} // namespace

TbetaParams apply_shift(const TbetaParams& ic, const ShiftSpec& shift)
{
    TbetaParams out = ic;
    out.theta1 += shift.d_theta1;
    out.theta2 += shift.d_theta2;
    if (!(out.theta1 > 0.0) || !(out.theta2 > 0.0))
        throw DomainError("shift leaves a non-positive shape parameter");
    return out;
}

RunLengthSummary summarize_runs(std::span<const std::size_t> runs, std::size_t run_cap)
{
    RunLengthSummary s;
    s.replications = runs.size();
    if (runs.empty())
        return s;
    double mean = 0.0;
    for (auto r : runs) {
        mean += static_cast<double>(r);
        if (r >= run_cap)
            ++s.truncated_runs;
    }
    mean /= static_cast<double>(runs.size());
    double ss = 0.0;
    for (auto r : runs) {
        const double d = static_cast<double>(r) - mean;
        ss += d * d;
    }
    s.arl = mean;
    s.sdrl = runs.size() > 1 ? std::sqrt(ss / static_cast<double>(runs.size() - 1)) : 0.0;
    return s;
}

std::size_t run_length(const Tbeta& process, const ControlLimits& limits, double p, std::size_t n,
                       std::size_t run_cap, Rng& rng)
{
    const auto& support = process.params();
    std::vector<double> subgroup(n);
    for (std::size_t j = 1; j <= run_cap; ++j) {
        process.sample(rng, subgroup);
        const auto verdict = evaluate_subgroup(subgroup, limits, support.a, support.b, p, j);
        if (verdict.breach == Breach::below_lcl || verdict.breach == Breach::above_ucl)
            return j;
    }
    return run_cap;
}

RunLengthSummary simulate_run_length_fixed(const TbetaParams& process, const ControlLimits& limits, double p,
                                           const SimulationOptions& options)
{
    check_options(options);
    const Tbeta dist(process);
    std::vector<std::size_t> runs(options.replications);
    detail::parallel_for(options.replications, options.threads, [&](std::size_t r) {
        Rng rng(derive_seed(options.seed, {r, 2}));
        runs[r] = run_length(dist, limits, p, options.n, options.run_cap, rng);
    });
    return summarize_runs(runs, options.run_cap);
}

RunLengthSummary simulate_run_length(const TbetaParams& ic, const ShiftSpec& shift, const ChartConfig& config,
                                     const SimulationOptions& options)
{
    check_options(options);
    validate(config);
    const Tbeta ic_dist(ic);
    const Tbeta oc_dist(apply_shift(ic, shift));
    const bool from_estimate = options.phase2_source == PhaseTwoSource::phase1_estimate;

    if (options.protocol == LimitsProtocol::fixed) {
        const auto limits = phase1_limits(ic_dist, config, options, derive_seed(options.seed, {kFixedLimitsStream, 0}),
                                          derive_seed(options.seed, {kFixedLimitsStream, 1}));
        const auto process = from_estimate ? apply_shift(limits.phase1_params, shift) : oc_dist.params();
        return simulate_run_length_fixed(process, limits, config.p, options);
    }

    constexpr std::size_t kFailed = 0;
    std::vector<std::size_t> runs(options.replications, kFailed);
    detail::parallel_for(options.replications, options.threads, [&](std::size_t r) {
        ControlLimits limits;
        std::optional<Tbeta> fitted_process;
        try {
            limits = phase1_limits(ic_dist, config, options, derive_seed(options.seed, {r, 0}),
                                   derive_seed(options.seed, {r, 1}));
            if (from_estimate)
                fitted_process.emplace(apply_shift(limits.phase1_params, shift));
        } catch (const Error&) {
            return;
        }
        Rng rng(derive_seed(options.seed, {r, 2}));
        runs[r] = run_length(fitted_process ? *fitted_process : oc_dist, limits, config.p, options.n,
                             options.run_cap, rng);
    });

    std::vector<std::size_t> ok;
    ok.reserve(runs.size());
    for (auto r : runs)
        if (r != kFailed)
            ok.push_back(r);
    if (ok.empty())
        throw ConvergenceError("every replication failed to build control limits");
    auto summary = summarize_runs(ok, options.run_cap);
    summary.failed_replications = runs.size() - ok.size();
    return summary;
}

std::uint64_t cell_seed(std::uint64_t seed, const ShiftSpec& shift, double p, double far)
{
    return derive_seed(seed, {bits(shift.d_theta1), bits(shift.d_theta2), bits(p), bits(far)});
}

std::vector<GridCell> shift_grid(const TbetaParams& ic, std::span<const ShiftSpec> shifts,
                                 std::span<const double> percentiles, std::span<const double> fars,
                                 const ChartConfig& config, const SimulationOptions& options)
{
    if (shifts.empty())
        throw DomainError("shift grid is empty");
    const std::vector<double> default_p{config.p};
    const std::vector<double> default_far{config.far};
    if (percentiles.empty())
        percentiles = default_p;
    if (fars.empty())
        fars = default_far;

    std::vector<GridCell> cells;
    for (const auto& shift : shifts)
        for (double p : percentiles)
            for (double far : fars) {
                GridCell cell;
                cell.shift = shift;
                cell.p = p;
                cell.far = far;
                cell.seed = cell_seed(options.seed, shift, p, far);
                ChartConfig cfg = config;
                cfg.p = p;
                cfg.far = far;
                SimulationOptions opt = options;
                opt.seed = cell.seed;
                try {
                    cell.summary = simulate_run_length(ic, shift, cfg, opt);
                } catch (const Error& e) {
                    cell.ok = false;
                    cell.error = e.what();
                }
                cells.push_back(std::move(cell));
            }
    return cells;
}

void write_grid_csv(std::ostream& out, std::span<const GridCell> cells)
{
    out << "d_theta1,d_theta2,p,nu,arl,sdrl,replications,truncated_runs,failed_replications,error\n";
    for (const auto& c : cells) {
        out << format_double(c.shift.d_theta1) << ',' << format_double(c.shift.d_theta2) << ','
            << format_double(c.p) << ',' << format_double(c.far) << ',';
        if (c.ok)
            out << format_double(c.summary.arl) << ',' << format_double(c.summary.sdrl) << ',';
        else
            out << ",,";
        out << c.summary.replications << ',' << c.summary.truncated_runs << ',' << c.summary.failed_replications
            << ',';
        if (!c.ok) {
            std::string msg = c.error;
            for (char& ch : msg)
                if (ch == '"')
                    ch = '\'';
            out << '"' << msg << '"';
        }
        out << '\n';
    }
}

GeometricCheck sdrl_consistency_check(const RunLengthSummary& summary, double far)
{
    if (!(far > 0.0 && far < 1.0))
        throw DomainError("false alarm rate must lie in (0, 1)");
    GeometricCheck check;
    check.arl_target = 1.0 / far;
    check.sdrl_target = std::sqrt(1.0 - far) / far;
    check.sdrl_ratio = summary.arl > 0.0 ? summary.sdrl / summary.arl : 0.0;
    const double reps = static_cast<double>(std::max<std::size_t>(summary.replications, 1));
    check.arl_z = (summary.arl - check.arl_target) / (check.sdrl_target / std::sqrt(reps));
    // Large-sample standard error of a sample SD: sigma * sqrt((kurtosis - 1) / 4R),
    // with geometric kurtosis 9 + far^2 / (1 - far).
    const double kurtosis = 9.0 + far * far / (1.0 - far);
    check.sdrl_z = (summary.sdrl - check.sdrl_target) / (check.sdrl_target * std::sqrt((kurtosis - 1.0) / (4.0 * reps)));
    return check;
}

} // namespace tbeta
