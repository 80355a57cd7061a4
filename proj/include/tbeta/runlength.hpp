#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tbeta/chart.hpp"
#include "tbeta/dist.hpp"

namespace tbeta {

// Additive perturbation of the in-control shapes.
struct ShiftSpec {
    double d_theta1 = 0.0;
    double d_theta2 = 0.0;
};

// Throws DomainError if the shifted shapes are not positive.
TbetaParams apply_shift(const TbetaParams& ic, const ShiftSpec& shift);

enum class LimitsProtocol {
    per_replication, // fresh Phase-I data and limits in every replication
    fixed,           // one limit set, built once, shared by all replications
};

// Law the Phase-II subgroups come from, before the shift is added.
enum class PhaseTwoSource {
    true_parameters, // the in-control shapes passed by the caller
    phase1_estimate, // the shapes fitted to that replication's Phase-I data
};

struct SimulationOptions {
    std::size_t n = 10; // subgroup size
    std::size_t k = 20; // Phase-I subgroups
    std::size_t replications = 500;
    std::size_t run_cap = 20000;
    std::uint64_t seed = 1;
    LimitsProtocol protocol = LimitsProtocol::per_replication;
    PhaseTwoSource phase2_source = PhaseTwoSource::true_parameters;
    unsigned threads = 0;
};

struct Scale {
    std::size_t boot_reps;
    std::size_t replications;
};

inline constexpr Scale kDeskScale{1000, 500};
inline constexpr Scale kPaperScale{5000, 5000};

struct RunLengthSummary {
    double arl = 0.0;
    double sdrl = 0.0;
    std::size_t replications = 0;   // replications that produced a run length
    std::size_t truncated_runs = 0; // runs stopped at run_cap
    std::size_t failed_replications = 0;
};

// Mean and standard deviation (divisor R - 1) of run lengths.
RunLengthSummary summarize_runs(std::span<const std::size_t> runs, std::size_t run_cap);

// Number of subgroups drawn from `process` until the first out-of-control
// verdict against `limits`, capped at run_cap. Indeterminate verdicts do not
// signal.
std::size_t run_length(const Tbeta& process, const ControlLimits& limits, double p, std::size_t n,
                       std::size_t run_cap, Rng& rng);

// Run lengths against one given limit set. Replication r streams from
// derive_seed(seed, {r, 2}).
RunLengthSummary simulate_run_length_fixed(const TbetaParams& process, const ControlLimits& limits, double p,
                                           const SimulationOptions& options);

// Full Monte Carlo: per replication, Phase-I data (k x n) from ic, limits from
// build_limits, then subgroups from the shifted law until the first signal.
// With PhaseTwoSource::phase1_estimate the shift is applied to the Phase-I
// fit instead of to ic.
// All randomness derives from options.seed (config.seed is ignored).
// Replications whose limits cannot be built are dropped and counted.
RunLengthSummary simulate_run_length(const TbetaParams& ic, const ShiftSpec& shift, const ChartConfig& config,
                                     const SimulationOptions& options);

struct GridCell {
    ShiftSpec shift;
    double p = 0.0;
    double far = 0.0;
    std::uint64_t seed = 0;
    RunLengthSummary summary;
    bool ok = true;
    std::string error;
};

// Seed of one grid cell, derived from the cell's identity rather than its
// position, so reordering the grid leaves every cell unchanged.
std::uint64_t cell_seed(std::uint64_t seed, const ShiftSpec& shift, double p, double far);

// One cell per (shift, p, far), shifts outermost. A failing cell records its
// error and the grid continues.
std::vector<GridCell> shift_grid(const TbetaParams& ic, std::span<const ShiftSpec> shifts,
                                 std::span<const double> percentiles, std::span<const double> fars,
                                 const ChartConfig& config, const SimulationOptions& options);

// Columns: d_theta1,d_theta2,p,nu,arl,sdrl,replications,truncated_runs,
// followed by failed_replications,error.
void write_grid_csv(std::ostream& out, std::span<const GridCell> cells);

struct GeometricCheck {
    double arl_target = 0.0;  // 1 / far
    double sdrl_target = 0.0; // sqrt(1 - far) / far
    double arl_z = 0.0;
    double sdrl_z = 0.0;
    double sdrl_ratio = 0.0; // sdrl / arl
};

// Compares an in-control summary with the geometric run-length law.
GeometricCheck sdrl_consistency_check(const RunLengthSummary& summary, double far);

} // namespace tbeta
