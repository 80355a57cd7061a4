#include "tbeta/tbeta.h"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <new>
#include <string>
#include <vector>

#include "tbeta/chart.hpp"
#include "tbeta/datasets.hpp"
#include "tbeta/dist.hpp"
#include "tbeta/error.hpp"
#include "tbeta/estimate.hpp"
#include "tbeta/runlength.hpp"

struct tbeta_data {
    std::vector<double> values;
};

struct tbeta_grid {
    std::vector<tbeta::GridCell> cells;
};

namespace {

thread_local std::string last_error;

struct ArgumentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class Body>
tbeta_status guarded(Body&& body) noexcept
{
    try {
        body();
        return TBETA_OK;
    } catch (const ArgumentError& e) {
        last_error = e.what();
        return TBETA_ERR_ARGUMENT;
    } catch (const tbeta::DomainError& e) {
        last_error = e.what();
        return TBETA_ERR_DOMAIN;
    } catch (const tbeta::DataError& e) {
        last_error = e.what();
        return TBETA_ERR_DATA;
    } catch (const tbeta::ConvergenceError& e) {
        last_error = e.what();
        return TBETA_ERR_CONVERGENCE;
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return TBETA_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return TBETA_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return TBETA_ERR_INTERNAL;
    }
}

template <class... Ptr>
void require(const char* what, const Ptr*... ptrs)
{
    if (((ptrs == nullptr) || ...))
        throw ArgumentError(std::string("null pointer passed to ") + what);
}

std::span<const double> view(const double* values, size_t count)
{
    if (values == nullptr && count > 0)
        throw ArgumentError("null values with nonzero count");
    return {values, count};
}

tbeta::TbetaParams to_cpp(const tbeta_params& p)
{
    return {p.theta1, p.theta2, p.a, p.b};
}

tbeta_params to_c(const tbeta::TbetaParams& p)
{
    return {p.theta1, p.theta2, p.a, p.b};
}

tbeta::ChartConfig to_cpp(const tbeta_chart_config& c)
{
    tbeta::ChartConfig out;
    out.p = c.p;
    out.far = c.far;
    out.boot_reps = c.boot_reps;
    switch (c.boot_mode) {
    case TBETA_BOOT_PARAMETRIC: out.boot_mode = tbeta::BootMode::parametric; break;
    case TBETA_BOOT_POOLED_RESAMPLE: out.boot_mode = tbeta::BootMode::pooled_resample; break;
    default: throw ArgumentError("unknown bootstrap mode");
    }
    switch (c.center_mode) {
    case TBETA_CENTER_BOOTSTRAP_MEAN: out.center_mode = tbeta::CenterMode::bootstrap_mean; break;
    case TBETA_CENTER_PHASE1_ESTIMATE: out.center_mode = tbeta::CenterMode::phase1_estimate; break;
    default: throw ArgumentError("unknown center mode");
    }
    out.seed = c.seed;
    out.threads = c.threads;
    return out;
}

tbeta::ControlLimits to_cpp(const tbeta_limits& l)
{
    tbeta::ControlLimits out;
    out.lcl = l.lcl;
    out.cl = l.cl;
    out.ucl = l.ucl;
    out.boot_mean = l.boot_mean;
    out.boot_se = l.boot_se;
    out.t_lower = l.t_lower;
    out.t_upper = l.t_upper;
    out.phase1_estimate = l.phase1_estimate;
    out.phase1_params = to_cpp(l.phase1_params);
    out.p = l.p;
    out.far = l.far;
    out.boot_reps = l.boot_reps;
    out.failed_attempts = l.failed_attempts;
    out.lcl_outside_support = l.lcl_outside_support != 0;
    out.ucl_outside_support = l.ucl_outside_support != 0;
    return out;
}

tbeta_limits to_c(const tbeta::ControlLimits& l)
{
    tbeta_limits out{};
    out.lcl = l.lcl;
    out.cl = l.cl;
    out.ucl = l.ucl;
    out.boot_mean = l.boot_mean;
    out.boot_se = l.boot_se;
    out.t_lower = l.t_lower;
    out.t_upper = l.t_upper;
    out.phase1_estimate = l.phase1_estimate;
    out.phase1_params = to_c(l.phase1_params);
    out.p = l.p;
    out.far = l.far;
    out.boot_reps = l.boot_reps;
    out.failed_attempts = l.failed_attempts;
    out.lcl_outside_support = l.lcl_outside_support ? 1 : 0;
    out.ucl_outside_support = l.ucl_outside_support ? 1 : 0;
    return out;
}

tbeta_verdict to_c(const tbeta::SignalVerdict& v)
{
    tbeta_verdict out{};
    out.statistic = v.statistic;
    out.in_control = v.in_control ? 1 : 0;
    out.breach = static_cast<int>(v.breach);
    out.subgroup_index = v.subgroup_index;
    return out;
}

tbeta::SimulationOptions to_cpp(const tbeta_sim_options& o)
{
    tbeta::SimulationOptions out;
    out.n = o.n;
    out.k = o.k;
    out.replications = o.replications;
    out.run_cap = o.run_cap;
    out.seed = o.seed;
    switch (o.protocol) {
    case TBETA_LIMITS_PER_REPLICATION: out.protocol = tbeta::LimitsProtocol::per_replication; break;
    case TBETA_LIMITS_FIXED: out.protocol = tbeta::LimitsProtocol::fixed; break;
    default: throw ArgumentError("unknown limits protocol");
    }
    switch (o.phase2_source) {
    case TBETA_PHASE2_TRUE_PARAMETERS: out.phase2_source = tbeta::PhaseTwoSource::true_parameters; break;
    case TBETA_PHASE2_PHASE1_ESTIMATE: out.phase2_source = tbeta::PhaseTwoSource::phase1_estimate; break;
    default: throw ArgumentError("unknown Phase-II source");
    }
    out.threads = o.threads;
    return out;
}

tbeta_run_length_summary to_c(const tbeta::RunLengthSummary& s)
{
    return {s.arl, s.sdrl, s.replications, s.truncated_runs, s.failed_replications};
}

tbeta::RunLengthSummary to_cpp(const tbeta_run_length_summary& s)
{
    tbeta::RunLengthSummary out;
    out.arl = s.arl;
    out.sdrl = s.sdrl;
    out.replications = s.replications;
    out.truncated_runs = s.truncated_runs;
    out.failed_replications = s.failed_replications;
    return out;
}

template <class Writer>
void with_output(const char* path, Writer&& write)
{
    if (path == nullptr) {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw tbeta::DataError(std::string("cannot open '") + path + "' for writing");
    write(out);
    if (!out)
        throw tbeta::DataError(std::string("failed writing '") + path + "'");
}

} // namespace

extern "C" {

const char* tbeta_version(void)
{
    return "1.0.0";
}

const char* tbeta_last_error(void)
{
    return last_error.c_str();
}

const char* tbeta_status_name(tbeta_status status)
{
    switch (status) {
    case TBETA_OK: return "ok";
    case TBETA_ERR_ARGUMENT: return "argument error";
    case TBETA_ERR_DOMAIN: return "domain error";
    case TBETA_ERR_DATA: return "data error";
    case TBETA_ERR_CONVERGENCE: return "convergence error";
    case TBETA_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

tbeta_status tbeta_validate_params(const tbeta_params* params)
{
    return guarded([&] {
        require("tbeta_validate_params", params);
        tbeta::validate(to_cpp(*params));
    });
}

tbeta_status tbeta_incomplete_beta(double c, double theta1, double theta2, double* out)
{
    return guarded([&] {
        require("tbeta_incomplete_beta", out);
        *out = tbeta::incomplete_beta_unnorm(c, theta1, theta2);
    });
}

tbeta_status tbeta_pdf(double x, const tbeta_params* params, double* out)
{
    return guarded([&] {
        require("tbeta_pdf", params, out);
        *out = tbeta::pdf(x, to_cpp(*params));
    });
}

tbeta_status tbeta_cdf(double x, const tbeta_params* params, double* out)
{
    return guarded([&] {
        require("tbeta_cdf", params, out);
        *out = tbeta::cdf(x, to_cpp(*params));
    });
}

tbeta_status tbeta_quantile(double p, const tbeta_params* params, double* out)
{
    return guarded([&] {
        require("tbeta_quantile", params, out);
        *out = tbeta::quantile(p, to_cpp(*params));
    });
}

tbeta_status tbeta_sample(const tbeta_params* params, size_t count, uint64_t seed, double* out)
{
    return guarded([&] {
        require("tbeta_sample", params, out);
        const auto draws = tbeta::sample(to_cpp(*params), count, seed);
        std::copy(draws.begin(), draws.end(), out);
    });
}

tbeta_status tbeta_data_from_values(const double* values, size_t count, tbeta_data** out)
{
    return guarded([&] {
        require("tbeta_data_from_values", out);
        const auto v = view(values, count);
        *out = new tbeta_data{std::vector<double>(v.begin(), v.end())};
    });
}

tbeta_status tbeta_data_from_csv(const char* path, tbeta_data** out)
{
    return guarded([&] {
        require("tbeta_data_from_csv", path, out);
        *out = new tbeta_data{tbeta::read_observations_file(path)};
    });
}

tbeta_status tbeta_data_from_embedded(const char* name, tbeta_data** out)
{
    return guarded([&] {
        require("tbeta_data_from_embedded", name, out);
        const auto* d = tbeta::find_embedded(name);
        if (d == nullptr)
            throw tbeta::DataError(std::string("no embedded dataset named '") + name + "'");
        *out = new tbeta_data{std::vector<double>(d->values.begin(), d->values.end())};
    });
}

void tbeta_data_free(tbeta_data* data)
{
    delete data;
}

size_t tbeta_data_size(const tbeta_data* data)
{
    return data ? data->values.size() : 0;
}

const double* tbeta_data_values(const tbeta_data* data)
{
    return data ? data->values.data() : nullptr;
}

tbeta_status tbeta_data_drop_first(tbeta_data* data, size_t count)
{
    return guarded([&] {
        require("tbeta_data_drop_first", data);
        if (count > data->values.size())
            throw tbeta::DataError("cannot drop more observations than are present");
        data->values.erase(data->values.begin(), data->values.begin() + static_cast<std::ptrdiff_t>(count));
    });
}

size_t tbeta_embedded_count(void)
{
    return tbeta::embedded_datasets().size();
}

const char* tbeta_embedded_name(size_t index)
{
    const auto all = tbeta::embedded_datasets();
    return index < all.size() ? all[index].name.data() : nullptr;
}

const char* tbeta_embedded_description(size_t index)
{
    const auto all = tbeta::embedded_datasets();
    return index < all.size() ? all[index].description.data() : nullptr;
}

tbeta_status tbeta_write_observations_csv(const double* values, size_t count, const char* path)
{
    return guarded([&] {
        const auto v = view(values, count);
        with_output(path, [&](std::ostream& os) { tbeta::write_observations(os, v); });
    });
}

tbeta_status tbeta_format_double(double value, char* buffer, size_t capacity)
{
    return guarded([&] {
        require("tbeta_format_double", buffer);
        const auto s = tbeta::format_double(value);
        if (capacity < s.size() + 1)
            throw ArgumentError("buffer too small for formatted value");
        std::copy(s.begin(), s.end(), buffer);
        buffer[s.size()] = '\0';
    });
}

tbeta_status tbeta_log_likelihood(const double* values, size_t count, const tbeta_params* params, double* out)
{
    return guarded([&] {
        require("tbeta_log_likelihood", params, out);
        *out = tbeta::log_likelihood(view(values, count), to_cpp(*params));
    });
}

tbeta_status tbeta_fit(const double* values, size_t count, double a, double b, const double* init,
                       tbeta_fit_result* out)
{
    return guarded([&] {
        require("tbeta_fit", out);
        std::optional<std::pair<double, double>> start;
        if (init != nullptr)
            start = std::pair{init[0], init[1]};
        const auto fit = tbeta::fit_mle(view(values, count), a, b, start);
        *out = tbeta_fit_result{to_c(fit.params), fit.loglik, fit.converged ? 1 : 0, fit.iterations};
    });
}

tbeta_status tbeta_percentile(const tbeta_fit_result* fit, double p, double* out)
{
    return guarded([&] {
        require("tbeta_percentile", fit, out);
        tbeta::FitResult f;
        f.params = to_cpp(fit->params);
        f.loglik = fit->loglik;
        f.converged = fit->converged != 0;
        f.iterations = fit->iterations;
        *out = tbeta::percentile_estimate(f, p);
    });
}

tbeta_status tbeta_ks_statistic(const double* values, size_t count, const tbeta_params* params, double* out)
{
    return guarded([&] {
        require("tbeta_ks_statistic", params, out);
        *out = tbeta::ks_statistic(view(values, count), to_cpp(*params));
    });
}

tbeta_status tbeta_ks_pvalue(double stat, size_t sample_size, const tbeta_params* params, size_t reps, uint64_t seed,
                             unsigned threads, tbeta_ks_pvalue_result* out)
{
    return guarded([&] {
        require("tbeta_ks_pvalue", params, out);
        const auto r = tbeta::ks_pvalue(stat, sample_size, to_cpp(*params), reps, seed, threads);
        *out = tbeta_ks_pvalue_result{r.pvalue, r.used, r.failed};
    });
}

tbeta_status tbeta_ks_asymptotic_pvalue(double stat, size_t sample_size, double* out)
{
    return guarded([&] {
        require("tbeta_ks_asymptotic_pvalue", out);
        *out = tbeta::ks_asymptotic_pvalue(stat, sample_size);
    });
}

void tbeta_chart_config_default(tbeta_chart_config* config)
{
    if (config == nullptr)
        return;
    const tbeta::ChartConfig d;
    config->p = d.p;
    config->far = d.far;
    config->boot_reps = d.boot_reps;
    config->boot_mode = d.boot_mode == tbeta::BootMode::parametric ? TBETA_BOOT_PARAMETRIC
                                                                    : TBETA_BOOT_POOLED_RESAMPLE;
    config->center_mode = d.center_mode == tbeta::CenterMode::bootstrap_mean ? TBETA_CENTER_BOOTSTRAP_MEAN
                                                                              : TBETA_CENTER_PHASE1_ESTIMATE;
    config->seed = d.seed;
    config->threads = d.threads;
}

tbeta_status tbeta_build_limits(const double* values, size_t count, size_t n, double a, double b,
                                const tbeta_chart_config* config, tbeta_limits* out)
{
    return guarded([&] {
        require("tbeta_build_limits", config, out);
        const auto v = view(values, count);
        const tbeta::SubgroupData data(std::vector<double>(v.begin(), v.end()), n);
        *out = to_c(tbeta::build_limits(data, a, b, to_cpp(*config)));
    });
}

tbeta_status tbeta_evaluate_subgroup(const double* values, size_t n, const tbeta_limits* limits, double a, double b,
                                     double p, size_t index, tbeta_verdict* out)
{
    return guarded([&] {
        require("tbeta_evaluate_subgroup", limits, out);
        *out = to_c(tbeta::evaluate_subgroup(view(values, n), to_cpp(*limits), a, b, p, index));
    });
}

tbeta_status tbeta_monitor(const double* values, size_t count, size_t n, const tbeta_limits* limits, double a,
                           double b, double p, tbeta_verdict* out, size_t capacity, size_t* out_count)
{
    return guarded([&] {
        require("tbeta_monitor", limits, out_count);
        if (n == 0)
            throw tbeta::DataError("subgroup size must be at least 2");
        if (capacity < count / n)
            throw ArgumentError("verdict buffer too small");
        if (out == nullptr && count > 0)
            throw ArgumentError("null verdict buffer");
        const auto verdicts = tbeta::monitor_stream(view(values, count), n, to_cpp(*limits), a, b, p);
        for (size_t i = 0; i < verdicts.size(); ++i)
            out[i] = to_c(verdicts[i]);
        *out_count = verdicts.size();
    });
}

void tbeta_sim_options_default(tbeta_sim_options* options)
{
    if (options == nullptr)
        return;
    const tbeta::SimulationOptions d;
    options->n = d.n;
    options->k = d.k;
    options->replications = d.replications;
    options->run_cap = d.run_cap;
    options->seed = d.seed;
    options->protocol = d.protocol == tbeta::LimitsProtocol::fixed ? TBETA_LIMITS_FIXED : TBETA_LIMITS_PER_REPLICATION;
    options->phase2_source = d.phase2_source == tbeta::PhaseTwoSource::phase1_estimate
                                 ? TBETA_PHASE2_PHASE1_ESTIMATE
                                 : TBETA_PHASE2_TRUE_PARAMETERS;
    options->threads = d.threads;
}

tbeta_status tbeta_simulate_run_length(const tbeta_params* ic, const tbeta_shift* shift,
                                       const tbeta_chart_config* config, const tbeta_sim_options* options,
                                       tbeta_run_length_summary* out)
{
    return guarded([&] {
        require("tbeta_simulate_run_length", ic, shift, config, options, out);
        *out = to_c(tbeta::simulate_run_length(to_cpp(*ic), {shift->d_theta1, shift->d_theta2}, to_cpp(*config),
                                               to_cpp(*options)));
    });
}

tbeta_status tbeta_simulate_run_length_fixed(const tbeta_params* process, const tbeta_limits* limits, double p,
                                             const tbeta_sim_options* options, tbeta_run_length_summary* out)
{
    return guarded([&] {
        require("tbeta_simulate_run_length_fixed", process, limits, options, out);
        *out = to_c(tbeta::simulate_run_length_fixed(to_cpp(*process), to_cpp(*limits), p, to_cpp(*options)));
    });
}

tbeta_status tbeta_shift_grid(const tbeta_params* ic, const tbeta_shift* shifts, size_t shift_count,
                              const double* percentiles, size_t percentile_count, const double* fars,
                              size_t far_count, const tbeta_chart_config* config, const tbeta_sim_options* options,
                              tbeta_grid** out)
{
    return guarded([&] {
        require("tbeta_shift_grid", ic, config, options, out);
        if (shifts == nullptr && shift_count > 0)
            throw ArgumentError("null shifts with nonzero count");
        std::vector<tbeta::ShiftSpec> grid;
        for (size_t i = 0; i < shift_count; ++i)
            grid.push_back({shifts[i].d_theta1, shifts[i].d_theta2});
        auto cells = tbeta::shift_grid(to_cpp(*ic), grid, view(percentiles, percentile_count),
                                       view(fars, far_count), to_cpp(*config), to_cpp(*options));
        *out = new tbeta_grid{std::move(cells)};
    });
}

size_t tbeta_grid_size(const tbeta_grid* grid)
{
    return grid ? grid->cells.size() : 0;
}

tbeta_status tbeta_grid_cell_at(const tbeta_grid* grid, size_t index, tbeta_grid_cell* out)
{
    return guarded([&] {
        require("tbeta_grid_cell_at", grid, out);
        if (index >= grid->cells.size())
            throw ArgumentError("grid cell index out of range");
        const auto& c = grid->cells[index];
        *out = tbeta_grid_cell{{c.shift.d_theta1, c.shift.d_theta2}, c.p,   c.far, c.seed, to_c(c.summary),
                               c.ok ? 1 : 0,                          c.error.c_str()};
    });
}

tbeta_status tbeta_grid_write_csv(const tbeta_grid* grid, const char* path)
{
    return guarded([&] {
        require("tbeta_grid_write_csv", grid);
        with_output(path, [&](std::ostream& os) { tbeta::write_grid_csv(os, grid->cells); });
    });
}

void tbeta_grid_free(tbeta_grid* grid)
{
    delete grid;
}

uint64_t tbeta_cell_seed(uint64_t seed, const tbeta_shift* shift, double p, double far)
{
    const tbeta::ShiftSpec s = shift ? tbeta::ShiftSpec{shift->d_theta1, shift->d_theta2} : tbeta::ShiftSpec{};
    return tbeta::cell_seed(seed, s, p, far);
}

tbeta_status tbeta_sdrl_check(const tbeta_run_length_summary* summary, double far, tbeta_geometric_check* out)
{
    return guarded([&] {
        require("tbeta_sdrl_check", summary, out);
        const auto c = tbeta::sdrl_consistency_check(to_cpp(*summary), far);
        *out = tbeta_geometric_check{c.arl_target, c.sdrl_target, c.arl_z, c.sdrl_z, c.sdrl_ratio};
    });
}

} // extern "C"
