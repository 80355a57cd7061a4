// Command-line front end. Uses only the C interface in tbeta/tbeta.h.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tbeta/tbeta.h"

namespace {

using json = nlohmann::ordered_json;

enum ExitCode { kOk = 0, kUsage = 1, kDataFailure = 2, kNumericFailure = 3 };

struct Failure {
    int code;
    std::string message;
};

int exit_code_for(tbeta_status status)
{
    switch (status) {
    case TBETA_OK: return kOk;
    case TBETA_ERR_ARGUMENT:
    case TBETA_ERR_DOMAIN: return kUsage;
    case TBETA_ERR_DATA: return kDataFailure;
    case TBETA_ERR_CONVERGENCE:
    case TBETA_ERR_INTERNAL: return kNumericFailure;
    }
    return kNumericFailure;
}

void check(tbeta_status status, const std::string& context)
{
    if (status != TBETA_OK)
        throw Failure{exit_code_for(status), context + ": " + tbeta_last_error()};
}

std::string fmt(double v)
{
    char buf[32];
    check(tbeta_format_double(v, buf, sizeof buf), "format");
    return buf;
}

std::string fixed(double v, int digits = 6)
{
    if (std::isnan(v))
        return "NA";
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

std::pair<double, double> parse_pair(const std::string& text, const char* flag)
{
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw Failure{kUsage, std::string(flag) + " expects two comma-separated numbers, got '" + text + "'"};
    try {
        std::size_t used1 = 0;
        std::size_t used2 = 0;
        const std::string first = text.substr(0, comma);
        const std::string second = text.substr(comma + 1);
        const double x = std::stod(first, &used1);
        const double y = std::stod(second, &used2);
        if (used1 != first.size() || used2 != second.size())
            throw std::invalid_argument("trailing characters");
        return {x, y};
    } catch (const std::exception&) {
        throw Failure{kUsage, std::string(flag) + " expects two comma-separated numbers, got '" + text + "'"};
    }
}

struct DataDeleter {
    void operator()(tbeta_data* d) const { tbeta_data_free(d); }
};
using DataHandle = std::unique_ptr<tbeta_data, DataDeleter>;

struct GridDeleter {
    void operator()(tbeta_grid* g) const { tbeta_grid_free(g); }
};
using GridHandle = std::unique_ptr<tbeta_grid, GridDeleter>;

bool is_embedded(const std::string& name)
{
    for (std::size_t i = 0; i < tbeta_embedded_count(); ++i)
        if (name == tbeta_embedded_name(i))
            return true;
    return false;
}

// Options shared by every command that reads observations.
struct DatasetOptions {
    std::string source;
    std::string support = "0,1";
    std::size_t subgroup_size = 10;
    bool drop_first = false;
    bool keep_first = false;

    void attach(CLI::App* cmd, bool required = true)
    {
        auto* opt = cmd->add_option("--data", source, "Embedded dataset name or observation CSV path");
        if (required)
            opt->required();
        cmd->add_option("--support", support, "Truncation support a,b")->capture_default_str();
        cmd->add_option("--subgroup-size", subgroup_size, "Subgroup size n")->capture_default_str();
        cmd->add_flag("--drop-first", drop_first, "Drop the first observation (default for embedded data)");
        cmd->add_flag("--keep-first", keep_first, "Keep the first observation of embedded data");
    }

    bool dropping() const
    {
        if (drop_first)
            return true;
        if (keep_first)
            return false;
        return is_embedded(source);
    }
};

struct LoadedData {
    std::vector<double> values;
    std::string label;
    bool dropped = false;
};

LoadedData load(const DatasetOptions& opts)
{
    if (opts.drop_first && opts.keep_first)
        throw Failure{kUsage, "--drop-first and --keep-first are mutually exclusive"};
    tbeta_data* raw = nullptr;
    if (is_embedded(opts.source))
        check(tbeta_data_from_embedded(opts.source.c_str(), &raw), "loading " + opts.source);
    else
        check(tbeta_data_from_csv(opts.source.c_str(), &raw), "loading " + opts.source);
    DataHandle data(raw);
    LoadedData out;
    out.label = opts.source;
    out.dropped = opts.dropping();
    if (out.dropped)
        check(tbeta_data_drop_first(data.get(), 1), "dropping first observation");
    const double* v = tbeta_data_values(data.get());
    out.values.assign(v, v + tbeta_data_size(data.get()));
    if (out.values.empty())
        throw Failure{kDataFailure, opts.source + ": no observations left"};
    return out;
}

void require_partition(const LoadedData& data, std::size_t n)
{
    if (n < 2)
        throw Failure{kUsage, "--subgroup-size must be at least 2"};
    if (data.values.size() % n != 0)
        throw Failure{kDataFailure, data.label + ": " + std::to_string(data.values.size()) +
                                        " observations cannot be split into subgroups of size " + std::to_string(n)};
}

// Chart options shared by limits and arl.
struct ChartOptions {
    double far = 0.0027;
    std::size_t boot_reps = 5000;
    std::string boot_mode = "parametric";
    std::string center_mode = "phase1-estimate";

    void attach(CLI::App* cmd, bool with_far = true)
    {
        if (with_far)
            cmd->add_option("--far", far, "False alarm rate nu")->capture_default_str();
        cmd->add_option("--boot-reps", boot_reps, "Bootstrap size B (>= 100)")->capture_default_str();
        cmd->add_option("--boot-mode", boot_mode, "Bootstrap draws")
            ->check(CLI::IsMember({"parametric", "pooled-resample"}))
            ->capture_default_str();
        cmd->add_option("--center-mode", center_mode, "Center of the limits")
            ->check(CLI::IsMember({"bootstrap-mean", "phase1-estimate"}))
            ->capture_default_str();
    }

    tbeta_chart_config config(double p, std::uint64_t seed, unsigned threads) const
    {
        tbeta_chart_config c;
        tbeta_chart_config_default(&c);
        c.p = p;
        c.far = far;
        c.boot_reps = boot_reps;
        c.boot_mode = boot_mode == "parametric" ? TBETA_BOOT_PARAMETRIC : TBETA_BOOT_POOLED_RESAMPLE;
        c.center_mode = center_mode == "bootstrap-mean" ? TBETA_CENTER_BOOTSTRAP_MEAN : TBETA_CENTER_PHASE1_ESTIMATE;
        c.seed = seed;
        c.threads = threads;
        return c;
    }
};

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out)
        throw Failure{kDataFailure, "cannot open '" + path + "' for writing"};
    out << text;
    if (!out)
        throw Failure{kDataFailure, "failed writing '" + path + "'"};
}

json params_json(const tbeta_params& p)
{
    return json{{"theta1", p.theta1}, {"theta2", p.theta2}, {"a", p.a}, {"b", p.b}};
}

json limits_json(const tbeta_limits& l, const tbeta_chart_config& c, std::size_t n)
{
    return json{{"lcl", l.lcl},
                {"cl", l.cl},
                {"ucl", l.ucl},
                {"boot_mean", l.boot_mean},
                {"boot_se", l.boot_se},
                {"t_lower", l.t_lower},
                {"t_upper", l.t_upper},
                {"phase1_estimate", l.phase1_estimate},
                {"phase1_params", params_json(l.phase1_params)},
                {"p", l.p},
                {"far", l.far},
                {"boot_reps", l.boot_reps},
                {"failed_attempts", l.failed_attempts},
                {"lcl_outside_support", l.lcl_outside_support != 0},
                {"ucl_outside_support", l.ucl_outside_support != 0},
                {"boot_mode", c.boot_mode == TBETA_BOOT_PARAMETRIC ? "parametric" : "pooled-resample"},
                {"center_mode", c.center_mode == TBETA_CENTER_BOOTSTRAP_MEAN ? "bootstrap-mean" : "phase1-estimate"},
                {"seed", c.seed},
                {"subgroup_size", n}};
}

tbeta_limits limits_from_json(const json& j)
{
    tbeta_limits l{};
    try {
        l.lcl = j.at("lcl").get<double>();
        l.cl = j.at("cl").get<double>();
        l.ucl = j.at("ucl").get<double>();
        l.boot_mean = j.value("boot_mean", l.cl);
        l.boot_se = j.value("boot_se", 0.0);
        l.t_lower = j.value("t_lower", 0.0);
        l.t_upper = j.value("t_upper", 0.0);
        l.phase1_estimate = j.value("phase1_estimate", l.cl);
        if (j.contains("phase1_params")) {
            const auto& p = j.at("phase1_params");
            l.phase1_params = {p.at("theta1").get<double>(), p.at("theta2").get<double>(), p.at("a").get<double>(),
                               p.at("b").get<double>()};
        }
        l.p = j.value("p", 0.0);
        l.far = j.value("far", 0.0);
        l.boot_reps = j.value("boot_reps", std::size_t{0});
        l.failed_attempts = j.value("failed_attempts", std::size_t{0});
        l.lcl_outside_support = j.value("lcl_outside_support", false) ? 1 : 0;
        l.ucl_outside_support = j.value("ucl_outside_support", false) ? 1 : 0;
    } catch (const json::exception& e) {
        throw Failure{kDataFailure, std::string("limits JSON: ") + e.what()};
    }
    if (!(l.lcl <= l.ucl))
        throw Failure{kDataFailure, "limits JSON: lcl exceeds ucl"};
    return l;
}

// ---- fit -------------------------------------------------------------------

struct FitCommand {
    DatasetOptions data;
    std::vector<double> percentiles{0.9};
    std::size_t ks_reps = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    bool as_json = false;

    void attach(CLI::App* cmd)
    {
        data.attach(cmd);
        cmd->add_option("--percentile", percentiles, "Percentile(s) to report")->capture_default_str();
        cmd->add_option("--ks-reps", ks_reps, "Bootstrap replicates for the K-S p-value (>= 1000)")
            ->capture_default_str();
        cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
        cmd->add_option("--threads", threads, "Worker threads (0 = all)");
        cmd->add_flag("--json", as_json, "Machine-readable output");
    }

    int run() const
    {
        const auto loaded = load(data);
        const auto [a, b] = parse_pair(data.support, "--support");
        tbeta_fit_result fit{};
        check(tbeta_fit(loaded.values.data(), loaded.values.size(), a, b, nullptr, &fit), "fit");
        if (!fit.converged)
            throw Failure{kNumericFailure, "fit: maximum likelihood search did not converge"};

        std::vector<double> values;
        for (double p : percentiles) {
            double q = 0.0;
            check(tbeta_percentile(&fit, p, &q), "percentile");
            values.push_back(q);
        }
        double ks = 0.0;
        check(tbeta_ks_statistic(loaded.values.data(), loaded.values.size(), &fit.params, &ks), "K-S statistic");
        tbeta_ks_pvalue_result pv{};
        check(tbeta_ks_pvalue(ks, loaded.values.size(), &fit.params, ks_reps, seed, threads, &pv), "K-S p-value");
        double asymptotic = 0.0;
        check(tbeta_ks_asymptotic_pvalue(ks, loaded.values.size(), &asymptotic), "K-S p-value");

        if (as_json) {
            json out{{"dataset", loaded.label},
                     {"observations", loaded.values.size()},
                     {"first_dropped", loaded.dropped},
                     {"support", {a, b}},
                     {"theta1", fit.params.theta1},
                     {"theta2", fit.params.theta2},
                     {"loglik", fit.loglik},
                     {"converged", fit.converged != 0},
                     {"iterations", fit.iterations}};
            json ps = json::array();
            for (std::size_t i = 0; i < percentiles.size(); ++i)
                ps.push_back({{"p", percentiles[i]}, {"value", values[i]}});
            out["percentiles"] = ps;
            out["ks"] = {{"statistic", ks},
                         {"pvalue", pv.pvalue},
                         {"pvalue_asymptotic", asymptotic},
                         {"replicates", pv.used},
                         {"dropped", pv.failed},
                         {"seed", seed}};
            std::cout << out.dump(2) << '\n';
            return kOk;
        }
        std::cout << "dataset      " << loaded.label << " (" << loaded.values.size() << " observations"
                  << (loaded.dropped ? ", first dropped" : "") << ")\n"
                  << "support      [" << a << ", " << b << "]\n"
                  << "theta1       " << fixed(fit.params.theta1) << '\n'
                  << "theta2       " << fixed(fit.params.theta2) << '\n'
                  << "loglik       " << fixed(fit.loglik) << '\n';
        for (std::size_t i = 0; i < percentiles.size(); ++i)
            std::cout << "xi_" << percentiles[i] << std::string(percentiles[i] < 0.1 ? 4 : 5, ' ') << fixed(values[i])
                      << '\n';
        std::cout << "ks           " << fixed(ks) << '\n'
                  << "ks p-value   " << fixed(pv.pvalue, 4) << " (parametric bootstrap with refits, " << pv.used
                  << " replicates, " << pv.failed << " dropped)\n"
                  << "             " << fixed(asymptotic, 4) << " (asymptotic Kolmogorov, parameters taken as known)\n";
        return kOk;
    }
};

// ---- limits ----------------------------------------------------------------

struct LimitsCommand {
    DatasetOptions data;
    ChartOptions chart;
    double percentile = 0.9;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    bool as_json = false;
    std::string out;
    std::string limits_out;

    void attach(CLI::App* cmd)
    {
        data.attach(cmd);
        chart.attach(cmd);
        cmd->add_option("--percentile", percentile, "Monitored percentile p")->capture_default_str();
        cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
        cmd->add_option("--threads", threads, "Worker threads (0 = all)");
        cmd->add_flag("--json", as_json, "Print the limits JSON instead of the text report");
        cmd->add_option("--out", out, "Write the chart-frame CSV here");
        cmd->add_option("--limits-out", limits_out, "Write the limits JSON here");
    }

    int run() const
    {
        const auto loaded = load(data);
        require_partition(loaded, data.subgroup_size);
        const auto [a, b] = parse_pair(data.support, "--support");
        const auto cfg = chart.config(percentile, seed, threads);
        tbeta_limits lim{};
        check(tbeta_build_limits(loaded.values.data(), loaded.values.size(), data.subgroup_size, a, b, &cfg, &lim),
              "limits");
        const auto doc = limits_json(lim, cfg, data.subgroup_size);

        if (!limits_out.empty())
            write_text(limits_out, doc.dump(2) + "\n");
        if (!out.empty()) {
            std::ostringstream csv;
            csv << "index,statistic,lcl,cl,ucl\n";
            const std::size_t k = loaded.values.size() / data.subgroup_size;
            for (std::size_t i = 1; i <= k; ++i)
                csv << i << ",," << fmt(lim.lcl) << ',' << fmt(lim.cl) << ',' << fmt(lim.ucl) << '\n';
            write_text(out, csv.str());
        }
        if (as_json) {
            std::cout << doc.dump(2) << '\n';
            return kOk;
        }
        std::cout << "dataset          " << loaded.label << " (k=" << loaded.values.size() / data.subgroup_size
                  << ", n=" << data.subgroup_size << (loaded.dropped ? ", first dropped" : "") << ")\n"
                  << "phase-I fit      theta1=" << fixed(lim.phase1_params.theta1)
                  << " theta2=" << fixed(lim.phase1_params.theta2) << '\n'
                  << "percentile       p=" << percentile << "  xi_hat=" << fixed(lim.phase1_estimate) << '\n'
                  << "bootstrap        B=" << lim.boot_reps << " mode=" << chart.boot_mode
                  << " redraws=" << lim.failed_attempts << '\n'
                  << "boot mean / SE   " << fixed(lim.boot_mean) << " / " << fixed(lim.boot_se) << '\n'
                  << "t quantiles      " << fixed(lim.t_lower) << " / " << fixed(lim.t_upper) << '\n'
                  << "UCL              " << fixed(lim.ucl) << (lim.ucl_outside_support ? "  (outside support)" : "")
                  << '\n'
                  << "CL               " << fixed(lim.cl) << "  (" << chart.center_mode << ")\n"
                  << "LCL              " << fixed(lim.lcl) << (lim.lcl_outside_support ? "  (outside support)" : "")
                  << '\n';
        return kOk;
    }
};

// ---- monitor ---------------------------------------------------------------

struct MonitorCommand {
    DatasetOptions data;
    std::string limits;
    std::string simulate;
    std::size_t count = 20;
    double percentile = 0.9;
    std::uint64_t seed = 1;
    bool as_json = false;
    std::string out;
    CLI::Option* percentile_opt = nullptr;
    CLI::Option* support_opt = nullptr;

    void attach(CLI::App* cmd)
    {
        data.attach(cmd, false);
        support_opt = cmd->get_option("--support");
        cmd->add_option("--limits", limits, "Limits JSON file, or inline lcl,cl,ucl")->required();
        cmd->add_option("--simulate", simulate, "Draw Phase-II subgroups from theta1,theta2 instead of --data");
        cmd->add_option("--count", count, "Number of simulated subgroups")->capture_default_str();
        percentile_opt = cmd->add_option("--percentile", percentile, "Monitored percentile p");
        cmd->add_option("--seed", seed, "Random seed for --simulate")->capture_default_str();
        cmd->add_flag("--json", as_json, "Machine-readable output");
        cmd->add_option("--out", out, "Write the verdict CSV here");
    }

    tbeta_limits read_limits(bool& has_meta) const
    {
        std::ifstream in(limits);
        if (in) {
            json j;
            try {
                in >> j;
            } catch (const json::exception& e) {
                throw Failure{kDataFailure, limits + ": " + e.what()};
            }
            has_meta = j.contains("phase1_params") && j.contains("p");
            return limits_from_json(j);
        }
        // Inline triple lcl,cl,ucl.
        std::vector<double> v;
        std::stringstream ss(limits);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                std::size_t used = 0;
                v.push_back(std::stod(item, &used));
                if (used != item.size())
                    throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw Failure{kUsage, "--limits: '" + limits + "' is neither a readable file nor lcl,cl,ucl"};
            }
        }
        if (v.size() != 3 || !(v[0] <= v[1] && v[1] <= v[2]))
            throw Failure{kUsage, "--limits: inline form needs lcl,cl,ucl in ascending order"};
        tbeta_limits l{};
        l.lcl = v[0];
        l.cl = v[1];
        l.ucl = v[2];
        has_meta = false;
        return l;
    }

    int run() const
    {
        bool has_meta = false;
        auto lim = read_limits(has_meta);
        double a = 0.0;
        double b = 1.0;
        if (support_opt->count() > 0 || !has_meta)
            std::tie(a, b) = parse_pair(data.support, "--support");
        else
            std::tie(a, b) = std::pair{lim.phase1_params.a, lim.phase1_params.b};
        double p = percentile;
        if (percentile_opt->count() == 0 && has_meta)
            p = lim.p;
        const std::size_t n = data.subgroup_size;

        LoadedData loaded;
        if (!simulate.empty()) {
            if (!data.source.empty())
                throw Failure{kUsage, "--data and --simulate are mutually exclusive"};
            const auto [t1, t2] = parse_pair(simulate, "--simulate");
            const tbeta_params process{t1, t2, a, b};
            loaded.values.resize(count * n);
            check(tbeta_sample(&process, loaded.values.size(), seed, loaded.values.data()), "simulate");
            loaded.label = "simulated Tbeta(" + fmt(t1) + ", " + fmt(t2) + ")";
        } else {
            if (data.source.empty())
                throw Failure{kUsage, "monitor needs --data or --simulate"};
            loaded = load(data);
        }
        require_partition(loaded, n);

        std::vector<tbeta_verdict> verdicts(loaded.values.size() / n);
        std::size_t produced = 0;
        check(tbeta_monitor(loaded.values.data(), loaded.values.size(), n, &lim, a, b, p, verdicts.data(),
                            verdicts.size(), &produced),
              "monitor");
        verdicts.resize(produced);

        static const char* kBreach[] = {"in-control", "below-lcl", "above-ucl", "indeterminate"};
        std::size_t signals = 0;
        std::size_t indeterminate = 0;
        std::size_t first = 0;
        for (const auto& v : verdicts) {
            if (v.breach == TBETA_BREACH_BELOW_LCL || v.breach == TBETA_BREACH_ABOVE_UCL) {
                ++signals;
                if (first == 0)
                    first = v.subgroup_index;
            } else if (v.breach == TBETA_BREACH_INDETERMINATE) {
                ++indeterminate;
            }
        }

        if (!out.empty()) {
            std::ostringstream csv;
            csv << "index,statistic,lcl,cl,ucl,breach\n";
            for (const auto& v : verdicts)
                csv << v.subgroup_index << ',' << (std::isnan(v.statistic) ? std::string() : fmt(v.statistic)) << ','
                    << fmt(lim.lcl) << ',' << fmt(lim.cl) << ',' << fmt(lim.ucl) << ',' << kBreach[v.breach] << '\n';
            write_text(out, csv.str());
        }
        if (as_json) {
            json rows = json::array();
            for (const auto& v : verdicts)
                rows.push_back({{"index", v.subgroup_index},
                                {"statistic", std::isnan(v.statistic) ? json(nullptr) : json(v.statistic)},
                                {"in_control", v.in_control != 0},
                                {"breach", kBreach[v.breach]}});
            json doc{{"source", loaded.label},
                     {"p", p},
                     {"support", {a, b}},
                     {"limits", {{"lcl", lim.lcl}, {"cl", lim.cl}, {"ucl", lim.ucl}}},
                     {"verdicts", rows},
                     {"signals", signals},
                     {"indeterminate", indeterminate},
                     {"first_signal", first == 0 ? json(nullptr) : json(first)}};
            std::cout << doc.dump(2) << '\n';
            return kOk;
        }
        std::cout << "limits  LCL=" << fixed(lim.lcl) << " CL=" << fixed(lim.cl) << " UCL=" << fixed(lim.ucl)
                  << "  p=" << p << "  support=[" << a << ", " << b << "]\n"
                  << "index  statistic  verdict\n";
        for (const auto& v : verdicts) {
            std::string idx = std::to_string(v.subgroup_index);
            idx.resize(std::max<std::size_t>(idx.size(), 5), ' ');
            std::cout << idx << "  " << fixed(v.statistic) << "   " << kBreach[v.breach] << '\n';
        }
        std::cout << "first signal: " << (first ? std::to_string(first) : std::string("none"))
                  << "   signals: " << signals << " of " << verdicts.size()
                  << "   indeterminate: " << indeterminate << '\n';
        return kOk;
    }
};

// ---- arl -------------------------------------------------------------------

struct ArlCommand {
    std::string theta = "2,15";
    std::string support = "0,0.5";
    std::size_t n = 10;
    std::size_t k = 20;
    std::vector<double> percentiles{0.5};
    std::vector<double> fars{0.0027};
    std::vector<std::string> shifts{"0,0"};
    ChartOptions chart;
    std::size_t replications = 0;
    std::size_t run_cap = 20000;
    bool paper_scale = false;
    bool desk_scale = false;
    std::string protocol = "per-replication";
    std::string phase2 = "true";
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string out;
    CLI::Option* boot_opt = nullptr;
    CLI::Option* reps_opt = nullptr;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--theta", theta, "In-control shapes theta1,theta2")->capture_default_str();
        cmd->add_option("--support", support, "Truncation support a,b")->capture_default_str();
        cmd->add_option("--subgroup-size", n, "Subgroup size n")->capture_default_str();
        cmd->add_option("--subgroups", k, "Phase-I subgroup count k")->capture_default_str();
        cmd->add_option("--percentile", percentiles, "Percentile(s) p")->capture_default_str();
        cmd->add_option("--far", fars, "False alarm rate(s) nu")->capture_default_str();
        cmd->add_option("--shift", shifts, "Shift(s) d_theta1,d_theta2")->capture_default_str();
        chart.attach(cmd, false);
        boot_opt = cmd->get_option("--boot-reps");
        reps_opt = cmd->add_option("--replications", replications, "Monte Carlo replications");
        cmd->add_option("--run-cap", run_cap, "Longest run recorded")->capture_default_str();
        auto* paper = cmd->add_flag("--paper-scale", paper_scale, "B=5000, 5000 replications");
        cmd->add_flag("--desk-scale", desk_scale, "B=1000, 500 replications (default)")->excludes(paper);
        cmd->add_option("--protocol", protocol, "Limit estimation across replications")
            ->check(CLI::IsMember({"per-replication", "fixed"}))
            ->capture_default_str();
        cmd->add_option("--phase2-source", phase2, "Law the shift is applied to")
            ->check(CLI::IsMember({"true", "estimate"}))
            ->capture_default_str();
        cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
        cmd->add_option("--threads", threads, "Worker threads (0 = all)");
        cmd->add_option("--out", out, "Write the run-length CSV here instead of standard output");
    }

    int run() const
    {
        const auto [t1, t2] = parse_pair(theta, "--theta");
        const auto [a, b] = parse_pair(support, "--support");
        const tbeta_params ic{t1, t2, a, b};
        std::vector<tbeta_shift> grid;
        for (const auto& s : shifts) {
            const auto [d1, d2] = parse_pair(s, "--shift");
            if (!(t1 + d1 > 0.0) || !(t2 + d2 > 0.0))
                throw Failure{kUsage, "--shift " + s + " leaves a non-positive shape parameter"};
            grid.push_back({d1, d2});
        }
        ChartOptions scaled = chart;
        std::size_t reps = paper_scale ? 5000 : 500;
        if (boot_opt->count() == 0)
            scaled.boot_reps = paper_scale ? 5000 : 1000;
        if (reps_opt->count() > 0)
            reps = replications;

        const auto cfg = scaled.config(percentiles.front(), seed, 1);
        tbeta_sim_options opt;
        tbeta_sim_options_default(&opt);
        opt.n = n;
        opt.k = k;
        opt.replications = reps;
        opt.run_cap = run_cap;
        opt.seed = seed;
        opt.protocol = protocol == "fixed" ? TBETA_LIMITS_FIXED : TBETA_LIMITS_PER_REPLICATION;
        opt.phase2_source = phase2 == "estimate" ? TBETA_PHASE2_PHASE1_ESTIMATE : TBETA_PHASE2_TRUE_PARAMETERS;
        opt.threads = threads;

        tbeta_grid* raw = nullptr;
        check(tbeta_shift_grid(&ic, grid.data(), grid.size(), percentiles.data(), percentiles.size(), fars.data(),
                               fars.size(), &cfg, &opt, &raw),
              "arl");
        GridHandle result(raw);
        check(tbeta_grid_write_csv(result.get(), out.empty() ? nullptr : out.c_str()), "writing run-length CSV");

        bool all_ok = true;
        for (std::size_t i = 0; i < tbeta_grid_size(result.get()); ++i) {
            tbeta_grid_cell cell{};
            check(tbeta_grid_cell_at(result.get(), i, &cell), "grid cell");
            if (!cell.ok) {
                all_ok = false;
                std::cerr << "cell (" << cell.shift.d_theta1 << ", " << cell.shift.d_theta2 << ", p=" << cell.p
                          << ", nu=" << cell.far << ") failed: " << cell.error << '\n';
            } else if (!out.empty()) {
                std::cout << "d_theta=(" << cell.shift.d_theta1 << ", " << cell.shift.d_theta2 << ") p=" << cell.p
                          << " nu=" << cell.far << "  ARL=" << fixed(cell.summary.arl, 3)
                          << " SDRL=" << fixed(cell.summary.sdrl, 3) << "  (" << cell.summary.replications
                          << " runs, " << cell.summary.truncated_runs << " truncated)\n";
            }
        }
        return all_ok ? kOk : kNumericFailure;
    }
};

// ---- datasets --------------------------------------------------------------

int datasets_list()
{
    for (std::size_t i = 0; i < tbeta_embedded_count(); ++i)
        std::cout << tbeta_embedded_name(i) << "  " << tbeta_embedded_description(i) << '\n';
    return kOk;
}

int datasets_dump(const std::string& name, bool drop_first, const std::string& out)
{
    tbeta_data* raw = nullptr;
    check(tbeta_data_from_embedded(name.c_str(), &raw), "datasets");
    DataHandle data(raw);
    if (drop_first)
        check(tbeta_data_drop_first(data.get(), 1), "datasets");
    check(tbeta_write_observations_csv(tbeta_data_values(data.get()), tbeta_data_size(data.get()),
                                       out.empty() ? nullptr : out.c_str()),
          "datasets");
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Percentile control charts for truncated beta data (studentized bootstrap)"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tbeta_version()));

    FitCommand fit;
    fit.attach(app.add_subcommand("fit", "Fit a truncated beta law and test goodness of fit"));
    LimitsCommand limits;
    limits.attach(app.add_subcommand("limits", "Build Phase-I control limits"));
    MonitorCommand monitor;
    monitor.attach(app.add_subcommand("monitor", "Check Phase-II subgroups against limits"));
    ArlCommand arl;
    arl.attach(app.add_subcommand("arl", "Monte Carlo run-length study"));

    auto* datasets = app.add_subcommand("datasets", "List or dump the embedded datasets");
    datasets->require_subcommand(1);
    datasets->add_subcommand("list", "List embedded datasets");
    auto* dump = datasets->add_subcommand("dump", "Write an embedded dataset as observation CSV");
    std::string dump_name;
    bool dump_drop = false;
    std::string dump_out;
    dump->add_option("name", dump_name, "Dataset name")->required();
    dump->add_flag("--drop-first", dump_drop, "Omit the first observation");
    dump->add_option("--out", dump_out, "Output path (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (app.got_subcommand("fit"))
            return fit.run();
        if (app.got_subcommand("limits"))
            return limits.run();
        if (app.got_subcommand("monitor"))
            return monitor.run();
        if (app.got_subcommand("arl"))
            return arl.run();
        if (datasets->got_subcommand("list"))
            return datasets_list();
        return datasets_dump(dump_name, dump_drop, dump_out);
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << '\n';
        return f.code;
    }
}
