#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "tbeta/tbeta.h"

namespace {

std::vector<double> embedded(const char* name, bool drop_first = true)
{
    tbeta_data* d = nullptr;
    REQUIRE(tbeta_data_from_embedded(name, &d) == TBETA_OK);
    if (drop_first)
        REQUIRE(tbeta_data_drop_first(d, 1) == TBETA_OK);
    std::vector<double> out(tbeta_data_values(d), tbeta_data_values(d) + tbeta_data_size(d));
    tbeta_data_free(d);
    return out;
}

} // namespace

TEST_CASE("version and status names")
{
    CHECK(std::strlen(tbeta_version()) > 0);
    CHECK(std::string(tbeta_status_name(TBETA_OK)) == "ok");
    CHECK(std::string(tbeta_status_name(TBETA_ERR_DATA)) == "data error");
}

TEST_CASE("distribution functions and error codes")
{
    const tbeta_params prm{2.0, 15.0, 0.0, 0.5};
    double v = 0.0;
    CHECK(tbeta_pdf(0.7, &prm, &v) == TBETA_OK);
    CHECK(v == 0.0);
    CHECK(tbeta_cdf(0.5, &prm, &v) == TBETA_OK);
    CHECK(v == 1.0);
    CHECK(tbeta_quantile(0.3, &prm, &v) == TBETA_OK);
    double back = 0.0;
    CHECK(tbeta_cdf(v, &prm, &back) == TBETA_OK);
    CHECK(back == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(tbeta_incomplete_beta(0.3, 1.0, 1.0, &v) == TBETA_OK);
    CHECK(v == doctest::Approx(0.3));

    const tbeta_params bad{-1.0, 2.0, 0.0, 1.0};
    CHECK(tbeta_validate_params(&bad) == TBETA_ERR_DOMAIN);
    CHECK(std::strlen(tbeta_last_error()) > 0);
    CHECK(tbeta_pdf(0.5, &bad, &v) == TBETA_ERR_DOMAIN);
    CHECK(tbeta_pdf(0.5, nullptr, &v) == TBETA_ERR_ARGUMENT);
    CHECK(tbeta_quantile(0.5, &prm, nullptr) == TBETA_ERR_ARGUMENT);
    CHECK(tbeta_validate_params(&prm) == TBETA_OK);
}

TEST_CASE("sampling through the C interface is deterministic")
{
    const tbeta_params prm{2.0, 15.0, 0.0, 0.5};
    std::vector<double> x(100), y(100);
    CHECK(tbeta_sample(&prm, x.size(), 9, x.data()) == TBETA_OK);
    CHECK(tbeta_sample(&prm, y.size(), 9, y.data()) == TBETA_OK);
    CHECK(x == y);
}

TEST_CASE("data handles")
{
    CHECK(tbeta_embedded_count() == 2);
    CHECK(std::string(tbeta_embedded_name(0)) == "rh-may-2007");
    CHECK(tbeta_embedded_name(5) == nullptr);

    tbeta_data* d = nullptr;
    CHECK(tbeta_data_from_embedded("missing", &d) == TBETA_ERR_DATA);
    CHECK(tbeta_data_from_csv("/nonexistent.csv", &d) == TBETA_ERR_DATA);

    const double vals[] = {0.1, 0.2, 0.3};
    REQUIRE(tbeta_data_from_values(vals, 3, &d) == TBETA_OK);
    CHECK(tbeta_data_size(d) == 3);
    CHECK(tbeta_data_drop_first(d, 4) == TBETA_ERR_DATA);
    CHECK(tbeta_data_drop_first(d, 2) == TBETA_OK);
    CHECK(tbeta_data_size(d) == 1);
    CHECK(tbeta_data_values(d)[0] == 0.3);
    tbeta_data_free(d);
    tbeta_data_free(nullptr);
    CHECK(tbeta_data_size(nullptr) == 0);
}

TEST_CASE("CSV export and re-import")
{
    const auto x = embedded("rh-may-2007");
    const char* path = "test_c_api_roundtrip.csv";
    REQUIRE(tbeta_write_observations_csv(x.data(), x.size(), path) == TBETA_OK);
    tbeta_data* d = nullptr;
    REQUIRE(tbeta_data_from_csv(path, &d) == TBETA_OK);
    CHECK(std::vector<double>(tbeta_data_values(d), tbeta_data_values(d) + tbeta_data_size(d)) == x);
    tbeta_data_free(d);
    std::remove(path);

    char buf[32];
    CHECK(tbeta_format_double(0.25, buf, sizeof buf) == TBETA_OK);
    CHECK(std::string(buf) == "0.25");
    char tiny[3];
    CHECK(tbeta_format_double(0.25, tiny, sizeof tiny) == TBETA_ERR_ARGUMENT);
}

TEST_CASE("fitting and goodness of fit")
{
    const auto x = embedded("rh-may-2007");
    tbeta_fit_result fit{};
    REQUIRE(tbeta_fit(x.data(), x.size(), 0.3, 1.0, nullptr, &fit) == TBETA_OK);
    CHECK(fit.converged);
    CHECK(std::fabs(fit.params.theta1 - 7.448) <= 0.01);
    CHECK(std::fabs(fit.params.theta2 - 2.154) <= 0.01);

    double ll = 0.0;
    CHECK(tbeta_log_likelihood(x.data(), x.size(), &fit.params, &ll) == TBETA_OK);
    CHECK(ll == doctest::Approx(fit.loglik).epsilon(1e-12));

    double ks = 0.0;
    CHECK(tbeta_ks_statistic(x.data(), x.size(), &fit.params, &ks) == TBETA_OK);
    CHECK(std::fabs(ks - 0.1138) <= 0.001);
    tbeta_ks_pvalue_result pv{};
    CHECK(tbeta_ks_pvalue(ks, x.size(), &fit.params, 500, 1, 0, &pv) == TBETA_ERR_DOMAIN);
    CHECK(tbeta_ks_pvalue(0.0, x.size(), &fit.params, 1000, 1, 0, &pv) == TBETA_OK);
    CHECK(pv.pvalue == 1.0);

    const double out_of_support[] = {0.2, 0.5, 0.6};
    CHECK(tbeta_fit(out_of_support, 3, 0.3, 1.0, nullptr, &fit) == TBETA_ERR_DATA);
    const double flat[] = {0.5, 0.5, 0.5};
    CHECK(tbeta_fit(flat, 3, 0.3, 1.0, nullptr, &fit) == TBETA_ERR_DATA);
}

TEST_CASE("limits and monitoring")
{
    const auto x07 = embedded("rh-may-2007");
    tbeta_chart_config cfg;
    tbeta_chart_config_default(&cfg);
    CHECK(cfg.center_mode == TBETA_CENTER_PHASE1_ESTIMATE);
    CHECK(cfg.boot_mode == TBETA_BOOT_PARAMETRIC);
    cfg.boot_reps = 99;
    tbeta_limits lim{};
    CHECK(tbeta_build_limits(x07.data(), x07.size(), 10, 0.3, 1.0, &cfg, &lim) == TBETA_ERR_DOMAIN);
    cfg.boot_reps = 300;
    CHECK(tbeta_build_limits(x07.data(), x07.size(), 7, 0.3, 1.0, &cfg, &lim) == TBETA_ERR_DATA);
    REQUIRE(tbeta_build_limits(x07.data(), x07.size(), 10, 0.3, 1.0, &cfg, &lim) == TBETA_OK);
    CHECK(lim.lcl < lim.cl);
    CHECK(lim.cl < lim.ucl);
    CHECK(lim.p == cfg.p);
    CHECK(lim.boot_reps == 300);

    const auto x08 = embedded("rh-may-2008");
    std::vector<tbeta_verdict> v(3);
    size_t got = 0;
    CHECK(tbeta_monitor(x08.data(), x08.size(), 10, &lim, 0.3, 1.0, 0.9, v.data(), 2, &got) == TBETA_ERR_ARGUMENT);
    REQUIRE(tbeta_monitor(x08.data(), x08.size(), 10, &lim, 0.3, 1.0, 0.9, v.data(), v.size(), &got) == TBETA_OK);
    CHECK(got == 3);
    for (size_t i = 0; i < got; ++i) {
        CHECK(v[i].subgroup_index == i + 1);
        CHECK((v[i].in_control != 0) == (v[i].statistic >= lim.lcl && v[i].statistic <= lim.ucl));
    }

    tbeta_verdict one{};
    CHECK(tbeta_evaluate_subgroup(x08.data(), 10, &lim, 0.3, 1.0, 0.9, 1, &one) == TBETA_OK);
    CHECK(one.statistic == v[0].statistic);
}

TEST_CASE("run-length studies")
{
    const tbeta_params ic{2.0, 15.0, 0.0, 0.5};
    tbeta_chart_config cfg;
    tbeta_chart_config_default(&cfg);
    cfg.p = 0.5;
    cfg.far = 0.05;
    cfg.boot_reps = 100;
    tbeta_sim_options opt;
    tbeta_sim_options_default(&opt);
    CHECK(opt.run_cap == 20000);
    opt.k = 5;
    opt.replications = 6;
    opt.run_cap = 100;

    const tbeta_shift shifts[] = {{0.0, 0.0}, {-9.0, 0.0}};
    tbeta_grid* grid = nullptr;
    REQUIRE(tbeta_shift_grid(&ic, shifts, 2, nullptr, 0, nullptr, 0, &cfg, &opt, &grid) == TBETA_OK);
    CHECK(tbeta_grid_size(grid) == 2);
    tbeta_grid_cell cell{};
    REQUIRE(tbeta_grid_cell_at(grid, 0, &cell) == TBETA_OK);
    CHECK(cell.ok);
    CHECK(std::string(cell.error).empty());
    CHECK(cell.seed == tbeta_cell_seed(opt.seed, &shifts[0], cfg.p, cfg.far));

    tbeta_sim_options direct = opt;
    direct.seed = cell.seed;
    tbeta_run_length_summary s{};
    REQUIRE(tbeta_simulate_run_length(&ic, &shifts[0], &cfg, &direct, &s) == TBETA_OK);
    CHECK(s.arl == cell.summary.arl);
    CHECK(s.sdrl == cell.summary.sdrl);

    REQUIRE(tbeta_grid_cell_at(grid, 1, &cell) == TBETA_OK);
    CHECK_FALSE(cell.ok);
    CHECK(std::strlen(cell.error) > 0);
    CHECK(tbeta_grid_cell_at(grid, 2, &cell) == TBETA_ERR_ARGUMENT);
    tbeta_grid_free(grid);

    CHECK(tbeta_shift_grid(&ic, shifts, 0, nullptr, 0, nullptr, 0, &cfg, &opt, &grid) == TBETA_ERR_DOMAIN);

    tbeta_geometric_check g{};
    s.arl = 200.0;
    s.sdrl = 199.5;
    s.replications = 500;
    REQUIRE(tbeta_sdrl_check(&s, 0.005, &g) == TBETA_OK);
    CHECK(g.arl_target == doctest::Approx(200.0));
    CHECK(g.sdrl_target == doctest::Approx(199.4994).epsilon(1e-6));
}
