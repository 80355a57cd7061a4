#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "tbeta/datasets.hpp"
#include "tbeta/error.hpp"
#include "tbeta/estimate.hpp"

using namespace tbeta;

namespace {

std::vector<double> rh(const char* name)
{
    const auto* ds = find_embedded(name);
    REQUIRE(ds != nullptr);
    return {ds->values.begin() + 1, ds->values.end()};
}

} // namespace

TEST_CASE("log-likelihood closed-form cases")
{
    CHECK(log_likelihood(std::vector{0.5}, {1.0, 1.0, 0.0, 1.0}) == doctest::Approx(0.0));
    CHECK(log_likelihood(std::vector{0.2, 0.4}, {1.0, 1.0, 0.0, 0.5}) == doctest::Approx(2.0 * std::log(2.0)));
    CHECK_THROWS_AS(log_likelihood(std::vector{0.2, 0.7}, {1.0, 1.0, 0.0, 0.5}), DataError);
    CHECK(log_likelihood(std::vector<double>{}, {1.0, 1.0, 0.0, 1.0}) == 0.0);
}

TEST_CASE("log-likelihood of the 2007 data matches the quadrature density")
{
    const auto x = rh("rh-may-2007");
    REQUIRE(x.size() == 30);
    double ref = 0.0;
    for (double v : x)
        ref += std::log(oracle::tbeta_pdf(v, 7.448, 2.154, 0.3, 1.0));
    CHECK(std::fabs(log_likelihood(x, {7.448, 2.154, 0.3, 1.0}) - ref) <= 1e-6);
}

TEST_CASE("untruncated log-likelihood equals the beta log-density sum")
{
    const auto x = sample({2.5, 4.0, 0.0, 1.0}, 200, 3);
    double ref = 0.0;
    for (double v : x)
        ref += std::log(oracle::beta_pdf(v, 2.5, 4.0));
    CHECK(std::fabs(log_likelihood(x, {2.5, 4.0, 0.0, 1.0}) - ref) <= 1e-9 * std::max(1.0, std::fabs(ref)));
}

TEST_CASE("maximum likelihood on the relative humidity data")
{
    const auto f07 = fit_mle(rh("rh-may-2007"), 0.3, 1.0);
    REQUIRE(f07.converged);
    CHECK(std::fabs(f07.params.theta1 - 7.448) <= 0.01);
    CHECK(std::fabs(f07.params.theta2 - 2.154) <= 0.01);
    CHECK(f07.params.a == 0.3);
    CHECK(f07.params.b == 1.0);
    CHECK(std::isfinite(f07.loglik));

    const auto f08 = fit_mle(rh("rh-may-2008"), 0.3, 1.0);
    REQUIRE(f08.converged);
    CHECK(std::fabs(f08.params.theta1 - 1.344) <= 0.01);
    CHECK(std::fabs(f08.params.theta2 - 1.091) <= 0.01);
}

TEST_CASE("the fit is a stationary point of the likelihood")
{
    for (const char* name : {"rh-may-2007", "rh-may-2008"}) {
        const auto x = rh(name);
        const auto fit = fit_mle(x, 0.3, 1.0);
        for (double d1 : {-0.001, 0.0, 0.001})
            for (double d2 : {-0.001, 0.0, 0.001}) {
                TbetaParams q = fit.params;
                q.theta1 *= 1.0 + d1;
                q.theta2 *= 1.0 + d2;
                CHECK(log_likelihood(x, q) <= fit.loglik + 1e-6);
            }
    }
}

TEST_CASE("synthetic recovery")
{
    const auto x = sample({2.0, 15.0, 0.0, 0.5}, 10000, 11);
    const auto fit = fit_mle(x, 0.0, 0.5);
    REQUIRE(fit.converged);
    CHECK(std::fabs(fit.params.theta1 / 2.0 - 1.0) < 0.05);
    CHECK(std::fabs(fit.params.theta2 / 15.0 - 1.0) < 0.05);
}

TEST_CASE("the fit ignores the subgrouping and the start point")
{
    const auto x = sample({3.0, 2.0, 0.1, 0.9}, 60, 5);
    const auto by10 = fit_mle(SubgroupData(x, 10), 0.1, 0.9);
    const auto by3 = fit_mle(SubgroupData(x, 3), 0.1, 0.9);
    const auto flat = fit_mle(x, 0.1, 0.9);
    CHECK(by10.params.theta1 == flat.params.theta1);
    CHECK(by3.params.theta2 == flat.params.theta2);
    const auto far_start = fit_mle(x, 0.1, 0.9, std::pair{40.0, 0.3});
    CHECK(far_start.params.theta1 == doctest::Approx(flat.params.theta1).epsilon(1e-5));
    CHECK(far_start.params.theta2 == doctest::Approx(flat.params.theta2).epsilon(1e-5));
}

TEST_CASE("fit input errors")
{
    CHECK_THROWS_AS(fit_mle(std::vector{0.4, 0.4, 0.4}, 0.0, 1.0), DataError);
    CHECK_THROWS_AS(fit_mle(std::vector{0.4, 1.2}, 0.0, 1.0), DataError);
    CHECK_THROWS_AS(fit_mle(std::vector{0.4}, 0.0, 1.0), DataError);
    CHECK_THROWS_AS(fit_mle(std::vector{0.4, 0.5}, 0.5, 0.4), DomainError);
    CHECK_THROWS_AS(SubgroupData({0.1, 0.2, 0.3}, 2), DataError);
    CHECK_THROWS_AS(SubgroupData({0.1, 0.2}, 1), DataError);
}

TEST_CASE("moment start lands inside the clamp box")
{
    const auto [t1, t2] = moment_start(rh("rh-may-2007"), 0.3, 1.0);
    CHECK(t1 >= 0.1);
    CHECK(t1 <= 100.0);
    CHECK(t2 >= 0.1);
    CHECK(t2 <= 100.0);
}

TEST_CASE("percentile estimates")
{
    const auto f08 = fit_mle(rh("rh-may-2008"), 0.3, 1.0);
    CHECK(std::fabs(percentile_estimate(f08, 0.9) - 0.926) <= 0.001);

    FitResult sym;
    sym.params = {4.0, 4.0, 0.0, 1.0};
    sym.converged = true;
    CHECK(percentile_estimate(sym, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    sym.converged = false;
    CHECK_THROWS_AS(percentile_estimate(sym, 0.5), ConvergenceError);
}

TEST_CASE("Kolmogorov-Smirnov statistic")
{
    for (auto [name, want] : {std::pair{"rh-may-2007", 0.1138}, {"rh-may-2008", 0.127}}) {
        const auto x = rh(name);
        const auto fit = fit_mle(x, 0.3, 1.0);
        CHECK(std::fabs(ks_statistic(x, fit.params) - want) <= 0.001);
    }

    const TbetaParams prm{2.0, 15.0, 0.0, 0.5};
    const std::size_t n = 25;
    std::vector<double> q;
    for (std::size_t i = 1; i <= n; ++i)
        q.push_back(quantile((i - 0.5) / n, prm));
    CHECK(ks_statistic(q, prm) == doctest::Approx(0.5 / n).epsilon(1e-9));

    CHECK_THROWS_AS(ks_statistic(std::vector<double>{}, prm), DataError);
}

TEST_CASE("Kolmogorov-Smirnov statistic is order invariant")
{
    auto x = rh("rh-may-2008");
    const TbetaParams prm{1.344, 1.091, 0.3, 1.0};
    const double base = ks_statistic(x, prm);
    std::mt19937 gen(1);
    for (int i = 0; i < 10; ++i) {
        std::shuffle(x.begin(), x.end(), gen);
        CHECK(ks_statistic(x, prm) == base);
    }
}

TEST_CASE("Kolmogorov-Smirnov bootstrap p-value")
{
    const TbetaParams prm{7.448, 2.154, 0.3, 1.0};
    CHECK(ks_pvalue(0.0, 30, prm, 1000, 1).pvalue == 1.0);
    CHECK(ks_pvalue(1.0, 30, prm, 1000, 1).pvalue <= 1.0 / 1000);
    CHECK_THROWS_AS(ks_pvalue(0.1, 30, prm, 999, 1), DomainError);

    const auto x = rh("rh-may-2007");
    const auto fit = fit_mle(x, 0.3, 1.0);
    const double stat = ks_statistic(x, fit.params);
    const auto pv = ks_pvalue(stat, x.size(), fit.params, 2000, 1);
    CHECK(pv.used + pv.failed == 2000);
    // Refitting each replicate shrinks the null distribution of the statistic.
    CHECK(pv.pvalue < ks_asymptotic_pvalue(stat, x.size()));
    CHECK(pv.pvalue > 0.1);

    const auto again = ks_pvalue(stat, x.size(), fit.params, 2000, 1, 1);
    CHECK(again.pvalue == pv.pvalue);
    CHECK(again.used == pv.used);
}

TEST_CASE("asymptotic Kolmogorov p-value")
{
    // Jacobi theta form of the same tail: 1 - sqrt(2 pi) / l * sum exp(-(2k-1)^2 pi^2 / (8 l^2)).
    const auto theta_form = [](double l) {
        double s = 0.0;
        for (int k = 1; k <= 50; ++k)
            s += std::exp(-(2.0 * k - 1) * (2.0 * k - 1) * M_PI * M_PI / (8.0 * l * l));
        return 1.0 - std::sqrt(2.0 * M_PI) / l * s;
    };
    for (double l : {0.4, 0.62, 1.0, 1.36, 2.0}) {
        const double stat = l / std::sqrt(50.0);
        CHECK(ks_asymptotic_pvalue(stat, 50) == doctest::Approx(theta_form(l)).epsilon(1e-10));
    }
    CHECK(ks_asymptotic_pvalue(0.0, 30) == 1.0);
    CHECK(ks_asymptotic_pvalue(1.0, 30) < 1e-20);

    for (auto [name, want] : {std::pair{"rh-may-2007", 0.8317}, {"rh-may-2008", 0.714}}) {
        const auto x = rh(name);
        const auto fit = fit_mle(x, 0.3, 1.0);
        CHECK(std::fabs(ks_asymptotic_pvalue(ks_statistic(x, fit.params), x.size()) - want) <= 0.001);
    }
}
