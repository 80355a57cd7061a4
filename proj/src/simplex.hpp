#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace tbeta::detail {

struct SimplexOptions {
    double initial_step = 0.5;
    double restart_step = 0.05;
    double diameter_tol = 1e-8;
    int max_iterations = 4000;
    int max_restarts = 3;
};

template <std::size_t N>
struct SimplexResult {
    std::array<double, N> x{};
    double value = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

// Nelder-Mead minimization with standard coefficients (reflect 1, expand 2,
// contract 1/2, shrink 1/2). Converged means the largest vertex distance from
// the best vertex fell below diameter_tol; the search is then restarted from
// the best point with a small simplex until a restart no longer improves it.
// Non-finite objective values are treated as +infinity.
template <std::size_t N, class Objective>
SimplexResult<N> minimize_simplex(Objective&& objective, const std::array<double, N>& start,
                                  const SimplexOptions& options = {})
{
    using Point = std::array<double, N>;
    constexpr double kInf = std::numeric_limits<double>::infinity();

    const auto eval = [&](const Point& x) {
        const double v = objective(x);
        return std::isfinite(v) ? v : kInf;
    };

    SimplexResult<N> result;
    result.x = start;
    result.value = eval(start);

    std::array<Point, N + 1> vertex;
    std::array<double, N + 1> value;

    const auto run = [&](const Point& origin, double origin_value, double step) {
        vertex[0] = origin;
        value[0] = origin_value;
        for (std::size_t i = 0; i < N; ++i) {
            vertex[i + 1] = origin;
            vertex[i + 1][i] += step;
            value[i + 1] = eval(vertex[i + 1]);
        }
        std::array<std::size_t, N + 1> order;
        bool converged = false;
        while (result.iterations < options.max_iterations) {
            for (std::size_t i = 0; i <= N; ++i)
                order[i] = i;
            std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return value[l] < value[r]; });
            const std::size_t best = order[0];
            const std::size_t worst = order[N];
            const std::size_t second = order[N - 1];

            double diameter = 0.0;
            for (std::size_t i = 0; i <= N; ++i) {
                double d2 = 0.0;
                for (std::size_t j = 0; j < N; ++j) {
                    const double d = vertex[i][j] - vertex[best][j];
                    d2 += d * d;
                }
                diameter = std::max(diameter, std::sqrt(d2));
            }
            if (diameter < options.diameter_tol && std::isfinite(value[best])) {
                converged = true;
                break;
            }
            ++result.iterations;

            Point centroid{};
            for (std::size_t i = 0; i <= N; ++i) {
                if (i == worst)
                    continue;
                for (std::size_t j = 0; j < N; ++j)
                    centroid[j] += vertex[i][j] / static_cast<double>(N);
            }
            const auto along = [&](double t) {
                Point p;
                for (std::size_t j = 0; j < N; ++j)
                    p[j] = centroid[j] + t * (vertex[worst][j] - centroid[j]);
                return p;
            };

            const Point reflected = along(-1.0);
            const double fr = eval(reflected);
            if (fr < value[best]) {
                const Point expanded = along(-2.0);
                const double fe = eval(expanded);
                if (fe < fr) {
                    vertex[worst] = expanded;
                    value[worst] = fe;
                } else {
                    vertex[worst] = reflected;
                    value[worst] = fr;
                }
                continue;
            }
            if (fr < value[second]) {
                vertex[worst] = reflected;
                value[worst] = fr;
                continue;
            }
            // Outside contraction when the reflection beats the worst vertex,
            // inside contraction otherwise.
            const bool outside = fr < value[worst];
            const Point contracted = along(outside ? -0.5 : 0.5);
            const double fc = eval(contracted);
            if (fc < (outside ? fr : value[worst])) {
                vertex[worst] = contracted;
                value[worst] = fc;
                continue;
            }
            for (std::size_t i = 0; i <= N; ++i) {
                if (i == best)
                    continue;
                for (std::size_t j = 0; j < N; ++j)
                    vertex[i][j] = vertex[best][j] + 0.5 * (vertex[i][j] - vertex[best][j]);
                value[i] = eval(vertex[i]);
            }
        }
        const auto best = static_cast<std::size_t>(std::min_element(value.begin(), value.end()) - value.begin());
        return std::pair{best, converged};
    };

    double step = options.initial_step;
    for (int attempt = 0; attempt <= options.max_restarts; ++attempt) {
        const auto [best, converged] = run(result.x, result.value, step);
        const double previous = result.value;
        if (value[best] <= result.value) {
            result.x = vertex[best];
            result.value = value[best];
        }
        result.converged = converged;
        if (!converged)
            break;
        if (attempt > 0 && !(result.value < previous - 1e-10 * (1.0 + std::fabs(previous))))
            break;
        step = options.restart_step;
    }
    return result;
}

} // namespace tbeta::detail
