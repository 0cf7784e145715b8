#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>

namespace lexi::detail {

template <std::size_t N>
struct SimplexResult {
    std::array<double, N> x{};
    double value = 0.0;
    std::size_t evaluations = 0;
};

/// Derivative-free minimisation with the standard reflection / expansion /
/// contraction / shrink coefficients (1, 2, 0.5, 0.5). Deterministic.
template <std::size_t N, typename Fn>
SimplexResult<N> nelder_mead(Fn&& fn, std::array<double, N> start, double step, double x_tol,
                             std::size_t max_evaluations) {
    std::array<std::array<double, N>, N + 1> pts{};
    std::array<double, N + 1> vals{};
    std::size_t evals = 0;
    auto eval = [&](const std::array<double, N>& x) {
        ++evals;
        const double v = fn(x);
        return std::isfinite(v) ? v : HUGE_VAL;
    };

    pts[0] = start;
    for (std::size_t i = 0; i < N; ++i) {
        pts[i + 1] = start;
        pts[i + 1][i] += step;
    }
    for (std::size_t i = 0; i <= N; ++i) vals[i] = eval(pts[i]);

    std::array<std::size_t, N + 1> idx{};
    while (evals < max_evaluations) {
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = idx[0], worst = idx[N], second = idx[N - 1];

        double size = 0.0;
        for (std::size_t i = 0; i <= N; ++i) {
            for (std::size_t d = 0; d < N; ++d) size = std::max(size, std::abs(pts[i][d] - pts[best][d]));
        }
        if (size < x_tol) break;

        std::array<double, N> centroid{};
        for (std::size_t i = 0; i <= N; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < N; ++d) centroid[d] += pts[i][d] / static_cast<double>(N);
        }
        auto along = [&](double t) {
            std::array<double, N> x{};
            for (std::size_t d = 0; d < N; ++d) x[d] = centroid[d] + t * (pts[worst][d] - centroid[d]);
            return x;
        };

        const auto reflected = along(-1.0);
        const double fr = eval(reflected);
        if (fr < vals[best]) {
            const auto expanded = along(-2.0);
            const double fe = eval(expanded);
            if (fe < fr) {
                pts[worst] = expanded, vals[worst] = fe;
            } else {
                pts[worst] = reflected, vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = reflected, vals[worst] = fr;
            continue;
        }
        const bool outside = fr < vals[worst];
        const auto contracted = along(outside ? -0.5 : 0.5);
        const double fc = eval(contracted);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = contracted, vals[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= N; ++i) {
            if (i == best) continue;
            for (std::size_t d = 0; d < N; ++d) pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
            vals[i] = eval(pts[i]);
        }
    }

    const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    return {pts[best], vals[best], evals};
}

}  // namespace lexi::detail
