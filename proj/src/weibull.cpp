#include "lexi/weibull.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "lexi/error.hpp"
#include "nelder_mead.hpp"

namespace lexi::weibull {

void Params::validate() const {
    if (!(p > 0.0 && p < 1.0) || !(beta > 0.0) || !std::isfinite(beta)) {
        throw Error(ErrorKind::InvalidParams,
                    "discrete Weibull needs 0 < p < 1 and beta > 0 (got p=" + std::to_string(p) +
                        ", beta=" + std::to_string(beta) + ")");
    }
}

namespace {

// (1-p)^(k^beta), evaluated in log space so large k cannot overflow.
double survival(std::uint64_t k, const Params& params) {
    if (k == 0) return 1.0;
    return std::exp(std::pow(static_cast<double>(k), params.beta) * std::log1p(-params.p));
}

}  // namespace

double pmf(std::uint64_t k, const Params& params) {
    params.validate();
    return survival(k, params) - survival(k + 1, params);
}

double cdf(std::uint64_t k, const Params& params) {
    params.validate();
    if (k == 0) return 0.0;
    return -std::expm1(std::pow(static_cast<double>(k), params.beta) * std::log1p(-params.p));
}

double hazard(std::uint64_t k, const Params& params) {
    params.validate();
    const double kb = std::pow(static_cast<double>(k), params.beta);
    const double k1b = std::pow(static_cast<double>(k + 1), params.beta);
    return -std::expm1((k1b - kb) * std::log1p(-params.p));
}

TimeSeries sample(const Params& params, std::size_t n, RngSeed seed) {
    params.validate();
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "sample size must be >= 1");
    Rng rng(seed);
    const double log_q = std::log1p(-params.p);
    TimeSeries out;
    out.label = "weibull_sample";
    out.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Smallest k with (k+1)^beta > ln(1-U)/ln(1-p).
        const double t = std::log1p(-rng.uniform()) / log_q;
        out.values.push_back(std::floor(std::pow(t, 1.0 / params.beta)));
    }
    return out;
}

Histogram Histogram::from_series(const TimeSeries& s) {
    Histogram h;
    for (double v : s.values) {
        if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) {
            throw Error(ErrorKind::InvalidArgument, "histogram values must be non-negative integers");
        }
        const auto k = static_cast<std::size_t>(v);
        if (k >= h.counts.size()) h.counts.resize(k + 1, 0.0);
        h.counts[k] += 1.0;
        h.total += 1.0;
    }
    return h;
}

Histogram Histogram::from_weights(std::vector<double> weights) {
    Histogram h;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorKind::InvalidArgument, "bin weights must be finite and >= 0");
        h.total += w;
    }
    h.counts = std::move(weights);
    return h;
}

double Histogram::frequency(std::size_t k) const {
    if (k >= counts.size() || total <= 0.0) return 0.0;
    return counts[k] / total;
}

std::vector<double> Histogram::frequencies() const {
    std::vector<double> f(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) f[k] = frequency(k);
    return f;
}

std::size_t Histogram::populated_bins(bool include_zero_bin) const {
    std::size_t n = 0;
    for (std::size_t k = include_zero_bin ? 0 : 1; k < counts.size(); ++k) n += counts[k] > 0.0;
    return n;
}

double sum_squared_residuals(const Histogram& hist, const Params& params, const FitOptions& options) {
    double sse = 0.0;
    for (std::size_t k = options.include_zero_bin ? 0 : 1; k < hist.counts.size(); ++k) {
        if (!(hist.counts[k] > 0.0)) continue;
        const double model = pmf(k, params);
        const double observed = hist.frequency(k);
        const double r = options.log_weighting ? std::log(observed) - std::log(std::max(model, 1e-300))
                                               : observed - model;
        sse += r * r;
    }
    return sse;
}

Fit fit(const Histogram& hist, const FitOptions& options) {
    const std::size_t bins = hist.populated_bins(options.include_zero_bin);
    if (bins < 3) {
        throw Error(ErrorKind::FitFailed,
                    "need at least 3 populated bins, histogram has " + std::to_string(bins));
    }

    // Grid seed; ties broken by lowest sse, then lexicographically by (p, beta).
    Params seed{0.05, 0.25};
    double seed_sse = HUGE_VAL;
    for (int i = 1; i <= 19; ++i) {
        for (int j = 1; j <= 16; ++j) {
            const Params cand{0.05 * i, 0.25 * j};
            const double v = sum_squared_residuals(hist, cand, options);
            if (std::tie(v, cand.p, cand.beta) < std::tie(seed_sse, seed.p, seed.beta)) {
                seed = cand;
                seed_sse = v;
            }
        }
    }

    auto to_params = [](const std::array<double, 2>& x) {
        return Params{1.0 / (1.0 + std::exp(-x[0])), std::exp(x[1])};
    };
    auto objective = [&](const std::array<double, 2>& x) {
        const Params prm = to_params(x);
        if (!(prm.p > 0.0 && prm.p < 1.0) || !(prm.beta > 0.0) || !std::isfinite(prm.beta)) return HUGE_VAL;
        return sum_squared_residuals(hist, prm, options);
    };

    std::array<double, 2> x{std::log(seed.p / (1.0 - seed.p)), std::log(seed.beta)};
    double best = objective(x);
    // Restart from the incumbent until a restart stops improving.
    for (int restart = 0; restart < 8; ++restart) {
        const auto r = detail::nelder_mead<2>(objective, x, restart == 0 ? 0.2 : 0.02, 1e-12, 4000);
        const bool improved = r.value < best;
        if (r.value <= best) {
            x = r.x;
            best = r.value;
        }
        if (!improved) break;
    }

    const Params result = to_params(x);
    if (!std::isfinite(best)) throw Error(ErrorKind::FitFailed, "least-squares objective is not finite");
    try {
        result.validate();
    } catch (const Error&) {
        throw Error(ErrorKind::FitFailed, "fit left the parameter domain");
    }
    return {result, best, bins};
}

}  // namespace lexi::weibull
