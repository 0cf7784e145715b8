#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lexi/series.hpp"

namespace lexi::weibull {

/// Discrete Weibull parameters, 0 < p < 1 and beta > 0. beta = 1 is the
/// geometric distribution with success probability p.
struct Params {
    double p = 0.5;
    double beta = 1.0;

    /// Throws InvalidParams.
    void validate() const;
};

/// f(k) = (1-p)^(k^beta) - (1-p)^((k+1)^beta)
[[nodiscard]] double pmf(std::uint64_t k, const Params& params);

/// F(k) = 1 - (1-p)^(k^beta), i.e. P(X < k).
[[nodiscard]] double cdf(std::uint64_t k, const Params& params);

/// Hazard pmf(k) / (1 - cdf(k)): probability that a mark follows exactly k
/// words given that none came earlier.
[[nodiscard]] double hazard(std::uint64_t k, const Params& params);

/// n i.i.d. draws by inverting the CDF.
[[nodiscard]] TimeSeries sample(const Params& params, std::size_t n, RngSeed seed);

/// Weighted counts per integer bin k = 0, 1, 2, ...
struct Histogram {
    std::vector<double> counts;
    double total = 0.0;

    /// Series values must be non-negative integers.
    [[nodiscard]] static Histogram from_series(const TimeSeries& s);
    /// Bin weights taken as given (e.g. an exact pmf); total is their sum.
    [[nodiscard]] static Histogram from_weights(std::vector<double> weights);

    [[nodiscard]] double frequency(std::size_t k) const;
    [[nodiscard]] std::vector<double> frequencies() const;
    [[nodiscard]] std::size_t populated_bins(bool include_zero_bin) const;
};

struct FitOptions {
    /// Generic histograms keep k = 0; SLV/PMDV data (minimum 1) drop it.
    bool include_zero_bin = true;
    /// Residuals ln(freq) - ln(pmf) instead of freq - pmf, for tail emphasis.
    bool log_weighting = false;
};

struct Fit {
    Params params;
    double sse = 0.0;
    std::size_t bins_used = 0;
};

/// Sum of squared residuals between histogram frequencies and the pmf over
/// populated bins.
[[nodiscard]] double sum_squared_residuals(const Histogram& hist, const Params& params,
                                           const FitOptions& options = {});

/// Least-squares (p, beta): grid seeding over p in {0.05..0.95} x beta in
/// {0.25..4}, then Nelder-Mead refinement in (logit p, log beta).
/// Throws FitFailed when fewer than 3 bins are populated.
[[nodiscard]] Fit fit(const Histogram& hist, const FitOptions& options = {});

}  // namespace lexi::weibull
