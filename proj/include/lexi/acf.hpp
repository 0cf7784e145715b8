#pragma once

#include <cstddef>
#include <vector>

#include "lexi/series.hpp"

namespace lexi {

/// Autocorrelation at lags 0..max_lag; rho(0) = 1.
struct AcfResult {
    std::vector<std::size_t> lags;
    std::vector<double> rho;
    double noise_level = 0.0;
    std::size_t length = 0;

    /// Share of lags in [first, last] whose |rho| lies below the noise level.
    [[nodiscard]] double fraction_below_noise(std::size_t first, std::size_t last) const;
};

/// Biased estimator: every lag is normalised by the full-series variance.
/// Requires max_lag < T/2; throws ZeroVariance on a constant series.
[[nodiscard]] AcfResult acf(const TimeSeries& s, std::size_t max_lag);

/// Two-sided 95% white-noise band, 1.96 / sqrt(T).
[[nodiscard]] double noise_level(std::size_t length);

}  // namespace lexi
