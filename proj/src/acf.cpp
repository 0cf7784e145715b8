#include "lexi/acf.hpp"

#include <cmath>

#include "lexi/error.hpp"

namespace lexi {

double AcfResult::fraction_below_noise(std::size_t first, std::size_t last) const {
    std::size_t inside = 0, total = 0;
    for (std::size_t i = 0; i < lags.size(); ++i) {
        if (lags[i] < first || lags[i] > last) continue;
        ++total;
        inside += std::abs(rho[i]) < noise_level;
    }
    return total == 0 ? 0.0 : static_cast<double>(inside) / static_cast<double>(total);
}

double noise_level(std::size_t length) {
    if (length < 2) throw Error(ErrorKind::InvalidArgument, "noise level needs T >= 2");
    return 1.96 / std::sqrt(static_cast<double>(length));
}

AcfResult acf(const TimeSeries& s, std::size_t max_lag) {
    const std::size_t n = s.size();
    if (n < 2 || max_lag == 0 || 2 * max_lag >= n) {
        throw Error(ErrorKind::InvalidArgument,
                    "acf needs 1 <= max_lag < T/2 (T=" + std::to_string(n) + ", max_lag=" +
                        std::to_string(max_lag) + ")");
    }
    double mean = 0.0;
    for (double v : s.values) mean += v;
    mean /= static_cast<double>(n);

    std::vector<double> centred(n);
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        centred[i] = s.values[i] - mean;
        denom += centred[i] * centred[i];
    }
    // Relative threshold so near-constant series with rounding noise count as constant.
    if (denom <= 1e-24 * static_cast<double>(n) * (mean * mean + 1e-300)) {
        throw Error(ErrorKind::ZeroVariance, "series is constant");
    }

    AcfResult r;
    r.length = n;
    r.noise_level = noise_level(n);
    r.lags.reserve(max_lag + 1);
    r.rho.reserve(max_lag + 1);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double num = 0.0;
        for (std::size_t i = 0; i + k < n; ++i) num += centred[i] * centred[i + k];
        r.lags.push_back(k);
        r.rho.push_back(num / denom);
    }
    return r;
}

}  // namespace lexi
