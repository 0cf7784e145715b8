#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lexi/series.hpp"

namespace lexi::mfdfa {

/// Inclusive range of scales used for the log-log slope fit.
struct FitRange {
    std::size_t lo = 0;
    std::size_t hi = 0;

    friend bool operator==(const FitRange&, const FitRange&) = default;
};

struct Config {
    /// Detrending polynomial order m.
    unsigned order = 2;
    /// Empty: -7..7 step 0.25.
    std::vector<double> q_grid;
    /// Empty: `scale_count` log-spaced integers from s_min to floor(T/5),
    /// s_min = max(2(m+1), longest constant run + 1).
    std::vector<std::size_t> scales;
    std::size_t scale_count = 50;
    /// Unset: the full scale grid.
    std::optional<FitRange> fit_range;
    /// Worker cap for the scale loop. Results do not depend on it.
    unsigned threads = 1;

    [[nodiscard]] static std::vector<double> symmetric_q_grid(double q_max, double step);
    [[nodiscard]] static std::vector<std::size_t> log_spaced_scales(std::size_t s_min, std::size_t s_max,
                                                                    std::size_t count);

    /// Fill in defaults for a series of this shape and validate. Throws InvalidConfig.
    [[nodiscard]] Config resolved_for(const TimeSeries& s) const;
    /// As above for a series of `length` whose longest constant run is `longest_run`.
    [[nodiscard]] Config resolved_for(std::size_t length, std::size_t longest_run) const;
    /// Throws InvalidConfig when the grids violate m >= 1, s > m+1, s <= T/5 or q symmetry.
    void validate_for(std::size_t length) const;
    /// Stable `key=value` text (threads excluded) for hashing and echoing.
    [[nodiscard]] std::string canonical() const;
};

/// x_i = u_1 + ... + u_i. The mean is not subtracted; detrending of order
/// m >= 1 absorbs the linear drift a nonzero mean produces.
struct Profile {
    std::vector<double> x;
};

[[nodiscard]] Profile profile(const TimeSeries& s);

/// Detrended variances f^2(nu, s) of the 2*floor(T/s) windows: the first
/// floor(T/s) tile from the left end, the rest from the right end.
/// Windows whose residual is at rounding level are reported as exactly 0.
/// Throws ScaleTooSmall when s <= m+1.
[[nodiscard]] std::vector<double> window_variances(const Profile& x, std::size_t scale, unsigned order);
/// Same windows computed from the increments directly, which keeps the
/// detrending well conditioned for long series.
[[nodiscard]] std::vector<double> window_variances(std::span<const double> series, std::size_t scale,
                                                   unsigned order);

/// q-th order power mean of sqrt(f^2); q = 0 uses the logarithmic limit.
/// Throws DegenerateWindow if a variance is 0 and q <= 0.
[[nodiscard]] double fluctuation(std::span<const double> variances, double q);

/// F_q(s) on the full (q, s) grid, stored q-major.
struct FluctuationMatrix {
    std::vector<double> q;
    std::vector<std::size_t> scales;
    std::vector<std::size_t> window_counts;  // M_s per scale (windows per end)
    std::vector<double> values;

    [[nodiscard]] double at(std::size_t qi, std::size_t si) const { return values[qi * scales.size() + si]; }
    double& at(std::size_t qi, std::size_t si) { return values[qi * scales.size() + si]; }
};

/// Evaluates the grid; the series must match an already-resolved config.
/// Throws DegenerateWindow with the offending scale as detail.
[[nodiscard]] FluctuationMatrix compute_grid(const TimeSeries& s, const Config& resolved);

struct HurstFunction {
    std::vector<double> q;
    std::vector<double> h;
    std::vector<double> r2;
    double hurst = 0.0;    // h at q = 2 (interpolated if 2 is off-grid)
    double delta_h = 0.0;  // h(q_min) - h(q_max)
    FitRange fit_range;
    std::size_t scales_used = 0;
};

/// Per-q least-squares slope of ln F against ln s over the scales in the
/// fit range. Throws BadFitRange when the range leaves the scale grid or
/// holds fewer than 5 scales.
[[nodiscard]] HurstFunction fit_hurst(const FluctuationMatrix& F, FitRange range);

struct TauSpectrum {
    std::vector<double> q;
    std::vector<double> tau;
    /// Largest |tau(q) - chord(q)|, chord joining the grid end points.
    double max_chord_deviation = 0.0;
};

[[nodiscard]] TauSpectrum tau_spectrum(const HurstFunction& h);

struct MultifractalSpectrum {
    std::vector<double> q;
    std::vector<double> h;
    std::vector<double> tau;
    std::vector<double> alpha;
    std::vector<double> f_alpha;
    double alpha_min = 0.0;
    double alpha_max = 0.0;
    double delta_alpha = 0.0;
    double alpha_0 = 0.0;
    double asymmetry = 0.0;  // A_alpha; > 0 means the left branch is longer
    /// alpha is not monotone in q beyond tolerance (reported, not fatal).
    bool folded = false;
};

/// alpha = h + q h'(q), f = q (alpha - h) + 1 with central differences for h'
/// (one-sided at the ends of the grid).
[[nodiscard]] MultifractalSpectrum singularity_spectrum(const HurstFunction& h);

/// Subset of spectrum points with q in [q_lo, q_hi]; summaries recomputed.
/// Because alpha comes from the full grid, widths nest with the q-range.
[[nodiscard]] MultifractalSpectrum restrict_q_range(const MultifractalSpectrum& spec, double q_lo, double q_hi);

struct Result {
    Config config;  // resolved
    FluctuationMatrix fluctuations;
    HurstFunction hurst;
    MultifractalSpectrum spectrum;
};

/// resolve -> compute_grid -> fit_hurst -> singularity_spectrum.
[[nodiscard]] Result analyze(const TimeSeries& s, const Config& cfg);
/// Pipeline tail for an existing fluctuation matrix (e.g. an ensemble mean).
[[nodiscard]] Result analyze_matrix(FluctuationMatrix F, const Config& resolved);

}  // namespace lexi::mfdfa
