#include "lexi/mfdfa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lexi/error.hpp"
#include "lexi/format.hpp"
#include "lexi/parallel.hpp"

namespace lexi::mfdfa {

namespace {

constexpr double kQTolerance = 1e-9;

// Orthonormal polynomial basis of degree 0..order on s equally spaced points,
// stored column-major. Built by twice-iterated Gram-Schmidt on a centred,
// scaled abscissa, so it stays well conditioned for large s.
struct Basis {
    std::size_t size = 0;
    unsigned order = 0;
    std::vector<double> columns;

    Basis(std::size_t s, unsigned m) : size(s), order(m), columns((m + 1) * s) {
        const double half = 0.5 * static_cast<double>(s - 1);
        for (unsigned k = 0; k <= m; ++k) {
            double* col = column(k);
            for (std::size_t j = 0; j < s; ++j) {
                const double t = (static_cast<double>(j) - half) / (half > 0.0 ? half : 1.0);
                col[j] = std::pow(t, static_cast<double>(k));
            }
            for (int pass = 0; pass < 2; ++pass) {
                for (unsigned l = 0; l < k; ++l) {
                    const double d = dot(column(l), col);
                    for (std::size_t j = 0; j < s; ++j) col[j] -= d * column(l)[j];
                }
            }
            const double norm = std::sqrt(dot(col, col));
            for (std::size_t j = 0; j < s; ++j) col[j] /= norm;
        }
    }

    double* column(unsigned k) { return columns.data() + k * size; }
    const double* column(unsigned k) const { return columns.data() + k * size; }

    double dot(const double* a, const double* b) const {
        double acc = 0.0;
        for (std::size_t j = 0; j < size; ++j) acc += a[j] * b[j];
        return acc;
    }

    // v -= projection of v onto columns [0, upto).
    void remove(std::vector<double>& v, unsigned upto) const {
        for (unsigned k = 0; k < upto; ++k) {
            const double d = dot(column(k), v.data());
            const double* col = column(k);
            for (std::size_t j = 0; j < size; ++j) v[j] -= d * col[j];
        }
    }
};

// Detrended variance of one window given its s increments. Subtracting a
// degree m-1 polynomial from the increments only adds a degree <= m
// polynomial to the local profile, which the order-m fit removes anyway, so
// the result equals detrending the global profile segment.
double detrended_variance(const double* increments, const Basis& basis, std::vector<double>& buf) {
    const std::size_t s = basis.size;
    buf.assign(increments, increments + s);
    double reference = 0.0;
    for (double v : buf) reference += v * v;
    reference *= static_cast<double>(s);

    basis.remove(buf, basis.order);
    double running = 0.0;
    for (double& v : buf) {
        running += v;
        v = running;
    }
    basis.remove(buf, basis.order + 1);

    double residual = 0.0;
    for (double v : buf) residual += v * v;
    const double variance = residual / static_cast<double>(s);
    // Rounding-level residual: the window is exactly polynomial.
    return variance <= 1e-24 * reference ? 0.0 : variance;
}

std::vector<double> variances_from_increments(std::span<const double> u, std::size_t scale, unsigned order) {
    if (order < 1) throw Error(ErrorKind::InvalidConfig, "detrending order must be >= 1");
    if (scale <= order + 1) {
        throw Error(ErrorKind::ScaleTooSmall,
                    "scale " + std::to_string(scale) + " must exceed order + 1 = " + std::to_string(order + 1),
                    scale);
    }
    const std::size_t windows = u.size() / scale;
    if (windows == 0) {
        throw Error(ErrorKind::InvalidArgument,
                    "scale " + std::to_string(scale) + " exceeds series length " + std::to_string(u.size()), scale);
    }
    const Basis basis(scale, order);
    std::vector<double> out(2 * windows);
    std::vector<double> buf;
    for (std::size_t v = 0; v < windows; ++v) {
        out[v] = detrended_variance(u.data() + v * scale, basis, buf);
        out[windows + v] = detrended_variance(u.data() + (u.size() - (v + 1) * scale), basis, buf);
    }
    return out;
}

std::size_t count_in_range(const std::vector<std::size_t>& scales, FitRange r) {
    return static_cast<std::size_t>(
        std::count_if(scales.begin(), scales.end(), [&](std::size_t s) { return s >= r.lo && s <= r.hi; }));
}

void summarize(MultifractalSpectrum& spec) {
    const auto [mn, mx] = std::minmax_element(spec.alpha.begin(), spec.alpha.end());
    spec.alpha_min = *mn;
    spec.alpha_max = *mx;
    spec.delta_alpha = spec.alpha_max - spec.alpha_min;

    // Apex: largest f; ties go to the point nearest q = 0.
    std::size_t apex = 0;
    for (std::size_t i = 1; i < spec.f_alpha.size(); ++i) {
        if (spec.f_alpha[i] > spec.f_alpha[apex] ||
            (spec.f_alpha[i] == spec.f_alpha[apex] && std::abs(spec.q[i]) < std::abs(spec.q[apex]))) {
            apex = i;
        }
    }
    spec.alpha_0 = spec.alpha[apex];
    const double left = spec.alpha_0 - spec.alpha_min;
    const double right = spec.alpha_max - spec.alpha_0;
    spec.asymmetry = (left + right) > 1e-15 ? (left - right) / (left + right) : 0.0;

    spec.folded = false;
    for (std::size_t i = 1; i < spec.alpha.size(); ++i) {
        if (spec.alpha[i] > spec.alpha[i - 1] + 0.01) spec.folded = true;
    }
}

}  // namespace

std::vector<double> Config::symmetric_q_grid(double q_max, double step) {
    if (!(q_max > 0.0) || !(step > 0.0)) throw Error(ErrorKind::InvalidConfig, "q grid needs q_max > 0 and step > 0");
    const auto half = static_cast<long>(std::llround(q_max / step));
    std::vector<double> q;
    q.reserve(static_cast<std::size_t>(2 * half + 1));
    for (long i = -half; i <= half; ++i) q.push_back(static_cast<double>(i) * step);
    return q;
}

std::vector<std::size_t> Config::log_spaced_scales(std::size_t s_min, std::size_t s_max, std::size_t count) {
    if (s_min == 0 || s_min > s_max) {
        throw Error(ErrorKind::InvalidConfig,
                    "empty scale range [" + std::to_string(s_min) + ", " + std::to_string(s_max) + "]");
    }
    std::vector<std::size_t> out;
    if (count <= 1 || s_min == s_max) return {s_min};
    const double a = std::log(static_cast<double>(s_min));
    const double b = std::log(static_cast<double>(s_max));
    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(count - 1);
        const auto s = static_cast<std::size_t>(std::llround(std::exp(a + t * (b - a))));
        const std::size_t clamped = std::clamp(s, s_min, s_max);
        if (out.empty() || clamped > out.back()) out.push_back(clamped);
    }
    return out;
}

Config Config::resolved_for(const TimeSeries& s) const {
    return resolved_for(s.size(), longest_constant_run(s.values));
}

Config Config::resolved_for(std::size_t T, std::size_t longest_run) const {
    Config r = *this;
    if (order < 1) throw Error(ErrorKind::InvalidConfig, "detrending order must be >= 1");
    if (r.q_grid.empty()) r.q_grid = symmetric_q_grid(7.0, 0.25);
    if (r.scales.empty()) {
        const std::size_t s_min = std::max<std::size_t>(2 * (order + 1), longest_run + 1);
        const std::size_t s_max = T / 5;
        if (s_min > s_max) {
            throw Error(ErrorKind::InvalidConfig, "series of length " + std::to_string(T) +
                                                      " is too short: minimum scale " + std::to_string(s_min) +
                                                      " exceeds T/5 = " + std::to_string(s_max));
        }
        r.scales = log_spaced_scales(s_min, s_max, scale_count);
    }
    if (!r.fit_range) r.fit_range = FitRange{r.scales.front(), r.scales.back()};
    r.validate_for(T);
    return r;
}

void Config::validate_for(std::size_t length) const {
    if (order < 1) throw Error(ErrorKind::InvalidConfig, "detrending order must be >= 1");
    if (q_grid.empty()) throw Error(ErrorKind::InvalidConfig, "q grid is empty");
    for (std::size_t i = 1; i < q_grid.size(); ++i) {
        if (!(q_grid[i] > q_grid[i - 1])) throw Error(ErrorKind::InvalidConfig, "q grid must be strictly increasing");
    }
    for (double q : q_grid) {
        const bool mirrored = std::any_of(q_grid.begin(), q_grid.end(),
                                          [&](double o) { return std::abs(o + q) <= kQTolerance; });
        if (!mirrored) throw Error(ErrorKind::InvalidConfig, "q grid must be symmetric about 0 (missing -" + format_number(q) + ")");
    }
    if (scales.empty()) throw Error(ErrorKind::InvalidConfig, "scale grid is empty");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (i > 0 && scales[i] <= scales[i - 1]) throw Error(ErrorKind::InvalidConfig, "scales must be strictly increasing");
        if (scales[i] <= order + 1) {
            throw Error(ErrorKind::InvalidConfig, "scale " + std::to_string(scales[i]) + " must exceed order + 1");
        }
        if (scales[i] > length / 5) {
            throw Error(ErrorKind::InvalidConfig, "scale " + std::to_string(scales[i]) + " exceeds T/5 = " +
                                                      std::to_string(length / 5));
        }
    }
}

std::string Config::canonical() const {
    std::string out = "mfdfa.order=" + std::to_string(order) + "\n";
    out += "mfdfa.q_grid=";
    for (std::size_t i = 0; i < q_grid.size(); ++i) out += (i ? "," : "") + format_number(q_grid[i]);
    out += "\nmfdfa.scale_count=" + std::to_string(scale_count);
    out += "\nmfdfa.scales=";
    for (std::size_t i = 0; i < scales.size(); ++i) out += (i ? "," : "") + std::to_string(scales[i]);
    out += "\nmfdfa.fit_range=";
    if (fit_range) out += std::to_string(fit_range->lo) + "," + std::to_string(fit_range->hi);
    out += "\n";
    return out;
}

Profile profile(const TimeSeries& s) {
    Profile p;
    p.x.resize(s.size());
    double running = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        running += s.values[i];
        p.x[i] = running;
    }
    return p;
}

std::vector<double> window_variances(const Profile& x, std::size_t scale, unsigned order) {
    std::vector<double> increments(x.x.size());
    for (std::size_t i = 0; i < x.x.size(); ++i) increments[i] = x.x[i] - (i ? x.x[i - 1] : 0.0);
    return variances_from_increments(increments, scale, order);
}

std::vector<double> window_variances(std::span<const double> series, std::size_t scale, unsigned order) {
    return variances_from_increments(series, scale, order);
}

double fluctuation(std::span<const double> variances, double q) {
    if (variances.empty()) throw Error(ErrorKind::InvalidArgument, "no window variances");
    const double n = static_cast<double>(variances.size());
    if (q <= 0.0) {
        for (double v : variances) {
            if (!(v > 0.0)) {
                throw Error(ErrorKind::DegenerateWindow,
                            "zero detrended variance with q <= 0; raise the minimum scale above the longest "
                            "constant run");
            }
        }
    }
    if (std::abs(q) < kQTolerance) {
        double acc = 0.0;
        for (double v : variances) acc += std::log(v);
        return std::exp(acc / (2.0 * n));
    }
    // (1/q) ln( mean exp((q/2) ln f^2) ) via a shifted log-sum-exp.
    double shift = -std::numeric_limits<double>::infinity();
    for (double v : variances) shift = std::max(shift, 0.5 * q * std::log(v));
    if (!std::isfinite(shift)) return 0.0;
    double acc = 0.0;
    for (double v : variances) acc += std::exp(0.5 * q * std::log(v) - shift);
    return std::exp((shift + std::log(acc / n)) / q);
}

FluctuationMatrix compute_grid(const TimeSeries& s, const Config& resolved) {
    resolved.validate_for(s.size());
    FluctuationMatrix F;
    F.q = resolved.q_grid;
    F.scales = resolved.scales;
    F.window_counts.resize(F.scales.size());
    F.values.assign(F.q.size() * F.scales.size(), 0.0);

    parallel_for(F.scales.size(), resolved.threads, [&](std::size_t si) {
        const std::size_t scale = F.scales[si];
        const auto variances = variances_from_increments(s.values, scale, resolved.order);
        F.window_counts[si] = variances.size() / 2;
        for (std::size_t qi = 0; qi < F.q.size(); ++qi) {
            try {
                F.at(qi, si) = fluctuation(variances, F.q[qi]);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::DegenerateWindow) throw;
                throw Error(ErrorKind::DegenerateWindow,
                            "scale " + std::to_string(scale) + " has a window with zero detrended variance (q = " +
                                format_number(F.q[qi]) + "); raise the minimum scale",
                            scale);
            }
        }
    });
    return F;
}

HurstFunction fit_hurst(const FluctuationMatrix& F, FitRange range) {
    if (F.scales.empty() || range.lo > range.hi || range.lo < F.scales.front() || range.hi > F.scales.back()) {
        throw Error(ErrorKind::BadFitRange, "fit range [" + std::to_string(range.lo) + ", " +
                                                std::to_string(range.hi) + "] lies outside the scale grid");
    }
    const std::size_t used = count_in_range(F.scales, range);
    if (used < 5) {
        throw Error(ErrorKind::BadFitRange,
                    "fit range holds " + std::to_string(used) + " scales, at least 5 are required");
    }

    std::vector<double> xs;
    std::vector<std::size_t> cols;
    for (std::size_t si = 0; si < F.scales.size(); ++si) {
        if (F.scales[si] >= range.lo && F.scales[si] <= range.hi) {
            xs.push_back(std::log(static_cast<double>(F.scales[si])));
            cols.push_back(si);
        }
    }
    const double n = static_cast<double>(xs.size());
    double x_mean = 0.0;
    for (double x : xs) x_mean += x;
    x_mean /= n;
    double sxx = 0.0;
    for (double x : xs) sxx += (x - x_mean) * (x - x_mean);

    HurstFunction out;
    out.q = F.q;
    out.fit_range = range;
    out.scales_used = used;
    for (std::size_t qi = 0; qi < F.q.size(); ++qi) {
        std::vector<double> ys;
        ys.reserve(cols.size());
        for (std::size_t si : cols) {
            const double v = F.at(qi, si);
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw Error(ErrorKind::InvalidArgument, "non-positive fluctuation value at q = " + format_number(F.q[qi]));
            }
            ys.push_back(std::log(v));
        }
        double y_mean = 0.0;
        for (double y : ys) y_mean += y;
        y_mean /= n;
        double sxy = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < ys.size(); ++i) {
            sxy += (xs[i] - x_mean) * (ys[i] - y_mean);
            syy += (ys[i] - y_mean) * (ys[i] - y_mean);
        }
        const double slope = sxy / sxx;
        const double ss_res = std::max(0.0, syy - slope * sxy);
        out.h.push_back(slope);
        out.r2.push_back(syy > 0.0 ? 1.0 - ss_res / syy : 1.0);
    }

    out.hurst = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < out.q.size(); ++i) {
        if (std::abs(out.q[i] - 2.0) <= kQTolerance) {
            out.hurst = out.h[i];
            break;
        }
        if (i + 1 < out.q.size() && out.q[i] < 2.0 && out.q[i + 1] > 2.0) {
            const double t = (2.0 - out.q[i]) / (out.q[i + 1] - out.q[i]);
            out.hurst = out.h[i] + t * (out.h[i + 1] - out.h[i]);
            break;
        }
    }
    out.delta_h = out.h.front() - out.h.back();
    return out;
}

TauSpectrum tau_spectrum(const HurstFunction& h) {
    TauSpectrum t;
    t.q = h.q;
    t.tau.resize(h.q.size());
    for (std::size_t i = 0; i < h.q.size(); ++i) t.tau[i] = h.q[i] * h.h[i] - 1.0;
    if (t.q.size() >= 2) {
        const double q0 = t.q.front(), q1 = t.q.back();
        const double t0 = t.tau.front(), t1 = t.tau.back();
        for (std::size_t i = 0; i < t.q.size(); ++i) {
            const double chord = t0 + (t1 - t0) * (t.q[i] - q0) / (q1 - q0);
            t.max_chord_deviation = std::max(t.max_chord_deviation, std::abs(t.tau[i] - chord));
        }
    }
    return t;
}

MultifractalSpectrum singularity_spectrum(const HurstFunction& h) {
    const std::size_t n = h.q.size();
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "singularity spectrum needs at least 2 q values");
    MultifractalSpectrum spec;
    spec.q = h.q;
    spec.h = h.h;
    spec.tau = tau_spectrum(h).tau;
    spec.alpha.resize(n);
    spec.f_alpha.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
        const double derivative = (h.h[hi] - h.h[lo]) / (h.q[hi] - h.q[lo]);
        spec.alpha[i] = h.h[i] + h.q[i] * derivative;
        spec.f_alpha[i] = h.q[i] * (spec.alpha[i] - h.h[i]) + 1.0;
    }
    summarize(spec);
    return spec;
}

MultifractalSpectrum restrict_q_range(const MultifractalSpectrum& spec, double q_lo, double q_hi) {
    MultifractalSpectrum out;
    for (std::size_t i = 0; i < spec.q.size(); ++i) {
        if (spec.q[i] < q_lo - kQTolerance || spec.q[i] > q_hi + kQTolerance) continue;
        out.q.push_back(spec.q[i]);
        out.h.push_back(spec.h[i]);
        out.tau.push_back(spec.tau[i]);
        out.alpha.push_back(spec.alpha[i]);
        out.f_alpha.push_back(spec.f_alpha[i]);
    }
    if (out.q.empty()) {
        throw Error(ErrorKind::InvalidArgument,
                    "q range [" + format_number(q_lo) + ", " + format_number(q_hi) + "] selects no grid point");
    }
    summarize(out);
    return out;
}

Result analyze_matrix(FluctuationMatrix F, const Config& resolved) {
    Result r;
    r.config = resolved;
    r.fluctuations = std::move(F);
    r.hurst = fit_hurst(r.fluctuations, *resolved.fit_range);
    r.spectrum = singularity_spectrum(r.hurst);
    return r;
}

Result analyze(const TimeSeries& s, const Config& cfg) {
    const Config resolved = cfg.resolved_for(s);
    return analyze_matrix(compute_grid(s, resolved), resolved);
}

}  // namespace lexi::mfdfa
