#include "lexi/series.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <limits>
#include <numeric>

#include <fftw3.h>

#include "lexi/error.hpp"

namespace lexi {

TimeSeries ChapterizedCorpus::printed_series() const {
    TimeSeries out;
    out.label = "printed";
    for (const auto& ch : chapters) {
        out.values.insert(out.values.end(), ch.lengths.begin(), ch.lengths.end());
    }
    return out;
}

Permutation Permutation::identity(std::size_t n) {
    Permutation p;
    p.order.resize(n);
    std::iota(p.order.begin(), p.order.end(), std::size_t{0});
    return p;
}

Permutation Permutation::reversal(std::size_t n) {
    Permutation p = identity(n);
    std::reverse(p.order.begin(), p.order.end());
    return p;
}

bool Permutation::is_bijection() const {
    std::vector<bool> seen(order.size(), false);
    for (std::size_t idx : order) {
        if (idx >= order.size() || seen[idx]) return false;
        seen[idx] = true;
    }
    return true;
}

Permutation Permutation::inverse() const {
    if (!is_bijection()) {
        throw Error(ErrorKind::InvalidPermutation, "inverse requires a bijection");
    }
    Permutation inv;
    inv.order.resize(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) inv.order[order[i]] = i;
    return inv;
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw Error(ErrorKind::InvalidArgument, "Rng::below needs a positive bound");
    // Rejection on the top of the range removes modulo bias.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw = engine_();
    while (draw >= limit) draw = engine_();
    return draw % bound;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u = 0.0, v = 0.0, r2 = 0.0;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        r2 = u * u + v * v;
    } while (r2 >= 1.0 || r2 == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(r2) / r2);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
}

TimeSeries concat_in_order(const ChapterizedCorpus& corpus, const Permutation& perm,
                           bool allow_general_sequence) {
    if (!allow_general_sequence) {
        if (perm.size() != corpus.chapter_count()) {
            throw Error(ErrorKind::PermutationSizeMismatch,
                        "permutation has " + std::to_string(perm.size()) + " entries, corpus has " +
                            std::to_string(corpus.chapter_count()) + " chapters");
        }
        if (!perm.is_bijection()) {
            throw Error(ErrorKind::InvalidPermutation, "chapter order is not a bijection");
        }
    }
    TimeSeries out;
    for (std::size_t idx : perm.order) {
        if (idx >= corpus.chapter_count()) {
            throw Error(ErrorKind::InvalidPermutation,
                        "chapter index " + std::to_string(idx + 1) + " out of range", idx);
        }
        const auto& lengths = corpus.chapters[idx].lengths;
        out.values.insert(out.values.end(), lengths.begin(), lengths.end());
    }
    return out;
}

Permutation random_permutation(std::size_t n, RngSeed seed) {
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "random_permutation needs n >= 1");
    Permutation p = Permutation::identity(n);
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i + 1));
        std::swap(p.order[i], p.order[j]);
    }
    return p;
}

TimeSeries shuffle_sentences(const TimeSeries& s, RngSeed seed) {
    if (s.size() < 2) throw Error(ErrorKind::InvalidArgument, "shuffle needs T >= 2");
    TimeSeries out{s.values, s.label + "/shuffled"};
    Rng rng(seed);
    for (std::size_t i = out.size() - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i + 1));
        std::swap(out.values[i], out.values[j]);
    }
    return out;
}

namespace {

// FFTW's planner is not reentrant; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

struct PlanDeleter {
    void operator()(fftw_plan p) const noexcept {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};

using PlanPtr = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDeleter>;

}  // namespace

TimeSeries fourier_phase_surrogate(const TimeSeries& s, RngSeed seed) {
    const std::size_t n = s.size();
    if (n < 4) throw Error(ErrorKind::InvalidArgument, "Fourier surrogate needs T >= 4");
    const std::size_t bins = n / 2 + 1;

    std::unique_ptr<double, FftwFree> real(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
    std::unique_ptr<fftw_complex, FftwFree> spec(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));

    PlanPtr forward, backward;
    {
        std::lock_guard lock(planner_mutex());
        const int len = static_cast<int>(n);
        forward.reset(fftw_plan_dft_r2c_1d(len, real.get(), spec.get(), FFTW_ESTIMATE));
        backward.reset(fftw_plan_dft_c2r_1d(len, spec.get(), real.get(), FFTW_ESTIMATE));
    }

    std::copy(s.values.begin(), s.values.end(), real.get());
    fftw_execute(forward.get());

    Rng rng(seed);
    // Bin 0 (mean) and, for even n, the Nyquist bin stay fixed so the output is real.
    const std::size_t last_free = (n % 2 == 0) ? bins - 2 : bins - 1;
    for (std::size_t k = 1; k <= last_free; ++k) {
        const double amplitude = std::hypot(spec.get()[k][0], spec.get()[k][1]);
        const double phase = 2.0 * std::numbers::pi * rng.uniform();
        spec.get()[k][0] = amplitude * std::cos(phase);
        spec.get()[k][1] = amplitude * std::sin(phase);
    }
    fftw_execute(backward.get());

    TimeSeries out;
    out.label = s.label + "/fourier";
    out.values.resize(n);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = real.get()[i] * scale;
    return out;
}

std::size_t longest_constant_run(std::span<const double> values) {
    std::size_t best = values.empty() ? 0 : 1;
    std::size_t run = 1;
    for (std::size_t i = 1; i < values.size(); ++i) {
        run = (values[i] == values[i - 1]) ? run + 1 : 1;
        best = std::max(best, run);
    }
    return best;
}

}  // namespace lexi
