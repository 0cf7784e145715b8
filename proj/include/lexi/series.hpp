#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace lexi {

/// Ordered observations. SLV and PMDV series hold integer-valued entries >= 1.
struct TimeSeries {
    std::vector<double> values;
    std::string label;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] bool empty() const noexcept { return values.empty(); }
    [[nodiscard]] std::span<const double> view() const noexcept { return values; }

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;
};

struct Chapter {
    std::string label;
    std::vector<double> lengths;

    friend bool operator==(const Chapter&, const Chapter&) = default;
};

/// Per-chapter sentence-length sequences in printed order.
struct ChapterizedCorpus {
    std::vector<Chapter> chapters;

    [[nodiscard]] std::size_t chapter_count() const noexcept { return chapters.size(); }
    /// Whole-book series in printed order.
    [[nodiscard]] TimeSeries printed_series() const;
};

/// 0-based chapter indices. Files use 1-based indices; see read_permutation().
struct Permutation {
    std::vector<std::size_t> order;

    [[nodiscard]] std::size_t size() const noexcept { return order.size(); }
    [[nodiscard]] static Permutation identity(std::size_t n);
    [[nodiscard]] static Permutation reversal(std::size_t n);
    [[nodiscard]] bool is_bijection() const;
    [[nodiscard]] Permutation inverse() const;

    friend bool operator==(const Permutation&, const Permutation&) = default;
};

struct RngSeed {
    std::uint64_t value = 0;

    /// Seed for the i-th parallel worker or ensemble member.
    [[nodiscard]] RngSeed derive(std::uint64_t index) const noexcept { return {value + index}; }

    friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

/// Portable random stream: std::mt19937_64 (whose output sequence is fixed by
/// the standard) plus hand-written transforms, since the standard library
/// distributions are implementation-defined.
class Rng {
public:
    explicit Rng(RngSeed seed) : engine_(seed.value) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);
    /// Standard normal via the Marsaglia polar method.
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Concatenate per-chapter series in `perm` order.
/// Throws PermutationSizeMismatch when perm.size() != chapter count unless
/// `allow_general_sequence` is set, in which case any sequence of valid
/// indices (repeats allowed) is accepted.
[[nodiscard]] TimeSeries concat_in_order(const ChapterizedCorpus& corpus, const Permutation& perm,
                                         bool allow_general_sequence = false);

/// Uniform random permutation of n chapters (Fisher-Yates).
[[nodiscard]] Permutation random_permutation(std::size_t n, RngSeed seed);

/// Sentence-level shuffle: histogram preserved exactly, memory destroyed.
[[nodiscard]] TimeSeries shuffle_sentences(const TimeSeries& s, RngSeed seed);

/// Fourier-phase randomised surrogate: amplitude spectrum and mean preserved,
/// phases uniform with conjugate symmetry.
[[nodiscard]] TimeSeries fourier_phase_surrogate(const TimeSeries& s, RngSeed seed);

/// Longest run of identical consecutive values.
[[nodiscard]] std::size_t longest_constant_run(std::span<const double> values);

}  // namespace lexi
