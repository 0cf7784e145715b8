#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lexi/mfdfa.hpp"
#include "lexi/series.hpp"

namespace lexi::experiments {

/// Scalar description of one MFDFA run.
struct SpectrumSummary {
    double hurst = 0.0;
    double delta_h = 0.0;
    double delta_alpha = 0.0;
    double asymmetry = 0.0;
    double alpha_0 = 0.0;
    bool folded = false;
};

[[nodiscard]] SpectrumSummary summarize(const mfdfa::Result& r);

struct NamedOrder {
    std::string name;
    Permutation order;
};

struct OrderResult {
    std::string name;
    Permutation order;
    TimeSeries series;
    mfdfa::Result result;
};

/// One full MFDFA per chapter order. The scale grid is resolved once, against
/// the shortest series, so that every order is analysed with an identical
/// configuration.
[[nodiscard]] std::vector<OrderResult> run_order_study(const ChapterizedCorpus& corpus,
                                                       const std::vector<NamedOrder>& orders,
                                                       const mfdfa::Config& cfg,
                                                       bool allow_general_sequence = false);

struct MemberRecord {
    std::size_t index = 0;
    RngSeed seed;
    bool ok = false;
    std::string error;  // set when !ok
    SpectrumSummary summary;
};

struct EnsembleResult {
    std::size_t n_members = 0;
    std::size_t failures = 0;
    mfdfa::Config config;  // resolved, shared by all members
    /// Geometric mean of F(q, s) over successful members, then refitted.
    mfdfa::Result ensemble;
    std::vector<MemberRecord> members;
    /// Per-member matrices, populated only when requested.
    std::vector<mfdfa::FluctuationMatrix> member_fluctuations;
    std::vector<Permutation> member_orders;  // always populated
};

/// Random chapter orders with member seeds seed + index, all analysed on one
/// scale grid resolved from the member orders. A failing member is recorded
/// and skipped; more than 10% failures throws EnsembleDegraded.
[[nodiscard]] EnsembleResult run_permutation_ensemble(const ChapterizedCorpus& corpus, std::size_t n_perms,
                                                      RngSeed seed, const mfdfa::Config& cfg,
                                                      bool keep_members = false);

enum class SurrogateKind { Shuffle, Fourier };

[[nodiscard]] std::string to_string(SurrogateKind kind);
[[nodiscard]] SurrogateKind parse_surrogate_kind(const std::string& text);

struct SurrogateCheck {
    std::string name;
    bool passed = false;
};

struct SurrogateReport {
    SurrogateKind kind = SurrogateKind::Shuffle;
    std::size_t n = 0;
    mfdfa::Config config;
    SpectrumSummary original;
    std::vector<MemberRecord> surrogates;
    double mean_alpha_0 = 0.0;
    double sd_alpha_0 = 0.0;
    double mean_delta_alpha = 0.0;
    double sd_delta_alpha = 0.0;
    std::vector<SurrogateCheck> checks;
};

/// n surrogates of `s` (seeds seed + i), each run through the same MFDFA
/// configuration as the original. Errors propagate.
[[nodiscard]] SurrogateReport run_surrogate_test(const TimeSeries& s, SurrogateKind kind, std::size_t n,
                                                 RngSeed seed, const mfdfa::Config& cfg);

}  // namespace lexi::experiments
