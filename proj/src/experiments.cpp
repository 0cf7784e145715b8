#include "lexi/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "lexi/error.hpp"
#include "lexi/parallel.hpp"

namespace lexi::experiments {

namespace {

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

MeanSd mean_sd(const std::vector<double>& v) {
    MeanSd out;
    if (v.empty()) return out;
    for (double x : v) out.mean += x;
    out.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - out.mean) * (x - out.mean);
        out.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return out;
}

mfdfa::Config single_threaded(mfdfa::Config cfg) {
    cfg.threads = 1;
    return cfg;
}

}  // namespace

SpectrumSummary summarize(const mfdfa::Result& r) {
    return {r.hurst.hurst,           r.hurst.delta_h,   r.spectrum.delta_alpha,
            r.spectrum.asymmetry,    r.spectrum.alpha_0, r.spectrum.folded};
}

std::vector<OrderResult> run_order_study(const ChapterizedCorpus& corpus, const std::vector<NamedOrder>& orders,
                                         const mfdfa::Config& cfg, bool allow_general_sequence) {
    if (orders.empty()) throw Error(ErrorKind::InvalidArgument, "order study needs at least one order");
    std::vector<OrderResult> out(orders.size());
    std::size_t shortest = 0, longest_run = 0;
    for (std::size_t i = 0; i < orders.size(); ++i) {
        out[i].name = orders[i].name;
        out[i].order = orders[i].order;
        out[i].series = concat_in_order(corpus, orders[i].order, allow_general_sequence);
        out[i].series.label = orders[i].name;
        // only general sequences can change the length
        shortest = i == 0 ? out[i].series.size() : std::min(shortest, out[i].series.size());
        longest_run = std::max(longest_run, longest_constant_run(out[i].series.values));
    }
    const mfdfa::Config resolved = cfg.resolved_for(shortest, longest_run);
    parallel_for(out.size(), cfg.threads, [&](std::size_t i) {
        out[i].result = mfdfa::analyze_matrix(mfdfa::compute_grid(out[i].series, single_threaded(resolved)), resolved);
    });
    return out;
}

EnsembleResult run_permutation_ensemble(const ChapterizedCorpus& corpus, std::size_t n_perms, RngSeed seed,
                                        const mfdfa::Config& cfg, bool keep_members) {
    if (n_perms == 0) throw Error(ErrorKind::InvalidArgument, "ensemble needs n_perms >= 1");

    EnsembleResult ens;
    ens.n_members = n_perms;
    ens.members.resize(n_perms);
    ens.member_orders.resize(n_perms);
    std::size_t length = 0, longest_run = 0;
    for (std::size_t i = 0; i < n_perms; ++i) {
        ens.members[i].index = i;
        ens.members[i].seed = seed.derive(i);
        ens.member_orders[i] = random_permutation(corpus.chapter_count(), ens.members[i].seed);
        const TimeSeries series = concat_in_order(corpus, ens.member_orders[i]);
        length = series.size();
        longest_run = std::max(longest_run, longest_constant_run(series.values));
    }
    ens.config = cfg.resolved_for(length, longest_run);
    std::vector<mfdfa::FluctuationMatrix> matrices(n_perms);

    const mfdfa::Config member_cfg = single_threaded(ens.config);
    parallel_for(n_perms, cfg.threads, [&](std::size_t i) {
        MemberRecord& rec = ens.members[i];
        try {
            const TimeSeries series = concat_in_order(corpus, ens.member_orders[i]);
            matrices[i] = mfdfa::compute_grid(series, member_cfg);
            rec.summary = summarize(mfdfa::analyze_matrix(matrices[i], ens.config));
            rec.ok = true;
        } catch (const Error& e) {
            rec.ok = false;
            rec.error = e.what();
        }
    });

    ens.failures = static_cast<std::size_t>(
        std::count_if(ens.members.begin(), ens.members.end(), [](const MemberRecord& m) { return !m.ok; }));
    if (ens.failures * 10 > n_perms || ens.failures == n_perms) {
        throw Error(ErrorKind::EnsembleDegraded, std::to_string(ens.failures) + " of " + std::to_string(n_perms) +
                                                     " ensemble members failed; first error: " +
                                                     std::find_if(ens.members.begin(), ens.members.end(),
                                                                  [](const MemberRecord& m) { return !m.ok; })
                                                         ->error);
    }

    // Average ln F in member order; fixed order keeps the result bit-stable.
    mfdfa::FluctuationMatrix mean;
    std::size_t used = 0;
    for (std::size_t i = 0; i < n_perms; ++i) {
        if (!ens.members[i].ok) continue;
        if (used == 0) {
            mean = matrices[i];
            std::fill(mean.values.begin(), mean.values.end(), 0.0);
        }
        for (std::size_t k = 0; k < mean.values.size(); ++k) mean.values[k] += std::log(matrices[i].values[k]);
        ++used;
    }
    for (double& v : mean.values) v = std::exp(v / static_cast<double>(used));
    ens.ensemble = mfdfa::analyze_matrix(std::move(mean), ens.config);

    if (keep_members) {
        ens.member_fluctuations = std::move(matrices);
    }
    return ens;
}

std::string to_string(SurrogateKind kind) {
    return kind == SurrogateKind::Shuffle ? "shuffle" : "fourier";
}

SurrogateKind parse_surrogate_kind(const std::string& text) {
    if (text == "shuffle") return SurrogateKind::Shuffle;
    if (text == "fourier") return SurrogateKind::Fourier;
    throw Error(ErrorKind::InvalidArgument, "unknown surrogate kind '" + text + "' (expected shuffle or fourier)");
}

SurrogateReport run_surrogate_test(const TimeSeries& s, SurrogateKind kind, std::size_t n, RngSeed seed,
                                   const mfdfa::Config& cfg) {
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "surrogate test needs n >= 1");
    SurrogateReport rep;
    rep.kind = kind;
    rep.n = n;
    rep.config = cfg.resolved_for(s);
    rep.original = summarize(mfdfa::analyze_matrix(mfdfa::compute_grid(s, rep.config), rep.config));
    rep.surrogates.resize(n);

    std::vector<double> sorted_original = s.values;
    std::sort(sorted_original.begin(), sorted_original.end());
    double original_mean = 0.0;
    for (double v : s.values) original_mean += v;
    original_mean /= static_cast<double>(s.size());

    std::vector<char> histogram_ok(n, 1), mean_ok(n, 1);
    const mfdfa::Config member_cfg = single_threaded(rep.config);
    parallel_for(n, cfg.threads, [&](std::size_t i) {
        MemberRecord& rec = rep.surrogates[i];
        rec.index = i;
        rec.seed = seed.derive(i);
        const TimeSeries surrogate =
            kind == SurrogateKind::Shuffle ? shuffle_sentences(s, rec.seed) : fourier_phase_surrogate(s, rec.seed);
        std::vector<double> sorted = surrogate.values;
        std::sort(sorted.begin(), sorted.end());
        histogram_ok[i] = sorted == sorted_original;
        double m = 0.0;
        for (double v : surrogate.values) m += v;
        m /= static_cast<double>(surrogate.size());
        mean_ok[i] = std::abs(m - original_mean) <= 1e-10 * std::max(1.0, std::abs(original_mean));
        rec.summary = summarize(mfdfa::analyze_matrix(mfdfa::compute_grid(surrogate, member_cfg), rep.config));
        rec.ok = true;
    });

    std::vector<double> a0, da;
    for (const auto& r : rep.surrogates) {
        a0.push_back(r.summary.alpha_0);
        da.push_back(r.summary.delta_alpha);
    }
    const auto a0s = mean_sd(a0), das = mean_sd(da);
    rep.mean_alpha_0 = a0s.mean;
    rep.sd_alpha_0 = a0s.sd;
    rep.mean_delta_alpha = das.mean;
    rep.sd_delta_alpha = das.sd;

    const bool all_hist = std::all_of(histogram_ok.begin(), histogram_ok.end(), [](char c) { return c != 0; });
    const bool all_mean = std::all_of(mean_ok.begin(), mean_ok.end(), [](char c) { return c != 0; });
    if (kind == SurrogateKind::Shuffle) {
        rep.checks.push_back({"histogram_preserved", all_hist});
    } else {
        rep.checks.push_back({"mean_preserved", all_mean});
    }
    rep.checks.push_back({"alpha_0_near_half", std::abs(rep.mean_alpha_0 - 0.5) <= 0.05});
    rep.checks.push_back({"width_below_original", rep.mean_delta_alpha < rep.original.delta_alpha});
    return rep;
}

}  // namespace lexi::experiments
