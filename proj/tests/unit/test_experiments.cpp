#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "lexi/error.hpp"
#include "lexi/experiments.hpp"
#include "lexi/weibull.hpp"
#include "synthetic.hpp"

using namespace lexi;
using namespace lexi::experiments;

namespace {

/// Chapters of i.i.d. Gaussian values with random lengths in [lo, lo + span).
ChapterizedCorpus iid_corpus(std::size_t chapters, std::size_t lo, std::size_t span, std::uint64_t seed) {
    ChapterizedCorpus c;
    Rng rng(RngSeed{seed});
    for (std::size_t ch = 0; ch < chapters; ++ch) {
        Chapter x;
        x.label = std::to_string(ch + 1);
        const std::size_t len = lo + rng.below(span);
        for (std::size_t i = 0; i < len; ++i) x.lengths.push_back(10.0 + 3.0 * rng.normal());
        c.chapters.push_back(std::move(x));
    }
    return c;
}

double mean_of(const std::vector<MemberRecord>& members, double SpectrumSummary::*field) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& m : members) {
        if (!m.ok) continue;
        sum += m.summary.*field;
        ++n;
    }
    return sum / static_cast<double>(n);
}

bool same_summary(const SpectrumSummary& a, const SpectrumSummary& b) {
    return a.hurst == b.hurst && a.delta_h == b.delta_h && a.delta_alpha == b.delta_alpha &&
           a.asymmetry == b.asymmetry && a.alpha_0 == b.alpha_0 && a.folded == b.folded;
}

}  // namespace

TEST_CASE("run_order_study: identity and reversal share the value multiset and config") {
    const auto c = iid_corpus(20, 40, 20, 1);
    const auto r = run_order_study(c, {{"printed", Permutation::identity(20)}, {"reverse", Permutation::reversal(20)}},
                                   mfdfa::Config{});
    REQUIRE(r.size() == 2);
    auto a = r[0].series.values, b = r[1].series.values;
    CHECK(a == c.printed_series().values);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
    CHECK(r[0].result.config.scales == r[1].result.config.scales);
    CHECK(r[0].result.config.q_grid == r[1].result.config.q_grid);
    CHECK(r[0].result.hurst.fit_range == r[1].result.hurst.fit_range);
    CHECK(r[1].name == "reverse");
}

TEST_CASE("run_order_study: identical orders give bit-identical results") {
    const auto c = iid_corpus(30, 40, 20, 2);
    const auto p = random_permutation(30, RngSeed{5});
    mfdfa::Config cfg;
    cfg.threads = 3;
    const auto r = run_order_study(c, {{"a", p}, {"b", p}}, cfg);
    CHECK(r[0].result.fluctuations.values == r[1].result.fluctuations.values);
    CHECK(r[0].result.spectrum.alpha == r[1].result.spectrum.alpha);
}

TEST_CASE("run_order_study: errors") {
    const auto c = iid_corpus(5, 40, 1, 3);
    CHECK_THROWS_AS(run_order_study(c, {}, mfdfa::Config{}), Error);
    CHECK_THROWS_MATCHES(run_order_study(c, {{"short", Permutation{{0, 1}}}}, mfdfa::Config{}), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.kind() == ErrorKind::PermutationSizeMismatch; }));
    CHECK_THROWS_AS(run_order_study(c, {{"a", Permutation{{0, 0, 1, 2, 3}}}}, mfdfa::Config{}), Error);
}

TEST_CASE("run_order_study: general sequences share the grid of the shortest series") {
    const auto c = iid_corpus(12, 40, 20, 3);
    std::vector<std::size_t> longer(12);
    for (std::size_t i = 0; i < 12; ++i) longer[i] = i;
    longer.push_back(5);
    longer.push_back(11);
    const auto r = run_order_study(c, {{"printed", Permutation::identity(12)}, {"longer", Permutation{longer}}},
                                   mfdfa::Config{}, true);
    REQUIRE(r[1].series.size() > r[0].series.size());
    CHECK(r[0].result.config.scales == r[1].result.config.scales);
    CHECK(r[0].result.config.scales.back() == r[0].series.size() / 5);
}

TEST_CASE("run_order_study: exchangeable chapters give order-independent widths") {
    // Each order is a different noise realisation, so the width spread is
    // sampling noise; its mean over corpora must sit inside the tolerance.
    mfdfa::Config cfg;
    cfg.threads = 4;
    double total_spread = 0.0;
    const std::size_t corpora = 4;
    for (std::uint64_t seed = 1; seed <= corpora; ++seed) {
        const auto c = iid_corpus(1300, 30, 41, seed);
        const auto r = run_order_study(c,
                                       {{"printed", Permutation::identity(1300)},
                                        {"reverse", Permutation::reversal(1300)},
                                        {"random", random_permutation(1300, RngSeed{seed})}},
                                       cfg);
        double lo = 1e9, hi = -1e9;
        for (const auto& o : r) {
            lo = std::min(lo, o.result.spectrum.delta_alpha);
            hi = std::max(hi, o.result.spectrum.delta_alpha);
            CHECK(std::abs(o.result.hurst.hurst - 0.5) < 0.05);
        }
        total_spread += hi - lo;
    }
    CHECK(total_spread / corpora < 0.05);
}

TEST_CASE("ensemble: n = 1 equals the order study on its permutation") {
    const auto c = iid_corpus(25, 40, 30, 4);
    const RngSeed seed{11};
    const auto ens = run_permutation_ensemble(c, 1, seed, mfdfa::Config{});
    const auto study = run_order_study(c, {{"member", random_permutation(25, seed.derive(0))}}, mfdfa::Config{});
    REQUIRE(ens.failures == 0);
    CHECK(ens.member_orders.front() == random_permutation(25, seed.derive(0)));
    const auto& a = ens.ensemble.fluctuations.values;
    const auto& b = study[0].result.fluctuations.values;
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-12 * b[k]);
    for (std::size_t i = 0; i < ens.ensemble.hurst.h.size(); ++i) {
        CHECK(std::abs(ens.ensemble.hurst.h[i] - study[0].result.hurst.h[i]) < 1e-10);
    }
    CHECK(std::abs(ens.ensemble.spectrum.delta_alpha - study[0].result.spectrum.delta_alpha) < 1e-9);
}

TEST_CASE("ensemble: slopes of the log-mean are member means") {
    // ln F is averaged before a linear least-squares fit, so h(q) of the
    // ensemble is exactly the mean of member h(q).
    const auto c = iid_corpus(40, 40, 30, 5);
    const auto ens = run_permutation_ensemble(c, 50, RngSeed{3}, mfdfa::Config{});
    REQUIRE(ens.failures == 0);
    CHECK(std::abs(ens.ensemble.hurst.hurst - mean_of(ens.members, &SpectrumSummary::hurst)) < 1e-10);
    CHECK(std::abs(ens.ensemble.hurst.delta_h - mean_of(ens.members, &SpectrumSummary::delta_h)) < 1e-10);
}

TEST_CASE("ensemble: n = 1000 width lies inside the member envelope") {
    const auto c = iid_corpus(20, 40, 30, 6);
    mfdfa::Config cfg;
    cfg.threads = 4;
    const auto ens = run_permutation_ensemble(c, 1000, RngSeed{1}, cfg);
    REQUIRE(ens.failures == 0);
    double lo = 1e9, hi = -1e9;
    for (const auto& m : ens.members) {
        lo = std::min(lo, m.summary.delta_alpha);
        hi = std::max(hi, m.summary.delta_alpha);
    }
    CHECK(ens.ensemble.spectrum.delta_alpha >= lo);
    CHECK(ens.ensemble.spectrum.delta_alpha <= hi);
}

TEST_CASE("ensemble: geometric mean keeps F monotone in q") {
    const auto c = iid_corpus(30, 40, 30, 7);
    const auto ens = run_permutation_ensemble(c, 20, RngSeed{2}, mfdfa::Config{});
    const auto& F = ens.ensemble.fluctuations;
    for (std::size_t si = 0; si < F.scales.size(); ++si) {
        for (std::size_t qi = 1; qi < F.q.size(); ++qi) CHECK(F.at(qi, si) >= F.at(qi - 1, si) * (1 - 1e-12));
    }
}

TEST_CASE("ensemble: seeds, determinism and thread invariance") {
    const auto c = iid_corpus(30, 40, 30, 8);
    mfdfa::Config one, four;
    four.threads = 4;
    const auto a = run_permutation_ensemble(c, 10, RngSeed{7}, one, true);
    const auto b = run_permutation_ensemble(c, 10, RngSeed{7}, four, true);
    std::set<std::uint64_t> seeds;
    for (std::size_t i = 0; i < 10; ++i) {
        seeds.insert(a.members[i].seed.value);
        CHECK(a.members[i].seed.value == 7 + i);
        CHECK(a.member_orders[i] == b.member_orders[i]);
        CHECK(a.member_fluctuations[i].values == b.member_fluctuations[i].values);
        CHECK(same_summary(a.members[i].summary, b.members[i].summary));
    }
    CHECK(seeds.size() == 10);
    CHECK(a.ensemble.fluctuations.values == b.ensemble.fluctuations.values);
    CHECK(a.member_fluctuations.size() == 10);
    CHECK(run_permutation_ensemble(c, 10, RngSeed{7}, one).member_fluctuations.empty());
}

TEST_CASE("ensemble: a ramp chapter fails exactly the aligned members") {
    // The profile of a window starting at a depends on u[a+1 .. a+s-1] up to
    // a constant, so a size-60 window is exactly quadratic iff it starts at
    // the ramp or one position before it, in the left or the right tiling.
    const std::size_t R = 60;
    auto c = iid_corpus(40, 40, 41, 9);
    c.chapters[7].lengths.clear();
    for (std::size_t i = 1; i <= R; ++i) c.chapters[7].lengths.push_back(static_cast<double>(i));
    mfdfa::Config cfg;
    cfg.scales = mfdfa::Config::log_spaced_scales(R, 450, 12);
    const auto ens = run_permutation_ensemble(c, 40, RngSeed{1}, cfg);
    const std::size_t T = c.printed_series().size();
    const std::size_t tiled = (T / R) * R;
    std::size_t expected = 0;
    for (std::size_t i = 0; i < ens.n_members; ++i) {
        const auto& order = ens.member_orders[i].order;
        std::size_t start = 0;
        for (std::size_t ch : order) {
            if (ch == 7) break;
            start += c.chapters[ch].lengths.size();
        }
        bool aligned = false;
        for (std::size_t a = start == 0 ? 0 : start - 1; a <= start; ++a) {
            aligned = aligned || (a % R == 0 && a + R <= tiled) || ((T - a) % R == 0 && T - a <= tiled);
        }
        expected += aligned;
        CHECK(ens.members[i].ok == !aligned);
        if (aligned) CHECK(ens.members[i].error.find("DegenerateWindow") != std::string::npos);
    }
    CHECK(ens.failures == expected);
    REQUIRE(ens.failures > 0);
    CHECK(ens.failures * 10 <= ens.n_members);
    CHECK(std::abs(ens.ensemble.hurst.hurst - mean_of(ens.members, &SpectrumSummary::hurst)) < 1e-10);
}

TEST_CASE("ensemble: too many failing members is EnsembleDegraded") {
    auto c = iid_corpus(40, 40, 41, 10);
    c.chapters[7].lengths.clear();
    for (int i = 1; i <= 12; ++i) c.chapters[7].lengths.push_back(i);
    mfdfa::Config cfg;
    cfg.scales = mfdfa::Config::log_spaced_scales(12, 400, 20);
    CHECK_THROWS_MATCHES(run_permutation_ensemble(c, 20, RngSeed{1}, cfg), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.kind() == ErrorKind::EnsembleDegraded; }));
    CHECK_THROWS_AS(run_permutation_ensemble(c, 0, RngSeed{1}, cfg), Error);
}

TEST_CASE("surrogate: Fourier phases collapse a cascade to alpha_0 = 0.5") {
    const auto s = testing::volatility_cascade(0.7, 14, 3);
    mfdfa::Config cfg;
    cfg.threads = 4;
    const auto rep = run_surrogate_test(s, SurrogateKind::Fourier, 10, RngSeed{1}, cfg);
    CHECK(std::abs(rep.mean_alpha_0 - 0.5) <= 0.05);
    CHECK(rep.mean_delta_alpha < rep.original.delta_alpha);
    REQUIRE(rep.surrogates.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(rep.surrogates[i].seed.value == 1 + i);
    for (const auto& check : rep.checks) {
        INFO(check.name);
        CHECK(check.passed);
    }
}

TEST_CASE("surrogate: shuffling i.i.d. data leaves alpha_0 unchanged") {
    const auto s = testing::gaussian_noise(8192, 1);
    mfdfa::Config cfg;
    cfg.threads = 4;
    const auto rep = run_surrogate_test(s, SurrogateKind::Shuffle, 10, RngSeed{1}, cfg);
    CHECK(std::abs(rep.mean_alpha_0 - rep.original.alpha_0) < 0.05);
    REQUIRE(rep.checks.front().name == "histogram_preserved");
    CHECK(rep.checks.front().passed);
}

TEST_CASE("surrogate: shuffled sentence lengths keep a residual width near 0.2") {
    auto s = weibull::sample({0.1, 1.0}, 1 << 14, RngSeed{1});
    for (double& v : s.values) v += 1.0;
    mfdfa::Config cfg;
    cfg.threads = 4;
    cfg.scales = mfdfa::Config::log_spaced_scales(16, 3276, 40);
    const auto rep = run_surrogate_test(s, SurrogateKind::Shuffle, 20, RngSeed{1}, cfg);
    CHECK(std::abs(rep.mean_alpha_0 - 0.5) <= 0.05);
    CHECK(rep.mean_delta_alpha > 0.1);
    CHECK(rep.mean_delta_alpha < 0.3);
}

TEST_CASE("surrogate: shuffles preserve the fitted Weibull parameters") {
    auto s = weibull::sample({0.3, 1.4}, 4000, RngSeed{2});
    const auto before = weibull::fit(weibull::Histogram::from_series(s));
    const auto after = weibull::fit(weibull::Histogram::from_series(shuffle_sentences(s, RngSeed{9})));
    CHECK(before.params.p == after.params.p);
    CHECK(before.params.beta == after.params.beta);
}

TEST_CASE("surrogate kinds and errors") {
    CHECK(parse_surrogate_kind("shuffle") == SurrogateKind::Shuffle);
    CHECK(to_string(parse_surrogate_kind("fourier")) == "fourier");
    CHECK_THROWS_AS(parse_surrogate_kind("iaaft"), Error);
    CHECK_THROWS_AS(run_surrogate_test(testing::gaussian_noise(1000, 1), SurrogateKind::Shuffle, 0, RngSeed{1},
                                       mfdfa::Config{}),
                    Error);
}
