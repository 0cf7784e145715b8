#include "lexi/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lexi/acf.hpp"
#include "lexi/error.hpp"
#include "lexi/experiments.hpp"
#include "lexi/format.hpp"
#include "lexi/io.hpp"

namespace lexi::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kPanelBounds[] = {2.0, 4.0, 7.0};

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = text.find(sep, pos);
        out.push_back(text.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

template <typename T>
T parse_number(const std::string& text, const std::string& what) {
    T v{};
    const char* first = text.data();
    const char* last = first + text.size();
    while (first < last && *first == ' ') ++first;
    while (last > first && last[-1] == ' ') --last;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || first == last) {
        throw Error(ErrorKind::InvalidConfig, what + ": '" + text + "' is not a valid number");
    }
    return v;
}

template <typename T>
std::pair<T, T> parse_pair(const std::string& text, const std::string& what) {
    const auto parts = split(text, ',');
    if (parts.size() != 2) throw Error(ErrorKind::InvalidConfig, what + ": expected 'lo,hi', got '" + text + "'");
    return {parse_number<T>(parts[0], what), parse_number<T>(parts[1], what)};
}

std::string input_digest(const fs::path& path) { return hex64(fnv1a64(io::read_file(path))); }

json spectrum_json(const mfdfa::Result& r) {
    json j;
    j["H"] = r.hurst.hurst;
    j["delta_h"] = r.hurst.delta_h;
    j["delta_alpha"] = r.spectrum.delta_alpha;
    j["A_alpha"] = r.spectrum.asymmetry;
    j["alpha_0"] = r.spectrum.alpha_0;
    j["alpha_min"] = r.spectrum.alpha_min;
    j["alpha_max"] = r.spectrum.alpha_max;
    j["folded"] = r.spectrum.folded;
    j["fit_range"] = {r.hurst.fit_range.lo, r.hurst.fit_range.hi};
    j["scales_used"] = r.hurst.scales_used;
    j["q_range"] = {r.spectrum.q.front(), r.spectrum.q.back()};
    return j;
}

json header_json(const std::string& hash) {
    json j;
    j["schema_version"] = io::kSchemaVersion;
    j["config_hash"] = hash;
    return j;
}

void write_json(const fs::path& path, const json& j) { io::write_file(path, j.dump(2) + "\n"); }

std::string spectrum_csv(const mfdfa::MultifractalSpectrum& spec, const std::string& hash) {
    io::CsvWriter csv(hash, {"q", "h", "tau", "alpha", "f"});
    for (std::size_t i = 0; i < spec.q.size(); ++i) {
        csv.row({io::cell(spec.q[i]), io::cell(spec.h[i]), io::cell(spec.tau[i]), io::cell(spec.alpha[i]),
                 io::cell(spec.f_alpha[i])});
    }
    return csv.str();
}

/// fq_matrix.csv, hurst.csv, spectrum.csv and the q-range panels.
/// Returns the panel widths for the summary.
json write_mfdfa_tables(const fs::path& dir, const std::string& hash, const mfdfa::Result& r) {
    const auto& F = r.fluctuations;
    io::CsvWriter fq(hash, {"s", "q", "F", "M_s"});
    for (std::size_t si = 0; si < F.scales.size(); ++si) {
        for (std::size_t qi = 0; qi < F.q.size(); ++qi) {
            fq.row({io::cell(F.scales[si]), io::cell(F.q[qi]), io::cell(F.at(qi, si)), io::cell(F.window_counts[si])});
        }
    }
    io::write_file(dir / "fq_matrix.csv", fq.str());

    io::CsvWriter hurst(hash, {"q", "h", "r2"});
    for (std::size_t i = 0; i < r.hurst.q.size(); ++i) {
        hurst.row({io::cell(r.hurst.q[i]), io::cell(r.hurst.h[i]), io::cell(r.hurst.r2[i])});
    }
    io::write_file(dir / "hurst.csv", hurst.str());
    io::write_file(dir / "spectrum.csv", spectrum_csv(r.spectrum, hash));

    json panels = json::array();
    const double q_top = r.spectrum.q.back();
    for (double bound : kPanelBounds) {
        if (bound > q_top + 1e-9) continue;
        const auto panel = mfdfa::restrict_q_range(r.spectrum, -bound, bound);
        const std::string name = "spectrum_q" + std::to_string(static_cast<int>(bound)) + ".csv";
        io::write_file(dir / name, spectrum_csv(panel, hash));
        json p;
        p["file"] = name;
        p["q_range"] = {-bound, bound};
        p["delta_alpha"] = panel.delta_alpha;
        p["alpha_0"] = panel.alpha_0;
        panels.push_back(std::move(p));
    }
    return panels;
}

json stats_json(const CorpusStats& st) {
    const auto triple = [](const SummaryTriple& t) {
        json j;
        j["min"] = t.min;
        j["max"] = t.max;
        j["mean"] = t.mean;
        return j;
    };
    json j;
    j["sentence_length_words"] = triple(st.words);
    j["sentence_length_characters"] = triple(st.characters);
    j["chapter_length_sentences"] = triple(st.chapter_sentences);
    j["sentence_count"] = st.sentence_count;
    j["chapter_count"] = st.chapter_count;
    return j;
}

void ingest_one(std::string_view text, const fs::path& dir, const CommonOptions& common, const std::string& hash) {
    IngestConfig words_cfg = common.ingest;
    words_cfg.count_unit = CountUnit::Words;
    IngestConfig chars_cfg = common.ingest;
    chars_cfg.count_unit = CountUnit::Characters;

    const ChapterizedCorpus words = segment_chapters(text, words_cfg);
    const ChapterizedCorpus chars = segment_chapters(text, chars_cfg);
    const ChapterizedCorpus& configured = common.ingest.count_unit == CountUnit::Words ? words : chars;

    TimeSeries slv = configured.printed_series();
    slv.label = "slv";
    TimeSeries slv_chars = chars.printed_series();
    slv_chars.label = "slv_chars";

    TimeSeries pmdv;
    pmdv.label = "pmdv";
    const auto chapters = split_chapters(text, common.ingest);
    for (std::size_t i = 0; i < chapters.size(); ++i) {
        const TokenStream ts = tokenize(chapters[i].text, common.ingest);
        try {
            const TimeSeries part = extract_pmdv(ts, common.ingest.count_unit);
            pmdv.values.insert(pmdv.values.end(), part.values.begin(), part.values.end());
        } catch (const Error& e) {
            throw Error(e.kind(), "chapter " + std::to_string(i + 1) + " ('" + chapters[i].label +
                                      "'): " + e.message(), i);
        }
    }

    io::write_file(dir / "slv.csv", io::format_series(slv, hash));
    io::write_file(dir / "slv_chars.csv", io::format_series(slv_chars, hash));
    io::write_file(dir / "pmdv.csv", io::format_series(pmdv, hash));
    io::write_file(dir / "chapters.json", io::format_corpus(configured, hash));

    json stats = header_json(hash);
    stats["count_unit"] = common.ingest.count_unit == CountUnit::Words ? "words" : "characters";
    stats["pmdv_length"] = pmdv.size();
    stats["corpus"] = stats_json(corpus_stats(words, slv_chars));
    write_json(dir / "stats.json", stats);
}

bool integer_valued(const TimeSeries& s) {
    return std::all_of(s.values.begin(), s.values.end(),
                       [](double v) { return v >= 0.0 && v == std::floor(v) && v <= 1e9; });
}

std::vector<experiments::NamedOrder> collect_orders(const ChapterizedCorpus& corpus, const CommonOptions& common,
                                                    const ExperimentOptions& opts) {
    const std::size_t n = corpus.chapter_count();
    std::vector<experiments::NamedOrder> orders;
    std::vector<std::string> names = opts.orders;
    if (names.empty() && common.permutation_files.empty()) names = {"printed", "reverse"};
    std::size_t random_count = 0;
    for (const auto& name : names) {
        if (name == "printed") {
            orders.push_back({"printed", Permutation::identity(n)});
        } else if (name == "reverse") {
            orders.push_back({"reverse", Permutation::reversal(n)});
        } else if (name == "random") {
            const RngSeed seed = RngSeed{common.seed}.derive(random_count);
            orders.push_back({"random" + std::to_string(random_count), random_permutation(n, seed)});
            ++random_count;
        } else {
            throw Error(ErrorKind::InvalidConfig, "unknown order '" + name + "' (expected printed, reverse or random)");
        }
    }
    for (const auto& path : common.permutation_files) {
        std::string name = path.stem().string();
        const bool taken = std::any_of(orders.begin(), orders.end(), [&](const auto& o) { return o.name == name; });
        if (taken || name.empty()) name = "perm" + std::to_string(orders.size());
        orders.push_back({name, io::read_permutation(path, n, opts.allow_repeats)});
    }
    return orders;
}

TimeSeries load_experiment_series(const fs::path& input) {
    if (input.extension() == ".json") {
        TimeSeries s = io::read_corpus(input).printed_series();
        s.label = "printed";
        return s;
    }
    return io::read_series(input);
}

std::string experiment_extra(const ExperimentOptions& opts) {
    std::string extra = "experiment.mode=" + opts.mode + "\n";
    if (opts.mode == "orders") {
        extra += "experiment.orders=" + join(opts.orders, ',') + "\n";
        extra += std::string("experiment.allow_repeats=") + (opts.allow_repeats ? "true" : "false") + "\n";
    } else if (opts.mode == "ensemble") {
        extra += "experiment.n=" + std::to_string(opts.n) + "\n";
        extra += std::string("experiment.keep_members=") + (opts.keep_members ? "true" : "false") + "\n";
    } else {
        extra += "experiment.kind=" + opts.kind + "\n";
        extra += "experiment.n=" + std::to_string(opts.n) + "\n";
    }
    return extra;
}

/// Permutation file with the hash as a leading comment; still parseable.
std::string order_file(const Permutation& p, const std::string& hash) {
    return "# config_hash=" + hash + "\n" + io::format_permutation(p);
}

void run_orders(const fs::path& input, const CommonOptions& common, const ExperimentOptions& opts,
                const std::string& hash, std::ostream& log) {
    const ChapterizedCorpus corpus = io::read_corpus(input);
    const auto orders = collect_orders(corpus, common, opts);
    mfdfa::Config cfg = common.mfdfa;
    cfg.threads = common.threads;
    const auto results = experiments::run_order_study(corpus, orders, cfg, opts.allow_repeats);

    io::CsvWriter table(hash, {"order", "H", "delta_h", "delta_alpha", "A_alpha", "alpha_0", "folded"});
    json summary = header_json(hash);
    summary["mode"] = "orders";
    summary["orders"] = json::array();
    for (const auto& r : results) {
        const fs::path dir = common.out / r.name;
        io::write_file(dir / "order.txt", order_file(r.order, hash));
        io::write_file(dir / "series.csv", io::format_series(r.series, hash));
        json entry = spectrum_json(r.result);
        entry["panels"] = write_mfdfa_tables(dir, hash, r.result);
        json file = header_json(hash);
        file["order"] = r.name;
        file["mfdfa"] = entry;
        write_json(dir / "summary.json", file);
        entry["order"] = r.name;
        summary["orders"].push_back(entry);
        const auto& sp = r.result.spectrum;
        table.row({r.name, io::cell(r.result.hurst.hurst), io::cell(r.result.hurst.delta_h), io::cell(sp.delta_alpha),
                   io::cell(sp.asymmetry), io::cell(sp.alpha_0), sp.folded ? "true" : "false"});
        log << r.name << ": H=" << format_number(r.result.hurst.hurst)
            << " delta_alpha=" << format_number(sp.delta_alpha) << "\n";
    }
    io::write_file(common.out / "orders_summary.csv", table.str());
    write_json(common.out / "orders_summary.json", summary);
}

json summary_stats(const std::vector<experiments::MemberRecord>& members, double experiments::SpectrumSummary::*field) {
    std::vector<double> v;
    for (const auto& m : members) {
        if (m.ok) v.push_back(m.summary.*field);
    }
    json j;
    if (v.empty()) return j;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    j["mean"] = mean;
    j["sd"] = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    j["min"] = *std::min_element(v.begin(), v.end());
    j["max"] = *std::max_element(v.begin(), v.end());
    return j;
}

std::string members_csv(const std::vector<experiments::MemberRecord>& members, const std::string& hash) {
    io::CsvWriter csv(hash, {"index", "seed", "ok", "H", "delta_h", "delta_alpha", "A_alpha", "alpha_0", "folded",
                             "error"});
    for (const auto& m : members) {
        std::string error = m.error;
        std::replace(error.begin(), error.end(), ',', ';');
        std::replace(error.begin(), error.end(), '\n', ' ');
        const auto& s = m.summary;
        csv.row({io::cell(m.index), std::to_string(m.seed.value), m.ok ? "true" : "false", io::cell(s.hurst),
                 io::cell(s.delta_h), io::cell(s.delta_alpha), io::cell(s.asymmetry), io::cell(s.alpha_0),
                 s.folded ? "true" : "false", error});
    }
    return csv.str();
}

void run_ensemble(const fs::path& input, const CommonOptions& common, const ExperimentOptions& opts,
                  const std::string& hash, std::ostream& log) {
    const ChapterizedCorpus corpus = io::read_corpus(input);
    mfdfa::Config cfg = common.mfdfa;
    cfg.threads = common.threads;
    const auto ens = experiments::run_permutation_ensemble(corpus, opts.n, RngSeed{common.seed}, cfg, opts.keep_members);
    const auto printed = mfdfa::analyze(corpus.printed_series(), ens.config);

    const fs::path dir = common.out / ("ensemble-" + hash);
    json summary = header_json(hash);
    summary["mode"] = "ensemble";
    summary["n_members"] = ens.n_members;
    summary["failures"] = ens.failures;
    summary["base_seed"] = common.seed;
    summary["ensemble"] = spectrum_json(ens.ensemble);
    summary["ensemble"]["panels"] = write_mfdfa_tables(dir, hash, ens.ensemble);
    summary["printed"] = spectrum_json(printed);
    json stats;
    stats["H"] = summary_stats(ens.members, &experiments::SpectrumSummary::hurst);
    stats["delta_h"] = summary_stats(ens.members, &experiments::SpectrumSummary::delta_h);
    stats["delta_alpha"] = summary_stats(ens.members, &experiments::SpectrumSummary::delta_alpha);
    stats["A_alpha"] = summary_stats(ens.members, &experiments::SpectrumSummary::asymmetry);
    stats["alpha_0"] = summary_stats(ens.members, &experiments::SpectrumSummary::alpha_0);
    summary["members"] = stats;
    write_json(dir / "ensemble_summary.json", summary);
    io::write_file(dir / "members.csv", members_csv(ens.members, hash));

    if (opts.keep_members) {
        for (std::size_t i = 0; i < ens.members.size(); ++i) {
            if (!ens.members[i].ok) continue;
            const auto& F = ens.member_fluctuations[i];
            io::CsvWriter csv(hash, {"s", "q", "F"});
            for (std::size_t si = 0; si < F.scales.size(); ++si) {
                for (std::size_t qi = 0; qi < F.q.size(); ++qi) {
                    csv.row({io::cell(F.scales[si]), io::cell(F.q[qi]), io::cell(F.at(qi, si))});
                }
            }
            char name[32];
            std::snprintf(name, sizeof name, "member_%05zu", i);
            io::write_file(dir / "members" / (std::string(name) + "_fq.csv"), csv.str());
            io::write_file(dir / "members" / (std::string(name) + "_order.txt"),
                           order_file(ens.member_orders[i], hash));
        }
    }
    log << "ensemble of " << ens.n_members << " (" << ens.failures << " failed): delta_alpha="
        << format_number(ens.ensemble.spectrum.delta_alpha) << " -> " << dir.string() << "\n";
}

void run_surrogates(const fs::path& input, const CommonOptions& common, const ExperimentOptions& opts,
                    const std::string& hash, std::ostream& log) {
    const TimeSeries series = load_experiment_series(input);
    const auto kind = experiments::parse_surrogate_kind(opts.kind);
    mfdfa::Config cfg = common.mfdfa;
    cfg.threads = common.threads;
    const auto rep = experiments::run_surrogate_test(series, kind, opts.n, RngSeed{common.seed}, cfg);

    json j = header_json(hash);
    j["mode"] = "surrogate";
    j["kind"] = experiments::to_string(rep.kind);
    j["n"] = rep.n;
    j["seeds"] = json::array();
    for (const auto& m : rep.surrogates) j["seeds"].push_back(m.seed.value);
    json orig;
    orig["H"] = rep.original.hurst;
    orig["delta_h"] = rep.original.delta_h;
    orig["delta_alpha"] = rep.original.delta_alpha;
    orig["A_alpha"] = rep.original.asymmetry;
    orig["alpha_0"] = rep.original.alpha_0;
    j["original"] = orig;
    j["alpha_0"] = {{"mean", rep.mean_alpha_0}, {"sd", rep.sd_alpha_0}};
    j["delta_alpha"] = {{"mean", rep.mean_delta_alpha}, {"sd", rep.sd_delta_alpha}};
    j["checks"] = json::object();
    for (const auto& c : rep.checks) j["checks"][c.name] = c.passed;
    write_json(common.out / "surrogate_report.json", j);
    io::write_file(common.out / "surrogates.csv", members_csv(rep.surrogates, hash));
    log << experiments::to_string(rep.kind) << " surrogates: alpha_0=" << format_number(rep.mean_alpha_0)
        << " +- " << format_number(rep.sd_alpha_0) << ", delta_alpha=" << format_number(rep.mean_delta_alpha)
        << " (original " << format_number(rep.original.delta_alpha) << ")\n";
}

}  // namespace

std::string canonical_run_config(const std::string& command, const std::vector<fs::path>& inputs,
                                 const CommonOptions& common, const std::string& extra) {
    std::string out = "command=" + command + "\n";
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        out += "input." + std::to_string(i) + "=" + input_digest(inputs[i]) + "\n";
    }
    for (std::size_t i = 0; i < common.permutation_files.size(); ++i) {
        out += "permutation_file." + std::to_string(i) + "=" + input_digest(common.permutation_files[i]) + "\n";
    }
    out += common.ingest.canonical();
    out += common.mfdfa.canonical();
    out += "seed=" + std::to_string(common.seed) + "\n";
    out += extra;
    return out;
}

std::string config_hash(const std::string& canonical) { return hex64(fnv1a64(canonical)); }

void cmd_ingest(const std::vector<fs::path>& inputs, const CommonOptions& common, std::ostream& log) {
    if (inputs.empty()) throw Error(ErrorKind::InvalidArgument, "ingest needs at least one input file");
    common.ingest.validate();
    const std::string canonical = canonical_run_config("ingest", inputs, common, "");
    const std::string hash = config_hash(canonical);
    for (const auto& path : inputs) {
        const fs::path dir = inputs.size() == 1 ? common.out : common.out / path.stem();
        const std::string text = io::read_file(path);
        try {
            ingest_one(text, dir, common, hash);
        } catch (const Error& e) {
            throw Error(e.kind(), path.string() + ": " + e.message(), e.detail());
        }
        io::write_file(dir / "config.txt", "# config_hash=" + hash + "\n" + canonical);
        log << path.string() << " -> " << dir.string() << "\n";
    }
}

void cmd_analyze(const fs::path& series_path, const CommonOptions& common, const AnalyzeOptions& opts,
                 std::ostream& log) {
    const TimeSeries s = io::read_series(series_path);
    std::string extra = "analyze.max_lag=" + std::to_string(opts.max_lag) + "\n";
    extra += std::string("weibull.include_zero_bin=") + (opts.fit.include_zero_bin ? "true" : "false") + "\n";
    extra += std::string("weibull.log_weighting=") + (opts.fit.log_weighting ? "true" : "false") + "\n";
    const std::string canonical = canonical_run_config("analyze", {series_path}, common, extra);
    const std::string hash = config_hash(canonical);
    const fs::path& dir = common.out;

    json summary = header_json(hash);
    summary["input_length"] = s.size();

    // ACF
    const std::size_t lag_cap = s.size() >= 3 ? (s.size() - 1) / 2 : 0;
    const std::size_t max_lag = std::min(opts.max_lag, lag_cap);
    const AcfResult ac = acf(s, max_lag);
    io::CsvWriter acf_csv(hash, {"lag", "rho", "noise"});
    io::CsvWriter loglog(hash, {"log10_lag", "log10_rho"});
    for (std::size_t i = 0; i < ac.lags.size(); ++i) {
        acf_csv.row({io::cell(ac.lags[i]), io::cell(ac.rho[i]), io::cell(ac.noise_level)});
        if (ac.lags[i] > 0 && ac.rho[i] > 0.0) {
            loglog.row({io::cell(std::log10(static_cast<double>(ac.lags[i]))), io::cell(std::log10(ac.rho[i]))});
        }
    }
    io::write_file(dir / "acf.csv", acf_csv.str());
    io::write_file(dir / "acf_loglog.csv", loglog.str());
    summary["acf"] = {{"max_lag", max_lag},
                      {"noise_level", ac.noise_level},
                      {"fraction_below_noise", ac.fraction_below_noise(1, max_lag)}};

    // Weibull
    if (integer_valued(s)) {
        const auto hist = weibull::Histogram::from_series(s);
        io::CsvWriter hcsv(hash, {"k", "count", "frequency"});
        for (std::size_t k = 0; k < hist.counts.size(); ++k) {
            hcsv.row({io::cell(k), io::cell(hist.counts[k]), io::cell(hist.frequency(k))});
        }
        io::write_file(dir / "histogram.csv", hcsv.str());

        const auto fit = weibull::fit(hist, opts.fit);
        json wj = header_json(hash);
        wj["p"] = fit.params.p;
        wj["beta"] = fit.params.beta;
        wj["sse"] = fit.sse;
        wj["bins_used"] = fit.bins_used;
        wj["include_zero_bin"] = opts.fit.include_zero_bin;
        wj["log_weighting"] = opts.fit.log_weighting;
        write_json(dir / "weibull_fit.json", wj);

        io::CsvWriter curve(hash, {"k", "pmf", "cdf", "observed"});
        for (std::size_t k = 0; k < hist.counts.size(); ++k) {
            curve.row({io::cell(k), io::cell(weibull::pmf(k, fit.params)), io::cell(weibull::cdf(k, fit.params)),
                       io::cell(hist.frequency(k))});
        }
        io::write_file(dir / "weibull_curve.csv", curve.str());
        summary["weibull"] = {{"p", fit.params.p}, {"beta", fit.params.beta}, {"sse", fit.sse}};
    } else {
        summary["weibull"] = nullptr;
        log << "series is not integer-valued; Weibull fit skipped\n";
    }

    // MFDFA
    mfdfa::Config cfg = common.mfdfa;
    cfg.threads = common.threads;
    const auto result = mfdfa::analyze(s, cfg);
    json mj = spectrum_json(result);
    mj["panels"] = write_mfdfa_tables(dir, hash, result);
    summary["mfdfa"] = mj;
    summary["H"] = result.hurst.hurst;
    summary["delta_h"] = result.hurst.delta_h;
    summary["delta_alpha"] = result.spectrum.delta_alpha;
    summary["A_alpha"] = result.spectrum.asymmetry;
    summary["alpha_0"] = result.spectrum.alpha_0;
    summary["fit_range"] = {result.hurst.fit_range.lo, result.hurst.fit_range.hi};
    write_json(dir / "summary.json", summary);
    io::write_file(dir / "config.txt", "# config_hash=" + hash + "\n" + canonical + result.config.canonical());
    log << series_path.string() << ": H=" << format_number(result.hurst.hurst)
        << " delta_alpha=" << format_number(result.spectrum.delta_alpha) << " -> " << dir.string() << "\n";
}

void cmd_experiment(const fs::path& input, const CommonOptions& common, const ExperimentOptions& opts,
                    std::ostream& log) {
    if (opts.mode != "orders" && opts.mode != "ensemble" && opts.mode != "surrogate") {
        throw Error(ErrorKind::InvalidConfig, "unknown mode '" + opts.mode + "' (expected orders, ensemble or surrogate)");
    }
    const std::string canonical = canonical_run_config("experiment", {input}, common, experiment_extra(opts));
    const std::string hash = config_hash(canonical);
    if (opts.mode == "orders") {
        run_orders(input, common, opts, hash, log);
    } else if (opts.mode == "ensemble") {
        run_ensemble(input, common, opts, hash, log);
    } else {
        run_surrogates(input, common, opts, hash, log);
    }
    io::write_file(common.out / "config.txt", "# config_hash=" + hash + "\n" + canonical);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sentence-length series extraction and multifractal analysis", "lexi"};
    app.set_config("--config", "", "Key-value configuration file; command-line flags override it");
    app.require_subcommand(1);

    CommonOptions common;
    std::string q_range, scale_range, fit_range;
    double q_step = 0.25;
    std::string count_unit = "words";

    app.add_option("--seed", common.seed, "Base RNG seed")->capture_default_str();
    app.add_option("--threads", common.threads, "Worker cap")->check(CLI::Range(1u, 1024u))->capture_default_str();
    app.add_option("--out", common.out, "Output directory")->capture_default_str();
    app.add_option("--q-range", q_range, "q grid bound: 'Q' or '-Q,Q' (default 7)");
    app.add_option("--q-step", q_step, "q grid step")->capture_default_str();
    app.add_option("--scale-range", scale_range, "Scale grid 'lo,hi' (default derived from the series)");
    app.add_option("--scale-count", common.mfdfa.scale_count, "Number of log-spaced scales")->capture_default_str();
    app.add_option("--fit-range", fit_range, "Scales 'lo,hi' used for the h(q) fit (default: full grid)");
    app.add_option("--detrend-order", common.mfdfa.order, "Detrending polynomial order m")->capture_default_str();
    app.add_option("--chapter-delimiter", common.ingest.chapter_delimiter, "Chapter delimiter (line prefix)");
    app.add_flag("--delimiter-regex", common.ingest.delimiter_is_regex,
                 "Treat the delimiter as a regex matched against whole lines");
    app.add_option("--count-unit", count_unit, "Sentence length unit")
        ->check(CLI::IsMember({"words", "characters"}))
        ->capture_default_str();
    app.add_option("--permutation-file", common.permutation_files, "Chapter order file (repeatable)")
        ->check(CLI::ExistingFile);

    auto* ingest = app.add_subcommand("ingest", "Extract SLV/PMDV series and corpus statistics from UTF-8 text");
    std::vector<fs::path> ingest_inputs;
    ingest->add_option("inputs", ingest_inputs, "Text files")->required();

    auto* analyze = app.add_subcommand("analyze", "ACF, Weibull fit and MFDFA of one series file");
    fs::path series_path;
    AnalyzeOptions aopts;
    analyze->add_option("series", series_path, "Series file")->required();
    analyze->add_option("--max-lag", aopts.max_lag, "Largest ACF lag")->capture_default_str();
    bool exclude_zero = false;
    analyze->add_flag("--exclude-zero-bin", exclude_zero, "Leave the k=0 bin out of the Weibull fit");
    analyze->add_flag("--log-weights", aopts.fit.log_weighting, "Fit log-frequencies instead of frequencies");

    auto* experiment = app.add_subcommand("experiment", "Chapter-order, ensemble and surrogate studies");
    fs::path exp_input;
    ExperimentOptions eopts;
    experiment->add_option("input", exp_input, "chapters.json (or a series file for surrogates)")->required();
    experiment->add_option("--mode", eopts.mode, "Study to run")
        ->check(CLI::IsMember({"orders", "ensemble", "surrogate"}))
        ->capture_default_str();
    experiment->add_option("--order", eopts.orders, "printed, reverse or random (repeatable)");
    experiment->add_option("--kind", eopts.kind, "Surrogate kind")
        ->check(CLI::IsMember({"shuffle", "fourier"}))
        ->capture_default_str();
    experiment->add_option("--n", eopts.n, "Ensemble or surrogate count")->capture_default_str();
    experiment->add_flag("--keep-members", eopts.keep_members, "Write per-member fluctuation tables");
    experiment->add_flag("--allow-repeats", eopts.allow_repeats,
                         "Accept permutation files that repeat or omit chapters");

    for (auto* sub : {ingest, analyze, experiment}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        common.ingest.count_unit = count_unit == "words" ? CountUnit::Words : CountUnit::Characters;
        if (!q_range.empty()) {
            double q_max = 0.0;
            if (q_range.find(',') != std::string::npos) {
                const auto [lo, hi] = parse_pair<double>(q_range, "--q-range");
                if (std::abs(lo + hi) > 1e-12) {
                    throw Error(ErrorKind::InvalidConfig, "--q-range must be symmetric about 0");
                }
                q_max = hi;
            } else {
                q_max = parse_number<double>(q_range, "--q-range");
            }
            common.mfdfa.q_grid = mfdfa::Config::symmetric_q_grid(q_max, q_step);
        } else if (q_step != 0.25) {
            common.mfdfa.q_grid = mfdfa::Config::symmetric_q_grid(7.0, q_step);
        }
        if (!scale_range.empty()) {
            const auto [lo, hi] = parse_pair<std::size_t>(scale_range, "--scale-range");
            common.mfdfa.scales = mfdfa::Config::log_spaced_scales(lo, hi, common.mfdfa.scale_count);
        }
        if (!fit_range.empty()) {
            const auto [lo, hi] = parse_pair<std::size_t>(fit_range, "--fit-range");
            common.mfdfa.fit_range = mfdfa::FitRange{lo, hi};
        }
        aopts.fit.include_zero_bin = !exclude_zero;

        if (ingest->parsed()) {
            cmd_ingest(ingest_inputs, common, out);
        } else if (analyze->parsed()) {
            cmd_analyze(series_path, common, aopts, out);
        } else {
            cmd_experiment(exp_input, common, eopts, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace lexi::cli
