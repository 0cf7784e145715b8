#include "lexi/text_ingest.hpp"

#include <algorithm>
#include <regex>

#include "lexi/error.hpp"
#include "lexi/utf8.hpp"

namespace lexi {

namespace {

bool is_space(char32_t c) {
    if (c == U' ' || (c >= 0x09 && c <= 0x0D)) return true;
    switch (c) {
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000: case 0xFEFF:
            return true;
        default:
            return c >= 0x2000 && c <= 0x200A;
    }
}

// Letters and digits. Outside ASCII everything counts as alphanumeric except
// the Latin-1 punctuation/symbol block and the general punctuation and symbol
// planes, which is enough for Latin, Cyrillic, Greek and CJK prose.
bool is_alnum(char32_t c) {
    if (c < 0x80) {
        return (c >= U'0' && c <= U'9') || (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z');
    }
    if (c <= 0xBF) return c == 0xAA || c == 0xB5 || c == 0xBA;
    if (c == 0xD7 || c == 0xF7) return false;
    if (c >= 0x2000 && c <= 0x2BFF) return false;
    if (c >= 0x3000 && c <= 0x303F) return false;
    if (c >= 0xFE30 && c <= 0xFE4F) return false;
    if (c >= 0xFF00 && c <= 0xFF0F) return false;
    if (c >= 0xFF1A && c <= 0xFF20) return false;
    return true;
}

bool contains(const std::u32string& set, char32_t c) {
    return set.find(c) != std::u32string::npos;
}

struct Piece {
    enum class Kind { Marks, Text } kind;
    std::size_t begin = 0;  // index into the decoded code points
    std::size_t end = 0;
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n\f\v");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n\f\v");
    return s.substr(first, last - first + 1);
}

bool has_non_space(std::string_view text) {
    bool found = false;
    for_each_code_point(text, [&](char32_t c, std::size_t, std::size_t) {
        if (!is_space(c)) found = true;
    });
    return found;
}

}  // namespace

void IngestConfig::validate() const {
    for (char32_t c : sentence_end_marks) {
        if (contains(intra_marks, c)) {
            throw Error(ErrorKind::InvalidConfig,
                        "mark '" + encode_utf8(std::u32string(1, c)) +
                            "' is both sentence-ending and intra-sentence");
        }
    }
    for (char32_t c : sentence_end_marks + intra_marks) {
        if (is_space(c)) throw Error(ErrorKind::InvalidConfig, "whitespace cannot be a punctuation mark");
    }
    if (sentence_end_marks.empty()) {
        throw Error(ErrorKind::InvalidConfig, "at least one sentence-ending mark is required");
    }
}

std::string IngestConfig::canonical() const {
    std::string out;
    out += "chapter_delimiter=" + chapter_delimiter + "\n";
    out += std::string("count_unit=") + (count_unit == CountUnit::Words ? "words" : "characters") + "\n";
    out += std::string("delimiter_is_regex=") + (delimiter_is_regex ? "true" : "false") + "\n";
    out += "intra_marks=" + encode_utf8(intra_marks) + "\n";
    out += "sentence_end_marks=" + encode_utf8(sentence_end_marks) + "\n";
    return out;
}

TokenStream tokenize(std::string_view text, const IngestConfig& cfg) {
    cfg.validate();
    if (text.empty()) throw Error(ErrorKind::EmptyInput, "input text is empty");

    struct Cp {
        char32_t c;
        std::size_t offset;
        std::size_t bytes;
    };
    std::vector<Cp> cps;
    cps.reserve(text.size());
    for_each_code_point(text, [&](char32_t c, std::size_t off, std::size_t len) {
        cps.push_back({c, off, len});
    });

    TokenStream ts;
    auto slice = [&](std::size_t b, std::size_t e) {
        return std::string(text.substr(cps[b].offset, cps[e - 1].offset + cps[e - 1].bytes - cps[b].offset));
    };

    std::size_t i = 0;
    while (i < cps.size()) {
        if (is_space(cps[i].c)) {
            ++i;
            continue;
        }
        // One whitespace-delimited chunk, split into mark and text pieces.
        std::vector<Piece> pieces;
        while (i < cps.size() && !is_space(cps[i].c)) {
            const bool mark = contains(cfg.sentence_end_marks, cps[i].c) || contains(cfg.intra_marks, cps[i].c);
            const auto kind = mark ? Piece::Kind::Marks : Piece::Kind::Text;
            if (pieces.empty() || pieces.back().kind != kind) pieces.push_back({kind, i, i});
            pieces.back().end = ++i;
        }

        std::string cluster;
        std::size_t cluster_chars = 0;
        std::size_t cluster_offset = 0;
        bool cluster_has_end = false;
        auto flush_cluster = [&] {
            if (cluster.empty()) return;
            Token t;
            t.type = Token::Type::Mark;
            t.kind = cluster_has_end ? MarkKind::SentenceEnding : MarkKind::IntraSentence;
            t.text = std::move(cluster);
            t.chars = cluster_chars;
            t.offset = cluster_offset;
            ts.tokens.push_back(std::move(t));
            cluster.clear();
            cluster_chars = 0;
            cluster_has_end = false;
        };

        for (const auto& p : pieces) {
            if (p.kind == Piece::Kind::Marks) {
                if (cluster.empty()) cluster_offset = cps[p.begin].offset;
                for (std::size_t k = p.begin; k < p.end; ++k) {
                    if (contains(cfg.sentence_end_marks, cps[k].c)) cluster_has_end = true;
                }
                cluster += slice(p.begin, p.end);
                cluster_chars += p.end - p.begin;
                continue;
            }
            // Text piece: a word when it holds an alphanumeric; symbols at its
            // edges (quotes, brackets, inverted marks) are trimmed away.
            std::size_t b = p.begin, e = p.end;
            while (b < e && !is_alnum(cps[b].c)) ++b;
            while (e > b && !is_alnum(cps[e - 1].c)) --e;
            if (b == e) continue;  // pure symbols do not break a mark cluster
            flush_cluster();
            Token w;
            w.type = Token::Type::Word;
            w.text = slice(b, e);
            w.chars = e - b;
            w.offset = cps[b].offset;
            ts.tokens.push_back(std::move(w));
        }
        flush_cluster();
    }

    if (ts.tokens.empty()) throw Error(ErrorKind::EmptyInput, "input contains no words or marks");
    return ts;
}

std::string serialize(const TokenStream& ts) {
    std::string out;
    bool previous_was_word = false;
    for (const auto& t : ts.tokens) {
        if (!out.empty() && !(t.is_mark() && previous_was_word)) out += ' ';
        out += t.text;
        previous_was_word = t.is_word();
    }
    return out;
}

namespace {

TimeSeries extract_intervals(const TokenStream& ts, CountUnit unit, bool any_mark) {
    TimeSeries out;
    double current = 0.0;
    for (const auto& t : ts.tokens) {
        if (t.is_word()) {
            current += unit == CountUnit::Words ? 1.0 : static_cast<double>(t.chars);
        } else if (any_mark || t.is_end()) {
            if (current > 0.0) out.values.push_back(current);
            current = 0.0;
        }
    }
    return out;
}

}  // namespace

TimeSeries extract_slv(const TokenStream& ts, CountUnit unit) {
    TimeSeries out = extract_intervals(ts, unit, false);
    if (out.empty()) throw Error(ErrorKind::NoSentences, "no terminated sentence in token stream");
    out.label = "slv";
    return out;
}

TimeSeries extract_pmdv(const TokenStream& ts, CountUnit unit) {
    TimeSeries out = extract_intervals(ts, unit, true);
    if (out.empty()) throw Error(ErrorKind::NoMarks, "no terminated inter-mark interval in token stream");
    out.label = "pmdv";
    return out;
}

std::vector<ChapterText> split_chapters(std::string_view text, const IngestConfig& cfg) {
    std::vector<ChapterText> chapters;
    if (cfg.chapter_delimiter.empty()) {
        chapters.push_back({"1", text, 0});
        return chapters;
    }

    std::regex pattern;
    if (cfg.delimiter_is_regex) {
        try {
            pattern = std::regex(cfg.chapter_delimiter, std::regex::ECMAScript);
        } catch (const std::regex_error& e) {
            throw Error(ErrorKind::InvalidConfig, std::string("bad chapter delimiter pattern: ") + e.what());
        }
    }
    auto is_delimiter = [&](std::string_view line) {
        const auto t = trim(line);
        if (cfg.delimiter_is_regex) return std::regex_match(t.begin(), t.end(), pattern);
        return t.substr(0, cfg.chapter_delimiter.size()) == cfg.chapter_delimiter;
    };

    std::string label = "preamble";
    std::size_t body_start = 0;
    bool seen_delimiter = false;
    auto close = [&](std::size_t end) {
        const auto body = text.substr(body_start, end - body_start);
        if (seen_delimiter || has_non_space(body)) chapters.push_back({label, body, body_start});
    };

    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        const std::size_t line_end = nl == std::string_view::npos ? text.size() : nl;
        const std::size_t next = nl == std::string_view::npos ? text.size() : nl + 1;
        if (is_delimiter(text.substr(pos, line_end - pos))) {
            close(pos);
            label = std::string(trim(text.substr(pos, line_end - pos)));
            body_start = next;
            seen_delimiter = true;
        }
        pos = next;
    }
    close(text.size());

    if (!seen_delimiter) {
        chapters.clear();
        chapters.push_back({"1", text, 0});
    }
    return chapters;
}

ChapterizedCorpus segment_chapters(std::string_view text, const IngestConfig& cfg) {
    cfg.validate();
    if (text.empty()) throw Error(ErrorKind::EmptyInput, "input text is empty");
    validate_utf8(text);

    ChapterizedCorpus corpus;
    const auto parts = split_chapters(text, cfg);
    for (std::size_t idx = 0; idx < parts.size(); ++idx) {
        const auto& part = parts[idx];
        try {
            const auto ts = tokenize(part.text, cfg);
            corpus.chapters.push_back({part.label, extract_slv(ts, cfg.count_unit).values});
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::EmptyInput || e.kind() == ErrorKind::NoSentences) {
                throw Error(ErrorKind::EmptyChapter,
                            "chapter " + std::to_string(idx + 1) + " (\"" + part.label +
                                "\") contains no sentence, byte offset " + std::to_string(part.offset),
                            idx);
            }
            throw;
        }
    }
    return corpus;
}

namespace {

SummaryTriple summarize(std::span<const double> v) {
    SummaryTriple s;
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
    double total = 0.0;
    for (double x : v) total += x;
    s.mean = total / static_cast<double>(v.size());
    return s;
}

}  // namespace

CorpusStats corpus_stats(const ChapterizedCorpus& corpus, const TimeSeries& char_series) {
    if (corpus.chapters.empty()) throw Error(ErrorKind::EmptyInput, "corpus has no chapters");
    const TimeSeries words = corpus.printed_series();
    if (words.empty()) throw Error(ErrorKind::EmptyInput, "corpus has no sentences");
    if (char_series.empty()) throw Error(ErrorKind::EmptyInput, "character series is empty");

    std::vector<double> chapter_sizes;
    chapter_sizes.reserve(corpus.chapters.size());
    for (const auto& ch : corpus.chapters) chapter_sizes.push_back(static_cast<double>(ch.lengths.size()));

    CorpusStats st;
    st.words = summarize(words.values);
    st.characters = summarize(char_series.values);
    st.chapter_sentences = summarize(chapter_sizes);
    st.sentence_count = words.size();
    st.chapter_count = corpus.chapters.size();
    return st;
}

}  // namespace lexi
