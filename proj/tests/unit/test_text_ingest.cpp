#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "lexi/error.hpp"
#include "lexi/text_ingest.hpp"

using namespace lexi;

namespace {

std::string kinds(const TokenStream& ts) {
    std::string out;
    for (const auto& t : ts.tokens) {
        if (!out.empty()) out += ' ';
        out += t.is_word() ? "W" : (t.is_end() ? "E" : "I");
    }
    return out;
}

std::vector<double> slv(std::string_view text) { return extract_slv(tokenize(text, {})).values; }
std::vector<double> pmdv(std::string_view text) { return extract_pmdv(tokenize(text, {})).values; }

bool is_end_char(char c) { return c == '.' || c == '!' || c == '?'; }

// Independent counter: split on end marks, count whitespace-delimited pieces
// holding an alphanumeric; drop empty pieces and the unterminated tail.
std::vector<double> oracle_slv(const std::string& text) {
    std::vector<double> out;
    std::string piece;
    auto count_words = [](const std::string& p) {
        double n = 0;
        std::size_t i = 0;
        while (i < p.size()) {
            while (i < p.size() && std::isspace(static_cast<unsigned char>(p[i]))) ++i;
            bool alnum = false;
            while (i < p.size() && !std::isspace(static_cast<unsigned char>(p[i]))) {
                alnum = alnum || std::isalnum(static_cast<unsigned char>(p[i]));
                ++i;
            }
            if (alnum) n += 1;
        }
        return n;
    };
    for (char c : text) {
        if (is_end_char(c)) {
            const double n = count_words(piece);
            if (n > 0) out.push_back(n);
            piece.clear();
        } else {
            piece += c;
        }
    }
    return out;
}

std::string random_word(std::mt19937_64& rng) {
    static const std::string letters = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::uniform_int_distribution<int> len(1, 9), pick(0, static_cast<int>(letters.size()) - 1);
    std::string w;
    for (int i = len(rng); i > 0; --i) w += letters[static_cast<std::size_t>(pick(rng))];
    return w;
}

// Sentences of random words; intra marks attached to words; end marks "." "!" "?" "?!" "...".
std::string random_sentence(std::mt19937_64& rng, std::size_t& words_out) {
    static const char* ends[] = {".", "!", "?", "?!", "..."};
    std::uniform_int_distribution<int> n_words(1, 25), coin(0, 5), end_pick(0, 4);
    const int n = n_words(rng);
    std::string s;
    for (int i = 0; i < n; ++i) {
        if (i) s += ' ';
        s += random_word(rng);
        if (i + 1 < n && coin(rng) == 0) s += ',';
    }
    s += ends[end_pick(rng)];
    words_out = static_cast<std::size_t>(n);
    return s;
}

}  // namespace

TEST_CASE("tokenize: words and end marks") {
    CHECK(kinds(tokenize("One two three. Four five.", {})) == "W W W E W W E");
}

TEST_CASE("tokenize: adjacent marks collapse into one cluster") {
    const auto ts = tokenize("Hello!? Yes.", {});
    CHECK(kinds(ts) == "W E W E");
    CHECK(ts.tokens[1].text == "!?");
}

TEST_CASE("tokenize: intra-sentence marks") {
    CHECK(kinds(tokenize("a, b; c.", {})) == "W I W I W E");
}

TEST_CASE("tokenize: mixed cluster is sentence-ending") {
    CHECK(kinds(tokenize("wait,. go", {})) == "W E W");
}

TEST_CASE("tokenize: ellipsis variants are a single end mark") {
    CHECK(kinds(tokenize("So... then", {})) == "W E W");
    CHECK(kinds(tokenize("So\xE2\x80\xA6 then", {})) == "W E W");
}

TEST_CASE("tokenize: empty text is rejected") {
    CHECK_THROWS_MATCHES(tokenize("", {}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.kind() == ErrorKind::EmptyInput; }));
}

TEST_CASE("tokenize: invalid UTF-8 reports the byte offset") {
    try {
        (void)segment_chapters("ok. \xC3(", {});
        FAIL("expected InvalidUtf8");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidUtf8);
        REQUIRE(e.detail());
        CHECK(*e.detail() == 4);
    }
}

TEST_CASE("tokenize: unicode words and punctuation") {
    const auto ts = tokenize("¿Qué pasó? Nada — todo bien.", {});
    CHECK(kinds(ts) == "W W E W I W W E");
    CHECK(ts.tokens[0].chars == 3);
}

TEST_CASE("tokenize: overlapping mark sets are an invalid config") {
    IngestConfig cfg;
    cfg.intra_marks += U'.';
    CHECK_THROWS_AS(tokenize("a. b.", cfg), Error);
}

TEST_CASE("serialize round-trips the token stream") {
    const std::vector<std::string> texts = {
        "One two three. Four five.", "Hello!? Yes.", "a, b; c. d", "¿Qué pasó? Nada — todo bien...",
        "  spaced   out ,  marks . here  "};
    for (const auto& text : texts) {
        const auto ts = tokenize(text, {});
        const auto again = tokenize(serialize(ts), {});
        REQUIRE(again.size() == ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) {
            CHECK(again.tokens[i].type == ts.tokens[i].type);
            CHECK(again.tokens[i].kind == ts.tokens[i].kind);
            CHECK(again.tokens[i].text == ts.tokens[i].text);
        }
        CHECK(serialize(again) == serialize(ts));
    }
}

TEST_CASE("extract_slv: direct counts") {
    CHECK(slv("One two three. Four five.") == std::vector<double>{3, 2});
    CHECK(slv("Go!") == std::vector<double>{1});
    CHECK(slv("Really?! Yes. No... Maybe") == std::vector<double>{1, 1, 1});
}

TEST_CASE("extract_slv: empty intervals collapse") {
    CHECK(slv("Hi. . ! Yes.") == std::vector<double>{1, 1});
}

TEST_CASE("extract_slv: no end mark") {
    CHECK_THROWS_MATCHES(slv("no end here, at all"), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.kind() == ErrorKind::NoSentences; }));
}

TEST_CASE("extract_slv: character unit counts word code points") {
    const auto ts = tokenize("Go! Stop now.", {});
    CHECK(extract_slv(ts, CountUnit::Characters).values == std::vector<double>{2, 7});
}

TEST_CASE("extract_pmdv: direct counts") {
    CHECK(pmdv("a, b; c. d") == std::vector<double>{1, 1, 1});
    CHECK(pmdv("One two three. Four five.") == std::vector<double>{3, 2});
    CHECK(pmdv("x, y, z; w.") == std::vector<double>{1, 1, 1, 1});
}

TEST_CASE("extract_pmdv: no marks") {
    CHECK_THROWS_MATCHES(pmdv("just words"), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.kind() == ErrorKind::NoMarks; }));
}

TEST_CASE("PMDV refines SLV: every sentence length is a sum of consecutive PMDV entries") {
    std::mt19937_64 rng(11);
    std::string text;
    for (int i = 0; i < 200; ++i) {
        std::size_t n = 0;
        text += random_sentence(rng, n) + " ";
    }
    const auto ts = tokenize(text, {});
    const auto s = extract_slv(ts).values;
    const auto p = extract_pmdv(ts).values;
    std::size_t j = 0;
    for (double len : s) {
        double acc = 0;
        while (acc < len && j < p.size()) acc += p[j++];
        REQUIRE(acc == len);
    }
    CHECK(j == p.size());
}

TEST_CASE("extract_slv: synthetic 1000-sentence corpus matches independent counter") {
    std::mt19937_64 rng(2024);
    std::string text;
    std::vector<double> built;
    for (int i = 0; i < 1000; ++i) {
        std::size_t n = 0;
        text += random_sentence(rng, n);
        text += (i % 7 == 0) ? "\n" : " ";
        built.push_back(static_cast<double>(n));
    }
    text += "trailing words without end";
    const auto got = slv(text);
    CHECK(got == oracle_slv(text));
    CHECK(got == built);
}

TEST_CASE("token budget: sentence words plus one mark never exceed the stream") {
    const std::string text = "One two three. Four five!? Six, seven... eight";
    const auto ts = tokenize(text, {});
    double used = 0;
    for (double v : extract_slv(ts).values) used += v + 1;
    CHECK(used <= static_cast<double>(ts.size()));
}

TEST_CASE("split_chapters: literal delimiter") {
    IngestConfig cfg;
    cfg.chapter_delimiter = "##";
    const auto ch = split_chapters("## A\nOne. Two.\n## B\nThree.\n## C\nFour five.\n", cfg);
    REQUIRE(ch.size() == 3);
    CHECK(ch[0].label == "## A");
    CHECK(ch[2].label == "## C");
}

TEST_CASE("split_chapters: regex delimiter") {
    IngestConfig cfg;
    cfg.chapter_delimiter = R"(\d+)";
    cfg.delimiter_is_regex = true;
    const auto corpus = segment_chapters("1\nA b. C.\n2\nD e f.\n 3 \nG.\n", cfg);
    REQUIRE(corpus.chapter_count() == 3);
    CHECK(corpus.chapters[0].lengths == std::vector<double>{2, 1});
    CHECK(corpus.chapters[1].lengths == std::vector<double>{3});
    CHECK(corpus.chapters[2].lengths == std::vector<double>{1});
}

TEST_CASE("segment_chapters: no delimiter found gives one chapter") {
    IngestConfig cfg;
    cfg.chapter_delimiter = "CHAPTER";
    const auto corpus = segment_chapters("One two. Three.", cfg);
    REQUIRE(corpus.chapter_count() == 1);
    CHECK(corpus.chapters[0].lengths == std::vector<double>{2, 1});
}

TEST_CASE("segment_chapters: empty chapter carries its index") {
    IngestConfig cfg;
    cfg.chapter_delimiter = "##";
    try {
        (void)segment_chapters("## A\nOne.\n## B\n\n## C\nTwo.\n", cfg);
        FAIL("expected EmptyChapter");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyChapter);
        REQUIRE(e.detail());
        CHECK(*e.detail() == 1);
    }
}

TEST_CASE("segment_chapters: preamble before the first delimiter") {
    IngestConfig cfg;
    cfg.chapter_delimiter = "##";
    CHECK(segment_chapters("\n  \n## A\nOne.\n", cfg).chapter_count() == 1);
    const auto with_text = segment_chapters("Epigraph here.\n## A\nOne.\n", cfg);
    REQUIRE(with_text.chapter_count() == 2);
    CHECK(with_text.chapters[0].lengths == std::vector<double>{2});
}

TEST_CASE("segment_chapters: sentences do not span chapters") {
    IngestConfig cfg;
    cfg.chapter_delimiter = "##";
    const auto corpus = segment_chapters("## A\nOne two. Three four\n## B\nfive six.\n", cfg);
    REQUIRE(corpus.chapter_count() == 2);
    CHECK(corpus.chapters[0].lengths == std::vector<double>{2});
    CHECK(corpus.chapters[1].lengths == std::vector<double>{2});
}

TEST_CASE("segment_chapters: concatenated chapters equal whole-text SLV when chapters end on marks") {
    IngestConfig cfg;
    cfg.chapter_delimiter = "@@";
    std::mt19937_64 rng(5);
    std::string text, flat;
    for (int c = 0; c < 12; ++c) {
        text += "@@ " + std::to_string(c) + "\n";
        for (int i = 0; i < 20; ++i) {
            std::size_t n = 0;
            const auto s = random_sentence(rng, n) + " ";
            text += s;
            flat += s;
        }
        text += "\n";
    }
    CHECK(segment_chapters(text, cfg).printed_series().values == slv(flat));
}

TEST_CASE("synthetic 155-chapter corpus: per-chapter counts and stats match flat recount") {
    IngestConfig cfg;
    cfg.chapter_delimiter = "Chapter ";
    std::mt19937_64 rng(155);
    std::uniform_int_distribution<int> n_sent(1, 60);
    std::string text;
    std::vector<std::string> blocks;
    for (int c = 1; c <= 155; ++c) {
        std::string body;
        for (int i = n_sent(rng); i > 0; --i) {
            std::size_t n = 0;
            body += random_sentence(rng, n) + (i % 3 ? " " : "\n");
        }
        body += "\n";
        blocks.push_back(body);
        text += "Chapter " + std::to_string(c) + "\n" + body;
    }
    const std::string& clean = text;
    const auto words = segment_chapters(clean, cfg);
    REQUIRE(words.chapter_count() == 155);
    std::vector<double> flat;
    double min_sent = 1e9, max_sent = 0, sum_sent = 0;
    for (std::size_t c = 0; c < 155; ++c) {
        const auto expected = oracle_slv(blocks[c]);
        REQUIRE(words.chapters[c].lengths == expected);
        flat.insert(flat.end(), expected.begin(), expected.end());
        const double n = static_cast<double>(expected.size());
        min_sent = std::min(min_sent, n);
        max_sent = std::max(max_sent, n);
        sum_sent += n;
    }

    IngestConfig chars_cfg = cfg;
    chars_cfg.count_unit = CountUnit::Characters;
    const auto chars = segment_chapters(clean, chars_cfg).printed_series();
    const auto st = corpus_stats(words, chars);

    const double sum = [&] { double a = 0; for (double v : flat) a += v; return a; }();
    CHECK(st.sentence_count == flat.size());
    CHECK(st.chapter_count == 155);
    CHECK(st.words.min == *std::min_element(flat.begin(), flat.end()));
    CHECK(st.words.max == *std::max_element(flat.begin(), flat.end()));
    CHECK(st.words.mean == Catch::Approx(sum / static_cast<double>(flat.size())).epsilon(1e-12));
    CHECK(st.chapter_sentences.min == min_sent);
    CHECK(st.chapter_sentences.max == max_sent);
    CHECK(st.chapter_sentences.mean == Catch::Approx(sum_sent / 155.0).epsilon(1e-12));
    CHECK(st.characters.min == *std::min_element(chars.values.begin(), chars.values.end()));
}

TEST_CASE("corpus_stats: single chapter hand count") {
    const auto corpus = segment_chapters("Go! Stop now.", {});
    IngestConfig chars_cfg;
    chars_cfg.count_unit = CountUnit::Characters;
    const auto st = corpus_stats(corpus, segment_chapters("Go! Stop now.", chars_cfg).printed_series());
    CHECK(st.words.min == 1);
    CHECK(st.words.max == 2);
    CHECK(st.words.mean == 1.5);
    CHECK(st.characters.min == 2);
    CHECK(st.characters.max == 7);
    CHECK(st.chapter_sentences.mean == 2);
}
