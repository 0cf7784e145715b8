#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "lexi/series.hpp"

namespace lexi {

enum class MarkKind { SentenceEnding, IntraSentence };
enum class CountUnit { Words, Characters };

struct Token {
    enum class Type { Word, Mark };

    Type type = Type::Word;
    MarkKind kind = MarkKind::SentenceEnding;  // meaningful for marks only
    std::string text;                          // word text, or the collapsed mark cluster
    std::size_t chars = 0;                     // code points in `text`
    std::size_t offset = 0;                    // byte offset in the source

    [[nodiscard]] bool is_word() const noexcept { return type == Type::Word; }
    [[nodiscard]] bool is_mark() const noexcept { return type == Type::Mark; }
    [[nodiscard]] bool is_end() const noexcept { return is_mark() && kind == MarkKind::SentenceEnding; }
};

struct TokenStream {
    std::vector<Token> tokens;

    [[nodiscard]] std::size_t size() const noexcept { return tokens.size(); }
};

/// Tokenizer and segmentation settings. Mark sets are code points.
struct IngestConfig {
    std::u32string sentence_end_marks = U".!?…‽";
    std::u32string intra_marks = U",;:—–";
    /// Empty means "whole text is one chapter".
    std::string chapter_delimiter;
    /// false: a line starting with the literal delimiter opens a chapter.
    /// true: a line fully matching the ECMAScript regex opens a chapter.
    bool delimiter_is_regex = false;
    CountUnit count_unit = CountUnit::Words;

    /// Throws InvalidConfig when the mark sets overlap or contain whitespace.
    void validate() const;
    /// Canonical `key=value` lines, used for hashing and echoing.
    [[nodiscard]] std::string canonical() const;
};

/// Split UTF-8 text into WORD and MARK tokens. Adjacent marks not separated
/// by whitespace form one cluster, which becomes a single MARK (sentence
/// ending if any member is a sentence-ending mark).
[[nodiscard]] TokenStream tokenize(std::string_view text, const IngestConfig& cfg);

/// Render a token stream back to text; tokenize(serialize(ts)) == ts modulo offsets.
[[nodiscard]] std::string serialize(const TokenStream& ts);

/// Sentence lengths: words (or characters) between consecutive sentence-ending
/// marks. Trailing words after the last end mark and zero-length intervals are dropped.
[[nodiscard]] TimeSeries extract_slv(const TokenStream& ts, CountUnit unit = CountUnit::Words);

/// Distances between consecutive marks of either kind, same trailing/zero rules.
[[nodiscard]] TimeSeries extract_pmdv(const TokenStream& ts, CountUnit unit = CountUnit::Words);

struct ChapterText {
    std::string label;
    std::string_view text;
    std::size_t offset = 0;  // byte offset of `text` in the source
};

/// Partition text at delimiter lines. The delimiter line itself becomes the
/// chapter label and is not part of the chapter body. Whitespace-only text
/// before the first delimiter is ignored.
[[nodiscard]] std::vector<ChapterText> split_chapters(std::string_view text, const IngestConfig& cfg);

/// Per-chapter SLV in cfg.count_unit; sentences never span a chapter boundary.
/// Throws EmptyChapter(index) for a chapter without sentences.
[[nodiscard]] ChapterizedCorpus segment_chapters(std::string_view text, const IngestConfig& cfg);

struct SummaryTriple {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
};

struct CorpusStats {
    SummaryTriple words;          // sentence length in words
    SummaryTriple characters;     // sentence length in characters
    SummaryTriple chapter_sentences;  // chapter length in sentences
    std::size_t sentence_count = 0;
    std::size_t chapter_count = 0;
};

[[nodiscard]] CorpusStats corpus_stats(const ChapterizedCorpus& corpus, const TimeSeries& char_series);

}  // namespace lexi
