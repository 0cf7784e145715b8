#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lexi/series.hpp"

namespace lexi::io {

inline constexpr int kSchemaVersion = 1;

/// Whole file as bytes. Throws Io.
[[nodiscard]] std::string read_file(const std::filesystem::path& path);
/// Creates parent directories. Throws Io.
void write_file(const std::filesystem::path& path, std::string_view content);

/// Series file: '#' comment lines (config hash, label), a "value" header row,
/// then one value per line.
/// Integer-valued entries are written without a decimal point.
[[nodiscard]] std::string format_series(const TimeSeries& s, const std::string& config_hash);
/// Skips '#' comments, blank lines and a single non-numeric header line.
/// Throws Parse with "path:line" context.
[[nodiscard]] TimeSeries parse_series(std::string_view content, const std::string& origin);
[[nodiscard]] TimeSeries read_series(const std::filesystem::path& path);

/// Permutation file: one 1-based chapter index per line, exactly n lines for
/// a bijection. With allow_general_sequence any number of valid indices
/// (repeats allowed) is accepted. '#' comments and blank lines are ignored.
[[nodiscard]] Permutation parse_permutation(std::string_view content, std::size_t chapter_count,
                                            bool allow_general_sequence, const std::string& origin);
[[nodiscard]] Permutation read_permutation(const std::filesystem::path& path, std::size_t chapter_count,
                                           bool allow_general_sequence = false);
[[nodiscard]] std::string format_permutation(const Permutation& p);

/// chapters.json: {"schema_version", "config_hash", "chapters": [{"label", "lengths"}]}.
[[nodiscard]] std::string format_corpus(const ChapterizedCorpus& corpus, const std::string& config_hash);
[[nodiscard]] ChapterizedCorpus parse_corpus(std::string_view json_text, const std::string& origin);
[[nodiscard]] ChapterizedCorpus read_corpus(const std::filesystem::path& path);

/// CSV assembly with a leading "# config_hash=..." comment and a header row.
class CsvWriter {
public:
    CsvWriter(const std::string& config_hash, std::vector<std::string> header);

    CsvWriter& row(const std::vector<std::string>& cells);
    [[nodiscard]] const std::string& str() const noexcept { return text_; }

private:
    std::size_t columns_;
    std::string text_;
};

[[nodiscard]] std::string cell(double v);
[[nodiscard]] std::string cell(std::size_t v);

}  // namespace lexi::io
