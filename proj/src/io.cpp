#include "lexi/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lexi/error.hpp"
#include "lexi/format.hpp"

namespace lexi::io {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

template <typename Fn>
void for_each_line(std::string_view content, Fn&& fn) {
    std::size_t pos = 0, line_no = 1;
    while (pos < content.size()) {
        const auto nl = content.find('\n', pos);
        const auto end = nl == std::string_view::npos ? content.size() : nl;
        fn(content.substr(pos, end - pos), line_no++);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
}

bool parse_double(std::string_view text, double& out) {
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc() && res.ptr == text.data() + text.size() && std::isfinite(out);
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw Error(ErrorKind::Io, "read failed for " + path.string());
    return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

std::string format_series(const TimeSeries& s, const std::string& config_hash) {
    std::string out = "# lexi series v" + std::to_string(kSchemaVersion) + "\n";
    out += "# config_hash=" + config_hash + "\n";
    if (!s.label.empty()) out += "# label=" + s.label + "\n";
    out += "value\n";
    for (double v : s.values) {
        out += cell(v);
        out += '\n';
    }
    return out;
}

TimeSeries parse_series(std::string_view content, const std::string& origin) {
    TimeSeries s;
    bool header_seen = false;
    for_each_line(content, [&](std::string_view raw, std::size_t line_no) {
        const auto line = trim(raw);
        if (line.empty()) return;
        if (line.front() == '#') {
            if (line.substr(0, 8) == "# label=") s.label = std::string(line.substr(8));
            return;
        }
        double v = 0.0;
        if (parse_double(line, v)) {
            s.values.push_back(v);
            return;
        }
        if (!header_seen && s.values.empty()) {
            header_seen = true;
            return;
        }
        throw Error(ErrorKind::Parse, origin + ":" + std::to_string(line_no) + ": not a number: '" +
                                          std::string(line) + "'", line_no);
    });
    if (s.values.empty()) throw Error(ErrorKind::EmptyInput, origin + ": series file holds no values");
    return s;
}

TimeSeries read_series(const std::filesystem::path& path) {
    return parse_series(read_file(path), path.string());
}

Permutation parse_permutation(std::string_view content, std::size_t chapter_count, bool allow_general_sequence,
                              const std::string& origin) {
    Permutation p;
    for_each_line(content, [&](std::string_view raw, std::size_t line_no) {
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') return;
        std::size_t idx = 0;
        const auto res = std::from_chars(line.data(), line.data() + line.size(), idx);
        if (res.ec != std::errc() || res.ptr != line.data() + line.size()) {
            throw Error(ErrorKind::Parse, origin + ":" + std::to_string(line_no) + ": not a chapter index: '" +
                                              std::string(line) + "'", line_no);
        }
        if (idx < 1 || idx > chapter_count) {
            throw Error(ErrorKind::InvalidPermutation, origin + ":" + std::to_string(line_no) + ": chapter " +
                                                           std::to_string(idx) + " outside 1.." +
                                                           std::to_string(chapter_count), line_no);
        }
        p.order.push_back(idx - 1);
    });
    if (p.order.empty()) throw Error(ErrorKind::EmptyInput, origin + ": permutation file is empty");
    if (!allow_general_sequence) {
        if (p.size() != chapter_count) {
            throw Error(ErrorKind::PermutationSizeMismatch, origin + ": " + std::to_string(p.size()) +
                                                                " entries for " + std::to_string(chapter_count) +
                                                                " chapters");
        }
        if (!p.is_bijection()) throw Error(ErrorKind::InvalidPermutation, origin + ": chapter indices repeat");
    }
    return p;
}

Permutation read_permutation(const std::filesystem::path& path, std::size_t chapter_count,
                             bool allow_general_sequence) {
    return parse_permutation(read_file(path), chapter_count, allow_general_sequence, path.string());
}

std::string format_permutation(const Permutation& p) {
    std::string out;
    for (std::size_t idx : p.order) out += std::to_string(idx + 1) + "\n";
    return out;
}

std::string format_corpus(const ChapterizedCorpus& corpus, const std::string& config_hash) {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["config_hash"] = config_hash;
    j["chapter_count"] = corpus.chapter_count();
    auto& arr = j["chapters"] = nlohmann::ordered_json::array();
    for (const auto& ch : corpus.chapters) {
        nlohmann::ordered_json c;
        c["label"] = ch.label;
        auto& lengths = c["lengths"] = nlohmann::ordered_json::array();
        for (double v : ch.lengths) {
            if (v == std::floor(v) && std::abs(v) < 9e15) {
                lengths.push_back(static_cast<long long>(v));
            } else {
                lengths.push_back(v);
            }
        }
        arr.push_back(std::move(c));
    }
    return j.dump(2) + "\n";
}

ChapterizedCorpus parse_corpus(std::string_view json_text, const std::string& origin) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Parse, origin + ": " + e.what(), e.byte);
    }
    try {
        const int version = j.at("schema_version").get<int>();
        if (version != kSchemaVersion) {
            throw Error(ErrorKind::Parse, origin + ": unsupported schema_version " + std::to_string(version));
        }
        ChapterizedCorpus corpus;
        for (const auto& c : j.at("chapters")) {
            Chapter ch;
            ch.label = c.at("label").get<std::string>();
            ch.lengths = c.at("lengths").get<std::vector<double>>();
            if (ch.lengths.empty()) {
                throw Error(ErrorKind::EmptyChapter, origin + ": chapter '" + ch.label + "' has no sentences",
                            corpus.chapters.size());
            }
            corpus.chapters.push_back(std::move(ch));
        }
        if (corpus.chapters.empty()) throw Error(ErrorKind::EmptyInput, origin + ": no chapters");
        return corpus;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, origin + ": " + e.what());
    }
}

ChapterizedCorpus read_corpus(const std::filesystem::path& path) {
    return parse_corpus(read_file(path), path.string());
}

CsvWriter::CsvWriter(const std::string& config_hash, std::vector<std::string> header) : columns_(header.size()) {
    text_ = "# config_hash=" + config_hash + "\n";
    row(header);
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) {
        throw Error(ErrorKind::InvalidArgument, "CSV row has " + std::to_string(cells.size()) + " cells, expected " +
                                                    std::to_string(columns_));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ',';
        text_ += cells[i];
    }
    text_ += '\n';
    return *this;
}

std::string cell(double v) {
    if (std::isnan(v)) return "nan";
    if (v == std::floor(v) && std::abs(v) < 9e15) return std::to_string(static_cast<long long>(v));
    return format_number(v);
}

std::string cell(std::size_t v) { return std::to_string(v); }

}  // namespace lexi::io
