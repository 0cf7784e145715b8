#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lexi/mfdfa.hpp"
#include "lexi/text_ingest.hpp"
#include "lexi/weibull.hpp"

namespace lexi::cli {

/// Settings shared by every command.
struct CommonOptions {
    IngestConfig ingest;
    mfdfa::Config mfdfa;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::filesystem::path out = "out";
    std::vector<std::filesystem::path> permutation_files;
};

struct AnalyzeOptions {
    std::size_t max_lag = 100;
    weibull::FitOptions fit;
};

struct ExperimentOptions {
    std::string mode = "orders";        // orders | ensemble | surrogate
    std::vector<std::string> orders;    // printed | reverse | random; empty = printed + reverse
    std::string kind = "fourier";       // surrogate kind
    std::size_t n = 10;
    bool keep_members = false;
    bool allow_repeats = false;
};

/// Canonical text of everything that determines a command's output. Thread
/// count and output directory are excluded; input files enter by content hash.
[[nodiscard]] std::string canonical_run_config(const std::string& command,
                                               const std::vector<std::filesystem::path>& inputs,
                                               const CommonOptions& common, const std::string& extra);
[[nodiscard]] std::string config_hash(const std::string& canonical);

void cmd_ingest(const std::vector<std::filesystem::path>& inputs, const CommonOptions& common, std::ostream& log);
void cmd_analyze(const std::filesystem::path& series_path, const CommonOptions& common, const AnalyzeOptions& opts,
                 std::ostream& log);
void cmd_experiment(const std::filesystem::path& input, const CommonOptions& common, const ExperimentOptions& opts,
                    std::ostream& log);

/// Parses arguments and dispatches. Returns 0 iff the command succeeded.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lexi::cli
