#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lexi {

enum class ErrorKind {
    EmptyInput,
    InvalidUtf8,
    NoSentences,
    NoMarks,
    EmptyChapter,
    PermutationSizeMismatch,
    InvalidPermutation,
    InvalidParams,
    FitFailed,
    ZeroVariance,
    InvalidArgument,
    ScaleTooSmall,
    DegenerateWindow,
    BadFitRange,
    InvalidConfig,
    EnsembleDegraded,
    Io,
    Parse,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for every failure in the toolkit. `detail()` carries
/// the offending index, scale or byte offset when one exists.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message,
          std::optional<std::size_t> detail = std::nullopt);

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::optional<std::size_t> detail() const noexcept { return detail_; }
    /// what() without the kind prefix; used when adding context.
    [[nodiscard]] const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
    std::optional<std::size_t> detail_;
};

}  // namespace lexi
