#include "lexi/error.hpp"

namespace lexi {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::InvalidUtf8: return "InvalidUtf8";
        case ErrorKind::NoSentences: return "NoSentences";
        case ErrorKind::NoMarks: return "NoMarks";
        case ErrorKind::EmptyChapter: return "EmptyChapter";
        case ErrorKind::PermutationSizeMismatch: return "PermutationSizeMismatch";
        case ErrorKind::InvalidPermutation: return "InvalidPermutation";
        case ErrorKind::InvalidParams: return "InvalidParams";
        case ErrorKind::FitFailed: return "FitFailed";
        case ErrorKind::ZeroVariance: return "ZeroVariance";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::ScaleTooSmall: return "ScaleTooSmall";
        case ErrorKind::DegenerateWindow: return "DegenerateWindow";
        case ErrorKind::BadFitRange: return "BadFitRange";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::EnsembleDegraded: return "EnsembleDegraded";
        case ErrorKind::Io: return "Io";
        case ErrorKind::Parse: return "Parse";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::optional<std::size_t> detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      message_(message),
      detail_(detail) {}

}  // namespace lexi
