#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "lexi/error.hpp"

namespace lexi {

/// Decode one code point starting at `pos`. Returns the byte length, or 0 on
/// malformed input (bad lead byte, truncated or overlong sequence, surrogate).
std::size_t decode_utf8(std::string_view text, std::size_t pos, char32_t& out) noexcept;

/// Throws InvalidUtf8 carrying the byte offset of the first malformed sequence.
void validate_utf8(std::string_view text);

std::string encode_utf8(std::u32string_view cps);
std::u32string decode_utf8(std::string_view text);

/// Calls fn(code_point, byte_offset, byte_length) for every code point.
template <typename Fn>
void for_each_code_point(std::string_view text, Fn&& fn) {
    std::size_t pos = 0;
    while (pos < text.size()) {
        char32_t c = 0;
        const std::size_t len = decode_utf8(text, pos, c);
        if (len == 0) {
            throw Error(ErrorKind::InvalidUtf8, "malformed UTF-8 at byte offset " + std::to_string(pos), pos);
        }
        fn(c, pos, len);
        pos += len;
    }
}

}  // namespace lexi
