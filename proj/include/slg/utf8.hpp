#pragma once

#include <string>
#include <string_view>

namespace slg::utf8 {

/// Decodes `text` into code points. Ill-formed sequences become U+FFFD.
std::u32string decode(std::string_view text);

std::string encode(std::u32string_view code_points);

std::size_t count_code_points(std::string_view text);

/// Byte length of the first code point of `text` (1 for ill-formed input,
/// 0 for empty input).
std::size_t first_code_point_length(std::string_view text);

/// Unicode NFC normalization followed by trimming leading and trailing
/// white space. Interior white space is left untouched.
std::string normalize(std::string_view text);

}  // namespace slg::utf8
