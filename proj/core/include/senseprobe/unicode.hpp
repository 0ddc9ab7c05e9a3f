#pragma once

#include <string>
#include <string_view>
#include <vector>

// Small UTF-8 helpers on top of ICU. Invalid byte sequences are passed through
// as U+FFFD so that malformed model output never aborts scoring.
namespace senseprobe::unicode {

std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view text);

/// Unicode simple case folding, code point by code point.
std::string fold_case(std::string_view utf8);

bool is_space(char32_t c) noexcept;
/// General category P* (Pc, Pd, Ps, Pe, Pi, Pf, Po).
bool is_punct(char32_t c) noexcept;

/// Strips leading/trailing code points that are whitespace or punctuation.
std::string strip_space_punct(std::string_view utf8);

/// Canonical composition (NFC).
std::string nfc(std::string_view utf8);

/// Whitespace-separated words, each with surrounding punctuation removed.
/// Words that consist only of punctuation are dropped.
std::vector<std::string> words(std::string_view utf8);

}  // namespace senseprobe::unicode
