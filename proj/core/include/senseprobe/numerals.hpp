#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "senseprobe/language.hpp"

/// Number words for the five supported languages.
///
/// Spelling produces one canonical lowercase form per number. Parsing is
/// tolerant: it folds case, ignores spaces and hyphens between parts and
/// accepts common alternatives (German "hundert"/"einhundert", Dutch "één",
/// Dutch composites with or without diaeresis, Italian non-elided tens, ...).
namespace senseprobe::numerals {

inline constexpr int kMinNumber = 1;
inline constexpr int kMaxNumber = 2000;

/// Throws RangeError when `n` is outside [kMinNumber, kMaxNumber].
std::string spell_number(int n, Language lang);

/// Throws ParseError carrying the first fragment that could not be consumed.
int parse_number(std::string_view words, Language lang);

struct TranslationCheck {
  bool valid = false;
  std::string diagnostic;  // empty when valid
};

/// True iff both candidate words denote the same numbers as the English
/// source pair. The source pair must parse as English; a source that does not
/// is reported through the diagnostic as well.
TranslationCheck check_number_translation(
    std::pair<std::string_view, std::string_view> source_en,
    std::pair<std::string_view, std::string_view> candidate, Language lang);

}  // namespace senseprobe::numerals
