#pragma once

#include <array>
#include <string>
#include <string_view>

namespace senseprobe {

enum class Language { en, de, it, nl, sv };

inline constexpr std::array<Language, 5> kAllLanguages = {
    Language::en, Language::de, Language::it, Language::nl, Language::sv};

/// Two-letter code, e.g. "de".
std::string_view to_code(Language lang) noexcept;

/// English name of the language as used in translation prompts ("German").
std::string_view english_name(Language lang) noexcept;

/// Parses a two-letter code (case-insensitive). Throws ParseError otherwise.
Language parse_language(std::string_view code);

}  // namespace senseprobe
