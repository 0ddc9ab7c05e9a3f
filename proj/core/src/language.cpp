#include "senseprobe/language.hpp"

#include <cctype>

#include "senseprobe/errors.hpp"

namespace senseprobe {

std::string_view to_code(Language lang) noexcept {
  switch (lang) {
    case Language::en: return "en";
    case Language::de: return "de";
    case Language::it: return "it";
    case Language::nl: return "nl";
    case Language::sv: return "sv";
  }
  return "en";
}

std::string_view english_name(Language lang) noexcept {
  switch (lang) {
    case Language::en: return "English";
    case Language::de: return "German";
    case Language::it: return "Italian";
    case Language::nl: return "Dutch";
    case Language::sv: return "Swedish";
  }
  return "English";
}

Language parse_language(std::string_view code) {
  std::string lower(code);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (Language lang : kAllLanguages) {
    if (to_code(lang) == lower) return lang;
  }
  throw ParseError("unknown language code '" + std::string(code) + "'", std::string(code));
}

}  // namespace senseprobe
