#include "senseprobe/unicode.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace senseprobe::unicode {

std::u32string decode(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    out.push_back(c < 0 ? U'\uFFFD' : static_cast<char32_t>(c));
  }
  return out;
}

std::string encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t n = 0;
    UBool error = false;
    U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(c), error);
    if (error) {
      out += "\xEF\xBF\xBD";
    } else {
      out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
    }
  }
  return out;
}

std::string fold_case(std::string_view utf8) {
  std::u32string cps = decode(utf8);
  for (char32_t& c : cps) {
    c = static_cast<char32_t>(u_foldCase(static_cast<UChar32>(c), U_FOLD_CASE_DEFAULT));
  }
  return encode(cps);
}

bool is_space(char32_t c) noexcept { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

bool is_punct(char32_t c) noexcept { return u_ispunct(static_cast<UChar32>(c)); }

namespace {

bool strippable(char32_t c) { return is_space(c) || is_punct(c); }

std::u32string_view strip_view(std::u32string_view cps) {
  std::size_t begin = 0;
  std::size_t end = cps.size();
  while (begin < end && strippable(cps[begin])) ++begin;
  while (end > begin && strippable(cps[end - 1])) --end;
  return cps.substr(begin, end - begin);
}

}  // namespace

std::string strip_space_punct(std::string_view utf8) {
  const std::u32string cps = decode(utf8);
  return encode(strip_view(cps));
}

std::string nfc(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
  icu::UnicodeString input = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  icu::UnicodeString output = normalizer->normalize(input, status);
  if (U_FAILURE(status)) throw std::runtime_error("NFC normalization failed");
  std::string result;
  output.toUTF8String(result);
  return result;
}

std::vector<std::string> words(std::string_view utf8) {
  std::vector<std::string> out;
  const std::u32string cps = decode(utf8);
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && is_space(cps[i])) ++i;
    std::size_t j = i;
    while (j < cps.size() && !is_space(cps[j])) ++j;
    if (j > i) {
      auto word = strip_view(std::u32string_view(cps).substr(i, j - i));
      if (!word.empty()) out.push_back(encode(word));
    }
    i = j;
  }
  return out;
}

}  // namespace senseprobe::unicode
