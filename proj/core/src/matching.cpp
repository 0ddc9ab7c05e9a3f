#include "senseprobe/matching.hpp"

#include <algorithm>
#include <cassert>
#include <set>

#include "senseprobe/errors.hpp"
#include "senseprobe/unicode.hpp"

namespace senseprobe::matching {

NormalizedText normalize(std::string_view raw) {
  return NormalizedText(unicode::strip_space_punct(unicode::fold_case(raw)));
}

NormalizedText assume_normalized(std::string value) {
  assert(normalize(value).value() == value);
  return NormalizedText(std::move(value));
}

namespace {

bool contains_run(const std::vector<std::string>& haystack, const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
         haystack.end();
}

}  // namespace

std::optional<std::string> map_label(const NormalizedText& reply, const LabelLexicon& lexicon) {
  for (const auto& [label, tokens] : lexicon) {
    for (const auto& token : tokens) {
      if (normalize(token) == reply) return label;
    }
  }

  const auto reply_words = unicode::words(reply.value());
  std::set<std::string> hits;
  for (const auto& [label, tokens] : lexicon) {
    for (const auto& token : tokens) {
      if (contains_run(reply_words, unicode::words(normalize(token).value()))) {
        hits.insert(label);
        break;
      }
    }
  }
  if (hits.size() == 1) return *hits.begin();
  return std::nullopt;
}

bool consistent(const NormalizedText& r, const NormalizedText& r_star,
                const std::vector<AnswerClass>& classes) {
  check_disjoint(classes, "consistency classes");
  for (const auto& cls : classes) {
    const bool has_r = cls.contains(r.value());
    const bool has_star = cls.contains(r_star.value());
    if (has_r || has_star) return has_r && has_star;
  }
  return r == r_star;
}

bool labels_consistent(const std::optional<std::string>& a, const std::optional<std::string>& b) {
  return a.has_value() && b.has_value() && *a == *b;
}

bool contains_answer(std::string_view raw, const AnswerClass& cls) {
  const auto reply_words = unicode::words(unicode::fold_case(raw));
  return std::any_of(cls.members().begin(), cls.members().end(), [&](const std::string& m) {
    return contains_run(reply_words, unicode::words(m));
  });
}

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// "1398", "1,398", "1.398" (digit groups of three).
std::optional<std::string> as_number(std::string_view s) {
  const std::string text = unicode::strip_space_punct(s);
  if (all_digits(text)) return text;

  std::string digits;
  std::size_t group = 0;
  bool grouped = false;
  for (char c : text) {
    if (c >= '0' && c <= '9') {
      digits += c;
      ++group;
    } else if ((c == ',' || c == '.' || c == ' ') && !digits.empty()) {
      if (grouped ? group != 3 : group > 3) return std::nullopt;
      grouped = true;
      group = 0;
    } else {
      return std::nullopt;
    }
  }
  if (!grouped || group != 3) return std::nullopt;
  return digits;
}

}  // namespace

std::optional<std::string> extract_numeric(std::string_view raw) {
  const auto eq = raw.rfind('=');
  if (eq != std::string_view::npos) {
    const auto lhs = unicode::strip_space_punct(raw.substr(0, eq));
    if (lhs.empty()) return std::nullopt;
    return as_number(raw.substr(eq + 1));
  }
  return as_number(raw);
}

}  // namespace senseprobe::matching
