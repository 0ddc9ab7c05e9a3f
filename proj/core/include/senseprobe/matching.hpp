#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "senseprobe/task.hpp"

namespace senseprobe::matching {

/// Case-folded text with surrounding whitespace and punctuation removed.
/// `normalize` is idempotent, so every value of this type is a fixed point.
class NormalizedText {
 public:
  NormalizedText() = default;
  const std::string& value() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }
  friend bool operator==(const NormalizedText&, const NormalizedText&) = default;

 private:
  explicit NormalizedText(std::string v) : value_(std::move(v)) {}
  friend NormalizedText normalize(std::string_view raw);
  friend NormalizedText assume_normalized(std::string value);
  std::string value_;
};

NormalizedText normalize(std::string_view raw);

/// Wraps a value already known to be normalized (e.g. read back from a
/// response log). Re-normalizes in debug builds.
NormalizedText assume_normalized(std::string value);

/// Maps a classification reply onto a canonical label.
///
/// Exact match of the whole reply against the lexicon wins; otherwise the
/// reply is scanned for lexicon entries as whole words and mapped only when
/// the hits all belong to a single label. Returns nullopt for UNMAPPED.
std::optional<std::string> map_label(const NormalizedText& reply, const LabelLexicon& lexicon);

/// Consistency of two open-QA replies given the datapoint's answer classes.
///
/// If some class contains either reply, both must lie in that class;
/// otherwise the replies must be identical. Throws ConfigError when the
/// classes overlap.
bool consistent(const NormalizedText& r, const NormalizedText& r_star,
                const std::vector<AnswerClass>& classes);

/// Classification consistency: equal labels, and UNMAPPED never matches.
bool labels_consistent(const std::optional<std::string>& a, const std::optional<std::string>& b);

/// True when some member of `cls` occurs as a contiguous run of whole words
/// in the case-folded raw reply.
bool contains_answer(std::string_view raw, const AnswerClass& cls);

/// Right-hand side of "342 + 122 = 464", or the reply itself when it is a
/// bare number.
std::optional<std::string> extract_numeric(std::string_view raw);

}  // namespace senseprobe::matching
