#include "senseprobe/numerals.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <vector>

#include "senseprobe/errors.hpp"
#include "senseprobe/unicode.hpp"

namespace senseprobe::numerals {
namespace {

void check_range(int n) {
  if (n < kMinNumber || n > kMaxNumber) {
    throw RangeError("number " + std::to_string(n) + " outside [" + std::to_string(kMinNumber) +
                     ", " + std::to_string(kMaxNumber) + "]");
  }
}

void append(std::string& out, const std::string& part, const char* sep) {
  if (part.empty()) return;
  if (!out.empty()) out += sep;
  out += part;
}

// ---------------------------------------------------------------------------
// Spelling

namespace en {

constexpr std::array<const char*, 20> kOnes = {
    "",        "one",     "two",       "three",    "four",     "five",    "six",
    "seven",   "eight",   "nine",      "ten",      "eleven",   "twelve",  "thirteen",
    "fourteen", "fifteen", "sixteen",  "seventeen", "eighteen", "nineteen"};
constexpr std::array<const char*, 10> kTens = {"",      "",      "twenty",  "thirty", "forty",
                                               "fifty", "sixty", "seventy", "eighty", "ninety"};

std::string below100(int n) {
  if (n < 20) return kOnes[n];
  std::string out = kTens[n / 10];
  if (n % 10) out += std::string("-") + kOnes[n % 10];
  return out;
}

std::string spell(int n) {
  std::string out;
  if (n >= 1000) append(out, std::string(kOnes[n / 1000]) + " thousand", " ");
  if (n % 1000 >= 100) append(out, std::string(kOnes[n % 1000 / 100]) + " hundred", " ");
  if (n % 100) append(out, below100(n % 100), " ");
  return out;
}

}  // namespace en

namespace de {

constexpr std::array<const char*, 10> kUnits = {"",     "eins", "zwei",   "drei", "vier",
                                                "fünf", "sechs", "sieben", "acht", "neun"};
// Form used in front of "und", "hundert" and "tausend".
constexpr std::array<const char*, 10> kPrefix = {"",     "ein",   "zwei",   "drei", "vier",
                                                 "fünf", "sechs", "sieben", "acht", "neun"};
constexpr std::array<const char*, 10> kTeens = {"zehn",     "elf",      "zwölf",    "dreizehn",
                                                "vierzehn", "fünfzehn", "sechzehn", "siebzehn",
                                                "achtzehn", "neunzehn"};
constexpr std::array<const char*, 10> kTens = {"",        "",        "zwanzig", "dreißig",
                                               "vierzig", "fünfzig", "sechzig", "siebzig",
                                               "achtzig", "neunzig"};

std::string below100(int n) {
  if (n < 10) return kUnits[n];
  if (n < 20) return kTeens[n - 10];
  if (n % 10 == 0) return kTens[n / 10];
  return std::string(kPrefix[n % 10]) + "und" + kTens[n / 10];
}

std::string spell(int n) {
  std::string out;
  if (n >= 1000) out += std::string(kPrefix[n / 1000]) + "tausend";
  if (n % 1000 >= 100) out += std::string(kPrefix[n % 1000 / 100]) + "hundert";
  if (n % 100) out += below100(n % 100);
  return out;
}

}  // namespace de

namespace nl {

constexpr std::array<const char*, 10> kUnits = {"",     "een", "twee",  "drie", "vier",
                                                "vijf", "zes", "zeven", "acht", "negen"};
constexpr std::array<const char*, 10> kTeens = {"tien",     "elf",       "twaalf",   "dertien",
                                                "veertien", "vijftien",  "zestien",  "zeventien",
                                                "achttien", "negentien"};
constexpr std::array<const char*, 10> kTens = {"",        "",        "twintig", "dertig",
                                               "veertig", "vijftig", "zestig",  "zeventig",
                                               "tachtig", "negentig"};

std::string below100(int n) {
  if (n < 10) return kUnits[n];
  if (n < 20) return kTeens[n - 10];
  if (n % 10 == 0) return kTens[n / 10];
  std::string unit = kUnits[n % 10];
  // "twee" + "en" -> "tweeën": diaeresis marks the syllable break.
  const char* link = unit.back() == 'e' ? "ën" : "en";
  return unit + link + kTens[n / 10];
}

std::string spell(int n) {
  std::string out;
  if (n >= 1000) out += (n / 1000 == 1) ? "duizend" : std::string(kUnits[n / 1000]) + "duizend";
  const int h = n % 1000 / 100;
  if (h) out += (h == 1) ? "honderd" : std::string(kUnits[h]) + "honderd";
  if (n % 100) out += below100(n % 100);
  return out;
}

}  // namespace nl

namespace sv {

constexpr std::array<const char*, 10> kUnits = {"",    "ett", "två", "tre",  "fyra",
                                                "fem", "sex", "sju", "åtta", "nio"};
constexpr std::array<const char*, 10> kTeens = {"tio",     "elva",   "tolv",    "tretton",
                                                "fjorton", "femton", "sexton",  "sjutton",
                                                "arton",   "nitton"};
constexpr std::array<const char*, 10> kTens = {"",       "",       "tjugo",  "trettio",
                                               "fyrtio", "femtio", "sextio", "sjuttio",
                                               "åttio",  "nittio"};

std::string below100(int n) {
  if (n < 10) return kUnits[n];
  if (n < 20) return kTeens[n - 10];
  return std::string(kTens[n / 10]) + kUnits[n % 10];
}

std::string spell(int n) {
  std::string out;
  // "ett" + "tusen" collapses the doubled t.
  if (n >= 1000) out += (n / 1000 == 1) ? "ettusen" : std::string(kUnits[n / 1000]) + "tusen";
  if (n % 1000 >= 100) out += std::string(kUnits[n % 1000 / 100]) + "hundra";
  if (n % 100) out += below100(n % 100);
  return out;
}

}  // namespace sv

namespace it {

constexpr std::array<const char*, 10> kUnits = {"",       "uno", "due",   "tre",  "quattro",
                                                "cinque", "sei", "sette", "otto", "nove"};
constexpr std::array<const char*, 10> kTeens = {
    "dieci",    "undici", "dodici",      "tredici",  "quattordici",
    "quindici", "sedici", "diciassette", "diciotto", "diciannove"};
constexpr std::array<const char*, 10> kTens = {"",          "",         "venti",    "trenta",
                                               "quaranta",  "cinquanta", "sessanta", "settanta",
                                               "ottanta",   "novanta"};

std::string below100(int n) {
  if (n < 10) return kUnits[n];
  if (n < 20) return kTeens[n - 10];
  std::string tens = kTens[n / 10];
  const int u = n % 10;
  if (u == 1 || u == 8) tens.pop_back();  // ventuno, ventotto
  return tens + kUnits[u];
}

std::string spell(int n) {
  std::string out;
  if (n >= 1000) out += (n / 1000 == 1) ? "mille" : std::string(kUnits[n / 1000]) + "mila";
  const int h = n % 1000 / 100;
  if (h) out += (h == 1) ? "cento" : std::string(kUnits[h]) + "cento";
  if (n % 100) out += below100(n % 100);
  // Compounds ending in "tre" carry the accent: ventitré, centotré.
  if (n > 10 && n % 10 == 3 && n % 100 != 13) out.replace(out.size() - 3, 3, "tré");
  return out;
}

}  // namespace it

// ---------------------------------------------------------------------------
// Parsing

enum class Kind {
  Unit,            // 1..9
  Teen,            // 10..19
  Tens,            // 20..90
  TensElided,      // Italian "vent" before uno/otto
  Hundred,         // multiplier optional
  HundredElided,   // Italian "cent" before otto/ottanta/uno
  Thousand,        // multiplier optional
  ThousandSingle,  // Italian "mille": exactly 1000, no multiplier
  ThousandPlural,  // Italian "mila": needs multiplier >= 2
  Conj,            // und / en / and
  Article,         // English "a" (only as multiplier)
};

struct Token {
  Kind kind;
  int value = 0;
  std::string surface;
};

struct Morpheme {
  std::string surface;
  std::vector<Token> tokens;
};

struct Grammar {
  bool unit_first = false;          // de/nl: "fünfundsiebzig"
  bool teen_hundreds = true;        // "neunzehnhundert", "fifteen hundred"
  bool conj_after_hundreds = false; // en: "three hundred and five"
};

struct LanguageTable {
  Grammar grammar;
  std::vector<Morpheme> morphemes;  // sorted longest first
};

Morpheme simple(std::string surface, Kind kind, int value = 0) {
  Token t{kind, value, surface};
  return Morpheme{std::move(surface), {std::move(t)}};
}

void add_series(std::vector<Morpheme>& out, const std::vector<std::string>& words, Kind kind,
                int first, int step) {
  int value = first;
  for (const auto& w : words) {
    if (!w.empty()) out.push_back(simple(w, kind, value));
    value += step;
  }
}

LanguageTable finish(LanguageTable table) {
  std::stable_sort(table.morphemes.begin(), table.morphemes.end(),
                   [](const Morpheme& a, const Morpheme& b) {
                     return a.surface.size() > b.surface.size();
                   });
  return table;
}

LanguageTable build_en() {
  LanguageTable t;
  t.grammar = {.unit_first = false, .teen_hundreds = true, .conj_after_hundreds = true};
  auto& m = t.morphemes;
  add_series(m, {"one", "two", "three", "four", "five", "six", "seven", "eight", "nine"},
             Kind::Unit, 1, 1);
  add_series(m,
             {"ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen",
              "seventeen", "eighteen", "nineteen"},
             Kind::Teen, 10, 1);
  add_series(m, {"twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"},
             Kind::Tens, 20, 10);
  m.push_back(simple("fourty", Kind::Tens, 40));
  m.push_back(simple("hundred", Kind::Hundred, 100));
  m.push_back(simple("thousand", Kind::Thousand, 1000));
  m.push_back(simple("and", Kind::Conj));
  m.push_back(simple("a", Kind::Article, 1));
  return finish(std::move(t));
}

// German input is transliterated before lookup: ä->ae, ö->oe, ü->ue, ß->ss.
LanguageTable build_de() {
  LanguageTable t;
  t.grammar = {.unit_first = true, .teen_hundreds = true, .conj_after_hundreds = false};
  auto& m = t.morphemes;
  add_series(m, {"ein", "zwei", "drei", "vier", "fuenf", "sechs", "sieben", "acht", "neun"},
             Kind::Unit, 1, 1);
  m.push_back(simple("eins", Kind::Unit, 1));
  m.push_back(simple("zwo", Kind::Unit, 2));
  m.push_back(simple("funf", Kind::Unit, 5));
  add_series(m,
             {"zehn", "elf", "zwoelf", "dreizehn", "vierzehn", "fuenfzehn", "sechzehn",
              "siebzehn", "achtzehn", "neunzehn"},
             Kind::Teen, 10, 1);
  m.push_back(simple("zwolf", Kind::Teen, 12));
  m.push_back(simple("funfzehn", Kind::Teen, 15));
  add_series(m,
             {"zwanzig", "dreissig", "vierzig", "fuenfzig", "sechzig", "siebzig", "achtzig",
              "neunzig"},
             Kind::Tens, 20, 10);
  m.push_back(simple("funfzig", Kind::Tens, 50));
  m.push_back(simple("hundert", Kind::Hundred, 100));
  m.push_back(simple("tausend", Kind::Thousand, 1000));
  m.push_back(simple("und", Kind::Conj));
  return finish(std::move(t));
}

// Dutch input has é/ë folded to e before lookup.
LanguageTable build_nl() {
  LanguageTable t;
  t.grammar = {.unit_first = true, .teen_hundreds = true, .conj_after_hundreds = false};
  auto& m = t.morphemes;
  add_series(m, {"een", "twee", "drie", "vier", "vijf", "zes", "zeven", "acht", "negen"},
             Kind::Unit, 1, 1);
  add_series(m,
             {"tien", "elf", "twaalf", "dertien", "veertien", "vijftien", "zestien", "zeventien",
              "achttien", "negentien"},
             Kind::Teen, 10, 1);
  add_series(m,
             {"twintig", "dertig", "veertig", "vijftig", "zestig", "zeventig", "tachtig",
              "negentig"},
             Kind::Tens, 20, 10);
  m.push_back(simple("honderd", Kind::Hundred, 100));
  m.push_back(simple("duizend", Kind::Thousand, 1000));
  m.push_back(simple("en", Kind::Conj));
  return finish(std::move(t));
}

LanguageTable build_sv() {
  LanguageTable t;
  t.grammar = {.unit_first = false, .teen_hundreds = true, .conj_after_hundreds = false};
  auto& m = t.morphemes;
  add_series(m, {"ett", "två", "tre", "fyra", "fem", "sex", "sju", "åtta", "nio"}, Kind::Unit,
             1, 1);
  m.push_back(simple("en", Kind::Unit, 1));
  add_series(m,
             {"tio", "elva", "tolv", "tretton", "fjorton", "femton", "sexton", "sjutton", "arton",
              "nitton"},
             Kind::Teen, 10, 1);
  m.push_back(simple("aderton", Kind::Teen, 18));
  m.push_back(simple("förtio", Kind::Tens, 40));
  add_series(m,
             {"tjugo", "trettio", "fyrtio", "femtio", "sextio", "sjuttio", "åttio", "nittio"},
             Kind::Tens, 20, 10);
  m.push_back(simple("hundra", Kind::Hundred, 100));
  m.push_back(simple("tusen", Kind::Thousand, 1000));
  m.push_back(Morpheme{"ettusen", {Token{Kind::Unit, 1, "ett"}, Token{Kind::Thousand, 1000, "tusen"}}});
  return finish(std::move(t));
}

// Italian input has accented vowels folded (tré -> tre) before lookup.
LanguageTable build_it() {
  LanguageTable t;
  t.grammar = {.unit_first = false, .teen_hundreds = false, .conj_after_hundreds = false};
  auto& m = t.morphemes;
  add_series(m, {"uno", "due", "tre", "quattro", "cinque", "sei", "sette", "otto", "nove"},
             Kind::Unit, 1, 1);
  add_series(m,
             {"dieci", "undici", "dodici", "tredici", "quattordici", "quindici", "sedici",
              "diciassette", "diciotto", "diciannove"},
             Kind::Teen, 10, 1);
  add_series(m,
             {"venti", "trenta", "quaranta", "cinquanta", "sessanta", "settanta", "ottanta",
              "novanta"},
             Kind::Tens, 20, 10);
  add_series(m,
             {"vent", "trent", "quarant", "cinquant", "sessant", "settant", "ottant", "novant"},
             Kind::TensElided, 20, 10);
  m.push_back(simple("cento", Kind::Hundred, 100));
  m.push_back(simple("cent", Kind::HundredElided, 100));
  m.push_back(simple("mille", Kind::ThousandSingle, 1000));
  m.push_back(simple("mila", Kind::ThousandPlural, 1000));
  return finish(std::move(t));
}

const LanguageTable& table_for(Language lang) {
  static const LanguageTable tables[] = {build_en(), build_de(), build_it(), build_nl(),
                                         build_sv()};
  return tables[static_cast<int>(lang)];
}

bool is_separator(char32_t c) {
  // ASCII hyphen, comma, U+2010..U+2014 dashes and the soft hyphen.
  return unicode::is_space(c) || c == U'-' || c == U',' || (c >= 0x2010 && c <= 0x2014) ||
         c == 0x00AD;
}

// Case fold, drop separators, transliterate language-specific letters.
std::string prepare(std::string_view words, Language lang) {
  const std::string folded = unicode::fold_case(unicode::strip_space_punct(words));
  std::u32string out;
  for (char32_t c : unicode::decode(folded)) {
    if (is_separator(c)) continue;
    switch (lang) {
      case Language::de:
        if (c == U'ä') { out += U"ae"; continue; }
        if (c == U'ö') { out += U"oe"; continue; }
        if (c == U'ü') { out += U"ue"; continue; }
        if (c == U'ß') { out += U"ss"; continue; }
        break;
      case Language::nl:
        if (c == U'é' || c == U'ë' || c == U'è') c = U'e';
        break;
      case Language::it:
        if (c == U'é' || c == U'è') c = U'e';
        if (c == U'ò') c = U'o';
        if (c == U'ù') c = U'u';
        if (c == U'ì') c = U'i';
        break;
      default:
        break;
    }
    out.push_back(c);
  }
  return unicode::encode(out);
}

struct GrammarFailure {
  std::size_t index;  // token index where parsing stopped
  std::string reason;
};

class Evaluator {
 public:
  Evaluator(const std::vector<Token>& tokens, const Grammar& g) : t_(tokens), g_(g) {}

  // Returns the value or the failure position.
  std::optional<int> run(GrammarFailure& failure) {
    int value = 0;
    bool any = false;
    bool has_thousand = false;

    // Thousands.
    if (auto m = multiplier_before({Kind::Thousand, Kind::ThousandPlural}, true)) {
      const Token& mark = t_[i_ + m->second];
      if (mark.kind == Kind::ThousandPlural && m->first < 2) return fail(failure, "mila needs a multiplier");
      value += m->first * 1000;
      i_ += m->second + 1;
      any = has_thousand = true;
    } else if (peek(Kind::ThousandSingle)) {
      value += 1000;
      ++i_;
      any = has_thousand = true;
    } else if (peek(Kind::Thousand)) {
      value += 1000;
      ++i_;
      any = has_thousand = true;
    } else if (peek(Kind::ThousandPlural)) {
      return fail(failure, "mila needs a multiplier");
    }

    // Hundreds.
    if (auto m = multiplier_before({Kind::Hundred, Kind::HundredElided},
                                   g_.teen_hundreds && !has_thousand)) {
      value += m->first * 100;
      i_ += m->second;
      if (!take_hundred_marker(failure)) return std::nullopt;
      any = true;
    } else if (peek(Kind::Hundred) || peek(Kind::HundredElided)) {
      value += 100;
      if (!take_hundred_marker(failure)) return std::nullopt;
      any = true;
    }

    if (any && g_.conj_after_hundreds && peek(Kind::Conj) && i_ + 1 < t_.size()) ++i_;

    // Below one hundred.
    if (i_ < t_.size()) {
      auto below = g_.unit_first ? below100_unit_first(failure) : below100_tens_first(failure);
      if (!below) return std::nullopt;
      value += *below;
      any = true;
    }

    if (i_ != t_.size()) return fail(failure, "unexpected word");
    if (!any) return fail(failure, "empty number");
    if (value < kMinNumber || value > kMaxNumber) return fail(failure, "value out of range");
    return value;
  }

 private:
  bool peek(Kind k, std::size_t offset = 0) const {
    return i_ + offset < t_.size() && t_[i_ + offset].kind == k;
  }

  std::optional<int> fail(GrammarFailure& failure, std::string reason) {
    failure = {std::min(i_, t_.empty() ? 0 : t_.size() - 1), std::move(reason)};
    return std::nullopt;
  }

  // A multiplier (unit, article, optionally teen) directly followed by one of
  // `marks`. Returns (multiplier value, tokens consumed before the mark).
  std::optional<std::pair<int, std::size_t>> multiplier_before(std::initializer_list<Kind> marks,
                                                               bool allow_teen) const {
    if (i_ + 1 >= t_.size()) return std::nullopt;
    const Token& head = t_[i_];
    const Kind next = t_[i_ + 1].kind;
    if (std::find(marks.begin(), marks.end(), next) == marks.end()) return std::nullopt;
    if (head.kind == Kind::Unit || head.kind == Kind::Article) return std::pair{head.value, 1u};
    if (allow_teen && head.kind == Kind::Teen) return std::pair{head.value, 1u};
    return std::nullopt;
  }

  bool take_hundred_marker(GrammarFailure& failure) {
    const bool elided = peek(Kind::HundredElided);
    ++i_;
    if (elided) {
      // "cent" must be followed by a vowel-initial part: uno, otto, ottanta.
      const bool ok = i_ < t_.size() &&
                      ((t_[i_].kind == Kind::Unit && (t_[i_].value == 1 || t_[i_].value == 8)) ||
                       (t_[i_].kind == Kind::Tens && t_[i_].value == 80) ||
                       (t_[i_].kind == Kind::TensElided && t_[i_].value == 80));
      if (!ok) {
        fail(failure, "elided hundred must precede uno/otto/ottanta");
        return false;
      }
    }
    return true;
  }

  std::optional<int> below100_tens_first(GrammarFailure& failure) {
    const Token& head = t_[i_];
    switch (head.kind) {
      case Kind::Unit:
      case Kind::Teen:
        ++i_;
        return head.value;
      case Kind::Tens:
        ++i_;
        if (peek(Kind::Unit)) return head.value + t_[i_++].value;
        return head.value;
      case Kind::TensElided:
        ++i_;
        if (peek(Kind::Unit) && (t_[i_].value == 1 || t_[i_].value == 8)) {
          return head.value + t_[i_++].value;
        }
        return fail(failure, "elided tens must precede uno/otto");
      default:
        return fail(failure, "expected a number word");
    }
  }

  std::optional<int> below100_unit_first(GrammarFailure& failure) {
    const Token& head = t_[i_];
    switch (head.kind) {
      case Kind::Teen:
      case Kind::Tens:
        ++i_;
        return head.value;
      case Kind::Unit:
        ++i_;
        if (peek(Kind::Conj)) {
          ++i_;
          if (peek(Kind::Tens)) return head.value + t_[i_++].value;
          return fail(failure, "expected tens after conjunction");
        }
        return head.value;
      default:
        return fail(failure, "expected a number word");
    }
  }

  const std::vector<Token>& t_;
  const Grammar& g_;
  std::size_t i_ = 0;
};

class Segmenter {
 public:
  Segmenter(std::string_view text, const LanguageTable& table) : text_(text), table_(table) {}

  std::optional<int> parse() {
    std::vector<Token> tokens;
    return search(0, tokens);
  }

  std::size_t furthest() const { return furthest_; }
  const std::optional<std::pair<GrammarFailure, std::vector<Token>>>& grammar_failure() const {
    return grammar_failure_;
  }

 private:
  std::optional<int> search(std::size_t pos, std::vector<Token>& tokens) {
    furthest_ = std::max(furthest_, pos);
    if (pos == text_.size()) {
      GrammarFailure failure{0, {}};
      Evaluator eval(tokens, table_.grammar);
      if (auto v = eval.run(failure)) return v;
      if (!grammar_failure_) grammar_failure_ = std::pair{failure, tokens};
      return std::nullopt;
    }
    if (++steps_ > kMaxSteps) return std::nullopt;
    for (const auto& m : table_.morphemes) {
      if (text_.compare(pos, m.surface.size(), m.surface) != 0) continue;
      const std::size_t before = tokens.size();
      tokens.insert(tokens.end(), m.tokens.begin(), m.tokens.end());
      if (auto v = search(pos + m.surface.size(), tokens)) return v;
      tokens.resize(before);
    }
    return std::nullopt;
  }

  static constexpr int kMaxSteps = 20000;

  std::string_view text_;
  const LanguageTable& table_;
  std::size_t furthest_ = 0;
  int steps_ = 0;
  std::optional<std::pair<GrammarFailure, std::vector<Token>>> grammar_failure_;
};

}  // namespace

std::string spell_number(int n, Language lang) {
  check_range(n);
  switch (lang) {
    case Language::en: return en::spell(n);
    case Language::de: return de::spell(n);
    case Language::it: return it::spell(n);
    case Language::nl: return nl::spell(n);
    case Language::sv: return sv::spell(n);
  }
  throw RangeError("unsupported language");
}

int parse_number(std::string_view words, Language lang) {
  const std::string prepared = prepare(words, lang);
  if (prepared.empty()) throw ParseError("empty number word", std::string(words));
  if (prepared.size() > 200) throw ParseError("number word too long", prepared.substr(0, 32));

  Segmenter seg(prepared, table_for(lang));
  if (auto v = seg.parse()) return *v;

  if (const auto& gf = seg.grammar_failure()) {
    const auto& [failure, tokens] = *gf;
    const std::string token = tokens.empty() ? prepared : tokens[failure.index].surface;
    throw ParseError("cannot parse '" + std::string(words) + "' as " +
                         std::string(to_code(lang)) + " number: " + failure.reason + " at '" +
                         token + "'",
                     token);
  }
  const std::string token = prepared.substr(seg.furthest());
  throw ParseError("cannot parse '" + std::string(words) + "' as " + std::string(to_code(lang)) +
                       " number: unknown word '" + token + "'",
                   token);
}

TranslationCheck check_number_translation(
    std::pair<std::string_view, std::string_view> source_en,
    std::pair<std::string_view, std::string_view> candidate, Language lang) {
  const std::array<std::string_view, 2> src = {source_en.first, source_en.second};
  const std::array<std::string_view, 2> cand = {candidate.first, candidate.second};
  for (std::size_t k = 0; k < 2; ++k) {
    int expected = 0;
    try {
      expected = parse_number(src[k], Language::en);
    } catch (const ParseError& e) {
      return {false, "source number " + std::to_string(k + 1) + " is not valid English: " + e.what()};
    }
    try {
      const int got = parse_number(cand[k], lang);
      if (got != expected) {
        return {false, "number " + std::to_string(k + 1) + " translated as " + std::to_string(got) +
                           ", expected " + std::to_string(expected)};
      }
    } catch (const ParseError& e) {
      return {false, "number " + std::to_string(k + 1) + ": " + e.what()};
    }
  }
  return {true, {}};
}

}  // namespace senseprobe::numerals
