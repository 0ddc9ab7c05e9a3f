#include "detail/csv.hpp"

#include "senseprobe/errors.hpp"

namespace senseprobe::detail {

namespace {

void skip_bom(std::istream& in) {
  char bom[3] = {};
  in.read(bom, 3);
  if (in.gcount() == 3 && bom[0] == '\xEF' && bom[1] == '\xBB' && bom[2] == '\xBF') return;
  in.clear();
  in.seekg(0);
}

bool blank(const Record& r) { return r.fields.size() == 1 && r.fields[0].empty(); }

}  // namespace

std::vector<Record> read_csv(std::istream& in, char delimiter) {
  skip_bom(in);
  std::vector<Record> out;
  Record current{{std::string()}, 1};
  std::size_t line = 1;
  bool quoted = false;
  bool after_quote = false;
  char c;
  while (in.get(c)) {
    std::string& field = current.fields.back();
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty() && !after_quote) {
      quoted = true;
    } else if (c == delimiter) {
      current.fields.emplace_back();
      after_quote = false;
    } else if (c == '\r' && in.peek() == '\n') {
      continue;
    } else if (c == '\n') {
      if (!blank(current)) out.push_back(std::move(current));
      ++line;
      current = Record{{std::string()}, line};
      after_quote = false;
    } else if (after_quote) {
      throw LoadError("unexpected character after closing quote", line);
    } else {
      field += c;
    }
  }
  if (quoted) throw LoadError("unterminated quoted field", current.line);
  if (!blank(current)) out.push_back(std::move(current));
  return out;
}

std::vector<Record> read_tsv(std::istream& in) {
  skip_bom(in);
  std::vector<Record> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;
    Record r{{}, line};
    std::size_t start = 0;
    for (;;) {
      const auto tab = text.find('\t', start);
      r.fields.push_back(text.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace senseprobe::detail
