#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

namespace senseprobe::detail {

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line where the record starts
};

// RFC 4180 reader: quoted fields may hold delimiters, doubled quotes and
// newlines. CRLF and a leading UTF-8 BOM are accepted. Blank lines are skipped.
std::vector<Record> read_csv(std::istream& in, char delimiter = ',');

// Plain delimiter split without quoting, as used by the PAWS and XNLI TSVs.
std::vector<Record> read_tsv(std::istream& in);

}  // namespace senseprobe::detail
