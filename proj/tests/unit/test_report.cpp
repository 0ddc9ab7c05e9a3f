#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "senseprobe/report.hpp"

using namespace senseprobe;
using namespace senseprobe::report;
namespace fs = std::filesystem;

namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

std::vector<Row> sample_rows() {
  Row base;
  base.task_id = "paws";
  base.sense = "id";
  base.condition = "id-baseline";
  base.n = 100;
  base.acc_source = metrics::wilson(80, 100);
  base.acc_sense = metrics::wilson(78, 100);
  base.consistency = metrics::wilson(95, 100);
  base.upper_bound = 0.98;

  Row de = base;
  de.sense = "de^T";
  de.condition = "full";
  de.consistency = metrics::wilson(70, 100);
  de.id_baseline = 0.95;
  de.quality = mtquality::CorpusScores{41.5, 0.7, 0.5, 0.65, 100};

  Row para = de;
  para.sense = "en^P";
  para.condition = "I";
  para.note = "comma, \"quoted\"";

  Row unusable;
  unusable.task_id = "belebele";
  unusable.sense = "en^P";
  unusable.condition = "full";
  unusable.usable = false;
  unusable.note = "sense unusable";
  return {para, unusable, de, base};
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("empty report") {
  CHECK(json_text({}) == "[]\n");
  CHECK(csv_text({}).find('\n') == csv_text({}).size() - 1);
}

TEST_CASE("rounding") {
  CHECK(round6(0.1234564) == 0.123456);
  CHECK(round6(0.1234566) == 0.123457);
  CHECK(std::signbit(round6(-0.0000001)) == false);
}

TEST_CASE("row order") {
  auto rows = sample_rows();
  sort_rows(rows);
  CHECK(rows[0].task_id == "belebele");
  CHECK(rows[1].sense == "id");
  CHECK(rows[2].sense == "en^P");
  CHECK(rows[3].sense == "de^T");
}

TEST_CASE("JSON round trip is stable") {
  auto rows = sample_rows();
  sort_rows(rows);
  const std::string text = json_text(rows);
  CHECK(json_text(from_json(nlohmann::json::parse(text))) == text);
  CHECK(text.find("\"consistency\":{") != std::string::npos);
  CHECK(text.find("\"upper_bound\":null") != std::string::npos);
}

TEST_CASE("CSV cells") {
  auto rows = sample_rows();
  sort_rows(rows);
  const std::string csv = csv_text(rows);
  std::istringstream in(csv);
  std::string header, line;
  std::getline(in, header);
  CHECK(header.rfind("task_id,sense,condition,n,excluded,", 0) == 0);
  std::getline(in, line);
  CHECK(line.rfind("belebele,en^P,full,0,0,NA,", 0) == 0);
  CHECK(csv.find("\"comma, \"\"quoted\"\"\"") != std::string::npos);
  CHECK(csv.find("0.700000") != std::string::npos);
}

TEST_CASE("charts carry whiskers and one bound tick per non-baseline bar") {
  auto rows = sample_rows();
  const std::string svg = consistency_svg(rows);
  CHECK(svg.rfind("<svg", 0) == 0);
  // Three bars with a consistency value, one of them the baseline.
  CHECK(count(svg, "class=\"upper-bound\"") == 2);
  CHECK(count(svg, "class=\"ci\"") == 3);
  CHECK(accuracy_svg(rows).find("class=\"ci\"") != std::string::npos);
}

TEST_CASE("emit writes the requested formats") {
  const fs::path dir = fs::temp_directory_path() / "senseprobe-unit-report";
  fs::remove_all(dir);
  emit(sample_rows(), dir, {Format::json, Format::csv, Format::svg});
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "report.csv"));
  CHECK(fs::exists(dir / "accuracy.svg"));
  CHECK(fs::exists(dir / "consistency.svg"));
}

}
