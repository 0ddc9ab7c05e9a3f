#include "senseprobe/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "senseprobe/errors.hpp"

namespace senseprobe::report {

double round6(double x) {
  const double r = std::round(x * 1e6) / 1e6;
  return r == 0 ? 0.0 : r;
}

namespace {

int sense_rank(const std::string& s) {
  static const std::vector<std::string> order = {"id", "en", "en^P", "de^T", "it^T", "nl^T", "sv^T"};
  auto it = std::find(order.begin(), order.end(), s);
  return it == order.end() ? static_cast<int>(order.size()) : static_cast<int>(it - order.begin());
}

int condition_rank(const std::string& c) {
  static const std::vector<std::string> order = {"full", "I", "X", "reference-swap", "id-baseline"};
  auto it = std::find(order.begin(), order.end(), c);
  return it == order.end() ? static_cast<int>(order.size()) : static_cast<int>(it - order.begin());
}

nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(round6(*v)) : nlohmann::json(nullptr);
}

nlohmann::json prop(const std::optional<metrics::Proportion>& p) {
  if (!p) return nullptr;
  return {{"value", round6(p->value)}, {"lo", round6(p->lo)}, {"hi", round6(p->hi)},
          {"successes", p->successes}, {"n", p->n}};
}

std::optional<double> get_opt(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

std::optional<metrics::Proportion> get_prop(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return metrics::Proportion{it->at("value").get<double>(), it->at("lo").get<double>(),
                             it->at("hi").get<double>(), it->at("successes").get<std::size_t>(),
                             it->at("n").get<std::size_t>()};
}

std::string fmt(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", round6(*v));
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

struct Bar {
  std::string label;
  double value;
  std::optional<double> lo, hi, bound;
  std::string css;
};

struct Group {
  std::string title;
  std::vector<Bar> bars;
};

constexpr double kPlotHeight = 240;
constexpr double kTop = 40;
constexpr double kLeft = 60;
constexpr double kBarWidth = 18;
constexpr double kGroupGap = 30;

std::string chart(const std::string& title, const std::vector<Group>& groups) {
  double width = kLeft + 20;
  for (const auto& g : groups) width += static_cast<double>(g.bars.size()) * kBarWidth + kGroupGap;
  const double height = kTop + kPlotHeight + 110;
  auto y = [](double v) { return kTop + kPlotHeight * (1.0 - std::clamp(v, 0.0, 1.0)); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
      << num(height) << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  svg << "<text x=\"" << num(kLeft) << "\" y=\"20\" font-size=\"14\">" << xml_escape(title)
      << "</text>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = tick / 4.0;
    svg << "<line class=\"grid\" x1=\"" << num(kLeft) << "\" x2=\"" << num(width - 10) << "\" y1=\""
        << num(y(v)) << "\" y2=\"" << num(y(v)) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y(v) + 3)
        << "\" text-anchor=\"end\">" << num(v * 100) << "</text>\n";
  }
  double x = kLeft + 10;
  for (const auto& g : groups) {
    const double group_start = x;
    for (const auto& b : g.bars) {
      const double top = y(b.value);
      svg << "<rect class=\"bar " << b.css << "\" x=\"" << num(x) << "\" y=\"" << num(top)
          << "\" width=\"" << num(kBarWidth - 2) << "\" height=\"" << num(kTop + kPlotHeight - top)
          << "\"><title>" << xml_escape(g.title + " " + b.label) << ": " << num(b.value * 100)
          << "</title></rect>\n";
      const double cx = x + (kBarWidth - 2) / 2;
      if (b.lo && b.hi) {
        svg << "<line class=\"ci\" x1=\"" << num(cx) << "\" x2=\"" << num(cx) << "\" y1=\""
            << num(y(*b.lo)) << "\" y2=\"" << num(y(*b.hi)) << "\" stroke=\"#000\"/>\n";
      }
      if (b.bound) {
        svg << "<line class=\"upper-bound\" x1=\"" << num(x - 1) << "\" x2=\"" << num(x + kBarWidth - 1)
            << "\" y1=\"" << num(y(*b.bound)) << "\" y2=\"" << num(y(*b.bound))
            << "\" stroke=\"#c00\" stroke-width=\"2\"/>\n";
      }
      svg << "<text x=\"" << num(cx) << "\" y=\"" << num(kTop + kPlotHeight + 12)
          << "\" text-anchor=\"end\" transform=\"rotate(-60 " << num(cx) << " "
          << num(kTop + kPlotHeight + 12) << ")\">" << xml_escape(b.label) << "</text>\n";
      x += kBarWidth;
    }
    svg << "<text x=\"" << num((group_start + x) / 2) << "\" y=\"" << num(height - 8)
        << "\" text-anchor=\"middle\">" << xml_escape(g.title) << "</text>\n";
    x += kGroupGap;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string css_for(const std::string& condition) {
  if (condition == "id-baseline") return "baseline";
  if (condition == "full") return "full";
  if (condition == "reference-swap") return "reference-swap";
  return "ablation-" + condition;
}

}  // namespace

void sort_rows(std::vector<Row>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.task_id != b.task_id) return a.task_id < b.task_id;
    if (sense_rank(a.sense) != sense_rank(b.sense)) return sense_rank(a.sense) < sense_rank(b.sense);
    if (a.sense != b.sense) return a.sense < b.sense;
    return condition_rank(a.condition) < condition_rank(b.condition);
  });
}

nlohmann::json to_json(const std::vector<Row>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    j["task_id"] = r.task_id;
    j["sense"] = r.sense;
    j["condition"] = r.condition;
    j["n"] = r.n;
    j["excluded"] = r.excluded;
    j["acc_source"] = prop(r.acc_source);
    j["acc_sense"] = prop(r.acc_sense);
    j["consistency"] = prop(r.consistency);
    j["upper_bound"] = opt(r.upper_bound);
    j["id_baseline"] = opt(r.id_baseline);
    j["conditional"] = {{"given_correct", opt(r.given_correct)},
                        {"given_incorrect", opt(r.given_incorrect)}};
    j["unmapped_source"] = opt(r.unmapped_source);
    j["unmapped_sense"] = opt(r.unmapped_sense);
    j["containment"] = {{"acc_source", opt(r.acc_source_containment)},
                        {"acc_sense", opt(r.acc_sense_containment)}};
    j["extracted"] = {{"acc_source", opt(r.acc_source_extracted)},
                      {"acc_sense", opt(r.acc_sense_extracted)},
                      {"consistency", opt(r.consistency_extracted)}};
    j["number_translation_accuracy"] = opt(r.number_translation_accuracy);
    if (r.quality) {
      j["quality"] = {{"bleu", round6(r.quality->bleu)},
                      {"rouge1", round6(r.quality->rouge1)},
                      {"rouge2", round6(r.quality->rouge2)},
                      {"rouge_l", round6(r.quality->rouge_l)},
                      {"segments", r.quality->segments}};
    } else {
      j["quality"] = nullptr;
    }
    j["neural_mean"] = opt(r.neural_mean);
    j["filtered"] = {{"consistency", opt(r.filtered_consistency)},
                     {"n", r.filtered_n ? nlohmann::json(*r.filtered_n) : nlohmann::json(nullptr)},
                     {"delta", opt(r.filtered_delta)}};
    j["usable"] = r.usable;
    j["note"] = r.note;
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<Row> from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw LoadError("report must be a JSON array");
  std::vector<Row> rows;
  for (const auto& o : j) {
    Row r;
    r.task_id = o.at("task_id").get<std::string>();
    r.sense = o.at("sense").get<std::string>();
    r.condition = o.at("condition").get<std::string>();
    r.n = o.at("n").get<std::size_t>();
    r.excluded = o.value("excluded", std::size_t{0});
    r.acc_source = get_prop(o, "acc_source");
    r.acc_sense = get_prop(o, "acc_sense");
    r.consistency = get_prop(o, "consistency");
    r.upper_bound = get_opt(o, "upper_bound");
    r.id_baseline = get_opt(o, "id_baseline");
    if (o.contains("conditional")) {
      r.given_correct = get_opt(o["conditional"], "given_correct");
      r.given_incorrect = get_opt(o["conditional"], "given_incorrect");
    }
    r.unmapped_source = get_opt(o, "unmapped_source");
    r.unmapped_sense = get_opt(o, "unmapped_sense");
    if (o.contains("containment")) {
      r.acc_source_containment = get_opt(o["containment"], "acc_source");
      r.acc_sense_containment = get_opt(o["containment"], "acc_sense");
    }
    if (o.contains("extracted")) {
      r.acc_source_extracted = get_opt(o["extracted"], "acc_source");
      r.acc_sense_extracted = get_opt(o["extracted"], "acc_sense");
      r.consistency_extracted = get_opt(o["extracted"], "consistency");
    }
    r.number_translation_accuracy = get_opt(o, "number_translation_accuracy");
    if (o.contains("quality") && !o["quality"].is_null()) {
      const auto& q = o["quality"];
      r.quality = mtquality::CorpusScores{q.at("bleu").get<double>(), q.at("rouge1").get<double>(),
                                          q.at("rouge2").get<double>(), q.at("rouge_l").get<double>(),
                                          q.at("segments").get<std::size_t>()};
    }
    r.neural_mean = get_opt(o, "neural_mean");
    if (o.contains("filtered")) {
      const auto& f = o["filtered"];
      r.filtered_consistency = get_opt(f, "consistency");
      if (f.contains("n") && !f["n"].is_null()) r.filtered_n = f["n"].get<std::size_t>();
      r.filtered_delta = get_opt(f, "delta");
    }
    r.usable = o.value("usable", true);
    r.note = o.value("note", "");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string json_text(const std::vector<Row>& rows) {
  return to_json(rows).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

std::string csv_text(const std::vector<Row>& rows) {
  std::ostringstream out;
  out << "task_id,sense,condition,n,excluded,acc_source,acc_source_lo,acc_source_hi,acc_sense,"
         "acc_sense_lo,acc_sense_hi,consistency,consistency_lo,consistency_hi,upper_bound,"
         "id_baseline,given_correct,given_incorrect,unmapped_source,unmapped_sense,"
         "acc_source_containment,acc_sense_containment,acc_source_extracted,acc_sense_extracted,"
         "consistency_extracted,number_translation_accuracy,bleu,rouge1,rouge2,rouge_l,"
         "neural_mean,filtered_consistency,filtered_n,filtered_delta,usable,note\n";
  auto p = [](const std::optional<metrics::Proportion>& x) {
    if (!x) return std::string("NA,NA,NA");
    return fmt(x->value) + "," + fmt(x->lo) + "," + fmt(x->hi);
  };
  for (const auto& r : rows) {
    out << csv_field(r.task_id) << ',' << csv_field(r.sense) << ',' << csv_field(r.condition) << ','
        << r.n << ',' << r.excluded << ',' << p(r.acc_source) << ',' << p(r.acc_sense) << ','
        << p(r.consistency) << ',' << fmt(r.upper_bound) << ',' << fmt(r.id_baseline) << ','
        << fmt(r.given_correct) << ',' << fmt(r.given_incorrect) << ',' << fmt(r.unmapped_source)
        << ',' << fmt(r.unmapped_sense) << ',' << fmt(r.acc_source_containment) << ','
        << fmt(r.acc_sense_containment) << ',' << fmt(r.acc_source_extracted) << ','
        << fmt(r.acc_sense_extracted) << ',' << fmt(r.consistency_extracted) << ','
        << fmt(r.number_translation_accuracy) << ','
        << (r.quality ? fmt(r.quality->bleu) + "," + fmt(r.quality->rouge1) + "," +
                            fmt(r.quality->rouge2) + "," + fmt(r.quality->rouge_l)
                      : std::string("NA,NA,NA,NA"))
        << ',' << fmt(r.neural_mean) << ',' << fmt(r.filtered_consistency) << ','
        << (r.filtered_n ? std::to_string(*r.filtered_n) : std::string("NA")) << ','
        << fmt(r.filtered_delta) << ',' << (r.usable ? "true" : "false") << ',' << csv_field(r.note)
        << '\n';
  }
  return out.str();
}

std::string accuracy_svg(const std::vector<Row>& rows) {
  std::map<std::string, Group> groups;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    if (r.condition != "full" || !r.acc_sense) continue;
    if (!groups.count(r.task_id)) {
      order.push_back(r.task_id);
      groups[r.task_id].title = r.task_id;
      if (r.acc_source) {
        groups[r.task_id].bars.push_back(
            {"en", r.acc_source->value, r.acc_source->lo, r.acc_source->hi, std::nullopt, "source"});
      }
    }
    groups[r.task_id].bars.push_back(
        {r.sense, r.acc_sense->value, r.acc_sense->lo, r.acc_sense->hi, std::nullopt, "sense"});
  }
  std::vector<Group> ordered;
  for (const auto& id : order) ordered.push_back(groups[id]);
  return chart("Accuracy (95% CI)", ordered);
}

std::string consistency_svg(const std::vector<Row>& rows) {
  std::map<std::string, Group> groups;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    if (!r.consistency) continue;
    if (!groups.count(r.task_id)) {
      order.push_back(r.task_id);
      groups[r.task_id].title = r.task_id;
    }
    const bool baseline = r.condition == "id-baseline";
    std::optional<double> bound;
    if (!baseline) bound = r.upper_bound.value_or(1.0);
    const std::string label = r.condition == "full" ? r.sense : r.sense + " " + r.condition;
    groups[r.task_id].bars.push_back(
        {label, r.consistency->value, r.consistency->lo, r.consistency->hi, bound, css_for(r.condition)});
  }
  std::vector<Group> ordered;
  for (const auto& id : order) ordered.push_back(groups[id]);
  return chart("Consistency (95% CI, upper bound in red)", ordered);
}

void emit(const std::vector<Row>& rows, const std::filesystem::path& dir,
          const std::vector<Format>& formats) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error("cannot write " + (dir / name).string());
  };
  for (Format f : formats) {
    switch (f) {
      case Format::json: write("report.json", json_text(rows)); break;
      case Format::csv: write("report.csv", csv_text(rows)); break;
      case Format::svg:
        write("accuracy.svg", accuracy_svg(rows));
        write("consistency.svg", consistency_svg(rows));
        break;
    }
  }
}

}  // namespace senseprobe::report
