// senseprobe: command-line driver for cross-sense consistency runs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "senseprobe/errors.hpp"
#include "senseprobe/modelclient.hpp"
#include "senseprobe/pipeline.hpp"
#include "senseprobe/report.hpp"

namespace fs = std::filesystem;
namespace sp = senseprobe;
namespace pl = senseprobe::pipeline;

namespace {

struct Common {
  std::string config;
  std::optional<std::string> base_url;
  std::optional<std::string> model;
  std::optional<double> temperature;
  std::optional<std::size_t> max_concurrency;
  std::optional<std::string> cache_dir;
  std::optional<std::string> run_dir;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--base-url", c.base_url, "chat-completion endpoint, e.g. http://localhost:8000/v1");
  cmd->add_option("--model", c.model, "model id sent to the endpoint");
  cmd->add_option("--temperature", c.temperature, "sampling temperature")->check(CLI::Range(0.0, 2.0));
  cmd->add_option("--max-concurrency", c.max_concurrency, "requests in flight")->check(CLI::PositiveNumber);
  cmd->add_option("--cache-dir", c.cache_dir, "response cache directory; '-' disables caching");
  cmd->add_option("--run-dir", c.run_dir, "artifact directory (overrides the config)");
}

pl::Config load(const Common& c) {
  pl::Config config = pl::load_config(c.config);
  pl::Overrides o;
  o.base_url = c.base_url;
  o.model = c.model;
  o.temperature = c.temperature;
  o.max_concurrency = c.max_concurrency;
  if (c.cache_dir) o.cache_dir = fs::path(*c.cache_dir);
  pl::apply(config, o);
  if (c.run_dir) config.run_dir = *c.run_dir;
  return config;
}

// Commands that only read artifacts never reach the model.
std::shared_ptr<sp::modelclient::Client> offline() {
  return std::make_shared<sp::modelclient::FunctionModel>([](const sp::modelclient::CompletionRequest&) -> std::string {
    throw sp::ConfigError("this command does not query the model; run collect first");
  });
}

pl::Pipeline make_pipeline(const Common& c, bool online) {
  pl::Config config = load(c);
  if (!online) return pl::Pipeline(std::move(config), offline(), nullptr);
  auto answer = pl::make_client(config.model);
  auto sense = config.sense_model ? pl::make_client(*config.sense_model) : answer;
  return pl::Pipeline(std::move(config), answer, sense);
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sp::Error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

std::vector<sp::report::Format> parse_formats(const std::vector<std::string>& names) {
  std::vector<sp::report::Format> out;
  for (const auto& n : names) {
    if (n == "json") out.push_back(sp::report::Format::json);
    else if (n == "csv") out.push_back(sp::report::Format::csv);
    else if (n == "svg") out.push_back(sp::report::Format::svg);
  }
  return out;
}

void print_rows(const std::vector<sp::report::Row>& rows) {
  for (const auto& r : rows) {
    std::cout << r.task_id << "\t" << r.sense << "\t" << r.condition << "\tn=" << r.n;
    if (r.consistency) std::cout << "\tC=" << sp::report::round6(r.consistency->value);
    if (!r.usable) std::cout << "\tunusable";
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-sense consistency evaluation of chat-completion models"};
  app.require_subcommand(1);
  Common common;

  auto* gen = app.add_subcommand("generate-data", "build or load every configured task and snapshot it");
  add_common(gen, common);

  auto* senses = app.add_subcommand("make-senses", "generate paraphrased and translated senses");
  add_common(senses, common);

  auto* collect = app.add_subcommand("collect", "collect English, id-baseline and full-condition sense runs");
  add_common(collect, common);

  auto* ablate = app.add_subcommand("ablate", "collect condition I/X runs and reference swaps");
  add_common(ablate, common);
  bool reference_swap = false;
  ablate->add_flag("--reference-swap", reference_swap, "pair translated instructions with reference inputs");

  auto* score = app.add_subcommand("score", "score persisted runs into reports/report.json");
  add_common(score, common);

  auto* analyze = app.add_subcommand("analyze", "secondary analyses over persisted runs");
  add_common(analyze, common);
  std::string analysis;
  analyze->add_option("analysis", analysis, "conditional | correlation | matched-language | quality")
      ->required()
      ->check(CLI::IsMember({"conditional", "correlation", "matched-language", "quality"}));
  bool write_bridge = false;
  analyze->add_flag("--write-bridge", write_bridge, "write translation triples for the neural scorer (quality)");

  auto* rep = app.add_subcommand("report", "emit report files from reports/report.json");
  add_common(rep, common);
  std::vector<std::string> formats = {"json", "csv", "svg"};
  rep->add_option("--format", formats, "json, csv, svg")->check(CLI::IsMember({"json", "csv", "svg"}))->delimiter(',');

  auto* run = app.add_subcommand("run", "all steps, then reports");
  add_common(run, common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      auto p = make_pipeline(common, false);
      p.generate_data();
    } else if (*senses) {
      auto p = make_pipeline(common, true);
      p.make_senses();
    } else if (*collect) {
      auto p = make_pipeline(common, true);
      p.collect_all();
    } else if (*ablate) {
      pl::Config config = load(common);
      if (reference_swap) config.reference_swap = true;
      auto answer = pl::make_client(config.model);
      auto sense = config.sense_model ? pl::make_client(*config.sense_model) : answer;
      pl::Pipeline p(std::move(config), answer, sense);
      p.ablate();
    } else if (*score) {
      auto p = make_pipeline(common, false);
      const auto rows = p.score();
      sp::report::emit(rows, p.reports_dir(), {sp::report::Format::json});
      print_rows(rows);
    } else if (*analyze) {
      auto p = make_pipeline(common, false);
      nlohmann::json out;
      std::string file;
      if (analysis == "conditional") {
        out = p.analyze_conditional();
        file = "conditional.json";
      } else if (analysis == "correlation") {
        out = p.analyze_correlation();
        file = "correlation.json";
      } else if (analysis == "matched-language") {
        out = p.analyze_matched_language();
        file = "matched_language.json";
      } else {
        out = p.analyze_quality(write_bridge);
        file = "quality.json";
      }
      write_json(p.reports_dir() / file, out);
      std::cout << out.dump(2) << "\n";
    } else if (*rep) {
      const pl::Config config = load(common);
      const fs::path dir = config.run_dir / "reports";
      std::ifstream in(dir / "report.json", std::ios::binary);
      if (!in) throw sp::Error("no " + (dir / "report.json").string() + "; run score first");
      const auto rows = sp::report::from_json(nlohmann::json::parse(in));
      sp::report::emit(rows, dir, parse_formats(formats));
    } else if (*run) {
      auto p = make_pipeline(common, true);
      print_rows(p.run());
    }
  } catch (const sp::Error& e) {
    std::cerr << "senseprobe: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "senseprobe: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "senseprobe: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
