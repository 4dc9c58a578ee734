// covaudit: query a bibliographic database for every record of a local
// corpus, match the results and report coverage against benchmark databases.
//
//   covaudit run      --config cfg.json [--mode title_exact] [--ids ids.txt]
//                     [--resume] [--output DIR]
//   covaudit report   --config cfg.json [--ids ids.txt] [--output DIR]
//   covaudit validate --config cfg.json
//
// The API key is read from the environment variable named by the config
// (transport.key_env, default AK_API_KEY).

#include <CLI11.hpp>
#include <iostream>

#include "covaudit/error.hpp"
#include "covaudit/pipeline.hpp"

using namespace covaudit;

namespace {

struct Common {
  std::string config;
  std::vector<std::string> modes;
  std::string ids;
  std::string output;
  bool resume = false;
};

RunConfig load(const Common& c) {
  RunConfig cfg = validate_config(c.config);
  if (!c.modes.empty()) {
    cfg.modes.clear();
    for (const auto& m : c.modes) {
      auto mode = parse_query_mode(m);
      if (!mode) throw ConfigError({"--mode: unknown mode '" + m + "'"});
      if (std::find(cfg.modes.begin(), cfg.modes.end(), *mode) == cfg.modes.end())
        cfg.modes.push_back(*mode);
    }
  }
  if (!c.output.empty()) cfg.output_dir = c.output;
  return cfg;
}

std::optional<std::set<std::string>> ids(const Common& c) {
  if (c.ids.empty()) return std::nullopt;
  return load_id_list(c.ids);
}

int finish(const PipelineResult& r) {
  if (r.exit_code == kExitOk)
    std::cout << r.message << '\n';
  else
    std::cerr << "covaudit: " << r.message << '\n';
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverage audit of a bibliographic database against a local corpus"};
  app.require_subcommand(1);

  Common c;
  auto* run = app.add_subcommand("run", "query, archive and report");
  auto* report = app.add_subcommand("report", "rebuild reports from the archive");
  auto* validate = app.add_subcommand("validate", "check a config file");
  for (auto* sub : {run, report, validate})
    sub->add_option("-c,--config", c.config, "config file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
  for (auto* sub : {run, report}) {
    sub->add_option("--ids", c.ids, "file with one record id per line")
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--output", c.output, "output directory (overrides config)");
    sub->add_option("-m,--mode", c.modes, "title_exact or title_words (repeatable)");
  }
  run->add_flag("--resume", c.resume, "continue from the checkpoint");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    RunConfig cfg = load(c);
    if (*validate) {
      std::cout << "config ok: " << cfg.corpus.string() << " -> "
                << cfg.output_dir.string() << '\n';
      return kExitOk;
    }
    if (*run) {
      PipelineOptions opts;
      opts.id_filter = ids(c);
      opts.resume = c.resume;
      return finish(run_pipeline(cfg, opts));
    }
    return finish(report_from_archive(cfg, ids(c)));
  } catch (const ConfigError& e) {
    std::cerr << "covaudit: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "covaudit: " << e.what() << '\n';
    return kExitInternal;
  }
}
