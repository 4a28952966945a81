// evrisk command-line tool. Talks to the engine exclusively through the
// public C interface, the way any external embedding would.
#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "evrisk.h"

namespace {

struct ConfigDeleter {
  void operator()(evrisk_config* cfg) const { evrisk_config_free(cfg); }
};
using ConfigHandle = std::unique_ptr<evrisk_config, ConfigDeleter>;

struct StringDeleter {
  void operator()(char* s) const { evrisk_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

int report_failure(evrisk_status status) {
  std::fprintf(stderr, "error: %s\n", evrisk_last_error());
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eviction-risk scoring, outreach routing, and policy comparison"};
  app.require_subcommand(1);
  app.fallthrough();  // let --config/--seed/--out/--set appear after the verb
  app.set_version_flag("--version", []() { return std::string(evrisk_version()); });

  std::string config_path;
  std::string out_dir;
  std::string seed;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "JSON config file (defaults used when omitted)")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "override the run seed")->check(CLI::Number);
  app.add_option("--out", out_dir, "override the output directory");
  app.add_option("--set", sets,
                 "dotted-path config override, e.g. synthetic.property_count=500 (repeatable)")
      ->allow_extra_args(false);

  auto* gen = app.add_subcommand("gen", "generate a synthetic input dataset");
  auto* train = app.add_subcommand("train-score", "train per-feature-set models and write scores");
  auto* compare = app.add_subcommand("compare", "compare outreach policies under shared budgets");
  auto* histogram =
      app.add_subcommand("risk-histogram", "risk-group shares by building-size bucket");
  auto* metrics = app.add_subcommand("metrics", "recompute metrics and curves from score files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help/--version exit 0; every malformed invocation is a validation error.
    int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(EVRISK_ERR_VALIDATION);
  }

  evrisk_config* raw = nullptr;
  evrisk_status status =
      evrisk_config_create(config_path.empty() ? nullptr : config_path.c_str(), &raw);
  if (status != EVRISK_OK) return report_failure(status);
  ConfigHandle cfg(raw);

  std::vector<std::pair<std::string, std::string>> overrides;
  if (!seed.empty()) overrides.emplace_back("seed", seed);
  if (!out_dir.empty()) overrides.emplace_back("out_dir", out_dir);
  for (const auto& entry : sets) {
    auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::fprintf(stderr, "error: --set expects key=value, got \"%s\"\n", entry.c_str());
      return static_cast<int>(EVRISK_ERR_VALIDATION);
    }
    overrides.emplace_back(entry.substr(0, eq), entry.substr(eq + 1));
  }
  for (const auto& [key, value] : overrides) {
    status = evrisk_config_set(cfg.get(), key.c_str(), value.c_str());
    if (status != EVRISK_OK) return report_failure(status);
  }

  evrisk_status (*command)(const evrisk_config*, char**) = nullptr;
  if (gen->parsed()) {
    command = evrisk_cmd_gen;
  } else if (train->parsed()) {
    command = evrisk_cmd_train_score;
  } else if (compare->parsed()) {
    command = evrisk_cmd_compare;
  } else if (histogram->parsed()) {
    command = evrisk_cmd_risk_histogram;
  } else if (metrics->parsed()) {
    command = evrisk_cmd_metrics;
  }

  char* summary = nullptr;
  status = command(cfg.get(), &summary);
  OwnedString owned(summary);
  if (status != EVRISK_OK) return report_failure(status);
  if (owned) std::fputs(owned.get(), stdout);
  return 0;
}
