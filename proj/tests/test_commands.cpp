#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/commands.hpp"
#include "core/data_model.hpp"

#include <unistd.h>

using namespace evrisk;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("evrisk_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json slurp_json(const fs::path& path) { return json::parse(slurp(path)); }

config::RunConfig small_config(const TempDir& dir, int properties = 250) {
  config::RunConfig cfg;
  cfg.seed = 5;
  cfg.out_dir = (dir.path / "out").string();
  cfg.data_dir = (dir.path / "data").string();
  cfg.synthetic.property_count = properties;
  cfg.params.n_estimators = 30;
  return cfg;
}

// One generated+trained+compared run shared by the read-only test cases.
struct Pipeline {
  TempDir dir{"commands_pipeline"};
  config::RunConfig cfg = small_config(dir);
  Pipeline() {
    commands::cmd_gen(cfg);
    commands::cmd_train_score(cfg);
    commands::cmd_compare(cfg);
  }
};

Pipeline& pipeline() {
  static Pipeline p;
  return p;
}

}  // namespace

TEST_CASE("gen validates before touching disk") {
  TempDir dir("cmd_gen_bad");
  auto cfg = small_config(dir);
  cfg.synthetic.property_count = 0;
  CHECK_THROWS_AS(commands::cmd_gen(cfg), std::invalid_argument);
  CHECK(!fs::exists(cfg.out_dir));
  CHECK(!fs::exists(cfg.data_dir));
}

TEST_CASE("gen writes the four inputs plus ground truth, deterministically") {
  TempDir a("cmd_gen_a");
  TempDir b("cmd_gen_b");
  auto cfg_a = small_config(a, 150);
  auto cfg_b = small_config(b, 150);
  auto result = commands::cmd_gen(cfg_a);
  CHECK(result.summary.find("properties.csv") != std::string::npos);
  commands::cmd_gen(cfg_b);

  for (const char* name : {"properties.csv", "filings.csv", "neighborhoods.csv", "owners.csv",
                           "truth_coefficients.csv", "truth_properties.csv"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(fs::path(cfg_a.data_dir) / name));
    CHECK(slurp(fs::path(cfg_a.data_dir) / name) == slurp(fs::path(cfg_b.data_dir) / name));
  }
  CHECK(slurp(fs::path(cfg_a.data_dir) / "truth_coefficients.csv")
            .starts_with("b0,b_log_units,b_neighborhood,b_owner,b_history,sigma_property\n"));
  // The resolved config echo lands in the output directory.
  CHECK(json::parse(slurp(fs::path(cfg_a.out_dir) / "config.json")).at("seed") == 5);
}

TEST_CASE("commands that need inputs fail cleanly without them") {
  TempDir dir("cmd_missing");
  auto cfg = small_config(dir);
  CHECK_THROWS_WITH_AS(commands::cmd_train_score(cfg), doctest::Contains("missing input file"),
                       std::runtime_error);

  commands::cmd_gen(cfg);
  // Inputs exist now, but score files don't.
  CHECK_THROWS_WITH_AS(commands::cmd_compare(cfg), doctest::Contains("missing score file"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(commands::cmd_risk_histogram(cfg), doctest::Contains("missing score file"),
                       std::runtime_error);
}

TEST_CASE("train-score writes models, scores, and a coherent metrics report") {
  auto& p = pipeline();
  const fs::path out(p.cfg.out_dir);
  for (const char* set : {"E", "EN", "ENO"}) {
    CAPTURE(set);
    CHECK(fs::exists(out / ("model_" + std::string(set) + ".txt")));
    CHECK(fs::exists(out / ("scores_" + std::string(set) + ".csv")));
  }

  // One score row per property that survived loading filters.
  auto props = data::load_properties(p.cfg.data_dir + "/properties.csv");
  const std::string scores = slurp(out / "scores_ENO.csv");
  const auto lines = static_cast<std::size_t>(std::count(scores.begin(), scores.end(), '\n'));
  CHECK(lines == props.records.size() + 1);

  json m = slurp_json(out / "metrics.json");
  CHECK(m.at("provenance").at("version") == "1.0.0");
  CHECK(m.at("provenance").at("seed") == 5);
  CHECK(m.at("provenance").at("config_hash").get<std::string>().size() == 16);
  CHECK(m.at("windows").at("train_feature") == "2023-01:2023-07");
  CHECK(m.at("windows").at("prior") == "2023-12:2024-02");
  for (const char* set : {"E", "EN", "ENO"}) {
    double roc = m.at("feature_sets").at(set).at("roc_auc").get<double>();
    double pr = m.at("feature_sets").at(set).at("pr_auc").get<double>();
    CHECK(roc >= 0.0);
    CHECK(roc <= 1.0);
    CHECK(pr >= 0.0);
    CHECK(pr <= 1.0);
  }
  for (const char* pair : {"E_vs_EN", "EN_vs_ENO"}) {
    double pv = m.at("delong").at(pair).at("p").get<double>();
    CHECK(pv >= 0.0);
    CHECK(pv <= 1.0);
  }
  CHECK(m.at("training").at("ENO").at("params").at("n_estimators") == 30);
  CHECK(m.at("test_base_rate").get<double>() > 0.0);
}

TEST_CASE("compare report stays within budgets and matches its overlays") {
  auto& p = pipeline();
  const fs::path out(p.cfg.out_dir);
  json r = slurp_json(out / "report.json");
  const auto& rows = r.at("policies");
  REQUIRE(rows.size() == 7);
  CHECK(rows[0].at("policy") == "NEO-T-O");

  const double budget_hours = r.at("budget").at("hours").get<double>();
  const long budget_units = r.at("budget").at("units").get<long>();
  CHECK(budget_hours > 0.0);
  CHECK(budget_units > 0);
  const long neo_properties = rows[0].at("properties_visited").get<long>();
  CHECK(rows[0].at("normalized_time").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rows[0].at("lift_pct").is_null());

  for (const auto& row : rows) {
    CAPTURE(row.at("policy").get<std::string>());
    CAPTURE(row.at("control").get<std::string>());
    const double hours = row.at("outreach_hours").get<double>();
    CHECK(row.at("normalized_time").get<double>() ==
          doctest::Approx(hours / budget_hours).epsilon(1e-12));
    if (row.at("control") == "time") {
      CHECK(hours <= budget_hours + 1e-9);
    } else {
      CHECK(row.at("units_visited").get<long>() <= budget_units);
    }
    double rate = row.at("discovery_rate").get<double>();
    CHECK(rate >= 0.0);
    CHECK(rate <= 1.0);
  }

  // Each non-NEO row has an overlay whose partition reproduces the counts.
  const std::vector<std::string> slugs{
      "rs_eviction_only_time",    "rs_eviction_neighborhood_time", "prior_eviction_count_time",
      "prior_eviction_count_units", "neighborhood_canvass_time",   "neighborhood_canvass_units"};
  for (std::size_t i = 0; i < slugs.size(); ++i) {
    CAPTURE(slugs[i]);
    json g = slurp_json(out / ("overlay_" + slugs[i] + ".geojson"));
    CHECK(g.at("type") == "FeatureCollection");
    CHECK(g.at("primary") == "NEO-T-O");
    const long primary_only = g.at("counts").at("primary_only").get<long>();
    const long alternative_only = g.at("counts").at("alternative_only").get<long>();
    const long both = g.at("counts").at("both").get<long>();
    CHECK(primary_only + both == neo_properties);
    const auto& row = rows[i + 1];
    CHECK(alternative_only + both == row.at("properties_visited").get<long>());
    CHECK(g.at("features").size() ==
          static_cast<std::size_t>(primary_only + alternative_only + both));
    CHECK(row.at("overlap_pct_of_neo").get<double>() ==
          g.at("overlap_pct_of_primary").get<double>());
  }

  const std::string table = slurp(out / "table.txt");
  CHECK(table.find("NEO-T-O") != std::string::npos);
  CHECK(table.find("NeighborhoodCanvass") != std::string::npos);
}

TEST_CASE("risk-histogram covers every scored property") {
  auto& p = pipeline();
  commands::cmd_risk_histogram(p.cfg);
  const fs::path out(p.cfg.out_dir);

  json h = slurp_json(out / "risk_histogram.json");
  CHECK(h.at("feature_set") == "ENO");
  long total = 0;
  for (const auto& bucket : h.at("buckets")) {
    long count = bucket.at("count").get<long>();
    total += count;
    double share_sum = 0.0;
    long count_sum = 0;
    for (const char* g : {"very_low", "low", "medium", "high"}) {
      share_sum += bucket.at("shares").at(g).get<double>();
      count_sum += bucket.at("counts").at(g).get<long>();
    }
    CHECK(count_sum == count);
    if (count > 0) CHECK(share_sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  auto props = data::load_properties(p.cfg.data_dir + "/properties.csv");
  CHECK(total == static_cast<long>(props.records.size()));

  const std::string csv = slurp(out / "risk_histogram.csv");
  CHECK(csv.starts_with(
      "bucket,count,very_low,low,medium,high,share_very_low,share_low,share_medium,share_high\n"));
}

TEST_CASE("metrics verb reproduces the training-run metric block from score files") {
  auto& p = pipeline();
  const fs::path out(p.cfg.out_dir);
  json before = slurp_json(out / "metrics.json");
  commands::cmd_metrics(p.cfg);
  json after = slurp_json(out / "metrics.json");

  // Scores round-trip through CSV exactly, so the numbers must be identical.
  CHECK(after.at("feature_sets") == before.at("feature_sets"));
  CHECK(after.at("delong") == before.at("delong"));
  for (const char* set : {"E", "EN", "ENO"}) {
    CAPTURE(set);
    CHECK(slurp(out / ("roc_" + std::string(set) + ".csv")).starts_with("threshold,fpr,tpr\n"));
    CHECK(slurp(out / ("pr_" + std::string(set) + ".csv"))
              .starts_with("threshold,recall,precision\n"));
  }
}

TEST_CASE("the full pipeline is byte-stable across reruns") {
  auto& p = pipeline();
  const fs::path out(p.cfg.out_dir);
  const std::string report = slurp(out / "report.json");
  const std::string table = slurp(out / "table.txt");
  const std::string scores = slurp(out / "scores_ENO.csv");

  commands::cmd_gen(p.cfg);
  commands::cmd_train_score(p.cfg);
  commands::cmd_compare(p.cfg);

  CHECK(slurp(out / "report.json") == report);
  CHECK(slurp(out / "table.txt") == table);
  CHECK(slurp(out / "scores_ENO.csv") == scores);
}
