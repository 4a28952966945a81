#include "core/commands.hpp"

#include <array>
#include <filesystem>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "core/data_model.hpp"
#include "core/exports.hpp"
#include "core/gbdt.hpp"
#include "core/metrics.hpp"
#include "core/synthetic.hpp"
#include "core/text.hpp"

namespace evrisk::commands {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::array<data::FeatureSet, 3> kSets{data::FeatureSet::E, data::FeatureSet::EN,
                                                data::FeatureSet::ENO};

std::string model_path(const config::RunConfig& cfg, data::FeatureSet set) {
  return cfg.out_dir + "/model_" + data::feature_set_str(set) + ".txt";
}

std::string scores_path(const config::RunConfig& cfg, data::FeatureSet set) {
  return cfg.out_dir + "/scores_" + data::feature_set_str(set) + ".csv";
}

// Create the output directory and drop the resolved-config echo into it.
void ensure_out(const config::RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  exports::write_text(cfg.out_dir + "/config.json", config::render_config(cfg));
}

json provenance(const config::RunConfig& cfg) {
  return json{{"version", config::kVersion},
              {"seed", cfg.seed},
              {"config_hash", config::config_hash(cfg)}};
}

struct Inputs {
  std::vector<data::PropertyRecord> properties;
  std::vector<data::EvictionFiling> filings;
  std::vector<data::NeighborhoodRow> neighborhoods;
  std::vector<data::OwnerTenure> tenures;
  std::size_t rows_rejected = 0;
  std::size_t rows_filtered = 0;
};

Inputs load_inputs(const config::RunConfig& cfg) {
  const std::string dir = cfg.resolved_data_dir();
  for (const char* name : {"properties.csv", "filings.csv", "neighborhoods.csv", "owners.csv"}) {
    if (!fs::exists(dir + "/" + name)) {
      throw std::runtime_error("missing input file " + dir + "/" + name +
                               " (run the gen command or point data_dir at existing data)");
    }
  }
  Inputs in;
  auto props = data::load_properties(dir + "/properties.csv");
  auto filings = data::load_filings(dir + "/filings.csv");
  auto hoods = data::load_neighborhoods(dir + "/neighborhoods.csv");
  auto tenures = data::load_owner_tenures(dir + "/owners.csv");
  in.properties = std::move(props.records);
  in.filings = std::move(filings.records);
  in.neighborhoods = std::move(hoods.records);
  in.tenures = std::move(tenures.records);
  in.rows_rejected = props.report.rows_rejected + filings.report.rows_rejected +
                     hoods.report.rows_rejected + tenures.report.rows_rejected;
  in.rows_filtered = props.report.rows_filtered;
  if (in.properties.empty()) {
    throw std::runtime_error("no properties survived loading from " + dir);
  }
  return in;
}

data::LabeledDataset build(const Inputs& in, const data::OwnershipIndex& ownership,
                           data::FeatureSet set, const dates::WindowPair& windows) {
  return data::build_dataset(in.properties, in.filings, in.neighborhoods, ownership, windows,
                             set);
}

std::vector<model::Hyperparams> expand_grid(const config::RunConfig& cfg) {
  std::vector<model::Hyperparams> combos;
  for (int depth : cfg.grid.max_depth) {
    for (double lr : cfg.grid.learning_rate) {
      for (int trees : cfg.grid.n_estimators) {
        for (double spw : cfg.grid.scale_pos_weight) {
          for (double gamma : cfg.grid.gamma) {
            model::Hyperparams hp = cfg.params;
            hp.max_depth = depth;
            hp.learning_rate = lr;
            hp.n_estimators = trees;
            hp.scale_pos_weight = spw;
            hp.gamma = gamma;
            combos.push_back(hp);
          }
        }
      }
    }
  }
  return combos;
}

json params_to_json(const model::Hyperparams& hp) {
  return json{{"max_depth", hp.max_depth},
              {"learning_rate", hp.learning_rate},
              {"n_estimators", hp.n_estimators},
              {"scale_pos_weight", hp.scale_pos_weight},
              {"gamma", hp.gamma},
              {"l2_leaf_penalty", hp.l2_leaf_penalty}};
}

json windows_to_json(const config::RunConfig& cfg) {
  return json{{"train_feature", cfg.train_windows().feature.str()},
              {"train_label", cfg.train_label.str()},
              {"test_feature", cfg.test_windows().feature.str()},
              {"test_label", cfg.test_label.str()},
              {"prior", cfg.prior_window().str()}};
}

json delong_to_json(const metrics::DelongResult& d) {
  return json{{"auc_a", d.auc_a}, {"auc_b", d.auc_b}, {"z", d.z}, {"p", d.p}};
}

// ROC/PR AUC per feature set plus DeLong tests between adjacent sets.
json metric_block(const std::array<std::vector<double>, 3>& scores,
                  const std::vector<int>& labels) {
  json sets = json::object();
  for (std::size_t i = 0; i < kSets.size(); ++i) {
    sets[data::feature_set_str(kSets[i])] =
        json{{"roc_auc", metrics::roc_auc(scores[i], labels)},
             {"pr_auc", metrics::pr_auc(scores[i], labels)}};
  }
  json delong = json::object();
  delong["E_vs_EN"] = delong_to_json(metrics::delong_test(scores[0], scores[1], labels));
  delong["EN_vs_ENO"] = delong_to_json(metrics::delong_test(scores[1], scores[2], labels));
  return json{{"feature_sets", sets}, {"delong", delong}};
}

std::string metric_summary(const json& block) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& set : kSets) {
    const json& s = block.at("feature_sets").at(data::feature_set_str(set));
    rows.push_back({data::feature_set_str(set),
                    text::format_fixed(s.at("roc_auc").get<double>(), 4),
                    text::format_fixed(s.at("pr_auc").get<double>(), 4)});
  }
  std::string out = exports::render_table({"feature_set", "roc_auc", "pr_auc"}, rows);
  out += "\n";
  for (const char* pair : {"E_vs_EN", "EN_vs_ENO"}) {
    const json& d = block.at("delong").at(pair);
    out += std::string("DeLong ") + pair + ": z=" +
           text::format_fixed(d.at("z").get<double>(), 3) +
           ", p=" + text::format_fixed(d.at("p").get<double>(), 4) + "\n";
  }
  return out;
}

void write_json(const std::string& path, const json& j) {
  exports::write_text(path, j.dump(2) + "\n");
}

std::string policy_slug(const policy::PolicySpec& spec) {
  switch (spec.kind) {
    case policy::PolicyKind::neo_t_o: return "neo_t_o_" + policy::control_str(spec.control);
    case policy::PolicyKind::rs_eviction_only:
      return "rs_eviction_only_" + policy::control_str(spec.control);
    case policy::PolicyKind::rs_eviction_neighborhood:
      return "rs_eviction_neighborhood_" + policy::control_str(spec.control);
    case policy::PolicyKind::prior_eviction_count:
      return "prior_eviction_count_" + policy::control_str(spec.control);
    case policy::PolicyKind::neighborhood_canvass:
      return "neighborhood_canvass_" + policy::control_str(spec.control);
  }
  throw std::logic_error("policy_slug: unknown kind");
}

}  // namespace

CommandResult cmd_gen(const config::RunConfig& cfg) {
  cfg.validate();  // bad settings must fail before anything touches disk
  auto generated = synth::generate(cfg.synthetic, cfg.seed);

  const std::string dir = cfg.resolved_data_dir();
  ensure_out(cfg);
  fs::create_directories(dir);
  synth::write_all(generated, dir);

  std::string coef = "b0,b_log_units,b_neighborhood,b_owner,b_history,sigma_property\n";
  coef += text::format_double(generated.truth.b0) + "," +
          text::format_double(generated.truth.b_log_units) + "," +
          text::format_double(generated.truth.b_neighborhood) + "," +
          text::format_double(generated.truth.b_owner) + "," +
          text::format_double(generated.truth.b_history) + "," +
          text::format_double(generated.truth.sigma_property) + "\n";
  exports::write_text(dir + "/truth_coefficients.csv", coef);

  std::string rows = "property_id,base_logit,monthly_prob,neigh_risk,owner_badness\n";
  for (const auto& t : generated.truth.properties) {
    rows += t.property_id + "," + text::format_double(t.base_logit) + "," +
            text::format_double(t.monthly_prob) + "," + text::format_double(t.neigh_risk) + "," +
            text::format_double(t.owner_badness) + "\n";
  }
  exports::write_text(dir + "/truth_properties.csv", rows);

  std::string summary = exports::render_table(
      {"file", "rows"},
      {{"properties.csv", std::to_string(generated.properties.size())},
       {"filings.csv", std::to_string(generated.filings.size())},
       {"neighborhoods.csv", std::to_string(generated.neighborhoods.size())},
       {"owners.csv", std::to_string(generated.tenures.size())},
       {"truth_properties.csv", std::to_string(generated.truth.properties.size())}});
  summary += "\nwrote " + dir + "\n";
  return {summary};
}

CommandResult cmd_train_score(const config::RunConfig& cfg) {
  cfg.validate();
  ensure_out(cfg);
  Inputs in = load_inputs(cfg);
  data::OwnershipIndex ownership(in.tenures);

  std::array<std::vector<double>, 3> set_scores;
  std::vector<int> labels;
  json training = json::object();
  double rate = 0.0;
  for (std::size_t i = 0; i < kSets.size(); ++i) {
    const auto set = kSets[i];
    const std::string name = data::feature_set_str(set);
    auto train_ds = build(in, ownership, set, cfg.train_windows());
    auto test_ds = build(in, ownership, set, cfg.test_windows());

    model::Hyperparams hp = cfg.params;
    json block = json::object();
    if (cfg.use_grid) {
      auto combos = expand_grid(cfg);
      auto result = model::grid_search_cv(train_ds, combos, cfg.seed, cfg.cv_folds);
      hp = result.best;
      block["grid_mean_precision"] = result.best_precision;
    }
    auto mdl = model::train_gbdt(train_ds, hp);
    model::save_model(mdl, model_path(cfg, set));
    auto scores = mdl.predict(test_ds);
    model::write_scores(scores_path(cfg, set), test_ds.property_ids, scores);

    block["params"] = params_to_json(hp);
    block["train_rows"] = train_ds.rows();
    block["test_rows"] = test_ds.rows();
    block["train_base_rate"] = data::base_rate(train_ds);
    training[name] = block;
    labels = test_ds.labels;
    rate = data::base_rate(test_ds);
    set_scores[i] = std::move(scores);
  }

  json metrics_json = metric_block(set_scores, labels);
  metrics_json["provenance"] = provenance(cfg);
  metrics_json["windows"] = windows_to_json(cfg);
  metrics_json["test_base_rate"] = rate;
  metrics_json["training"] = training;
  write_json(cfg.out_dir + "/metrics.json", metrics_json);

  std::string summary = metric_summary(metrics_json);
  summary += "\ntest base rate: " + text::format_fixed(rate, 4) + "\nwrote " + cfg.out_dir +
             "/metrics.json, model_*.txt, scores_*.csv\n";
  return {summary};
}

CommandResult cmd_metrics(const config::RunConfig& cfg) {
  cfg.validate();
  ensure_out(cfg);
  Inputs in = load_inputs(cfg);
  data::OwnershipIndex ownership(in.tenures);
  auto ds = build(in, ownership, data::FeatureSet::E, cfg.test_windows());

  std::array<std::vector<double>, 3> set_scores;
  for (std::size_t i = 0; i < kSets.size(); ++i) {
    const std::string path = scores_path(cfg, kSets[i]);
    if (!fs::exists(path)) {
      throw std::runtime_error("missing score file " + path + " (run the train-score command)");
    }
    set_scores[i] = model::import_scores(path, ds.property_ids).scores;
    const std::string name = data::feature_set_str(kSets[i]);
    exports::write_curve_csv(cfg.out_dir + "/roc_" + name + ".csv",
                             metrics::roc_curve(set_scores[i], ds.labels), "fpr", "tpr");
    exports::write_curve_csv(cfg.out_dir + "/pr_" + name + ".csv",
                             metrics::pr_curve(set_scores[i], ds.labels), "recall", "precision");
  }

  json metrics_json = metric_block(set_scores, ds.labels);
  metrics_json["provenance"] = provenance(cfg);
  metrics_json["windows"] = windows_to_json(cfg);
  metrics_json["test_base_rate"] = data::base_rate(ds);
  write_json(cfg.out_dir + "/metrics.json", metrics_json);

  std::string summary = metric_summary(metrics_json);
  summary += "\nwrote " + cfg.out_dir + "/metrics.json and roc_*/pr_* curve files\n";
  return {summary};
}

CommandResult cmd_compare(const config::RunConfig& cfg) {
  cfg.validate();
  ensure_out(cfg);
  Inputs in = load_inputs(cfg);
  data::OwnershipIndex ownership(in.tenures);
  auto ds = build(in, ownership, data::FeatureSet::E, cfg.test_windows());

  std::array<std::vector<double>, 3> set_scores;
  for (std::size_t i = 0; i < kSets.size(); ++i) {
    const std::string path = scores_path(cfg, kSets[i]);
    if (!fs::exists(path)) {
      throw std::runtime_error("missing score file " + path + " (run the train-score command)");
    }
    set_scores[i] = model::import_scores(path, ds.property_ids).scores;
  }

  policy::PolicyInputs pin;
  pin.properties = in.properties;
  pin.filings = in.filings;
  pin.prior_window = cfg.prior_window();
  pin.test_window = cfg.test_label;
  pin.scores_e = set_scores[0];
  pin.scores_en = set_scores[1];
  pin.scores_eno = set_scores[2];
  pin.params = cfg.cost;
  pin.route_options = cfg.route;
  pin.topk_search = cfg.topk_search;
  auto report = policy::compare_policies(cfg.policies, pin, cfg.seed);

  std::unordered_map<std::string, geo::GeoPoint> locations;
  locations.reserve(in.properties.size());
  for (const auto& p : in.properties) locations[p.property_id] = p.location;
  const policy::PolicyRow* neo = nullptr;
  for (const auto& row : report.rows) {
    if (row.spec.kind == policy::PolicyKind::neo_t_o) {
      neo = &row;
      break;
    }
  }

  json rows_json = json::array();
  std::vector<std::vector<std::string>> table_rows;
  std::vector<std::string> overlay_files;
  for (const auto& row : report.rows) {
    const auto& o = row.outcome;
    double rate_pct = text::round_half_up(o.discovery_rate * 100.0, 1);
    json r{{"policy", policy::policy_kind_str(row.spec.kind)},
           {"control", policy::control_str(row.spec.control)},
           {"normalized_time", o.normalized_time},
           {"outreach_hours", o.outreach_time},
           {"evictions_discovered", o.evictions_discovered},
           {"filings_discovered", o.filings_discovered},
           {"properties_visited", o.properties_visited},
           {"units_visited", o.units_visited},
           {"discovery_rate", o.discovery_rate},
           {"discovery_rate_pct", rate_pct},
           {"empty_plan", o.empty_plan}};
    r["lift_pct"] = row.has_lift ? json(row.lift_pct) : json(nullptr);

    const bool is_neo = row.spec.kind == policy::PolicyKind::neo_t_o;
    if (!is_neo && neo != nullptr) {
      auto overlay = exports::overlay_pair(neo->plan, row.plan, locations, "NEO-T-O",
                                           policy::policy_kind_str(row.spec.kind));
      const std::string file = "overlay_" + policy_slug(row.spec) + ".geojson";
      write_json(cfg.out_dir + "/" + file, overlay.geojson);
      overlay_files.push_back(file);
      r["overlap_pct_of_neo"] = overlay.overlap_pct;
    } else {
      r["overlap_pct_of_neo"] = nullptr;
    }
    rows_json.push_back(r);

    std::string lift_cell = "-";
    if (row.has_lift) {
      lift_cell = (row.lift_pct > 0 ? "+" : "") + text::format_fixed(row.lift_pct, 1) + "%";
    }
    table_rows.push_back({policy::policy_kind_str(row.spec.kind),
                          policy::control_str(row.spec.control),
                          text::format_fixed(o.normalized_time, 3),
                          std::to_string(o.evictions_discovered),
                          std::to_string(o.filings_discovered),
                          std::to_string(o.properties_visited),
                          std::to_string(o.units_visited),
                          text::format_fixed(rate_pct, 1) + "%", lift_cell});
  }

  json report_json{{"provenance", provenance(cfg)},
                   {"windows", windows_to_json(cfg)},
                   {"budget", json{{"hours", report.budget_hours},
                                   {"units", report.budget_units}}},
                   {"metrics", metric_block(set_scores, ds.labels)},
                   {"policies", rows_json}};
  write_json(cfg.out_dir + "/report.json", report_json);

  std::string table = exports::render_table(
      {"policy", "control", "norm_time", "evictions", "filings", "properties", "units",
       "discovery_rate", "neo_lift"},
      table_rows);
  exports::write_text(cfg.out_dir + "/table.txt", table);

  std::string summary = table;
  summary += "\nbudget: " + text::format_fixed(report.budget_hours, 2) + " hours, " +
             std::to_string(report.budget_units) + " units\n";
  summary += "wrote " + cfg.out_dir + "/report.json, table.txt";
  for (const auto& f : overlay_files) summary += ", " + f;
  summary += "\n";
  return {summary};
}

CommandResult cmd_risk_histogram(const config::RunConfig& cfg) {
  cfg.validate();
  ensure_out(cfg);
  Inputs in = load_inputs(cfg);
  data::OwnershipIndex ownership(in.tenures);
  auto ds = build(in, ownership, data::FeatureSet::E, cfg.test_windows());

  const std::string path = scores_path(cfg, cfg.feature_set);
  if (!fs::exists(path)) {
    throw std::runtime_error("missing score file " + path + " (run the train-score command)");
  }
  auto scores = model::import_scores(path, ds.property_ids).scores;
  std::vector<int> units;
  units.reserve(in.properties.size());
  for (const auto& p : in.properties) units.push_back(p.units);

  auto rows = exports::risk_histogram(scores, units, cfg.unit_buckets, cfg.risk_bins);

  std::string csv =
      "bucket,count,very_low,low,medium,high,share_very_low,share_low,share_medium,share_high\n";
  json rows_json = json::array();
  std::vector<std::vector<std::string>> table_rows;
  for (const auto& row : rows) {
    csv += row.bucket + "," + std::to_string(row.count);
    for (long c : row.group_counts) csv += "," + std::to_string(c);
    for (double s : row.group_shares) csv += "," + text::format_double(s);
    csv += "\n";
    rows_json.push_back(json{{"bucket", row.bucket},
                             {"count", row.count},
                             {"counts",
                              json{{"very_low", row.group_counts[0]},
                                   {"low", row.group_counts[1]},
                                   {"medium", row.group_counts[2]},
                                   {"high", row.group_counts[3]}}},
                             {"shares",
                              json{{"very_low", row.group_shares[0]},
                                   {"low", row.group_shares[1]},
                                   {"medium", row.group_shares[2]},
                                   {"high", row.group_shares[3]}}}});
    table_rows.push_back({row.bucket, std::to_string(row.count),
                          text::format_fixed(row.group_shares[0], 3),
                          text::format_fixed(row.group_shares[1], 3),
                          text::format_fixed(row.group_shares[2], 3),
                          text::format_fixed(row.group_shares[3], 3)});
  }
  exports::write_text(cfg.out_dir + "/risk_histogram.csv", csv);
  write_json(cfg.out_dir + "/risk_histogram.json",
             json{{"provenance", provenance(cfg)},
                  {"feature_set", data::feature_set_str(cfg.feature_set)},
                  {"buckets", rows_json}});

  std::string summary = exports::render_table(
      {"bucket", "count", "very_low", "low", "medium", "high"}, table_rows);
  summary += "\nwrote " + cfg.out_dir + "/risk_histogram.csv and risk_histogram.json\n";
  return {summary};
}

}  // namespace evrisk::commands
