#include "core/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "core/text.hpp"

namespace evrisk::config {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) {
  throw std::invalid_argument("config: " + msg);
}

template <typename T>
T field(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    bad(path + ": " + e.what());
  }
}

dates::Month month_field(const json& j, const std::string& path) {
  auto s = field<std::string>(j, path);
  try {
    return dates::Month::parse(s);
  } catch (const std::exception& e) {
    bad(path + ": " + e.what());
  }
}

dates::MonthWindow window_field(const json& j, const std::string& path) {
  auto s = field<std::string>(j, path);
  try {
    return dates::MonthWindow::parse(s);
  } catch (const std::exception& e) {
    bad(path + ": " + e.what());
  }
}

void require_keys(const json& j, std::initializer_list<const char*> keys,
                  const std::string& path) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool known = false;
    for (const char* k : keys) {
      if (key == k) {
        known = true;
        break;
      }
    }
    if (!known) bad("unknown key " + path + "." + key);
  }
}

json synthetic_to_json(const synth::SyntheticConfig& s) {
  return json{
      {"property_count", s.property_count},
      {"grid_size", s.grid_size},
      {"lat_min", s.lat_min},
      {"lat_max", s.lat_max},
      {"lon_min", s.lon_min},
      {"lon_max", s.lon_max},
      {"start_month", s.start_month.str()},
      {"horizon_months", s.horizon_months},
      {"b0", s.b0},
      {"b_log_units", s.b_log_units},
      {"b_neighborhood", s.b_neighborhood},
      {"b_owner", s.b_owner},
      {"b_history", s.b_history},
      {"sigma_property", s.sigma_property},
      {"owner_count", s.owner_count},
      {"attorney_count", s.attorney_count},
      {"attorney_share", s.attorney_share},
      {"zipf_exponent", s.zipf_exponent},
      {"transfer_fraction", s.transfer_fraction},
      {"non_rental_fraction", s.non_rental_fraction},
      {"single_unit_fraction", s.single_unit_fraction},
      {"missing_rate", s.missing_rate},
      {"extra_filing_rate", s.extra_filing_rate},
  };
}

synth::SyntheticConfig synthetic_from_json(const json& j) {
  synth::SyntheticConfig s;
  s.property_count = field<int>(j.at("property_count"), "synthetic.property_count");
  s.grid_size = field<int>(j.at("grid_size"), "synthetic.grid_size");
  s.lat_min = field<double>(j.at("lat_min"), "synthetic.lat_min");
  s.lat_max = field<double>(j.at("lat_max"), "synthetic.lat_max");
  s.lon_min = field<double>(j.at("lon_min"), "synthetic.lon_min");
  s.lon_max = field<double>(j.at("lon_max"), "synthetic.lon_max");
  s.start_month = month_field(j.at("start_month"), "synthetic.start_month");
  s.horizon_months = field<int>(j.at("horizon_months"), "synthetic.horizon_months");
  s.b0 = field<double>(j.at("b0"), "synthetic.b0");
  s.b_log_units = field<double>(j.at("b_log_units"), "synthetic.b_log_units");
  s.b_neighborhood = field<double>(j.at("b_neighborhood"), "synthetic.b_neighborhood");
  s.b_owner = field<double>(j.at("b_owner"), "synthetic.b_owner");
  s.b_history = field<double>(j.at("b_history"), "synthetic.b_history");
  s.sigma_property = field<double>(j.at("sigma_property"), "synthetic.sigma_property");
  s.owner_count = field<int>(j.at("owner_count"), "synthetic.owner_count");
  s.attorney_count = field<int>(j.at("attorney_count"), "synthetic.attorney_count");
  s.attorney_share = field<double>(j.at("attorney_share"), "synthetic.attorney_share");
  s.zipf_exponent = field<double>(j.at("zipf_exponent"), "synthetic.zipf_exponent");
  s.transfer_fraction = field<double>(j.at("transfer_fraction"), "synthetic.transfer_fraction");
  s.non_rental_fraction =
      field<double>(j.at("non_rental_fraction"), "synthetic.non_rental_fraction");
  s.single_unit_fraction =
      field<double>(j.at("single_unit_fraction"), "synthetic.single_unit_fraction");
  s.missing_rate = field<double>(j.at("missing_rate"), "synthetic.missing_rate");
  s.extra_filing_rate = field<double>(j.at("extra_filing_rate"), "synthetic.extra_filing_rate");
  return s;
}

json cost_to_json(const geo::CostParams& c) {
  json bands = json::array();
  for (const auto& b : c.speed_table) {
    json upto;
    if (std::isfinite(b.upto_miles)) upto = b.upto_miles;  // null marks the unbounded band
    bands.push_back(json{{"upto_miles", upto}, {"mph", b.mph}});
  }
  return json{{"knock_hours_per_unit", c.knock_hours_per_unit}, {"speed_table", bands}};
}

geo::CostParams cost_from_json(const json& j) {
  geo::CostParams c;
  c.knock_hours_per_unit =
      field<double>(j.at("knock_hours_per_unit"), "cost.knock_hours_per_unit");
  const json& bands = j.at("speed_table");
  if (!bands.is_array() || bands.empty()) bad("cost.speed_table: expected a non-empty array");
  c.speed_table.clear();
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const json& b = bands[i];
    const std::string path = "cost.speed_table[" + std::to_string(i) + "]";
    if (!b.is_object()) bad(path + ": expected an object");
    require_keys(b, {"upto_miles", "mph"}, path);
    geo::SpeedBand band{};
    const json& upto = b.at("upto_miles");
    band.upto_miles = upto.is_null() ? std::numeric_limits<double>::infinity()
                                     : field<double>(upto, path + ".upto_miles");
    band.mph = field<double>(b.at("mph"), path + ".mph");
    c.speed_table.push_back(band);
  }
  return c;
}

json policies_to_json(const std::vector<policy::PolicySpec>& specs) {
  json arr = json::array();
  for (const auto& s : specs) {
    arr.push_back(json{{"policy", policy::policy_kind_str(s.kind)},
                       {"control", policy::control_str(s.control)}});
  }
  return arr;
}

std::vector<policy::PolicySpec> policies_from_json(const json& j) {
  if (!j.is_array()) bad("policies: expected an array");
  std::vector<policy::PolicySpec> specs;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    const std::string path = "policies[" + std::to_string(i) + "]";
    if (!e.is_object()) bad(path + ": expected an object");
    require_keys(e, {"policy", "control"}, path);
    auto kind = policy::parse_policy_kind(field<std::string>(e.at("policy"), path + ".policy"));
    if (!kind) bad(path + ".policy: unknown policy name");
    auto control =
        policy::parse_control(field<std::string>(e.at("control"), path + ".control"));
    if (!control) bad(path + ".control: expected \"time\" or \"units\"");
    specs.push_back({*kind, *control});
  }
  return specs;
}

}  // namespace

std::string RunConfig::resolved_data_dir() const {
  return data_dir.empty() ? out_dir + "/data" : data_dir;
}

dates::WindowPair RunConfig::train_windows() const {
  return {dates::MonthWindow{train_label.start.plus(-feature_months), train_label.start.plus(-1)},
          train_label};
}

dates::WindowPair RunConfig::test_windows() const {
  return {dates::MonthWindow{test_label.start.plus(-feature_months), test_label.start.plus(-1)},
          test_label};
}

dates::MonthWindow RunConfig::prior_window() const {
  return {test_label.start.plus(-prior_months), test_label.start.plus(-1)};
}

void RunConfig::validate() const {
  if (out_dir.empty()) bad("out_dir must not be empty");
  if (feature_months < 1) bad("windows.feature_months must be at least 1");
  if (prior_months < 1) bad("windows.prior_months must be at least 1");
  train_label.validate();
  test_label.validate();
  train_windows().validate();
  test_windows().validate();
  synthetic.validate();
  params.validate();
  if (use_grid) {
    if (grid.max_depth.empty() || grid.learning_rate.empty() || grid.n_estimators.empty() ||
        grid.scale_pos_weight.empty() || grid.gamma.empty()) {
      bad("model.grid lists must be non-empty when model.use_grid is set");
    }
  }
  if (cv_folds < 2) bad("model.cv_folds must be at least 2");
  cost.validate();
  if (!(risk_bins[0] > 0.0 && risk_bins[0] < risk_bins[1] && risk_bins[1] < risk_bins[2] &&
        risk_bins[2] < 1.0)) {
    bad("risk_bins must be strictly increasing within (0, 1)");
  }
  if (unit_buckets.empty()) bad("unit_buckets must not be empty");
  for (std::size_t i = 0; i < unit_buckets.size(); ++i) {
    if (unit_buckets[i] < 1) bad("unit_buckets entries must be at least 1");
    if (i > 0 && unit_buckets[i] <= unit_buckets[i - 1]) {
      bad("unit_buckets must be strictly increasing");
    }
  }
  if (policies.empty()) bad("policies must not be empty");
  for (const auto& p : policies) {
    if ((p.kind == policy::PolicyKind::rs_eviction_only ||
         p.kind == policy::PolicyKind::rs_eviction_neighborhood) &&
        p.control != policy::Control::time) {
      bad(policy::policy_kind_str(p.kind) + " is time-controlled by definition");
    }
  }
  if (route.starts < 1) bad("routing.starts must be at least 1");
  if (route.max_2opt_sweeps < 0) bad("routing.max_2opt_sweeps must not be negative");
}

nlohmann::json to_json(const RunConfig& cfg) {
  return json{
      {"seed", cfg.seed},
      {"out_dir", cfg.out_dir},
      {"data_dir", cfg.data_dir},
      {"feature_set", data::feature_set_str(cfg.feature_set)},
      {"synthetic", synthetic_to_json(cfg.synthetic)},
      {"windows",
       json{{"feature_months", cfg.feature_months},
            {"prior_months", cfg.prior_months},
            {"train_label", cfg.train_label.str()},
            {"test_label", cfg.test_label.str()}}},
      {"model",
       json{{"max_depth", cfg.params.max_depth},
            {"learning_rate", cfg.params.learning_rate},
            {"n_estimators", cfg.params.n_estimators},
            {"scale_pos_weight", cfg.params.scale_pos_weight},
            {"gamma", cfg.params.gamma},
            {"l2_leaf_penalty", cfg.params.l2_leaf_penalty},
            {"use_grid", cfg.use_grid},
            {"grid",
             json{{"max_depth", cfg.grid.max_depth},
                  {"learning_rate", cfg.grid.learning_rate},
                  {"n_estimators", cfg.grid.n_estimators},
                  {"scale_pos_weight", cfg.grid.scale_pos_weight},
                  {"gamma", cfg.grid.gamma}}},
            {"cv_folds", cfg.cv_folds}}},
      {"cost", cost_to_json(cfg.cost)},
      {"risk_bins", cfg.risk_bins},
      {"unit_buckets", cfg.unit_buckets},
      {"policies", policies_to_json(cfg.policies)},
      {"routing",
       json{{"max_2opt_sweeps", cfg.route.max_2opt_sweeps},
            {"starts", cfg.route.starts},
            {"topk_search",
             cfg.topk_search == routing::TopkSearch::incremental ? "incremental" : "doubling"}}},
  };
}

nlohmann::json default_json() { return to_json(RunConfig{}); }

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  cfg.seed = field<std::uint64_t>(j.at("seed"), "seed");
  cfg.out_dir = field<std::string>(j.at("out_dir"), "out_dir");
  cfg.data_dir = field<std::string>(j.at("data_dir"), "data_dir");
  auto set = data::parse_feature_set(field<std::string>(j.at("feature_set"), "feature_set"));
  if (!set) bad("feature_set: expected \"E\", \"EN\", or \"ENO\"");
  cfg.feature_set = *set;
  cfg.synthetic = synthetic_from_json(j.at("synthetic"));
  const json& w = j.at("windows");
  cfg.feature_months = field<int>(w.at("feature_months"), "windows.feature_months");
  cfg.prior_months = field<int>(w.at("prior_months"), "windows.prior_months");
  cfg.train_label = window_field(w.at("train_label"), "windows.train_label");
  cfg.test_label = window_field(w.at("test_label"), "windows.test_label");
  const json& m = j.at("model");
  cfg.params.max_depth = field<int>(m.at("max_depth"), "model.max_depth");
  cfg.params.learning_rate = field<double>(m.at("learning_rate"), "model.learning_rate");
  cfg.params.n_estimators = field<int>(m.at("n_estimators"), "model.n_estimators");
  cfg.params.scale_pos_weight =
      field<double>(m.at("scale_pos_weight"), "model.scale_pos_weight");
  cfg.params.gamma = field<double>(m.at("gamma"), "model.gamma");
  cfg.params.l2_leaf_penalty = field<double>(m.at("l2_leaf_penalty"), "model.l2_leaf_penalty");
  cfg.use_grid = field<bool>(m.at("use_grid"), "model.use_grid");
  const json& g = m.at("grid");
  cfg.grid.max_depth = field<std::vector<int>>(g.at("max_depth"), "model.grid.max_depth");
  cfg.grid.learning_rate =
      field<std::vector<double>>(g.at("learning_rate"), "model.grid.learning_rate");
  cfg.grid.n_estimators =
      field<std::vector<int>>(g.at("n_estimators"), "model.grid.n_estimators");
  cfg.grid.scale_pos_weight =
      field<std::vector<double>>(g.at("scale_pos_weight"), "model.grid.scale_pos_weight");
  cfg.grid.gamma = field<std::vector<double>>(g.at("gamma"), "model.grid.gamma");
  cfg.cv_folds = field<int>(m.at("cv_folds"), "model.cv_folds");
  cfg.cost = cost_from_json(j.at("cost"));
  cfg.risk_bins = field<std::array<double, 3>>(j.at("risk_bins"), "risk_bins");
  cfg.unit_buckets = field<std::vector<int>>(j.at("unit_buckets"), "unit_buckets");
  cfg.policies = policies_from_json(j.at("policies"));
  const json& r = j.at("routing");
  cfg.route.max_2opt_sweeps = field<int>(r.at("max_2opt_sweeps"), "routing.max_2opt_sweeps");
  cfg.route.starts = field<int>(r.at("starts"), "routing.starts");
  auto search = field<std::string>(r.at("topk_search"), "routing.topk_search");
  if (search == "incremental") {
    cfg.topk_search = routing::TopkSearch::incremental;
  } else if (search == "doubling") {
    cfg.topk_search = routing::TopkSearch::doubling;
  } else {
    bad("routing.topk_search: expected \"incremental\" or \"doubling\"");
  }
  return cfg;
}

namespace {

void merge_into(json& base, const json& overlay, const std::string& path) {
  if (!overlay.is_object()) {
    bad(path.empty() ? "document must be a JSON object" : path + ": expected an object");
  }
  for (const auto& [key, value] : overlay.items()) {
    const std::string next = path.empty() ? key : path + "." + key;
    auto it = base.find(key);
    if (it == base.end()) bad("unknown key " + next);
    if (it->is_object()) {
      merge_into(*it, value, next);
    } else if (value.is_object()) {
      bad(next + ": unexpected object");
    } else {
      *it = value;
    }
  }
}

}  // namespace

void merge_config(nlohmann::json& base, const nlohmann::json& overlay) {
  merge_into(base, overlay, "");
}

void apply_override(nlohmann::json& base, const std::string& dotted_key,
                    const std::string& value) {
  if (dotted_key.empty()) bad("override key must not be empty");
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t dot = dotted_key.find('.', pos);
    parts.push_back(dotted_key.substr(pos, dot == std::string::npos ? dot : dot - pos));
    if (parts.back().empty()) bad("override key has an empty segment: " + dotted_key);
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  json* cur = &base;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!cur->is_object() || !cur->contains(parts[i])) bad("unknown key " + dotted_key);
    cur = &(*cur)[parts[i]];
  }
  if (!cur->is_object() || !cur->contains(parts.back())) bad("unknown key " + dotted_key);
  json& slot = (*cur)[parts.back()];
  if (slot.is_string()) {
    slot = value;  // string fields take the raw text; "out" stays "out"
    return;
  }
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value;
  }
  if (slot.is_object()) {
    merge_into(slot, parsed, dotted_key);
  } else {
    slot = parsed;
  }
}

RunConfig load_config(const std::optional<std::string>& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides) {
  json doc = default_json();
  if (path) {
    std::ifstream in(*path);
    if (!in) bad("cannot open config file " + *path);
    json file;
    try {
      file = json::parse(in);
    } catch (const json::exception& e) {
      bad("parse error in " + *path + ": " + e.what());
    }
    merge_config(doc, file);
  }
  for (const auto& [key, value] : overrides) apply_override(doc, key, value);
  RunConfig cfg = config_from_json(doc);
  cfg.validate();
  return cfg;
}

std::string render_config(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

std::string config_hash(const RunConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(text::fnv1a64(render_config(cfg))));
  return buf;
}

}  // namespace evrisk::config
