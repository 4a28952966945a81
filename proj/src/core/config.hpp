#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "core/dates.hpp"
#include "core/gbdt.hpp"
#include "core/geo.hpp"
#include "core/policies.hpp"
#include "core/routing.hpp"
#include "core/synthetic.hpp"
#include "core/types.hpp"

namespace evrisk::config {

inline constexpr const char* kVersion = "1.0.0";

// Hyperparameter lists the cross-validated grid search sweeps when
// model.use_grid is on; the cartesian product is searched.
struct GridSpec {
  std::vector<int> max_depth{2, 3};
  std::vector<double> learning_rate{0.05, 0.1};
  std::vector<int> n_estimators{50, 100};
  std::vector<double> scale_pos_weight{1.0, 5.0};
  std::vector<double> gamma{0.0, 0.05};
};

// Everything a run needs, with a working default for every field. Loaded
// from JSON (unknown keys rejected), overridable via dotted --set paths, and
// echoed fully resolved into the output directory.
struct RunConfig {
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::string data_dir;  // empty means "<out_dir>/data"
  data::FeatureSet feature_set = data::FeatureSet::ENO;  // set used by risk-histogram

  synth::SyntheticConfig synthetic;

  int feature_months = 7;
  int prior_months = 3;  // ranking window for count-based policies
  dates::MonthWindow train_label{dates::Month{2023, 8}, dates::Month{2023, 10}};
  dates::MonthWindow test_label{dates::Month{2024, 3}, dates::Month{2024, 5}};

  model::Hyperparams params;
  bool use_grid = false;
  GridSpec grid;
  int cv_folds = 5;

  geo::CostParams cost;
  std::array<double, 3> risk_bins{0.05, 0.2, 0.8};
  std::vector<int> unit_buckets{2, 5, 10, 25, 50, 100};  // lower bounds
  std::vector<policy::PolicySpec> policies{
      {policy::PolicyKind::neo_t_o, policy::Control::time},
      {policy::PolicyKind::rs_eviction_only, policy::Control::time},
      {policy::PolicyKind::rs_eviction_neighborhood, policy::Control::time},
      {policy::PolicyKind::prior_eviction_count, policy::Control::time},
      {policy::PolicyKind::prior_eviction_count, policy::Control::units},
      {policy::PolicyKind::neighborhood_canvass, policy::Control::time},
      {policy::PolicyKind::neighborhood_canvass, policy::Control::units},
  };

  routing::RouteOptions route;
  routing::TopkSearch topk_search = routing::TopkSearch::doubling;

  std::string resolved_data_dir() const;
  // Feature window: the feature_months immediately preceding the label window.
  dates::WindowPair train_windows() const;
  dates::WindowPair test_windows() const;
  // The prior_months immediately preceding the test label window.
  dates::MonthWindow prior_window() const;

  void validate() const;  // throws std::invalid_argument
};

// Default config as JSON; doubles as the schema for key validation.
nlohmann::json default_json();

nlohmann::json to_json(const RunConfig& cfg);

// Strict: the document must carry every key (merge over default_json first).
RunConfig config_from_json(const nlohmann::json& j);

// Overlay file values onto defaults, rejecting keys the schema lacks.
void merge_config(nlohmann::json& base, const nlohmann::json& overlay);

// Apply one dotted-path override ("synthetic.property_count=500"). The path
// must exist in the schema; the value is parsed as JSON, falling back to a
// string (string-typed fields always take the raw string).
void apply_override(nlohmann::json& base, const std::string& dotted_key,
                    const std::string& value);

// Load path (or defaults when absent), apply overrides in order, validate.
RunConfig load_config(const std::optional<std::string>& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides = {});

// Canonical pretty-printed echo; keys sorted, no timestamps.
std::string render_config(const RunConfig& cfg);

// FNV-1a 64 of the canonical rendering, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace evrisk::config
