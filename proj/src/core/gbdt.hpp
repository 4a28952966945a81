#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/data_model.hpp"

namespace evrisk::model {

struct Hyperparams {
  int max_depth = 3;
  double learning_rate = 0.05;
  int n_estimators = 100;
  double scale_pos_weight = 5.0;  // sample weight applied to positive rows
  double gamma = 0.05;            // minimum split gain kept
  double l2_leaf_penalty = 1.0;

  void validate() const;  // throws std::invalid_argument
};

// One node of a regression tree. Leaves have feature < 0 and carry `value`;
// interior nodes route row[feature] <= threshold to `left`, else `right`,
// and NaN to the side that held more training hessian mass.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  bool default_left = true;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;
  double leaf_value(std::span<const double> row) const;
};

// Gradient-boosted trees for binary outcomes: logistic loss, second-order
// (Newton) splits and leaf weights, exact greedy search over midpoint
// thresholds. The margin is base_score plus learning_rate times the sum of
// leaf values; predict() squashes it through the sigmoid, so a model with no
// trees scores everything 0.5.
struct GbdtModel {
  Hyperparams params;
  double base_score = 0.0;
  std::vector<std::string> columns;
  std::vector<Tree> trees;

  double margin(std::span<const double> row) const;
  double predict_row(std::span<const double> row) const;
  // Verifies the dataset columns match the training columns, then scores
  // every row. Throws std::invalid_argument on a column mismatch.
  std::vector<double> predict(const data::LabeledDataset& ds) const;
};

GbdtModel train_gbdt(const data::LabeledDataset& ds, const Hyperparams& hp);

// Versioned plain-text serialization. Doubles round-trip exactly; the file
// carries a fingerprint of the column list and load_model re-derives and
// checks it, throwing std::invalid_argument on any mismatch or malformation.
void save_model(const GbdtModel& model, const std::string& path);
GbdtModel load_model(const std::string& path);

struct GridCandidate {
  Hyperparams params;
  double mean_precision = 0.0;
};

struct GridSearchResult {
  Hyperparams best;
  double best_precision = 0.0;
  std::vector<GridCandidate> candidates;  // in the order evaluated
};

// Stratified 5-fold cross-validation over the candidate list, scored by mean
// validation precision at the 0.5 threshold (a fold with no predicted
// positives contributes zero precision). Equal scores prefer fewer trees,
// then shallower depth. Fold assignment is deterministic in `seed`.
GridSearchResult grid_search_cv(const data::LabeledDataset& ds,
                                std::span<const Hyperparams> grid, std::uint64_t seed,
                                int folds = 5);

// Score bands used for targeting: minimal [0, .05], low (.05, .2],
// medium (.2, .8], high (.8, 1]. Out-of-range scores throw.
enum class RiskBin { minimal, low, medium, high };

RiskBin bin_risk(double score);
std::string risk_bin_str(RiskBin bin);

// property_id,score pairs for handing scores across tool boundaries.
void write_scores(const std::string& path, std::span<const std::string> ids,
                  std::span<const double> scores);

struct ImportedScores {
  std::vector<double> scores;  // aligned with the ids passed in
  data::LoadReport report;     // unknown-property rows land here
};

// Reads a score file and aligns it to `ids`. Scores must lie in [0,1].
// Rows naming unknown properties are reported and skipped; a duplicate or a
// missing score for a known id throws std::invalid_argument naming the id.
ImportedScores import_scores(const std::string& path, std::span<const std::string> ids);

}  // namespace evrisk::model
