#include "core/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "core/csv.hpp"
#include "core/rng.hpp"
#include "core/text.hpp"

namespace evrisk::model {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::string join_columns(std::span<const std::string> columns) {
  std::string joined;
  for (const auto& c : columns) {
    if (!joined.empty()) joined += ',';
    joined += c;
  }
  return joined;
}

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = -1.0;
};

// Trains one tree against the current gradients/hessians.
class TreeBuilder {
 public:
  TreeBuilder(const data::LabeledDataset& ds, const Hyperparams& hp,
              const std::vector<double>& grad, const std::vector<double>& hess)
      : ds_(ds), hp_(hp), grad_(grad), hess_(hess), width_(ds.columns.size()) {}

  Tree build() {
    Tree tree;
    std::vector<std::size_t> rows(ds_.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    grow(tree, rows, 0);
    return tree;
  }

 private:
  double cell(std::size_t row, std::size_t col) const {
    return ds_.data[row * width_ + col];
  }

  // Exact greedy scan: sort the node's rows per feature and try the midpoint
  // between every pair of distinct adjacent values. NaN cells sit out of the
  // scan and follow the heavier-hessian child afterwards.
  SplitChoice best_split(const std::vector<std::size_t>& rows) const {
    SplitChoice best;
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(rows.size());
    for (std::size_t f = 0; f < width_; ++f) {
      order.clear();
      double g_total = 0.0, h_total = 0.0;
      for (std::size_t r : rows) {
        const double v = cell(r, f);
        if (std::isnan(v)) continue;
        order.emplace_back(v, r);
        g_total += grad_[r];
        h_total += hess_[r];
      }
      if (order.size() < 2) continue;
      std::sort(order.begin(), order.end());
      const double parent_score = g_total * g_total / (h_total + hp_.l2_leaf_penalty);
      double gl = 0.0, hl = 0.0;
      for (std::size_t j = 0; j + 1 < order.size(); ++j) {
        gl += grad_[order[j].second];
        hl += hess_[order[j].second];
        if (order[j].first == order[j + 1].first) continue;
        const double gr = g_total - gl;
        const double hr = h_total - hl;
        const double gain = 0.5 * (gl * gl / (hl + hp_.l2_leaf_penalty) +
                                   gr * gr / (hr + hp_.l2_leaf_penalty) - parent_score);
        if (gain > best.gain) {
          double thr = (order[j].first + order[j + 1].first) / 2.0;
          if (!(thr < order[j + 1].first)) thr = order[j].first;  // keep the prefix exact
          best = {static_cast<int>(f), thr, gain};
        }
      }
    }
    return best;
  }

  int grow(Tree& tree, const std::vector<std::size_t>& rows, int depth) {
    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    double g = 0.0, h = 0.0;
    for (std::size_t r : rows) {
      g += grad_[r];
      h += hess_[r];
    }
    const double leaf = -g / (h + hp_.l2_leaf_penalty);

    SplitChoice split;
    if (depth < hp_.max_depth && rows.size() >= 2) split = best_split(rows);
    if (split.feature < 0 || !(split.gain > hp_.gamma)) {
      tree.nodes[static_cast<std::size_t>(index)].value = leaf;
      return index;
    }

    std::vector<std::size_t> left_rows, right_rows, missing;
    double hl = 0.0, hr = 0.0;
    for (std::size_t r : rows) {
      const double v = cell(r, static_cast<std::size_t>(split.feature));
      if (std::isnan(v)) {
        missing.push_back(r);
      } else if (v <= split.threshold) {
        left_rows.push_back(r);
        hl += hess_[r];
      } else {
        right_rows.push_back(r);
        hr += hess_[r];
      }
    }
    const bool default_left = hl >= hr;
    auto& sink = default_left ? left_rows : right_rows;
    sink.insert(sink.end(), missing.begin(), missing.end());

    const int left = grow(tree, left_rows, depth + 1);
    const int right = grow(tree, right_rows, depth + 1);
    auto& node = tree.nodes[static_cast<std::size_t>(index)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
    node.default_left = default_left;
    return index;
  }

  const data::LabeledDataset& ds_;
  const Hyperparams& hp_;
  const std::vector<double>& grad_;
  const std::vector<double>& hess_;
  std::size_t width_;
};

data::LabeledDataset subset(const data::LabeledDataset& ds,
                            const std::vector<std::size_t>& rows) {
  data::LabeledDataset out;
  out.feature_set = ds.feature_set;
  out.windows = ds.windows;
  out.columns = ds.columns;
  const std::size_t width = ds.columns.size();
  out.data.reserve(rows.size() * width);
  for (std::size_t r : rows) {
    out.property_ids.push_back(ds.property_ids[r]);
    out.labels.push_back(ds.labels[r]);
    out.data.insert(out.data.end(), ds.data.begin() + static_cast<std::ptrdiff_t>(r * width),
                    ds.data.begin() + static_cast<std::ptrdiff_t>((r + 1) * width));
  }
  return out;
}

}  // namespace

void Hyperparams::validate() const {
  if (max_depth < 1) throw std::invalid_argument("Hyperparams: max_depth must be at least 1");
  if (!(learning_rate > 0.0) || learning_rate > 1.0) {
    throw std::invalid_argument("Hyperparams: learning_rate must be in (0, 1]");
  }
  if (n_estimators < 1) {
    throw std::invalid_argument("Hyperparams: n_estimators must be at least 1");
  }
  if (scale_pos_weight < 1.0) {
    throw std::invalid_argument("Hyperparams: scale_pos_weight must be at least 1");
  }
  if (gamma < 0.0) throw std::invalid_argument("Hyperparams: gamma must be nonnegative");
  if (!(l2_leaf_penalty >= 0.0)) {
    throw std::invalid_argument("Hyperparams: l2_leaf_penalty must be nonnegative");
  }
}

double Tree::leaf_value(std::span<const double> row) const {
  std::size_t at = 0;
  while (!nodes[at].is_leaf()) {
    const auto& node = nodes[at];
    const double v = row[static_cast<std::size_t>(node.feature)];
    const bool go_left = std::isnan(v) ? node.default_left : v <= node.threshold;
    at = static_cast<std::size_t>(go_left ? node.left : node.right);
  }
  return nodes[at].value;
}

double GbdtModel::margin(std::span<const double> row) const {
  double sum = base_score;
  for (const auto& tree : trees) sum += params.learning_rate * tree.leaf_value(row);
  return sum;
}

double GbdtModel::predict_row(std::span<const double> row) const {
  return sigmoid(margin(row));
}

std::vector<double> GbdtModel::predict(const data::LabeledDataset& ds) const {
  if (ds.columns != columns) {
    throw std::invalid_argument(
        "GbdtModel::predict: dataset columns do not match the training fingerprint");
  }
  std::vector<double> out;
  out.reserve(ds.rows());
  const std::size_t width = columns.size();
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    out.push_back(predict_row({ds.data.data() + i * width, width}));
  }
  return out;
}

GbdtModel train_gbdt(const data::LabeledDataset& ds, const Hyperparams& hp) {
  hp.validate();
  if (ds.rows() == 0) throw std::invalid_argument("train_gbdt: empty dataset");
  if (ds.columns.empty()) throw std::invalid_argument("train_gbdt: dataset has no columns");

  GbdtModel model;
  model.params = hp;
  model.columns = ds.columns;

  const std::size_t n = ds.rows();
  std::vector<double> weight(n), margin(n, model.base_score), grad(n), hess(n);
  for (std::size_t i = 0; i < n; ++i) {
    weight[i] = ds.labels[i] == 1 ? hp.scale_pos_weight : 1.0;
  }

  const std::size_t width = ds.columns.size();
  for (int t = 0; t < hp.n_estimators; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      grad[i] = weight[i] * (p - ds.labels[i]);
      hess[i] = weight[i] * p * (1.0 - p);
    }
    Tree tree = TreeBuilder(ds, hp, grad, hess).build();
    for (std::size_t i = 0; i < n; ++i) {
      margin[i] += hp.learning_rate * tree.leaf_value({ds.data.data() + i * width, width});
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

void save_model(const GbdtModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_model: cannot open " + path);
  out << "gbdt 1\n";
  out << "base_score " << text::format_double(model.base_score) << "\n";
  out << "max_depth " << model.params.max_depth << "\n";
  out << "learning_rate " << text::format_double(model.params.learning_rate) << "\n";
  out << "n_estimators " << model.params.n_estimators << "\n";
  out << "scale_pos_weight " << text::format_double(model.params.scale_pos_weight) << "\n";
  out << "gamma " << text::format_double(model.params.gamma) << "\n";
  out << "l2_leaf_penalty " << text::format_double(model.params.l2_leaf_penalty) << "\n";
  out << "columns " << model.columns.size() << " " << std::hex
      << text::fnv1a64(join_columns(model.columns)) << std::dec << "\n";
  for (const auto& c : model.columns) out << c << "\n";
  out << "trees " << model.trees.size() << "\n";
  for (const auto& tree : model.trees) {
    out << "tree " << tree.nodes.size() << "\n";
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) {
        out << "leaf " << text::format_double(node.value) << "\n";
      } else {
        out << "split " << node.feature << " " << text::format_double(node.threshold) << " "
            << node.left << " " << node.right << " " << (node.default_left ? "L" : "R") << "\n";
      }
    }
  }
  out << "end\n";
  if (!out) throw std::runtime_error("save_model: write failed for " + path);
}

namespace {

[[noreturn]] void bad_model(const std::string& why) {
  throw std::invalid_argument("load_model: " + why);
}

std::string next_line(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) bad_model("truncated file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

GbdtModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("load_model: cannot open " + path);

  if (next_line(in) != "gbdt 1") bad_model("unsupported format or version");
  GbdtModel model;

  auto field = [&](const std::string& key) {
    std::istringstream line(next_line(in));
    std::string name, value;
    line >> name >> value;
    if (name != key || value.empty()) bad_model("expected field " + key);
    return value;
  };
  auto field_double = [&](const std::string& key) {
    auto v = csv::to_double(field(key));
    if (!v) bad_model("bad number for " + key);
    return *v;
  };
  auto field_int = [&](const std::string& key) {
    auto v = csv::to_int(field(key));
    if (!v) bad_model("bad integer for " + key);
    return *v;
  };

  model.base_score = field_double("base_score");
  model.params.max_depth = field_int("max_depth");
  model.params.learning_rate = field_double("learning_rate");
  model.params.n_estimators = field_int("n_estimators");
  model.params.scale_pos_weight = field_double("scale_pos_weight");
  model.params.gamma = field_double("gamma");
  model.params.l2_leaf_penalty = field_double("l2_leaf_penalty");

  std::istringstream cols(next_line(in));
  std::string key;
  std::size_t count = 0;
  std::string fingerprint;
  cols >> key >> count >> fingerprint;
  if (key != "columns" || count == 0) bad_model("bad columns header");
  for (std::size_t i = 0; i < count; ++i) {
    std::string name = next_line(in);
    if (name.empty()) bad_model("empty column name");
    model.columns.push_back(std::move(name));
  }
  std::ostringstream expect;
  expect << std::hex << text::fnv1a64(join_columns(model.columns));
  if (fingerprint != expect.str()) bad_model("column fingerprint mismatch");

  std::istringstream trees_line(next_line(in));
  std::size_t tree_count = 0;
  trees_line >> key >> tree_count;
  if (key != "trees") bad_model("bad trees header");
  for (std::size_t t = 0; t < tree_count; ++t) {
    std::istringstream tree_line(next_line(in));
    std::size_t node_count = 0;
    tree_line >> key >> node_count;
    if (key != "tree" || node_count == 0) bad_model("bad tree header");
    Tree tree;
    for (std::size_t nidx = 0; nidx < node_count; ++nidx) {
      std::istringstream node_line(next_line(in));
      std::string kind;
      node_line >> kind;
      TreeNode node;
      if (kind == "leaf") {
        std::string value;
        node_line >> value;
        auto v = csv::to_double(value);
        if (!v) bad_model("bad leaf value");
        node.value = *v;
      } else if (kind == "split") {
        std::string threshold, side;
        node_line >> node.feature >> threshold >> node.left >> node.right >> side;
        auto thr = csv::to_double(threshold);
        if (!thr || node_line.fail()) bad_model("bad split node");
        node.threshold = *thr;
        if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= model.columns.size()) {
          bad_model("split feature out of range");
        }
        const auto limit = static_cast<int>(node_count);
        const auto self = static_cast<int>(nidx);
        if (node.left <= self || node.right <= self || node.left >= limit ||
            node.right >= limit) {
          bad_model("split child out of range");
        }
        if (side == "L") {
          node.default_left = true;
        } else if (side == "R") {
          node.default_left = false;
        } else {
          bad_model("bad default side");
        }
      } else {
        bad_model("unknown node kind");
      }
      tree.nodes.push_back(node);
    }
    model.trees.push_back(std::move(tree));
  }
  if (next_line(in) != "end") bad_model("missing end marker");
  return model;
}

GridSearchResult grid_search_cv(const data::LabeledDataset& ds,
                                std::span<const Hyperparams> grid, std::uint64_t seed,
                                int folds) {
  if (grid.empty()) throw std::invalid_argument("grid_search_cv: empty grid");
  if (folds < 2) throw std::invalid_argument("grid_search_cv: folds must be at least 2");
  if (ds.rows() < static_cast<std::size_t>(folds)) {
    throw std::invalid_argument("grid_search_cv: fewer rows than folds");
  }
  for (const auto& hp : grid) hp.validate();

  // Stratified assignment: shuffle each class, deal round-robin, so every
  // fold carries both classes whenever the class counts allow it.
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    (ds.labels[i] == 1 ? pos : neg).push_back(i);
  }
  Rng rng(seed);
  rng_shuffle(pos, rng);
  rng_shuffle(neg, rng);
  std::vector<int> fold_of(ds.rows(), 0);
  int next = 0;
  for (std::size_t i : pos) fold_of[i] = next++ % folds;
  next = 0;
  for (std::size_t i : neg) fold_of[i] = next++ % folds;

  const std::size_t width = ds.columns.size();
  GridSearchResult result;
  bool have_best = false;
  for (const auto& hp : grid) {
    double total = 0.0;
    for (int f = 0; f < folds; ++f) {
      std::vector<std::size_t> train_rows, val_rows;
      for (std::size_t i = 0; i < ds.rows(); ++i) {
        (fold_of[i] == f ? val_rows : train_rows).push_back(i);
      }
      const GbdtModel model = train_gbdt(subset(ds, train_rows), hp);
      std::size_t tp = 0, fp = 0;
      for (std::size_t i : val_rows) {
        const double p = model.predict_row({ds.data.data() + i * width, width});
        if (p > 0.5) {
          (ds.labels[i] == 1 ? tp : fp) += 1;
        }
      }
      if (tp + fp > 0) total += static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    const double mean = total / folds;
    result.candidates.push_back({hp, mean});

    const bool better =
        !have_best || mean > result.best_precision ||
        (mean == result.best_precision &&
         (hp.n_estimators < result.best.n_estimators ||
          (hp.n_estimators == result.best.n_estimators && hp.max_depth < result.best.max_depth)));
    if (better) {
      result.best = hp;
      result.best_precision = mean;
      have_best = true;
    }
  }
  return result;
}

RiskBin bin_risk(double score) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw std::invalid_argument("bin_risk: score must be in [0, 1]");
  }
  if (score <= 0.05) return RiskBin::minimal;
  if (score <= 0.2) return RiskBin::low;
  if (score <= 0.8) return RiskBin::medium;
  return RiskBin::high;
}

std::string risk_bin_str(RiskBin bin) {
  switch (bin) {
    case RiskBin::minimal: return "minimal";
    case RiskBin::low: return "low";
    case RiskBin::medium: return "medium";
    case RiskBin::high: return "high";
  }
  throw std::logic_error("risk_bin_str: bad enum");
}

void write_scores(const std::string& path, std::span<const std::string> ids,
                  std::span<const double> scores) {
  if (ids.size() != scores.size()) {
    throw std::invalid_argument("write_scores: ids and scores differ in length");
  }
  csv::Table t;
  t.header = {"property_id", "score"};
  for (std::size_t i = 0; i < ids.size(); ++i) {
    t.rows.push_back({ids[i], text::format_double(scores[i])});
  }
  csv::write_file(path, t);
}

ImportedScores import_scores(const std::string& path, std::span<const std::string> ids) {
  const csv::Table t = csv::read_file(path);
  const int c_id = t.require_column("property_id", path);
  const int c_score = t.require_column("score", path);

  std::unordered_map<std::string, std::size_t> index;
  index.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], i);

  ImportedScores out;
  out.scores.assign(ids.size(), -1.0);
  std::vector<bool> seen(ids.size(), false);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& fields = t.rows[r];
    ++out.report.rows_read;
    const std::string& id = fields[static_cast<std::size_t>(c_id)];
    const auto it = index.find(id);
    if (it == index.end()) {
      out.report.issues.push_back({r + 2, "property_id", "unknown property"});
      ++out.report.rows_rejected;
      continue;
    }
    if (seen[it->second]) {
      throw std::invalid_argument("import_scores: duplicate score for property " + id);
    }
    const auto score = csv::to_double(fields[static_cast<std::size_t>(c_score)]);
    if (!score || !(*score >= 0.0 && *score <= 1.0)) {
      out.report.issues.push_back({r + 2, "score", "must be a number in [0,1]"});
      ++out.report.rows_rejected;
      continue;
    }
    seen[it->second] = true;
    out.scores[it->second] = *score;
    ++out.report.rows_loaded;
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!seen[i]) {
      throw std::invalid_argument("import_scores: no score for property " + ids[i]);
    }
  }
  return out;
}

}  // namespace evrisk::model
