#include "core/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "core/rng.hpp"

namespace evrisk::metrics {

namespace {

struct ClassSplit {
  std::vector<double> pos;
  std::vector<double> neg;
};

ClassSplit split_by_label(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("scores and labels must have equal length");
  }
  ClassSplit out;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw std::invalid_argument("labels must be 0 or 1");
    }
    (labels[i] == 1 ? out.pos : out.neg).push_back(scores[i]);
  }
  return out;
}

// Sorted (score desc) index order with cumulative tp/fp per distinct threshold.
struct SweepPoint {
  double threshold;
  long tp;
  long fp;
};

std::vector<SweepPoint> threshold_sweep(std::span<const double> scores,
                                        std::span<const int> labels) {
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  std::vector<SweepPoint> points;
  long tp = 0, fp = 0;
  size_t i = 0;
  while (i < order.size()) {
    double t = scores[order[i]];
    while (i < order.size() && scores[order[i]] == t) {
      if (labels[order[i]] == 1) {
        ++tp;
      } else {
        ++fp;
      }
      ++i;
    }
    points.push_back({t, tp, fp});
  }
  return points;
}

}  // namespace

std::vector<double> midranks(std::span<const double> values) {
  size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based average rank
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  auto split = split_by_label(scores, labels);
  size_t m = split.pos.size(), n = split.neg.size();
  if (m == 0 || n == 0) throw std::invalid_argument("roc_auc requires both classes");
  auto ranks = midranks(scores);
  double pos_rank_sum = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] == 1) pos_rank_sum += ranks[i];
  }
  double m_d = static_cast<double>(m);
  double n_d = static_cast<double>(n);
  return (pos_rank_sum - m_d * (m_d + 1.0) / 2.0) / (m_d * n_d);
}

std::vector<CurvePoint> roc_curve(std::span<const double> scores, std::span<const int> labels) {
  auto split = split_by_label(scores, labels);
  double p = static_cast<double>(split.pos.size());
  double q = static_cast<double>(split.neg.size());
  if (p == 0 || q == 0) throw std::invalid_argument("roc_curve requires both classes");
  std::vector<CurvePoint> curve;
  curve.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  for (const auto& pt : threshold_sweep(scores, labels)) {
    curve.push_back({pt.threshold, static_cast<double>(pt.fp) / q,
                     static_cast<double>(pt.tp) / p});
  }
  return curve;
}

double pr_auc(std::span<const double> scores, std::span<const int> labels) {
  auto split = split_by_label(scores, labels);
  double p = static_cast<double>(split.pos.size());
  if (p == 0) throw std::invalid_argument("pr_auc requires at least one positive");
  double area = 0;
  double prev_recall = 0;
  for (const auto& pt : threshold_sweep(scores, labels)) {
    double recall = static_cast<double>(pt.tp) / p;
    double precision = static_cast<double>(pt.tp) / static_cast<double>(pt.tp + pt.fp);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return area;
}

std::vector<CurvePoint> pr_curve(std::span<const double> scores, std::span<const int> labels) {
  auto split = split_by_label(scores, labels);
  double p = static_cast<double>(split.pos.size());
  if (p == 0) throw std::invalid_argument("pr_curve requires at least one positive");
  std::vector<CurvePoint> curve;
  for (const auto& pt : threshold_sweep(scores, labels)) {
    curve.push_back({pt.threshold, static_cast<double>(pt.tp) / p,
                     static_cast<double>(pt.tp) / static_cast<double>(pt.tp + pt.fp)});
  }
  return curve;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

DelongResult delong_test(std::span<const double> scores_a, std::span<const double> scores_b,
                         std::span<const int> labels) {
  if (scores_a.size() != scores_b.size() || scores_a.size() != labels.size()) {
    throw std::invalid_argument("delong_test requires equal-length inputs");
  }
  std::vector<size_t> pos_idx, neg_idx;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw std::invalid_argument("labels must be 0 or 1");
    (labels[i] == 1 ? pos_idx : neg_idx).push_back(i);
  }
  size_t m = pos_idx.size(), n = neg_idx.size();
  if (m < 2 || n < 2) {
    throw std::invalid_argument("delong_test requires at least two samples per class");
  }

  // Placement values per scorer via midranks (Sun & Xu).
  auto placements = [&](std::span<const double> s, std::vector<double>& v10,
                        std::vector<double>& v01) {
    std::vector<double> pos(m), neg(n);
    for (size_t i = 0; i < m; ++i) pos[i] = s[pos_idx[i]];
    for (size_t j = 0; j < n; ++j) neg[j] = s[neg_idx[j]];
    auto tx = midranks(pos);
    auto ty = midranks(neg);
    std::vector<double> all(m + n);
    std::copy(pos.begin(), pos.end(), all.begin());
    std::copy(neg.begin(), neg.end(), all.begin() + static_cast<long>(m));
    auto tz = midranks(all);
    v10.resize(m);
    v01.resize(n);
    double n_d = static_cast<double>(n), m_d = static_cast<double>(m);
    for (size_t i = 0; i < m; ++i) v10[i] = (tz[i] - tx[i]) / n_d;
    for (size_t j = 0; j < n; ++j) v01[j] = 1.0 - (tz[m + j] - ty[j]) / m_d;
  };

  std::vector<double> v10_a, v01_a, v10_b, v01_b;
  placements(scores_a, v10_a, v01_a);
  placements(scores_b, v10_b, v01_b);

  auto sample_cov = [](const std::vector<double>& x, const std::vector<double>& y) {
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double acc = 0;
    for (size_t i = 0; i < x.size(); ++i) acc += (x[i] - mx) * (y[i] - my);
    return acc / static_cast<double>(x.size() - 1);
  };

  DelongResult r;
  r.auc_a = roc_auc(scores_a, labels);
  r.auc_b = roc_auc(scores_b, labels);
  double m_d = static_cast<double>(m), n_d = static_cast<double>(n);
  double s10_aa = sample_cov(v10_a, v10_a), s10_bb = sample_cov(v10_b, v10_b);
  double s10_ab = sample_cov(v10_a, v10_b);
  double s01_aa = sample_cov(v01_a, v01_a), s01_bb = sample_cov(v01_b, v01_b);
  double s01_ab = sample_cov(v01_a, v01_b);
  r.var_a = s10_aa / m_d + s01_aa / n_d;
  r.var_b = s10_bb / m_d + s01_bb / n_d;
  r.cov_ab = s10_ab / m_d + s01_ab / n_d;
  r.var_diff = r.var_a + r.var_b - 2.0 * r.cov_ab;

  if (r.var_diff <= 1e-15) {
    r.z = 0.0;
    r.p = 1.0;
    return r;
  }
  r.z = (r.auc_a - r.auc_b) / std::sqrt(r.var_diff);
  r.p = std::erfc(std::abs(r.z) / std::sqrt(2.0));
  return r;
}

double bootstrap_pr_test(std::span<const double> scores_a, std::span<const double> scores_b,
                         std::span<const int> labels, int iterations, std::uint64_t seed) {
  if (iterations < 100) {
    throw std::invalid_argument("bootstrap_pr_test needs at least 100 iterations");
  }
  if (scores_a.size() != scores_b.size() || scores_a.size() != labels.size()) {
    throw std::invalid_argument("bootstrap_pr_test requires equal-length inputs");
  }
  std::vector<size_t> pos_idx, neg_idx;
  for (size_t i = 0; i < labels.size(); ++i) {
    (labels[i] == 1 ? pos_idx : neg_idx).push_back(i);
  }
  if (pos_idx.empty() || neg_idx.empty()) {
    throw std::invalid_argument("bootstrap_pr_test requires both classes");
  }
  double observed = pr_auc(scores_a, labels) - pr_auc(scores_b, labels);
  if (observed == 0.0) return 1.0;

  Rng rng(seed);
  size_t total = pos_idx.size() + neg_idx.size();
  std::vector<double> ra(total), rb(total);
  std::vector<int> rl(total);
  long flips = 0;
  for (int it = 0; it < iterations; ++it) {
    size_t k = 0;
    for (size_t i = 0; i < pos_idx.size(); ++i, ++k) {
      size_t pick = pos_idx[rng_below(rng, pos_idx.size())];
      ra[k] = scores_a[pick];
      rb[k] = scores_b[pick];
      rl[k] = 1;
    }
    for (size_t j = 0; j < neg_idx.size(); ++j, ++k) {
      size_t pick = neg_idx[rng_below(rng, neg_idx.size())];
      ra[k] = scores_a[pick];
      rb[k] = scores_b[pick];
      rl[k] = 0;
    }
    double d = pr_auc(ra, rl) - pr_auc(rb, rl);
    bool flipped = observed > 0 ? d <= 0 : d >= 0;
    if (flipped) ++flips;
  }
  double p = 2.0 * static_cast<double>(flips) / static_cast<double>(iterations);
  return std::min(1.0, p);
}

double discovery_rate(long evictions_discovered, long properties_visited) {
  if (properties_visited <= 0) {
    throw std::invalid_argument("discovery_rate requires a positive visit count");
  }
  if (evictions_discovered < 0 || evictions_discovered > properties_visited) {
    throw std::invalid_argument("evictions discovered must lie in [0, properties visited]");
  }
  return static_cast<double>(evictions_discovered) / static_cast<double>(properties_visited);
}

}  // namespace evrisk::metrics
