#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace evrisk::metrics {

// Parallel scores in [0,1] and binary labels.
struct ScoredLabels {
  std::vector<double> scores;
  std::vector<int> labels;
};

struct CurvePoint {
  double threshold;
  double x;  // FPR for ROC, recall for PR
  double y;  // TPR for ROC, precision for PR
};

// Mann-Whitney statistic via midranks: P(score+ > score-) + 0.5 P(tie).
// Throws std::invalid_argument unless both classes are present.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

// Area under the step (non-interpolated) precision-recall curve, one step per
// distinct threshold, ties grouped. Throws without at least one positive.
double pr_auc(std::span<const double> scores, std::span<const int> labels);

std::vector<CurvePoint> roc_curve(std::span<const double> scores, std::span<const int> labels);
std::vector<CurvePoint> pr_curve(std::span<const double> scores, std::span<const int> labels);

struct DelongResult {
  double auc_a = 0;
  double auc_b = 0;
  double var_a = 0;    // variance of auc_a alone
  double var_b = 0;
  double cov_ab = 0;
  double var_diff = 0;
  double z = 0;
  double p = 1.0;      // two-sided
};

// Paired DeLong test for two scorers on identical labels. Degenerate variance
// (for example identical score vectors) yields p = 1 by convention.
DelongResult delong_test(std::span<const double> scores_a, std::span<const double> scores_b,
                         std::span<const int> labels);

// Stratified paired bootstrap of the PR AUC difference; two-sided p is the
// sign-flip fraction doubled and clamped to [0,1].
double bootstrap_pr_test(std::span<const double> scores_a, std::span<const double> scores_b,
                         std::span<const int> labels, int iterations, std::uint64_t seed);

double discovery_rate(long evictions_discovered, long properties_visited);

// Average midranks (1-based), ties averaged.
std::vector<double> midranks(std::span<const double> values);

double normal_cdf(double x);

}  // namespace evrisk::metrics
