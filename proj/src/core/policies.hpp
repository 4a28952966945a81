#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/data_model.hpp"
#include "core/routing.hpp"

namespace evrisk::policy {

// The five outreach strategies compared against each other. NEO-T-O targets
// the medium and high risk bins of the full-feature model and sets the time
// and unit budgets every alternative must respect.
enum class PolicyKind {
  neo_t_o,
  rs_eviction_only,         // top scores from the filings-only model, time budget
  rs_eviction_neighborhood, // filings + neighborhood model, time budget
  prior_eviction_count,     // most prior-quarter filings first
  neighborhood_canvass,     // whole block groups by prior-quarter filings
};

enum class Control { time, units };

std::string policy_kind_str(PolicyKind k);
std::optional<PolicyKind> parse_policy_kind(const std::string& s);
std::string control_str(Control c);
std::optional<Control> parse_control(const std::string& s);

struct PolicySpec {
  PolicyKind kind = PolicyKind::neo_t_o;
  Control control = Control::time;
};

struct Budget {
  Control control = Control::time;
  double hours = 0.0;
  long units = 0;
};

struct PolicyOutcome {
  long evictions_discovered = 0;  // distinct visited properties with a test filing
  long filings_discovered = 0;    // raw test filings at visited properties
  long properties_visited = 0;
  long units_visited = 0;
  double outreach_time = 0.0;   // hours
  double normalized_time = 0.0; // against the reference plan; 0 when no reference
  double discovery_rate = 0.0;  // evictions_discovered / properties_visited
  bool empty_plan = false;
};

// Routes every property scoring in the medium or high bin (score > 0.2).
// Throws std::invalid_argument when nothing scores that well, or when the
// score vector does not line up with the property list.
routing::RoutePlan plan_neo_t_o(std::span<const data::PropertyRecord> properties,
                                std::span<const double> scores, const geo::CostParams& params,
                                std::uint64_t seed, const routing::RouteOptions& options = {});

// Visits the top-scored properties that fit in the time budget. Score ties
// rank by property_id.
routing::RoutePlan plan_rs_budgeted(std::span<const data::PropertyRecord> properties,
                                    std::span<const double> scores, double budget_hours,
                                    const geo::CostParams& params, std::uint64_t seed,
                                    const routing::RouteOptions& options = {},
                                    routing::TopkSearch search = routing::TopkSearch::incremental);

// Visits properties with at least one prior-window filing, most filings
// first (ties: more units, then property_id), under a time or unit budget.
// No qualifying properties yields an empty plan.
routing::RoutePlan plan_prior_count(std::span<const data::PropertyRecord> properties,
                                    std::span<const data::EvictionFiling> filings,
                                    const dates::MonthWindow& prior_window, const Budget& budget,
                                    const geo::CostParams& params, std::uint64_t seed,
                                    const routing::RouteOptions& options = {},
                                    routing::TopkSearch search = routing::TopkSearch::incremental);

// Sweeps whole block groups in descending prior-window filing count (ties by
// block_group_id): each group is toured in full while the budget holds, and
// the final group is walked along its tour until the next property would
// overshoot. Legs between groups connect the previous stop to the next
// group's tour start.
routing::RoutePlan plan_neighborhood(std::span<const data::PropertyRecord> properties,
                                     std::span<const data::EvictionFiling> filings,
                                     const dates::MonthWindow& prior_window, const Budget& budget,
                                     const geo::CostParams& params, std::uint64_t seed,
                                     const routing::RouteOptions& options = {});

// Scores a plan against held-out filings. An empty plan comes back flagged
// with every count zero. reference_hours > 0 fills normalized_time.
PolicyOutcome evaluate_policy(const routing::RoutePlan& plan,
                              std::span<const data::EvictionFiling> test_filings,
                              const dates::MonthWindow& test_window,
                              double reference_hours = 0.0);

// Percentage by which the reference count exceeds the alternative, rounded
// half-up to one decimal: lift_percent(936, 731) = 28.0.
double lift_percent(long reference, long alternative);

struct PolicyRow {
  PolicySpec spec;
  routing::RoutePlan plan;
  PolicyOutcome outcome;
  bool has_lift = false;    // false on the reference row and on zero discoveries
  double lift_pct = 0.0;    // reference advantage in percent
};

struct ComparisonReport {
  double budget_hours = 0.0;  // the reference plan's outreach time
  long budget_units = 0;      // and its unit total
  std::vector<PolicyRow> rows;
};

struct PolicyInputs {
  std::span<const data::PropertyRecord> properties;
  std::span<const data::EvictionFiling> filings;
  dates::MonthWindow prior_window;  // ranking window for count-based policies
  dates::MonthWindow test_window;   // held-out filings scored against
  std::span<const double> scores_e;    // aligned with properties
  std::span<const double> scores_en;
  std::span<const double> scores_eno;
  geo::CostParams params;
  routing::RouteOptions route_options;
  routing::TopkSearch topk_search = routing::TopkSearch::incremental;
};

// Runs every spec against the same inputs. The NEO-T-O plan (required in the
// spec list) supplies the budgets; rows come back in spec order with
// normalized times and the reference's lift over each alternative. The
// rs_* policies are time-controlled by definition and reject a unit control.
ComparisonReport compare_policies(std::span<const PolicySpec> specs, const PolicyInputs& inputs,
                                  std::uint64_t seed);

}  // namespace evrisk::policy
