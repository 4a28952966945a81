#include "core/policies.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "core/gbdt.hpp"
#include "core/metrics.hpp"
#include "core/text.hpp"

namespace evrisk::policy {
namespace {

routing::RoutePoint as_point(const data::PropertyRecord& p) {
  return {p.property_id, p.location, p.units};
}

void check_scores(std::span<const data::PropertyRecord> properties, std::span<const double> scores,
                  const char* who) {
  if (scores.size() != properties.size()) {
    throw std::invalid_argument(std::string(who) + ": expected one score per property, got " +
                                std::to_string(scores.size()) + " scores for " +
                                std::to_string(properties.size()) + " properties");
  }
}

// Filing counts over a window, restricted to the given property universe.
std::unordered_map<std::string, long> window_counts(
    std::span<const data::PropertyRecord> properties,
    std::span<const data::EvictionFiling> filings, const dates::MonthWindow& window) {
  std::unordered_set<std::string> known;
  known.reserve(properties.size());
  for (const auto& p : properties) known.insert(p.property_id);
  std::unordered_map<std::string, long> counts;
  for (const auto& f : filings) {
    if (!window.contains(f.filing_date)) continue;
    if (!known.contains(f.property_id)) continue;
    ++counts[f.property_id];
  }
  return counts;
}

}  // namespace

std::string policy_kind_str(PolicyKind k) {
  switch (k) {
    case PolicyKind::neo_t_o: return "NEO-T-O";
    case PolicyKind::rs_eviction_only: return "RS-EvictionOnly";
    case PolicyKind::rs_eviction_neighborhood: return "RS-EvictionNeighborhood";
    case PolicyKind::prior_eviction_count: return "PriorEvictionCount";
    case PolicyKind::neighborhood_canvass: return "NeighborhoodCanvass";
  }
  throw std::logic_error("policy_kind_str: unknown kind");
}

std::optional<PolicyKind> parse_policy_kind(const std::string& s) {
  if (s == "NEO-T-O") return PolicyKind::neo_t_o;
  if (s == "RS-EvictionOnly") return PolicyKind::rs_eviction_only;
  if (s == "RS-EvictionNeighborhood") return PolicyKind::rs_eviction_neighborhood;
  if (s == "PriorEvictionCount") return PolicyKind::prior_eviction_count;
  if (s == "NeighborhoodCanvass") return PolicyKind::neighborhood_canvass;
  return std::nullopt;
}

std::string control_str(Control c) {
  return c == Control::time ? "time" : "units";
}

std::optional<Control> parse_control(const std::string& s) {
  if (s == "time") return Control::time;
  if (s == "units") return Control::units;
  return std::nullopt;
}

routing::RoutePlan plan_neo_t_o(std::span<const data::PropertyRecord> properties,
                                std::span<const double> scores, const geo::CostParams& params,
                                std::uint64_t seed, const routing::RouteOptions& options) {
  check_scores(properties, scores, "plan_neo_t_o");
  std::vector<routing::RoutePoint> selected;
  for (std::size_t i = 0; i < properties.size(); ++i) {
    auto bin = model::bin_risk(scores[i]);
    if (bin == model::RiskBin::medium || bin == model::RiskBin::high) {
      selected.push_back(as_point(properties[i]));
    }
  }
  if (selected.empty()) {
    throw std::invalid_argument("plan_neo_t_o: no properties score in the medium or high risk bins");
  }
  return routing::route_tsp(selected, params, seed, options);
}

routing::RoutePlan plan_rs_budgeted(std::span<const data::PropertyRecord> properties,
                                    std::span<const double> scores, double budget_hours,
                                    const geo::CostParams& params, std::uint64_t seed,
                                    const routing::RouteOptions& options,
                                    routing::TopkSearch search) {
  check_scores(properties, scores, "plan_rs_budgeted");
  std::vector<std::size_t> order(properties.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return properties[a].property_id < properties[b].property_id;
  });
  std::vector<routing::RoutePoint> ranked;
  ranked.reserve(order.size());
  for (std::size_t i : order) ranked.push_back(as_point(properties[i]));
  return routing::select_topk_within_time(ranked, budget_hours, params, seed, search, options)
      .plan;
}

routing::RoutePlan plan_prior_count(std::span<const data::PropertyRecord> properties,
                                    std::span<const data::EvictionFiling> filings,
                                    const dates::MonthWindow& prior_window, const Budget& budget,
                                    const geo::CostParams& params, std::uint64_t seed,
                                    const routing::RouteOptions& options,
                                    routing::TopkSearch search) {
  auto counts = window_counts(properties, filings, prior_window);
  struct Candidate {
    const data::PropertyRecord* prop;
    long count;
  };
  std::vector<Candidate> candidates;
  for (const auto& p : properties) {
    auto it = counts.find(p.property_id);
    if (it == counts.end()) continue;  // never filed against in the window
    candidates.push_back({&p, it->second});
  }
  if (candidates.empty()) return {};
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.count != b.count) return a.count > b.count;
    if (a.prop->units != b.prop->units) return a.prop->units > b.prop->units;
    return a.prop->property_id < b.prop->property_id;
  });
  std::vector<routing::RoutePoint> ranked;
  ranked.reserve(candidates.size());
  for (const auto& c : candidates) ranked.push_back(as_point(*c.prop));
  if (budget.control == Control::time) {
    return routing::select_topk_within_time(ranked, budget.hours, params, seed, search, options)
        .plan;
  }
  std::size_t k = routing::select_within_units(ranked, budget.units);
  if (k == 0) return {};
  ranked.resize(k);
  return routing::route_tsp(ranked, params, seed, options);
}

routing::RoutePlan plan_neighborhood(std::span<const data::PropertyRecord> properties,
                                     std::span<const data::EvictionFiling> filings,
                                     const dates::MonthWindow& prior_window, const Budget& budget,
                                     const geo::CostParams& params, std::uint64_t seed,
                                     const routing::RouteOptions& options) {
  if (budget.control == Control::time && !(budget.hours > 0.0)) {
    throw std::invalid_argument("plan_neighborhood: time budget must be positive");
  }
  std::unordered_map<std::string, std::vector<routing::RoutePoint>> groups;
  std::unordered_map<std::string, const data::PropertyRecord*> by_id;
  for (const auto& p : properties) {
    groups[p.block_group_id].push_back(as_point(p));
    by_id[p.property_id] = &p;
  }
  auto counts = window_counts(properties, filings, prior_window);
  std::unordered_map<std::string, long> group_counts;
  for (const auto& [id, count] : counts) group_counts[by_id.at(id)->block_group_id] += count;

  std::vector<std::pair<std::string, long>> ranked;
  ranked.reserve(groups.size());
  for (const auto& [gid, pts] : groups) {
    auto it = group_counts.find(gid);
    ranked.emplace_back(gid, it == group_counts.end() ? 0 : it->second);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  routing::RoutePlan combined;
  geo::GeoPoint last{};
  bool have_last = false;

  struct Step {
    const std::string* id;
    double leg;
    double knock;
    long units;
  };
  auto append = [&](const Step& s) {
    combined.visit_order.push_back(*s.id);
    if (have_last) combined.leg_times.push_back(s.leg);
    combined.knock_times.push_back(s.knock);
    combined.total_units += s.units;
    combined.total_properties += 1;
    last = by_id.at(*s.id)->location;
    have_last = true;
  };

  for (const auto& [gid, count] : ranked) {
    auto tour = routing::route_tsp(groups.at(gid), params, seed, options);
    const std::size_t n = tour.visit_order.size();
    std::vector<Step> steps;
    steps.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string& id = tour.visit_order[i];
      double leg = 0.0;
      if (i > 0) {
        leg = tour.leg_times[i - 1];
      } else if (have_last) {
        leg = geo::leg_time(geo::geodesic_miles(last, by_id.at(id)->location), params);
      }
      steps.push_back({&id, leg, tour.knock_times[i], by_id.at(id)->units});
    }
    // Trial totals use route_time's exact fold (all legs, then all knocks) so
    // the fit test agrees bit-for-bit with the finished plan's total_time.
    auto time_with = [&](std::size_t upto) {
      double total = 0.0;
      for (double t : combined.leg_times) total += t;
      for (std::size_t i = 0; i < upto; ++i) total += steps[i].leg;
      for (double t : combined.knock_times) total += t;
      for (std::size_t i = 0; i < upto; ++i) total += steps[i].knock;
      return total;
    };
    auto units_with = [&](std::size_t upto) {
      long total = combined.total_units;
      for (std::size_t i = 0; i < upto; ++i) total += steps[i].units;
      return total;
    };
    auto fits = [&](std::size_t upto) {
      return budget.control == Control::time ? time_with(upto) <= budget.hours
                                             : units_with(upto) <= budget.units;
    };
    if (fits(n)) {
      for (const auto& s : steps) append(s);
      combined.total_time = routing::route_time(combined);
      continue;
    }
    // Walk the final group's tour until the next stop would overshoot, then
    // stop the sweep entirely.
    std::size_t take = 0;
    while (take < n && fits(take + 1)) ++take;
    for (std::size_t i = 0; i < take; ++i) append(steps[i]);
    combined.total_time = routing::route_time(combined);
    break;
  }
  return combined;
}

PolicyOutcome evaluate_policy(const routing::RoutePlan& plan,
                              std::span<const data::EvictionFiling> test_filings,
                              const dates::MonthWindow& test_window, double reference_hours) {
  PolicyOutcome out;
  out.properties_visited = plan.total_properties;
  out.units_visited = plan.total_units;
  out.outreach_time = plan.total_time;
  if (plan.empty()) {
    out.empty_plan = true;
    return out;
  }
  std::unordered_set<std::string> visited(plan.visit_order.begin(), plan.visit_order.end());
  std::unordered_set<std::string> discovered;
  for (const auto& f : test_filings) {
    if (!test_window.contains(f.filing_date)) continue;
    if (!visited.contains(f.property_id)) continue;
    ++out.filings_discovered;
    discovered.insert(f.property_id);
  }
  out.evictions_discovered = static_cast<long>(discovered.size());
  out.discovery_rate = metrics::discovery_rate(out.evictions_discovered, out.properties_visited);
  if (reference_hours > 0.0) out.normalized_time = plan.total_time / reference_hours;
  return out;
}

double lift_percent(long reference, long alternative) {
  if (alternative <= 0) {
    throw std::invalid_argument("lift_percent: alternative count must be positive");
  }
  double raw = static_cast<double>(reference - alternative) / static_cast<double>(alternative) * 100.0;
  return text::round_half_up(raw, 1);
}

ComparisonReport compare_policies(std::span<const PolicySpec> specs, const PolicyInputs& inputs,
                                  std::uint64_t seed) {
  if (specs.empty()) throw std::invalid_argument("compare_policies: no policies to compare");
  bool has_neo = false;
  for (const auto& s : specs) {
    if (s.kind == PolicyKind::neo_t_o) has_neo = true;
    if ((s.kind == PolicyKind::rs_eviction_only ||
         s.kind == PolicyKind::rs_eviction_neighborhood) &&
        s.control != Control::time) {
      throw std::invalid_argument("compare_policies: " + policy_kind_str(s.kind) +
                                  " is time-controlled by definition");
    }
  }
  if (!has_neo) {
    throw std::invalid_argument("compare_policies: NEO-T-O must be present to set the budgets");
  }
  dates::WindowPair{inputs.prior_window, inputs.test_window}.validate();

  routing::RoutePlan neo_plan = plan_neo_t_o(inputs.properties, inputs.scores_eno, inputs.params,
                                             seed, inputs.route_options);
  ComparisonReport report;
  report.budget_hours = neo_plan.total_time;
  report.budget_units = neo_plan.total_units;
  PolicyOutcome neo_outcome =
      evaluate_policy(neo_plan, inputs.filings, inputs.test_window, report.budget_hours);

  for (const auto& spec : specs) {
    PolicyRow row;
    row.spec = spec;
    switch (spec.kind) {
      case PolicyKind::neo_t_o:
        row.plan = neo_plan;
        break;
      case PolicyKind::rs_eviction_only:
        row.plan = plan_rs_budgeted(inputs.properties, inputs.scores_e, report.budget_hours,
                                    inputs.params, seed, inputs.route_options,
                                    inputs.topk_search);
        break;
      case PolicyKind::rs_eviction_neighborhood:
        row.plan = plan_rs_budgeted(inputs.properties, inputs.scores_en, report.budget_hours,
                                    inputs.params, seed, inputs.route_options,
                                    inputs.topk_search);
        break;
      case PolicyKind::prior_eviction_count:
        row.plan = plan_prior_count(
            inputs.properties, inputs.filings, inputs.prior_window,
            Budget{spec.control, report.budget_hours, report.budget_units}, inputs.params, seed,
            inputs.route_options, inputs.topk_search);
        break;
      case PolicyKind::neighborhood_canvass:
        row.plan = plan_neighborhood(
            inputs.properties, inputs.filings, inputs.prior_window,
            Budget{spec.control, report.budget_hours, report.budget_units}, inputs.params, seed,
            inputs.route_options);
        break;
    }
    row.outcome = spec.kind == PolicyKind::neo_t_o
                      ? neo_outcome
                      : evaluate_policy(row.plan, inputs.filings, inputs.test_window,
                                        report.budget_hours);
    if (spec.kind != PolicyKind::neo_t_o && row.outcome.evictions_discovered > 0) {
      row.has_lift = true;
      row.lift_pct =
          lift_percent(neo_outcome.evictions_discovered, row.outcome.evictions_discovered);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace evrisk::policy
