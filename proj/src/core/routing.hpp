#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/geo.hpp"

namespace evrisk::routing {

struct RoutePoint {
  std::string property_id;
  geo::GeoPoint location;
  int units = 0;
};

struct RoutePlan {
  std::vector<std::string> visit_order;
  std::vector<double> leg_times;    // one per consecutive pair
  std::vector<double> knock_times;  // one per visited property
  double total_time = 0.0;          // hours
  long total_units = 0;
  long total_properties = 0;

  bool empty() const { return visit_order.empty(); }
};

struct RouteOptions {
  // First-improvement 2-opt sweeps per start before giving up (0 = no
  // improvement, construction only).
  int max_2opt_sweeps = 50;
  // Local-search starts: the first is always nearest-neighbor from the pinned
  // start point; the rest begin from seeded shuffles. The best 2-opt-stable
  // tour wins, so more starts only ever help.
  int starts = 24;
};

struct RouteStats {
  int sweeps = 0;           // most sweeps any start needed
  bool sweep_cap_hit = false;  // some start was still improving at the cap
};

// Open tour: starts at the northwesternmost point (highest latitude, then
// lowest longitude, then lowest property_id) and does not return. Each start
// is improved by first-improvement 2-opt segment reversal over pairs in index
// order, repeated to fixpoint or the sweep cap. Deterministic for identical
// inputs and seed; never worse than nearest-neighbor construction alone.
// Throws on empty input, bad coordinates, or negative units.
RoutePlan route_tsp(std::span<const RoutePoint> points, const geo::CostParams& params,
                    std::uint64_t seed, const RouteOptions& options = {},
                    RouteStats* stats = nullptr);

// Recomputes total hours from the stored legs and knocks.
double route_time(const RoutePlan& plan);

struct TopkResult {
  std::size_t k = 0;
  RoutePlan plan;
};

enum class TopkSearch {
  incremental,  // k = 1, 2, 3, ... ; stop at the first budget violation
  doubling,     // doubling bracket + bisection; assumes route time grows with k
};

// Largest prefix of `ranked` whose heuristic tour fits in budget_hours
// (inclusive). The incremental scan stops at the first k whose tour exceeds
// the budget and returns k - 1 with its plan. Throws if budget_hours <= 0.
TopkResult select_topk_within_time(std::span<const RoutePoint> ranked, double budget_hours,
                                   const geo::CostParams& params, std::uint64_t seed,
                                   TopkSearch search = TopkSearch::incremental,
                                   const RouteOptions& options = {});

// Longest prefix whose cumulative units stay at or below unit_budget.
std::size_t select_within_units(std::span<const RoutePoint> ranked, long unit_budget);

}  // namespace evrisk::routing
