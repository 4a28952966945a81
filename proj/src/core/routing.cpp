#include "core/routing.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>

#include "core/rng.hpp"

namespace evrisk::routing {

namespace {

std::size_t start_index(std::span<const RoutePoint> points) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto& a = points[i].location;
    const auto& b = points[best].location;
    if (a.latitude > b.latitude ||
        (a.latitude == b.latitude && a.longitude < b.longitude) ||
        (a.latitude == b.latitude && a.longitude == b.longitude &&
         points[i].property_id < points[best].property_id)) {
      best = i;
    }
  }
  return best;
}

std::vector<std::vector<double>> leg_matrix(std::span<const RoutePoint> points,
                                            const geo::CostParams& params) {
  const std::size_t n = points.size();
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double miles = geo::geodesic_miles(points[i].location, points[j].location);
      const double t = geo::leg_time(miles, params);
      w[i][j] = t;
      w[j][i] = t;
    }
  }
  return w;
}

double travel_time(const std::vector<std::size_t>& order,
                   const std::vector<std::vector<double>>& w) {
  double total = 0.0;
  for (std::size_t i = 1; i < order.size(); ++i) total += w[order[i - 1]][order[i]];
  return total;
}

// First-improvement 2-opt segment reversal over pairs in index order, repeated
// to fixpoint or the sweep cap. The start stays pinned, so i >= 1.
void two_opt(std::vector<std::size_t>& order, const std::vector<std::vector<double>>& w,
             int max_sweeps, int* sweeps_used, bool* cap_hit) {
  const std::size_t n = order.size();
  int sweeps = 0;
  bool capped = false;
  if (n >= 3) {
    bool improved = true;
    while (improved) {
      if (sweeps == max_sweeps) {
        capped = improved;
        break;
      }
      improved = false;
      ++sweeps;
      for (std::size_t i = 1; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          const double before = w[order[i - 1]][order[i]] +
                                (j + 1 < n ? w[order[j]][order[j + 1]] : 0.0);
          const double after = w[order[i - 1]][order[j]] +
                               (j + 1 < n ? w[order[i]][order[j + 1]] : 0.0);
          if (after + 1e-12 < before) {
            std::reverse(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(j) + 1);
            improved = true;
          }
        }
      }
    }
  }
  if (sweeps_used != nullptr) *sweeps_used = std::max(*sweeps_used, sweeps);
  if (cap_hit != nullptr) *cap_hit = *cap_hit || capped;
}

}  // namespace

RoutePlan route_tsp(std::span<const RoutePoint> points, const geo::CostParams& params,
                    std::uint64_t seed, const RouteOptions& options, RouteStats* stats) {
  if (points.empty()) throw std::invalid_argument("route_tsp: no points");
  if (options.max_2opt_sweeps < 0) throw std::invalid_argument("route_tsp: negative sweep cap");
  if (options.starts < 1) throw std::invalid_argument("route_tsp: need at least one start");
  params.validate();
  for (const auto& p : points) {
    if (!geo::valid(p.location)) {
      throw std::invalid_argument("route_tsp: invalid coordinates for property " + p.property_id);
    }
    if (p.units < 0) {
      throw std::invalid_argument("route_tsp: negative units for property " + p.property_id);
    }
  }

  const std::size_t n = points.size();
  const auto w = leg_matrix(points, params);
  const std::size_t start = start_index(points);

  int sweeps = 0;
  bool cap_hit = false;

  // Start 1: nearest-neighbor construction; ties broken by lowest index in the
  // input span, so ranked callers get a stable route.
  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<char> used(n, 0);
  std::size_t current = start;
  order.push_back(current);
  used[current] = 1;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      if (w[current][j] < best) {
        best = w[current][j];
        next = j;
      }
    }
    order.push_back(next);
    used[next] = 1;
    current = next;
  }
  two_opt(order, w, options.max_2opt_sweeps, &sweeps, &cap_hit);

  // Remaining starts: seeded shuffles of the non-start points, each improved
  // to its own 2-opt fixpoint; strictly better tours replace the incumbent.
  if (options.starts > 1 && n >= 4) {
    double best_time = travel_time(order, w);
    std::vector<std::size_t> rest;
    rest.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (i != start) rest.push_back(i);
    }
    Rng rng(seed);
    std::vector<std::size_t> candidate;
    candidate.reserve(n);
    for (int r = 1; r < options.starts; ++r) {
      rng_shuffle(rest, rng);
      candidate.clear();
      candidate.push_back(start);
      candidate.insert(candidate.end(), rest.begin(), rest.end());
      two_opt(candidate, w, options.max_2opt_sweeps, &sweeps, &cap_hit);
      const double t = travel_time(candidate, w);
      if (t + 1e-12 < best_time) {
        best_time = t;
        order = candidate;
      }
    }
  }

  if (stats != nullptr) {
    stats->sweeps = sweeps;
    stats->sweep_cap_hit = cap_hit;
  }

  RoutePlan plan;
  plan.visit_order.reserve(n);
  plan.leg_times.reserve(n > 0 ? n - 1 : 0);
  plan.knock_times.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = points[order[i]];
    plan.visit_order.push_back(p.property_id);
    plan.knock_times.push_back(geo::knock_time(p.units, params));
    plan.total_units += p.units;
    if (i > 0) plan.leg_times.push_back(w[order[i - 1]][order[i]]);
  }
  plan.total_properties = static_cast<long>(n);
  plan.total_time = route_time(plan);
  return plan;
}

double route_time(const RoutePlan& plan) {
  double total = 0.0;
  for (double t : plan.leg_times) total += t;
  for (double t : plan.knock_times) total += t;
  return total;
}

namespace {

RoutePlan plan_prefix(std::span<const RoutePoint> ranked, std::size_t k,
                      const geo::CostParams& params, std::uint64_t seed,
                      const RouteOptions& options) {
  return route_tsp(ranked.subspan(0, k), params, seed, options);
}

TopkResult topk_incremental(std::span<const RoutePoint> ranked, double budget_hours,
                            const geo::CostParams& params, std::uint64_t seed,
                            const RouteOptions& options) {
  TopkResult result;
  for (std::size_t k = 1; k <= ranked.size(); ++k) {
    RoutePlan plan = plan_prefix(ranked, k, params, seed, options);
    if (plan.total_time > budget_hours) break;
    result.k = k;
    result.plan = std::move(plan);
  }
  return result;
}

// Doubling bracket plus bisection. Correct only when prefix tour time never
// shrinks as k grows; the heuristic usually honors that, but the incremental
// scan is the canonical answer when they disagree.
TopkResult topk_doubling(std::span<const RoutePoint> ranked, double budget_hours,
                         const geo::CostParams& params, std::uint64_t seed,
                         const RouteOptions& options) {
  const std::size_t n = ranked.size();
  auto fits = [&](std::size_t k, RoutePlan* out) {
    RoutePlan plan = plan_prefix(ranked, k, params, seed, options);
    const bool ok = plan.total_time <= budget_hours;
    if (ok && out != nullptr) *out = std::move(plan);
    return ok;
  };

  TopkResult result;
  std::size_t lo = 1;
  if (!fits(1, &result.plan)) return result;  // even one property busts the budget
  result.k = 1;
  std::size_t hi = 1;
  while (hi < n) {
    hi = std::min(n, hi * 2);
    RoutePlan plan;
    if (fits(hi, &plan)) {
      lo = hi;
      result.k = hi;
      result.plan = std::move(plan);
      if (hi == n) return result;
    } else {
      break;
    }
  }
  if (lo == n) return result;
  // invariant: lo fits, hi does not
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    RoutePlan plan;
    if (fits(mid, &plan)) {
      lo = mid;
      result.k = mid;
      result.plan = std::move(plan);
    } else {
      hi = mid;
    }
  }
  return result;
}

}  // namespace

TopkResult select_topk_within_time(std::span<const RoutePoint> ranked, double budget_hours,
                                   const geo::CostParams& params, std::uint64_t seed,
                                   TopkSearch search, const RouteOptions& options) {
  if (!(budget_hours > 0.0)) throw std::invalid_argument("select_topk_within_time: budget must be positive");
  if (ranked.empty()) return {};
  switch (search) {
    case TopkSearch::incremental:
      return topk_incremental(ranked, budget_hours, params, seed, options);
    case TopkSearch::doubling:
      return topk_doubling(ranked, budget_hours, params, seed, options);
  }
  throw std::invalid_argument("select_topk_within_time: unknown search mode");
}

std::size_t select_within_units(std::span<const RoutePoint> ranked, long unit_budget) {
  if (unit_budget < 0) throw std::invalid_argument("select_within_units: negative budget");
  long total = 0;
  std::size_t k = 0;
  for (const auto& p : ranked) {
    if (p.units < 0) throw std::invalid_argument("select_within_units: negative units");
    if (total + p.units > unit_budget) break;
    total += p.units;
    ++k;
  }
  return k;
}

}  // namespace evrisk::routing
