#pragma once

#include <array>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "core/geo.hpp"
#include "core/metrics.hpp"
#include "core/routing.hpp"

namespace evrisk::exports {

// Left-aligned text table: header row, dash rule, then rows padded to the
// widest cell with two-space gutters. Short rows are padded with blanks.
std::string render_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows);

void write_text(const std::string& path, const std::string& content);

// threshold,<x_name>,<y_name> rows, shortest round-trip doubles.
void write_curve_csv(const std::string& path, std::span<const metrics::CurvePoint> points,
                     const std::string& x_name, const std::string& y_name);

// Visit-set comparison of two route plans as an RFC 7946 FeatureCollection:
// one Point feature per property in either plan, WGS84 [lon, lat], with a
// "membership" property of primary_only / alternative_only / both. Counts
// and the share of the primary's properties the alternative also covers ride
// along as foreign members.
struct Overlay {
  nlohmann::json geojson;
  long primary_only = 0;
  long alternative_only = 0;
  long both = 0;
  double overlap_pct = 0.0;  // 100 * both / |primary|, half-up to one decimal
};

Overlay overlay_pair(const routing::RoutePlan& primary, const routing::RoutePlan& alternative,
                     const std::unordered_map<std::string, geo::GeoPoint>& locations,
                     const std::string& primary_name, const std::string& alternative_name);

// Risk-group composition by building size. Buckets are lower bounds
// ("2,5,10" labels 2-4, 5-9, 10+); units below the first bound get a
// leading "<N" bucket only when present. Empty buckets stay, zeroed.
// Thresholds split scores upper-inclusively into four groups.
struct HistogramRow {
  std::string bucket;
  long count = 0;
  std::array<long, 4> group_counts{};   // very_low, low, medium, high
  std::array<double, 4> group_shares{}; // proportions; zero when count == 0
};

std::vector<HistogramRow> risk_histogram(std::span<const double> scores,
                                         std::span<const int> units,
                                         const std::vector<int>& bucket_bounds,
                                         const std::array<double, 3>& thresholds);

inline constexpr std::array<const char*, 4> kRiskGroupNames{"very_low", "low", "medium", "high"};

}  // namespace evrisk::exports
