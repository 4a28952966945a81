#include "core/exports.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

#include "core/text.hpp"

namespace evrisk::exports {

std::string render_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) widths[c] = header[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size() && c < widths.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  auto emit = [&](const std::vector<std::string>& cells, std::string& out) {
    for (std::size_t c = 0; c < widths.size(); ++c) {
      const std::string& cell = c < cells.size() ? cells[c] : std::string{};
      out += cell;
      if (c + 1 < widths.size()) out += std::string(widths[c] - cell.size() + 2, ' ');
    }
    out += '\n';
  };
  std::string out;
  emit(header, out);
  std::string rule;
  for (std::size_t c = 0; c < widths.size(); ++c) {
    rule += std::string(widths[c], '-');
    if (c + 1 < widths.size()) rule += "  ";
  }
  out += rule + '\n';
  for (const auto& row : rows) emit(row, out);
  return out;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

void write_curve_csv(const std::string& path, std::span<const metrics::CurvePoint> points,
                     const std::string& x_name, const std::string& y_name) {
  std::string body = "threshold," + x_name + "," + y_name + "\n";
  for (const auto& p : points) {
    body += text::format_double(p.threshold);
    body += ',';
    body += text::format_double(p.x);
    body += ',';
    body += text::format_double(p.y);
    body += '\n';
  }
  write_text(path, body);
}

Overlay overlay_pair(const routing::RoutePlan& primary, const routing::RoutePlan& alternative,
                     const std::unordered_map<std::string, geo::GeoPoint>& locations,
                     const std::string& primary_name, const std::string& alternative_name) {
  // std::map keeps features sorted by property_id for byte-stable output.
  std::map<std::string, int> membership;  // 1 primary, 2 alternative, 3 both
  for (const auto& id : primary.visit_order) membership[id] |= 1;
  for (const auto& id : alternative.visit_order) membership[id] |= 2;

  Overlay overlay;
  nlohmann::json features = nlohmann::json::array();
  for (const auto& [id, bits] : membership) {
    auto it = locations.find(id);
    if (it == locations.end()) {
      throw std::invalid_argument("overlay_pair: no location for property " + id);
    }
    const char* label = bits == 3 ? "both" : bits == 1 ? "primary_only" : "alternative_only";
    if (bits == 3) {
      ++overlay.both;
    } else if (bits == 1) {
      ++overlay.primary_only;
    } else {
      ++overlay.alternative_only;
    }
    features.push_back(nlohmann::json{
        {"type", "Feature"},
        {"geometry",
         nlohmann::json{{"type", "Point"},
                        {"coordinates", {it->second.longitude, it->second.latitude}}}},
        {"properties", nlohmann::json{{"property_id", id}, {"membership", label}}},
    });
  }
  long primary_total = overlay.primary_only + overlay.both;
  overlay.overlap_pct =
      primary_total > 0
          ? text::round_half_up(100.0 * static_cast<double>(overlay.both) /
                                    static_cast<double>(primary_total),
                                1)
          : 0.0;
  overlay.geojson = nlohmann::json{
      {"type", "FeatureCollection"},
      {"features", features},
      {"primary", primary_name},
      {"alternative", alternative_name},
      {"counts",
       nlohmann::json{{"primary_only", overlay.primary_only},
                      {"alternative_only", overlay.alternative_only},
                      {"both", overlay.both}}},
      {"overlap_pct_of_primary", overlay.overlap_pct},
  };
  return overlay;
}

std::vector<HistogramRow> risk_histogram(std::span<const double> scores,
                                         std::span<const int> units,
                                         const std::vector<int>& bucket_bounds,
                                         const std::array<double, 3>& thresholds) {
  if (scores.size() != units.size()) {
    throw std::invalid_argument("risk_histogram: scores and units must align");
  }
  if (bucket_bounds.empty()) throw std::invalid_argument("risk_histogram: no buckets");
  for (std::size_t i = 1; i < bucket_bounds.size(); ++i) {
    if (bucket_bounds[i] <= bucket_bounds[i - 1]) {
      throw std::invalid_argument("risk_histogram: bucket bounds must increase");
    }
  }
  bool any_below =
      std::any_of(units.begin(), units.end(), [&](int u) { return u < bucket_bounds.front(); });

  std::vector<HistogramRow> rows;
  if (any_below) rows.push_back({"<" + std::to_string(bucket_bounds.front()), 0, {}, {}});
  for (std::size_t i = 0; i < bucket_bounds.size(); ++i) {
    std::string label =
        i + 1 < bucket_bounds.size()
            ? std::to_string(bucket_bounds[i]) + "-" + std::to_string(bucket_bounds[i + 1] - 1)
            : std::to_string(bucket_bounds[i]) + "+";
    rows.push_back({std::move(label), 0, {}, {}});
  }
  const std::size_t offset = any_below ? 1 : 0;

  for (std::size_t i = 0; i < scores.size(); ++i) {
    double s = scores[i];
    if (!(s >= 0.0 && s <= 1.0)) {
      throw std::invalid_argument("risk_histogram: score out of [0, 1]");
    }
    std::size_t group = s <= thresholds[0] ? 0 : s <= thresholds[1] ? 1 : s <= thresholds[2] ? 2 : 3;
    std::size_t row = 0;
    if (units[i] >= bucket_bounds.front()) {
      auto it = std::upper_bound(bucket_bounds.begin(), bucket_bounds.end(), units[i]);
      row = offset + static_cast<std::size_t>(it - bucket_bounds.begin()) - 1;
    }
    ++rows[row].count;
    ++rows[row].group_counts[group];
  }
  for (auto& row : rows) {
    if (row.count == 0) continue;
    for (std::size_t g = 0; g < 4; ++g) {
      row.group_shares[g] =
          static_cast<double>(row.group_counts[g]) / static_cast<double>(row.count);
    }
  }
  return rows;
}

}  // namespace evrisk::exports
