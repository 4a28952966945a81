#include "core/geo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace evrisk::geo {

namespace {
constexpr double kPi = 3.14159265358979323846;
double to_rad(double deg) { return deg * (kPi / 180.0); }
}  // namespace

bool valid(const GeoPoint& p) {
  return std::isfinite(p.latitude) && std::isfinite(p.longitude) && p.latitude >= -90.0 &&
         p.latitude <= 90.0 && p.longitude >= -180.0 && p.longitude <= 180.0;
}

double geodesic_miles(const GeoPoint& a, const GeoPoint& b) {
  if (!valid(a) || !valid(b)) {
    throw std::invalid_argument("geodesic_miles: coordinates out of range");
  }
  double sin_dlat = std::sin(to_rad(b.latitude - a.latitude) * 0.5);
  double sin_dlon = std::sin(to_rad(b.longitude - a.longitude) * 0.5);
  double h = sin_dlat * sin_dlat +
             std::cos(to_rad(a.latitude)) * std::cos(to_rad(b.latitude)) * sin_dlon * sin_dlon;
  return 2.0 * kEarthRadiusMiles * std::asin(std::min(1.0, std::sqrt(h)));
}

void CostParams::validate() const {
  if (!(knock_hours_per_unit > 0)) {
    throw std::invalid_argument("knock_hours_per_unit must be positive");
  }
  if (speed_table.empty()) throw std::invalid_argument("speed table must not be empty");
  double prev = 0.0;
  for (size_t i = 0; i < speed_table.size(); ++i) {
    const auto& band = speed_table[i];
    if (!(band.mph > 0)) throw std::invalid_argument("speed table speeds must be positive");
    bool last = i + 1 == speed_table.size();
    if (!last && !(band.upto_miles > prev)) {
      throw std::invalid_argument("speed table breakpoints must be strictly increasing");
    }
    prev = band.upto_miles;
  }
  if (!std::isinf(speed_table.back().upto_miles)) {
    throw std::invalid_argument("last speed band must be unbounded");
  }
}

double speed_for_distance(double miles, const CostParams& params) {
  if (miles < 0 || !std::isfinite(miles)) {
    throw std::invalid_argument("distance must be a finite non-negative number, got " +
                                std::to_string(miles));
  }
  for (const auto& band : params.speed_table) {
    if (miles <= band.upto_miles) return band.mph;
  }
  return params.speed_table.back().mph;
}

double leg_time(double miles, const CostParams& params) {
  return miles / speed_for_distance(miles, params);
}

double knock_time(int units, const CostParams& params) {
  if (units < 0) throw std::invalid_argument("unit count must be non-negative");
  return params.knock_hours_per_unit * units;
}

}  // namespace evrisk::geo
