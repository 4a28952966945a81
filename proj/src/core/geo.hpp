#pragma once

#include <limits>
#include <vector>

namespace evrisk::geo {

struct GeoPoint {
  double latitude = 0.0;   // decimal degrees, WGS84
  double longitude = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool valid(const GeoPoint& p);

// Mean Earth radius pinned so distance tests are bit-stable.
inline constexpr double kEarthRadiusMiles = 3958.7613;

// Great-circle (haversine) distance in statute miles.
double geodesic_miles(const GeoPoint& a, const GeoPoint& b);

// Travel speed applies to the whole leg: any distance at or below
// `upto_miles` of the first matching band moves at that band's mph.
struct SpeedBand {
  double upto_miles;  // inclusive upper bound; infinity on the last band
  double mph;
};

struct CostParams {
  double knock_hours_per_unit = 0.1;
  std::vector<SpeedBand> speed_table = {
      {1.0, 4.0},
      {3.0, 15.0},
      {5.0, 30.0},
      {std::numeric_limits<double>::infinity(), 55.0},
  };

  void validate() const;  // throws std::invalid_argument
};

double speed_for_distance(double miles, const CostParams& params);

// Hours to traverse one leg of `miles`: distance over the band speed.
double leg_time(double miles, const CostParams& params);

// Hours to knock every unit at one property.
double knock_time(int units, const CostParams& params);

}  // namespace evrisk::geo
