#pragma once

#include <array>
#include <optional>
#include <string>

#include "core/dates.hpp"
#include "core/geo.hpp"

namespace evrisk::data {

struct PropertyRecord {
  std::string property_id;
  geo::GeoPoint location;
  int units = 0;
  std::string owner_id;  // owner of record at the end of the data horizon
  std::string block_id;
  std::string block_group_id;
  bool is_rental = true;
};

struct EvictionFiling {
  std::string case_id;
  std::string property_id;
  dates::Date filing_date;
  std::string attorney_id;  // empty when no attorney was recorded
};

enum class LocationClass { local, in_state, out_of_state };

std::string location_class_str(LocationClass c);
std::optional<LocationClass> parse_location_class(const std::string& s);

// One ownership interval for one property. Days are inclusive on both ends;
// an absent end means ownership continues past the data horizon.
struct OwnerTenure {
  std::string owner_id;
  std::string property_id;
  dates::Date start_date;
  std::optional<dates::Date> end_date;
  bool is_business = false;
  bool is_owner_occupied = false;
  int property_count = 1;  // properties held regionally by this owner
  LocationClass location_class = LocationClass::local;
};

// Census block and block-group attributes, one row per block. Absent optionals
// are genuinely missing upstream and get imputed (and counted) downstream.
struct NeighborhoodRow {
  std::string block_id;
  std::string block_group_id;
  // decennial block fields
  std::optional<double> pct_under_18;
  std::optional<double> pct_units_occupied;
  std::optional<double> pct_white;
  std::optional<double> pct_black;
  std::optional<double> pct_hispanic;
  std::optional<double> pct_other_race;
  // ACS block-group fields
  std::optional<double> median_household_income;
  std::optional<double> median_gross_rent;
  std::optional<double> grapi;  // gross rent as a share of household income
  std::optional<double> pct_renter_occupied;
  std::optional<double> pct_renter_multi_occupant;
  std::optional<double> pct_below_poverty;
  std::optional<double> pct_with_mortgage;
  std::optional<double> pct_snap_assistance;
  std::optional<double> pct_health_insurance;
  std::optional<double> pct_female_headed;
  std::optional<double> pct_high_school;
  std::optional<double> pct_veteran;
};

struct NeighborhoodField {
  const char* name;
  std::optional<double> NeighborhoodRow::* member;
  bool is_rate;  // rate fields live in [0,1]; level fields only need to be >= 0
};

// Fixed column order used everywhere a neighborhood vector appears.
inline constexpr std::array<NeighborhoodField, 18> kNeighborhoodFields{{
    {"pct_under_18", &NeighborhoodRow::pct_under_18, true},
    {"pct_units_occupied", &NeighborhoodRow::pct_units_occupied, true},
    {"pct_white", &NeighborhoodRow::pct_white, true},
    {"pct_black", &NeighborhoodRow::pct_black, true},
    {"pct_hispanic", &NeighborhoodRow::pct_hispanic, true},
    {"pct_other_race", &NeighborhoodRow::pct_other_race, true},
    {"median_household_income", &NeighborhoodRow::median_household_income, false},
    {"median_gross_rent", &NeighborhoodRow::median_gross_rent, false},
    {"grapi", &NeighborhoodRow::grapi, true},
    {"pct_renter_occupied", &NeighborhoodRow::pct_renter_occupied, true},
    {"pct_renter_multi_occupant", &NeighborhoodRow::pct_renter_multi_occupant, true},
    {"pct_below_poverty", &NeighborhoodRow::pct_below_poverty, true},
    {"pct_with_mortgage", &NeighborhoodRow::pct_with_mortgage, true},
    {"pct_snap_assistance", &NeighborhoodRow::pct_snap_assistance, true},
    {"pct_health_insurance", &NeighborhoodRow::pct_health_insurance, true},
    {"pct_female_headed", &NeighborhoodRow::pct_female_headed, true},
    {"pct_high_school", &NeighborhoodRow::pct_high_school, true},
    {"pct_veteran", &NeighborhoodRow::pct_veteran, true},
}};

enum class FeatureSet { E, EN, ENO };

std::string feature_set_str(FeatureSet s);
std::optional<FeatureSet> parse_feature_set(const std::string& s);

}  // namespace evrisk::data
