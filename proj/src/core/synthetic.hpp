#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace evrisk::synth {

// Knobs for the generator. Filing behavior follows a logistic latent-risk
// model: each rental property fires at most one filing event per month with
// probability sigmoid(b0 + b_log_units*(0.16 + 0.84*risk)*ln(units/4)
// + b_neighborhood*(risk-0.5) + b_owner*(badness-0.5)
// + b_history*[filed in the prior 3 months] + e_p),
// where e_p ~ N(0, sigma_property) is a fixed per-property effect. Building
// size amplifies risk where the block is already distressed (mid-size and
// large complexes in troubled pockets dominate filings), so the log-unit
// slope scales with the block risk index, which is itself near-binary:
// blocks are hot or cool, with hot ones clustered around a geographic crest
// plus a scatter inside otherwise cool groups.
struct SyntheticConfig {
  int property_count = 2000;
  int grid_size = 12;        // block groups form a grid_size^2 lattice
  double lat_min = 38.55;    // bounding box the lattice tiles
  double lat_max = 38.75;
  double lon_min = -90.45;
  double lon_max = -90.15;

  dates::Month start_month{2023, 1};
  int horizon_months = 17;

  double b0 = -4.56;
  double b_log_units = 0.74;
  double b_neighborhood = 0.71;
  double b_owner = 0.7;
  double b_history = 0.5;
  double sigma_property = 0.15;

  int owner_count = 900;
  int attorney_count = 60;
  double attorney_share = 0.75;      // filings that record an attorney
  double zipf_exponent = 1.1;        // attorney market concentration
  double transfer_fraction = 0.05;   // properties sold once mid-horizon
  double non_rental_fraction = 0.04; // rows the rental filter should drop
  double single_unit_fraction = 0.04;// rows the unit filter should drop
  double missing_rate = 0.02;        // neighborhood cells left blank
  double extra_filing_rate = 0.3;    // chance a fired month at a large
                                     // building yields a second filing

  void validate() const;  // throws std::invalid_argument
};

// What the generator knows that a model must rediscover.
struct PropertyTruth {
  std::string property_id;
  double base_logit = 0.0;    // latent logit excluding the history term
  double monthly_prob = 0.0;  // sigmoid(base_logit)
  double neigh_risk = 0.0;    // block-group risk index in (0,1)
  double owner_badness = 0.0; // initial owner's propensity in [0,1]
};

struct SyntheticTruth {
  double b0 = 0.0;
  double b_log_units = 0.0;
  double b_neighborhood = 0.0;
  double b_owner = 0.0;
  double b_history = 0.0;
  double sigma_property = 0.0;
  std::vector<PropertyTruth> properties;  // rental properties only
};

struct SyntheticData {
  std::vector<data::PropertyRecord> properties;
  std::vector<data::EvictionFiling> filings;
  std::vector<data::NeighborhoodRow> neighborhoods;
  std::vector<data::OwnerTenure> tenures;
  SyntheticTruth truth;
};

// Deterministic in (config, seed). Non-rental and single-unit rows appear in
// `properties` so loader filters have work to do; filings are generated for
// every rental property, including single-unit ones outside the modeling
// universe.
SyntheticData generate(const SyntheticConfig& config, std::uint64_t seed);

// Writes properties.csv, filings.csv, neighborhoods.csv, owners.csv.
void write_all(const SyntheticData& data, const std::string& dir);

}  // namespace evrisk::synth
