#include "core/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "core/data_model.hpp"
#include "core/rng.hpp"

namespace evrisk::synth {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

std::string padded(const char* prefix, int value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, width, value);
  return buf;
}

void check(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("SyntheticConfig: ") + what);
}

struct OwnerDraft {
  std::string id;
  double badness = 0.0;
  bool is_business = false;
  data::LocationClass location = data::LocationClass::local;
  int preferred_attorney = 0;  // 0-based index into the attorney list
  int property_count = 1;
  bool is_owner_occupied = false;
};

}  // namespace

void SyntheticConfig::validate() const {
  check(property_count >= 1, "property_count must be at least 1");
  check(grid_size >= 1, "grid_size must be at least 1");
  check(lat_min < lat_max, "lat_min must be below lat_max");
  check(lon_min < lon_max, "lon_min must be below lon_max");
  check(lat_min >= -90.0 && lat_max <= 90.0, "latitude bounds out of range");
  check(lon_min >= -180.0 && lon_max <= 180.0, "longitude bounds out of range");
  check(horizon_months >= 2, "horizon_months must be at least 2");
  check(owner_count >= 1, "owner_count must be at least 1");
  check(attorney_count >= 1, "attorney_count must be at least 1");
  check(attorney_share >= 0.0 && attorney_share <= 1.0, "attorney_share must be in [0,1]");
  check(zipf_exponent > 0.0, "zipf_exponent must be positive");
  check(sigma_property >= 0.0, "sigma_property must be nonnegative");
  for (auto [value, name] : {std::pair{transfer_fraction, "transfer_fraction"},
                             {non_rental_fraction, "non_rental_fraction"},
                             {single_unit_fraction, "single_unit_fraction"},
                             {missing_rate, "missing_rate"},
                             {extra_filing_rate, "extra_filing_rate"}}) {
    check(value >= 0.0 && value <= 1.0, (std::string(name) + " must be in [0,1]").c_str());
  }
}

SyntheticData generate(const SyntheticConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  SyntheticData out;

  // --- block-group lattice with a smooth risk field ---------------------
  const int g = config.grid_size;
  const double cell_lat = (config.lat_max - config.lat_min) / g;
  const double cell_lon = (config.lon_max - config.lon_min) / g;
  struct Cell {
    std::string group_id;
    double group_risk = 0.0;
    std::array<double, 4> block_risk{};  // 2x2 blocks, index by*2+bx
  };
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(g) * g);
  constexpr double kPi = 3.14159265358979323846;
  for (int gy = 0; gy < g; ++gy) {
    for (int gx = 0; gx < g; ++gx) {
      const double u = (gx + 0.5) / g;
      const double v = (gy + 0.5) / g;
      const double z = 1.15 * std::sin(2.2 * kPi * u + 0.9) * std::cos(1.4 * kPi * v - 0.4) +
                       0.8 * (v - 0.5) + rng_normal(rng, 0.0, 0.25);
      Cell cell;
      cell.group_id = padded("G", gx, 2) + padded("", gy, 2);
      // Group index rises smoothly toward the field's crest; the per-block
      // draw below squashes hard, so individual blocks come out close to
      // binary (hot vs cool) with hot ones clustered near the crest plus a
      // scatter of hot blocks inside otherwise cool groups.
      cell.group_risk = sigmoid(2.2 * (z - 0.9));

      data::NeighborhoodRow group_fields;  // shared by the 4 blocks
      const double r = cell.group_risk;
      group_fields.median_household_income =
          std::max(12000.0, 92000.0 - 58000.0 * r + rng_normal(rng, 0.0, 4000.0));
      group_fields.median_gross_rent =
          std::max(350.0, 1450.0 - 520.0 * r + rng_normal(rng, 0.0, 60.0));
      group_fields.grapi = clamp01(0.22 + 0.20 * r + rng_normal(rng, 0.0, 0.02));
      group_fields.pct_renter_occupied = clamp01(0.25 + 0.45 * r + rng_normal(rng, 0.0, 0.03));
      group_fields.pct_renter_multi_occupant =
          clamp01(0.08 + 0.12 * r + rng_normal(rng, 0.0, 0.02));
      group_fields.pct_below_poverty = clamp01(0.06 + 0.30 * r + rng_normal(rng, 0.0, 0.02));
      group_fields.pct_with_mortgage = clamp01(0.70 - 0.35 * r + rng_normal(rng, 0.0, 0.03));
      group_fields.pct_snap_assistance = clamp01(0.05 + 0.35 * r + rng_normal(rng, 0.0, 0.02));
      group_fields.pct_health_insurance = clamp01(0.96 - 0.18 * r + rng_normal(rng, 0.0, 0.02));
      group_fields.pct_female_headed = clamp01(0.10 + 0.22 * r + rng_normal(rng, 0.0, 0.02));
      group_fields.pct_high_school = clamp01(0.95 - 0.25 * r + rng_normal(rng, 0.0, 0.02));
      group_fields.pct_veteran = clamp01(0.08 - 0.03 * r + rng_normal(rng, 0.0, 0.01));

      for (int b = 0; b < 4; ++b) {
        // Each block jitters the field and squashes hard, so block risk is
        // near-binary: crest groups are mostly hot, near-crest groups hold a
        // mix of hot and cool blocks, far groups are uniformly cool.
        const double zb = z + rng_normal(rng, 0.0, 0.3);
        const double rb = sigmoid(8.0 * (zb - 1.0));
        cell.block_risk[static_cast<std::size_t>(b)] = rb;
        data::NeighborhoodRow row = group_fields;
        row.block_id = cell.group_id + padded("B", b, 1);
        row.block_group_id = cell.group_id;
        row.pct_under_18 = clamp01(0.18 + 0.14 * rb + rng_normal(rng, 0.0, 0.02));
        row.pct_units_occupied = clamp01(0.95 - 0.18 * rb + rng_normal(rng, 0.0, 0.02));
        row.pct_white = clamp01(0.75 - 0.55 * rb + rng_normal(rng, 0.0, 0.04));
        row.pct_black = clamp01(0.12 + 0.55 * rb + rng_normal(rng, 0.0, 0.04));
        row.pct_hispanic = clamp01(0.05 + 0.04 * rb + rng_normal(rng, 0.0, 0.01));
        row.pct_other_race = clamp01(0.06 + 0.02 * rb + rng_normal(rng, 0.0, 0.01));
        for (const auto& meta : data::kNeighborhoodFields) {
          if (rng_bernoulli(rng, config.missing_rate)) row.*meta.member = std::nullopt;
        }
        out.neighborhoods.push_back(std::move(row));
      }
      cells.push_back(std::move(cell));
    }
  }

  // --- owners and their attorney habits ----------------------------------
  const int big_pool = std::max(1, config.owner_count / 30);
  std::vector<OwnerDraft> owners(static_cast<std::size_t>(config.owner_count));
  for (int i = 0; i < config.owner_count; ++i) {
    auto& o = owners[static_cast<std::size_t>(i)];
    o.id = padded("O", i, 4);
    const double u = rng_uniform(rng);
    o.badness = u * u;  // most owners rarely file
    o.is_business = i < big_pool || rng_bernoulli(rng, 0.2);
    const double loc = rng_uniform(rng);
    o.location = loc < 0.7  ? data::LocationClass::local
                 : loc < 0.9 ? data::LocationClass::in_state
                             : data::LocationClass::out_of_state;
    // Frequent filers gravitate toward the high-volume attorneys.
    const double mean_rank = 2.0 + 28.0 * (1.0 - o.badness);
    const double draw = -mean_rank * std::log(1.0 - rng_uniform(rng));
    o.preferred_attorney = std::min(config.attorney_count - 1, static_cast<int>(draw));
  }
  auto draw_owner = [&](Rng& r) {
    if (config.owner_count > big_pool && !rng_bernoulli(r, 0.25)) {
      return big_pool + static_cast<int>(rng_below(r, static_cast<std::uint64_t>(
                                                          config.owner_count - big_pool)));
    }
    return static_cast<int>(rng_below(r, static_cast<std::uint64_t>(big_pool)));
  };

  // Attorney market shares follow a Zipf curve over A01..Ann.
  std::vector<double> zipf_cum(static_cast<std::size_t>(config.attorney_count));
  double total = 0.0;
  for (int k = 0; k < config.attorney_count; ++k) {
    total += 1.0 / std::pow(k + 1.0, config.zipf_exponent);
    zipf_cum[static_cast<std::size_t>(k)] = total;
  }
  auto draw_attorney = [&](Rng& r) {
    const double u = rng_uniform(r) * total;
    const auto it = std::lower_bound(zipf_cum.begin(), zipf_cum.end(), u);
    return static_cast<int>(it - zipf_cum.begin());
  };
  auto attorney_id = [](int idx) { return padded("A", idx + 1, 2); };

  // --- properties ---------------------------------------------------------
  // Rentals cluster where risk is higher, so group choice is risk-weighted.
  std::vector<double> cell_cum(cells.size());
  double cell_total = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    cell_total += 0.5 + 0.4 * cells[i].group_risk;
    cell_cum[i] = cell_total;
  }

  struct PropertyDraft {
    std::size_t cell = 0;
    int block = 0;
    double block_risk = 0.0;
    int owner = 0;
    int new_owner = -1;      // set when the property transfers
    dates::Date transfer{};  // valid only when new_owner >= 0
    double noise = 0.0;      // per-property latent effect
  };
  std::vector<PropertyDraft> drafts(static_cast<std::size_t>(config.property_count));

  for (int p = 0; p < config.property_count; ++p) {
    auto& d = drafts[static_cast<std::size_t>(p)];
    data::PropertyRecord rec;
    rec.property_id = padded("P", p, 5);

    const double uc = rng_uniform(rng) * cell_total;
    d.cell = static_cast<std::size_t>(
        std::lower_bound(cell_cum.begin(), cell_cum.end(), uc) - cell_cum.begin());
    d.block = static_cast<int>(rng_below(rng, 4));
    d.block_risk = cells[d.cell].block_risk[static_cast<std::size_t>(d.block)];
    const auto gx = d.cell % static_cast<std::size_t>(g);
    const auto gy = d.cell / static_cast<std::size_t>(g);
    const int bx = d.block % 2;
    const int by = d.block / 2;
    const double lat0 = config.lat_min + (static_cast<double>(gy) + by * 0.5) * cell_lat;
    const double lon0 = config.lon_min + (static_cast<double>(gx) + bx * 0.5) * cell_lon;
    rec.location = {rng_uniform(rng, lat0, lat0 + cell_lat * 0.5),
                    rng_uniform(rng, lon0, lon0 + cell_lon * 0.5)};
    rec.block_group_id = cells[d.cell].group_id;
    rec.block_id = cells[d.cell].group_id + padded("B", d.block, 1);

    // Housing stock tilts toward mid-size multifamily buildings where the
    // risk index is high (renter-dense cores of older stock); buildings over
    // 40 units are rare everywhere and rarest in hot blocks.
    const double um = rng_uniform(rng);
    const double rsk = d.block_risk;
    const double c1 = 0.55 - 0.06 * rsk;
    const double c2 = c1 + 0.30;
    const double c3 = 0.99 + 0.005 * rsk;
    if (um < c1) {
      rec.units = 2 + static_cast<int>(rng_below(rng, 3));
    } else if (um < c2) {
      rec.units = 5 + static_cast<int>(rng_below(rng, 8));
    } else if (um < c3) {
      rec.units = 13 + static_cast<int>(rng_below(rng, 28));
    } else {
      rec.units = 41 + static_cast<int>(rng_below(rng, 80));
    }
    d.owner = draw_owner(rng);
    rec.is_rental = !rng_bernoulli(rng, config.non_rental_fraction);
    if (rec.is_rental && rng_bernoulli(rng, config.single_unit_fraction)) rec.units = 1;
    d.noise = rng_normal(rng, 0.0, config.sigma_property);
    out.properties.push_back(std::move(rec));
  }

  // --- tenures (one mid-horizon sale for a small slice) -------------------
  const int lo = std::min(4, config.horizon_months / 4);
  const int span = std::max(1, config.horizon_months - 2 * lo);
  for (int p = 0; p < config.property_count; ++p) {
    auto& d = drafts[static_cast<std::size_t>(p)];
    if (!rng_bernoulli(rng, config.transfer_fraction)) continue;
    const dates::Month m = config.start_month.plus(lo + static_cast<int>(rng_below(
                                                            rng, static_cast<std::uint64_t>(span))));
    const int day = 1 + static_cast<int>(rng_below(
                            rng, static_cast<std::uint64_t>(dates::days_in_month(m.year, m.month))));
    d.transfer = {m.year, m.month, day};
    int buyer = draw_owner(rng);
    if (buyer == d.owner) buyer = (buyer + 1) % config.owner_count;
    d.new_owner = buyer;
  }

  std::vector<int> holdings(owners.size(), 0);
  for (const auto& d : drafts) {
    ++holdings[static_cast<std::size_t>(d.new_owner >= 0 ? d.new_owner : d.owner)];
  }
  for (int p = 0; p < config.property_count; ++p) {
    const auto& d = drafts[static_cast<std::size_t>(p)];
    out.properties[static_cast<std::size_t>(p)].owner_id =
        owners[static_cast<std::size_t>(d.new_owner >= 0 ? d.new_owner : d.owner)].id;
  }
  for (std::size_t i = 0; i < owners.size(); ++i) {
    owners[i].property_count = std::max(1, holdings[i]);
    owners[i].is_owner_occupied = !owners[i].is_business && owners[i].property_count == 1 &&
                                  rng_bernoulli(rng, 0.35);
  }

  const dates::Date epoch{2020, 1, 1};
  for (int p = 0; p < config.property_count; ++p) {
    const auto& d = drafts[static_cast<std::size_t>(p)];
    const auto& prop = out.properties[static_cast<std::size_t>(p)];
    auto tenure_row = [&](const OwnerDraft& o, dates::Date start,
                          std::optional<dates::Date> end) {
      out.tenures.push_back({o.id, prop.property_id, start, end, o.is_business,
                             o.is_owner_occupied, o.property_count, o.location});
    };
    const auto& first = owners[static_cast<std::size_t>(d.owner)];
    if (d.new_owner >= 0) {
      tenure_row(first, epoch, d.transfer);
      tenure_row(owners[static_cast<std::size_t>(d.new_owner)], d.transfer, std::nullopt);
    } else {
      tenure_row(first, epoch, std::nullopt);
    }
  }

  // --- monthly filing process --------------------------------------------
  int next_case = 0;
  std::vector<int> last_filed_month(static_cast<std::size_t>(config.property_count), -1000);
  for (int m = 0; m < config.horizon_months; ++m) {
    const dates::Month month = config.start_month.plus(m);
    const int dim = dates::days_in_month(month.year, month.month);
    for (int p = 0; p < config.property_count; ++p) {
      const auto& prop = out.properties[static_cast<std::size_t>(p)];
      if (!prop.is_rental) continue;
      const auto& d = drafts[static_cast<std::size_t>(p)];
      const bool sold = d.new_owner >= 0 && dates::Month{d.transfer.year, d.transfer.month} <= month;
      const OwnerDraft& owner =
          owners[static_cast<std::size_t>(sold ? d.new_owner : d.owner)];
      const bool history = m - last_filed_month[static_cast<std::size_t>(p)] <= 3;
      const double logit = config.b0 +
                           config.b_log_units * d.block_risk * std::log(prop.units / 4.0) +
                           config.b_neighborhood * (d.block_risk - 0.5) +
                           config.b_owner * (owner.badness - 0.5) +
                           (history ? config.b_history : 0.0) + d.noise;
      if (!rng_bernoulli(rng, sigmoid(logit))) continue;
      int count = 1;
      if (prop.units >= 10 && rng_bernoulli(rng, config.extra_filing_rate)) count = 2;
      for (int k = 0; k < count; ++k) {
        data::EvictionFiling f;
        f.case_id = padded("C", next_case++, 6);
        f.property_id = prop.property_id;
        f.filing_date = {month.year, month.month,
                         1 + static_cast<int>(rng_below(rng, static_cast<std::uint64_t>(dim)))};
        if (rng_bernoulli(rng, config.attorney_share)) {
          const int idx = rng_bernoulli(rng, 0.8) ? owner.preferred_attorney : draw_attorney(rng);
          f.attorney_id = attorney_id(idx);
        }
        out.filings.push_back(std::move(f));
      }
      last_filed_month[static_cast<std::size_t>(p)] = m;
    }
  }

  // --- ground truth for rentals ------------------------------------------
  out.truth.b0 = config.b0;
  out.truth.b_log_units = config.b_log_units;
  out.truth.b_neighborhood = config.b_neighborhood;
  out.truth.b_owner = config.b_owner;
  out.truth.b_history = config.b_history;
  out.truth.sigma_property = config.sigma_property;
  for (int p = 0; p < config.property_count; ++p) {
    const auto& prop = out.properties[static_cast<std::size_t>(p)];
    if (!prop.is_rental) continue;
    const auto& d = drafts[static_cast<std::size_t>(p)];
    const auto& owner = owners[static_cast<std::size_t>(d.owner)];
    PropertyTruth t;
    t.property_id = prop.property_id;
    t.neigh_risk = d.block_risk;
    t.owner_badness = owner.badness;
    t.base_logit = config.b0 +
                   config.b_log_units * d.block_risk * std::log(prop.units / 4.0) +
                   config.b_neighborhood * (d.block_risk - 0.5) +
                   config.b_owner * (owner.badness - 0.5) + d.noise;
    t.monthly_prob = sigmoid(t.base_logit);
    out.truth.properties.push_back(std::move(t));
  }
  return out;
}

void write_all(const SyntheticData& data, const std::string& dir) {
  std::filesystem::create_directories(dir);
  data::write_properties(dir + "/properties.csv", data.properties);
  data::write_filings(dir + "/filings.csv", data.filings);
  data::write_neighborhoods(dir + "/neighborhoods.csv", data.neighborhoods);
  data::write_owner_tenures(dir + "/owners.csv", data.tenures);
}

}  // namespace evrisk::synth
