#include "core/data_model.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "core/csv.hpp"
#include "core/text.hpp"

namespace evrisk::data {
namespace {

std::optional<dates::Date> try_parse_date(const std::string& s) {
  try {
    return dates::Date::parse(s);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// Accumulates one row's field problems so a row is kept or dropped atomically.
struct RowCheck {
  std::size_t row;
  LoadReport& report;
  bool ok = true;

  void fail(const std::string& field, const std::string& message) {
    report.issues.push_back({row, field, message});
    ok = false;
  }

  std::string required(const std::vector<std::string>& fields, int col, const std::string& name) {
    const std::string& v = fields[static_cast<std::size_t>(col)];
    if (v.empty()) fail(name, "empty");
    return v;
  }

  std::optional<double> number(const std::string& v, const std::string& name) {
    if (v.empty()) {
      fail(name, "empty");
      return std::nullopt;
    }
    auto d = csv::to_double(v);
    if (!d) fail(name, "not a number");
    return d;
  }

  std::optional<int> integer(const std::string& v, const std::string& name) {
    if (v.empty()) {
      fail(name, "empty");
      return std::nullopt;
    }
    auto i = csv::to_int(v);
    if (!i) fail(name, "not an integer");
    return i;
  }

  std::optional<bool> boolean(const std::string& v, const std::string& name) {
    if (v.empty()) {
      fail(name, "empty");
      return std::nullopt;
    }
    auto b = csv::to_bool(v);
    if (!b) fail(name, "not a boolean");
    return b;
  }

  std::optional<dates::Date> date(const std::string& v, const std::string& name) {
    if (v.empty()) {
      fail(name, "empty");
      return std::nullopt;
    }
    auto d = try_parse_date(v);
    if (!d) fail(name, "bad date");
    return d;
  }
};

std::string bool_str(bool b) { return b ? "1" : "0"; }

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2.0;
}

}  // namespace

std::string location_class_str(LocationClass c) {
  switch (c) {
    case LocationClass::local: return "local";
    case LocationClass::in_state: return "in_state";
    case LocationClass::out_of_state: return "out_of_state";
  }
  throw std::logic_error("location_class_str: bad enum");
}

std::optional<LocationClass> parse_location_class(const std::string& s) {
  if (s == "local") return LocationClass::local;
  if (s == "in_state") return LocationClass::in_state;
  if (s == "out_of_state") return LocationClass::out_of_state;
  return std::nullopt;
}

std::string feature_set_str(FeatureSet s) {
  switch (s) {
    case FeatureSet::E: return "E";
    case FeatureSet::EN: return "EN";
    case FeatureSet::ENO: return "ENO";
  }
  throw std::logic_error("feature_set_str: bad enum");
}

std::optional<FeatureSet> parse_feature_set(const std::string& s) {
  if (s == "E") return FeatureSet::E;
  if (s == "EN") return FeatureSet::EN;
  if (s == "ENO") return FeatureSet::ENO;
  return std::nullopt;
}

Loaded<PropertyRecord> load_properties(const std::string& path, const PropertyFilters& filters) {
  const csv::Table t = csv::read_file(path);
  const int c_id = t.require_column("property_id", path);
  const int c_lat = t.require_column("latitude", path);
  const int c_lon = t.require_column("longitude", path);
  const int c_units = t.require_column("units", path);
  const int c_owner = t.require_column("owner_id", path);
  const int c_block = t.require_column("block_id", path);
  const int c_group = t.require_column("block_group_id", path);
  const int c_rental = t.require_column("is_rental", path);

  Loaded<PropertyRecord> out;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& fields = t.rows[i];
    ++out.report.rows_read;
    RowCheck check{i + 2, out.report};

    PropertyRecord rec;
    rec.property_id = check.required(fields, c_id, "property_id");
    if (!rec.property_id.empty() && !seen.insert(rec.property_id).second) {
      check.fail("property_id", "duplicate");
    }
    auto lat = check.number(fields[static_cast<std::size_t>(c_lat)], "latitude");
    auto lon = check.number(fields[static_cast<std::size_t>(c_lon)], "longitude");
    if (lat && lon) {
      rec.location = {*lat, *lon};
      if (!geo::valid(rec.location)) check.fail("latitude", "coordinates out of range");
    }
    if (auto units = check.integer(fields[static_cast<std::size_t>(c_units)], "units")) {
      rec.units = *units;
      if (rec.units < 1) check.fail("units", "must be at least 1");
    }
    rec.owner_id = check.required(fields, c_owner, "owner_id");
    rec.block_id = check.required(fields, c_block, "block_id");
    rec.block_group_id = check.required(fields, c_group, "block_group_id");
    if (auto rental = check.boolean(fields[static_cast<std::size_t>(c_rental)], "is_rental")) {
      rec.is_rental = *rental;
    }

    if (!check.ok) {
      ++out.report.rows_rejected;
      continue;
    }
    if ((filters.rentals_only && !rec.is_rental) || rec.units < filters.min_units) {
      ++out.report.rows_filtered;
      continue;
    }
    ++out.report.rows_loaded;
    out.records.push_back(std::move(rec));
  }
  return out;
}

Loaded<EvictionFiling> load_filings(const std::string& path) {
  const csv::Table t = csv::read_file(path);
  const int c_case = t.require_column("case_id", path);
  const int c_prop = t.require_column("property_id", path);
  const int c_date = t.require_column("filing_date", path);
  const int c_atty = t.require_column("attorney_id", path);

  Loaded<EvictionFiling> out;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& fields = t.rows[i];
    ++out.report.rows_read;
    RowCheck check{i + 2, out.report};

    EvictionFiling rec;
    rec.case_id = check.required(fields, c_case, "case_id");
    if (!rec.case_id.empty() && !seen.insert(rec.case_id).second) {
      check.fail("case_id", "duplicate");
    }
    rec.property_id = check.required(fields, c_prop, "property_id");
    if (auto d = check.date(fields[static_cast<std::size_t>(c_date)], "filing_date")) {
      rec.filing_date = *d;
    }
    rec.attorney_id = fields[static_cast<std::size_t>(c_atty)];  // empty = none recorded

    if (!check.ok) {
      ++out.report.rows_rejected;
      continue;
    }
    ++out.report.rows_loaded;
    out.records.push_back(std::move(rec));
  }
  return out;
}

Loaded<NeighborhoodRow> load_neighborhoods(const std::string& path) {
  const csv::Table t = csv::read_file(path);
  const int c_block = t.require_column("block_id", path);
  const int c_group = t.require_column("block_group_id", path);
  std::array<int, kNeighborhoodFields.size()> cols{};
  for (std::size_t f = 0; f < kNeighborhoodFields.size(); ++f) {
    cols[f] = t.require_column(kNeighborhoodFields[f].name, path);
  }

  Loaded<NeighborhoodRow> out;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& fields = t.rows[i];
    ++out.report.rows_read;
    RowCheck check{i + 2, out.report};

    NeighborhoodRow rec;
    rec.block_id = check.required(fields, c_block, "block_id");
    if (!rec.block_id.empty() && !seen.insert(rec.block_id).second) {
      check.fail("block_id", "duplicate");
    }
    rec.block_group_id = check.required(fields, c_group, "block_group_id");
    for (std::size_t f = 0; f < kNeighborhoodFields.size(); ++f) {
      const auto& meta = kNeighborhoodFields[f];
      const std::string& v = fields[static_cast<std::size_t>(cols[f])];
      if (v.empty()) continue;  // genuinely missing, imputed downstream
      auto d = csv::to_double(v);
      if (!d) {
        check.fail(meta.name, "not a number");
        continue;
      }
      if (meta.is_rate ? (*d < 0.0 || *d > 1.0) : (*d < 0.0)) {
        check.fail(meta.name, "out of range");
        continue;
      }
      rec.*meta.member = *d;
    }

    if (!check.ok) {
      ++out.report.rows_rejected;
      continue;
    }
    ++out.report.rows_loaded;
    out.records.push_back(std::move(rec));
  }
  return out;
}

Loaded<OwnerTenure> load_owner_tenures(const std::string& path) {
  const csv::Table t = csv::read_file(path);
  const int c_owner = t.require_column("owner_id", path);
  const int c_prop = t.require_column("property_id", path);
  const int c_start = t.require_column("start_date", path);
  const int c_end = t.require_column("end_date", path);
  const int c_bus = t.require_column("is_business", path);
  const int c_occ = t.require_column("is_owner_occupied", path);
  const int c_count = t.require_column("property_count", path);
  const int c_loc = t.require_column("location_class", path);

  Loaded<OwnerTenure> out;
  std::vector<std::size_t> row_of;  // source row per accepted record
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& fields = t.rows[i];
    ++out.report.rows_read;
    RowCheck check{i + 2, out.report};

    OwnerTenure rec;
    rec.owner_id = check.required(fields, c_owner, "owner_id");
    rec.property_id = check.required(fields, c_prop, "property_id");
    if (auto d = check.date(fields[static_cast<std::size_t>(c_start)], "start_date")) {
      rec.start_date = *d;
    }
    const std::string& end_text = fields[static_cast<std::size_t>(c_end)];
    if (!end_text.empty()) {
      auto d = try_parse_date(end_text);
      if (!d) {
        check.fail("end_date", "bad date");
      } else if (check.ok && *d < rec.start_date) {
        check.fail("end_date", "before start_date");
      } else {
        rec.end_date = *d;
      }
    }
    if (auto b = check.boolean(fields[static_cast<std::size_t>(c_bus)], "is_business")) {
      rec.is_business = *b;
    }
    if (auto b = check.boolean(fields[static_cast<std::size_t>(c_occ)], "is_owner_occupied")) {
      rec.is_owner_occupied = *b;
    }
    if (auto n = check.integer(fields[static_cast<std::size_t>(c_count)], "property_count")) {
      rec.property_count = *n;
      if (rec.property_count < 1) check.fail("property_count", "must be at least 1");
    }
    const std::string& loc = fields[static_cast<std::size_t>(c_loc)];
    if (auto lc = parse_location_class(loc)) {
      rec.location_class = *lc;
    } else {
      check.fail("location_class", "must be local, in_state, or out_of_state");
    }

    if (!check.ok) {
      ++out.report.rows_rejected;
      continue;
    }
    out.records.push_back(std::move(rec));
    row_of.push_back(i + 2);
  }

  // Cross-row check: within one property, tenures may touch only on a
  // transfer day. Later rows (by start date) lose when they collide.
  std::unordered_map<std::string, std::vector<std::size_t>> per_property;
  for (std::size_t r = 0; r < out.records.size(); ++r) {
    per_property[out.records[r].property_id].push_back(r);
  }
  std::vector<bool> drop(out.records.size(), false);
  for (auto& [pid, idx] : per_property) {
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const auto& ta = out.records[a];
      const auto& tb = out.records[b];
      if (ta.start_date != tb.start_date) return ta.start_date < tb.start_date;
      return row_of[a] < row_of[b];
    });
    std::size_t prev = idx[0];
    for (std::size_t k = 1; k < idx.size(); ++k) {
      const std::size_t cur = idx[k];
      const auto& pt = out.records[prev];
      const auto& ct = out.records[cur];
      const bool overlaps =
          !pt.end_date || ct.start_date < *pt.end_date || ct.start_date == pt.start_date;
      if (overlaps) {
        out.report.issues.push_back({row_of[cur], "start_date", "overlaps another tenure"});
        drop[cur] = true;
        continue;  // keep comparing against the surviving tenure
      }
      prev = cur;
    }
  }
  std::vector<OwnerTenure> kept;
  kept.reserve(out.records.size());
  for (std::size_t r = 0; r < out.records.size(); ++r) {
    if (drop[r]) {
      ++out.report.rows_rejected;
    } else {
      kept.push_back(std::move(out.records[r]));
      ++out.report.rows_loaded;
    }
  }
  out.records = std::move(kept);
  return out;
}

void write_properties(const std::string& path, std::span<const PropertyRecord> records) {
  csv::Table t;
  t.header = {"property_id", "latitude",  "longitude",      "units",
              "owner_id",    "block_id",  "block_group_id", "is_rental"};
  for (const auto& r : records) {
    t.rows.push_back({r.property_id, text::format_double(r.location.latitude),
                      text::format_double(r.location.longitude), std::to_string(r.units),
                      r.owner_id, r.block_id, r.block_group_id, bool_str(r.is_rental)});
  }
  csv::write_file(path, t);
}

void write_filings(const std::string& path, std::span<const EvictionFiling> records) {
  csv::Table t;
  t.header = {"case_id", "property_id", "filing_date", "attorney_id"};
  for (const auto& r : records) {
    t.rows.push_back({r.case_id, r.property_id, r.filing_date.str(), r.attorney_id});
  }
  csv::write_file(path, t);
}

void write_neighborhoods(const std::string& path, std::span<const NeighborhoodRow> records) {
  csv::Table t;
  t.header = {"block_id", "block_group_id"};
  for (const auto& meta : kNeighborhoodFields) t.header.push_back(meta.name);
  for (const auto& r : records) {
    std::vector<std::string> row = {r.block_id, r.block_group_id};
    for (const auto& meta : kNeighborhoodFields) {
      const auto& v = r.*meta.member;
      row.push_back(v ? text::format_double(*v) : std::string{});
    }
    t.rows.push_back(std::move(row));
  }
  csv::write_file(path, t);
}

void write_owner_tenures(const std::string& path, std::span<const OwnerTenure> records) {
  csv::Table t;
  t.header = {"owner_id",    "property_id",       "start_date",     "end_date",
              "is_business", "is_owner_occupied", "property_count", "location_class"};
  for (const auto& r : records) {
    t.rows.push_back({r.owner_id, r.property_id, r.start_date.str(),
                      r.end_date ? r.end_date->str() : std::string{}, bool_str(r.is_business),
                      bool_str(r.is_owner_occupied), std::to_string(r.property_count),
                      location_class_str(r.location_class)});
  }
  csv::write_file(path, t);
}

OwnershipIndex::OwnershipIndex(std::span<const OwnerTenure> tenures) {
  for (const auto& t : tenures) by_property_[t.property_id].push_back(t);
  for (auto& [pid, list] : by_property_) {
    std::sort(list.begin(), list.end(), [](const OwnerTenure& a, const OwnerTenure& b) {
      return a.start_date < b.start_date;
    });
    for (std::size_t i = 1; i < list.size(); ++i) {
      const auto& prev = list[i - 1];
      const auto& cur = list[i];
      const bool overlaps = !prev.end_date || cur.start_date < *prev.end_date ||
                            cur.start_date == prev.start_date;
      if (overlaps) {
        throw std::invalid_argument("OwnershipIndex: overlapping tenures for property " + pid);
      }
    }
  }
}

const OwnerTenure* OwnershipIndex::owner_at(const std::string& property_id,
                                            const dates::Date& d) const {
  auto it = by_property_.find(property_id);
  if (it == by_property_.end()) return nullptr;
  const OwnerTenure* best = nullptr;
  for (const auto& t : it->second) {
    if (t.start_date > d) break;  // sorted by start; nothing later can contain d
    if (!t.end_date || d <= *t.end_date) best = &t;  // later start wins a transfer day
  }
  return best;
}

std::vector<AttorneyRank> rank_attorneys(std::span<const EvictionFiling> filings,
                                         const dates::MonthWindow& window) {
  window.validate();
  std::map<std::string, std::size_t> counts;
  for (const auto& f : filings) {
    if (f.attorney_id.empty() || !window.contains(f.filing_date)) continue;
    ++counts[f.attorney_id];
  }
  std::vector<AttorneyRank> out;
  out.reserve(counts.size());
  for (const auto& [id, n] : counts) out.push_back({id, n});
  std::sort(out.begin(), out.end(), [](const AttorneyRank& a, const AttorneyRank& b) {
    if (a.filings != b.filings) return a.filings > b.filings;
    return a.attorney_id < b.attorney_id;
  });
  return out;
}

AttorneyFlags owner_attorney_flags(const std::string& owner_id,
                                   std::span<const EvictionFiling> filings,
                                   const dates::MonthWindow& window,
                                   const OwnershipIndex& ownership,
                                   std::span<const AttorneyRank> ranking) {
  std::unordered_map<std::string, std::size_t> rank_of;  // 1-based
  for (std::size_t i = 0; i < ranking.size() && i < 50; ++i) {
    rank_of.emplace(ranking[i].attorney_id, i + 1);
  }
  AttorneyFlags flags;
  for (const auto& f : filings) {
    if (f.attorney_id.empty() || !window.contains(f.filing_date)) continue;
    auto it = rank_of.find(f.attorney_id);
    if (it == rank_of.end()) continue;
    const OwnerTenure* t = ownership.owner_at(f.property_id, f.filing_date);
    if (!t || t->owner_id != owner_id) continue;
    if (it->second <= 25) {
      flags.top25 = true;
    } else {
      flags.top26to50 = true;
    }
    if (flags.top25 && flags.top26to50) break;
  }
  return flags;
}

std::vector<std::string> feature_columns(FeatureSet set, int feature_months) {
  if (feature_months < 1) {
    throw std::invalid_argument("feature_columns: feature_months must be at least 1");
  }
  std::vector<std::string> cols;
  for (int m = 1; m <= feature_months; ++m) {
    cols.push_back("filings_month_" + std::to_string(m));
  }
  const int quarters = (feature_months + 2) / 3;
  for (int q = 1; q <= quarters; ++q) {
    cols.push_back("filings_quarter_" + std::to_string(q));
  }
  if (set == FeatureSet::E) return cols;
  for (const auto& meta : kNeighborhoodFields) cols.push_back(meta.name);
  if (set == FeatureSet::EN) return cols;
  cols.insert(cols.end(), {"units", "owner_property_count", "owner_is_business",
                           "owner_occupied", "attorney_top25", "attorney_top26to50",
                           "owner_local", "owner_in_state", "owner_out_of_state"});
  return cols;
}

LabeledDataset build_dataset(std::span<const PropertyRecord> properties,
                             std::span<const EvictionFiling> filings,
                             std::span<const NeighborhoodRow> neighborhoods,
                             const OwnershipIndex& ownership,
                             const dates::WindowPair& windows,
                             FeatureSet feature_set) {
  windows.validate();
  const int months = windows.feature.length();
  const std::size_t n = properties.size();

  LabeledDataset ds;
  ds.feature_set = feature_set;
  ds.windows = windows;
  ds.columns = feature_columns(feature_set, months);
  ds.property_ids.reserve(n);
  for (const auto& p : properties) ds.property_ids.push_back(p.property_id);
  ds.labels.assign(n, 0);
  ds.data.assign(n * ds.columns.size(), 0.0);

  std::unordered_map<std::string, std::size_t> row_of;
  row_of.reserve(n);
  for (std::size_t i = 0; i < n; ++i) row_of.emplace(properties[i].property_id, i);

  // Filing pass: per-month counts inside the feature window, labels from the
  // label window. Filings against properties outside the universe are ignored.
  std::vector<std::vector<int>> month_counts(n, std::vector<int>(static_cast<std::size_t>(months), 0));
  for (const auto& f : filings) {
    auto it = row_of.find(f.property_id);
    if (it == row_of.end()) continue;
    if (windows.feature.contains(f.filing_date)) {
      ++month_counts[it->second][static_cast<std::size_t>(
          windows.feature.offset(f.filing_date.month_of()))];
    } else if (windows.label.contains(f.filing_date)) {
      ds.labels[it->second] = 1;
    }
  }

  const std::size_t width = ds.columns.size();
  const int quarters = (months + 2) / 3;
  for (std::size_t i = 0; i < n; ++i) {
    double* row = ds.data.data() + i * width;
    for (int m = 0; m < months; ++m) {
      row[static_cast<std::size_t>(m)] = month_counts[i][static_cast<std::size_t>(m)];
    }
    for (int q = 0; q < quarters; ++q) {
      double sum = 0.0;
      for (int m = q * 3; m < std::min(months, q * 3 + 3); ++m) {
        sum += month_counts[i][static_cast<std::size_t>(m)];
      }
      row[static_cast<std::size_t>(months + q)] = sum;
    }
  }
  std::size_t col = static_cast<std::size_t>(months + quarters);

  // Imputation shared by the neighborhood and owner blocks: fill absent cells
  // with the median over present ones and count what was filled.
  auto impute_column = [&](std::size_t c, std::vector<std::optional<double>>& raw) {
    std::vector<double> present;
    present.reserve(raw.size());
    for (const auto& v : raw) {
      if (v) present.push_back(*v);
    }
    const double fill = median_of(std::move(present));
    std::size_t filled = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double* row = ds.data.data() + i * width;
      if (raw[i]) {
        row[c] = *raw[i];
      } else {
        row[c] = fill;
        ++filled;
      }
    }
    if (filled > 0) ds.quality.imputed[ds.columns[c]] += filled;
  };

  if (feature_set == FeatureSet::EN || feature_set == FeatureSet::ENO) {
    std::unordered_map<std::string, const NeighborhoodRow*> by_block;
    by_block.reserve(neighborhoods.size());
    for (const auto& nb : neighborhoods) by_block.emplace(nb.block_id, &nb);

    std::vector<const NeighborhoodRow*> joined(n, nullptr);
    for (std::size_t i = 0; i < n; ++i) {
      auto it = by_block.find(properties[i].block_id);
      if (it != by_block.end()) {
        joined[i] = it->second;
      } else {
        ++ds.quality.properties_missing_neighborhood;
      }
    }
    std::vector<std::optional<double>> raw(n);
    for (const auto& meta : kNeighborhoodFields) {
      for (std::size_t i = 0; i < n; ++i) {
        raw[i] = joined[i] ? joined[i]->*meta.member : std::nullopt;
      }
      impute_column(col, raw);
      ++col;
    }
  }

  if (feature_set == FeatureSet::ENO) {
    const dates::Date resolve = dates::last_day(windows.feature.end);
    std::vector<const OwnerTenure*> tenure(n, nullptr);
    for (std::size_t i = 0; i < n; ++i) {
      tenure[i] = ownership.owner_at(properties[i].property_id, resolve);
      if (!tenure[i]) ++ds.quality.properties_missing_owner;
    }

    // One filing pass covers every owner's attorney flags.
    const std::vector<AttorneyRank> ranking = rank_attorneys(filings, windows.feature);
    std::unordered_map<std::string, std::size_t> rank_of;
    for (std::size_t r = 0; r < ranking.size() && r < 50; ++r) {
      rank_of.emplace(ranking[r].attorney_id, r + 1);
    }
    std::unordered_map<std::string, AttorneyFlags> flags_of;
    for (const auto& f : filings) {
      if (f.attorney_id.empty() || !windows.feature.contains(f.filing_date)) continue;
      auto it = rank_of.find(f.attorney_id);
      if (it == rank_of.end()) continue;
      const OwnerTenure* t = ownership.owner_at(f.property_id, f.filing_date);
      if (!t) continue;
      auto& flags = flags_of[t->owner_id];
      (it->second <= 25 ? flags.top25 : flags.top26to50) = true;
    }

    for (std::size_t i = 0; i < n; ++i) {
      ds.data[i * width + col] = properties[i].units;
    }
    ++col;
    std::vector<std::optional<double>> raw(n);
    for (std::size_t i = 0; i < n; ++i) {
      raw[i] = tenure[i] ? std::optional<double>(tenure[i]->property_count) : std::nullopt;
    }
    impute_column(col, raw);
    ++col;
    for (std::size_t i = 0; i < n; ++i) {
      double* row = ds.data.data() + i * width;
      const OwnerTenure* t = tenure[i];
      AttorneyFlags flags;
      if (t) {
        auto it = flags_of.find(t->owner_id);
        if (it != flags_of.end()) flags = it->second;
      }
      row[col + 0] = t && t->is_business ? 1.0 : 0.0;
      row[col + 1] = t && t->is_owner_occupied ? 1.0 : 0.0;
      row[col + 2] = flags.top25 ? 1.0 : 0.0;
      row[col + 3] = flags.top26to50 ? 1.0 : 0.0;
      row[col + 4] = t && t->location_class == LocationClass::local ? 1.0 : 0.0;
      row[col + 5] = t && t->location_class == LocationClass::in_state ? 1.0 : 0.0;
      row[col + 6] = t && t->location_class == LocationClass::out_of_state ? 1.0 : 0.0;
    }
    col += 7;
  }

  if (col != width) throw std::logic_error("build_dataset: column layout mismatch");
  return ds;
}

double base_rate(const LabeledDataset& ds) {
  if (ds.rows() == 0) throw std::invalid_argument("base_rate: empty dataset");
  std::size_t pos = 0;
  for (int y : ds.labels) pos += static_cast<std::size_t>(y);
  return static_cast<double>(pos) / static_cast<double>(ds.rows());
}

}  // namespace evrisk::data
