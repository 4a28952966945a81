#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace evrisk::data {

// One rejected or filtered input row. `row` is the 1-based line number in the
// file including the header, so row 2 is the first data row.
struct RowIssue {
  std::size_t row = 0;
  std::string field;
  std::string message;
};

struct LoadReport {
  std::size_t rows_read = 0;      // data rows seen
  std::size_t rows_loaded = 0;    // rows that became records
  std::size_t rows_rejected = 0;  // malformed rows (each has an issue)
  std::size_t rows_filtered = 0;  // valid rows dropped by a filter
  std::vector<RowIssue> issues;
};

template <typename T>
struct Loaded {
  std::vector<T> records;
  LoadReport report;
};

// Universe filter applied while loading properties: the program only reasons
// about rental buildings with at least `min_units` units.
struct PropertyFilters {
  int min_units = 2;
  bool rentals_only = true;
};

Loaded<PropertyRecord> load_properties(const std::string& path,
                                       const PropertyFilters& filters = {});
Loaded<EvictionFiling> load_filings(const std::string& path);
Loaded<NeighborhoodRow> load_neighborhoods(const std::string& path);
Loaded<OwnerTenure> load_owner_tenures(const std::string& path);

void write_properties(const std::string& path, std::span<const PropertyRecord> records);
void write_filings(const std::string& path, std::span<const EvictionFiling> records);
void write_neighborhoods(const std::string& path, std::span<const NeighborhoodRow> records);
void write_owner_tenures(const std::string& path, std::span<const OwnerTenure> records);

// Answers "who owned property X on day D". Tenure ends are inclusive; on a
// same-day transfer the tenure that starts that day wins. Construction throws
// std::invalid_argument if two tenures for one property overlap by more than
// the transfer day, or if an open-ended tenure is followed by another.
class OwnershipIndex {
 public:
  OwnershipIndex() = default;
  explicit OwnershipIndex(std::span<const OwnerTenure> tenures);

  // nullptr when nobody holds the property that day.
  const OwnerTenure* owner_at(const std::string& property_id, const dates::Date& d) const;
  std::size_t property_count() const { return by_property_.size(); }

 private:
  std::map<std::string, std::vector<OwnerTenure>> by_property_;
};

struct AttorneyRank {
  std::string attorney_id;
  std::size_t filings = 0;
};

// Attorneys ordered by filing count in the window, descending; equal counts
// break lexicographically by attorney id. Filings without an attorney are
// skipped. Rank is 1-based position in the returned vector.
std::vector<AttorneyRank> rank_attorneys(std::span<const EvictionFiling> filings,
                                         const dates::MonthWindow& window);

struct AttorneyFlags {
  bool top25 = false;
  bool top26to50 = false;
};

// Whether `owner_id` filed at least one eviction in the window through an
// attorney ranked 1-25 (or 26-50). The filer of a case is whoever held the
// property on the filing date. Both flags can be true; an owner with no
// attributable filings gets neither.
AttorneyFlags owner_attorney_flags(const std::string& owner_id,
                                   std::span<const EvictionFiling> filings,
                                   const dates::MonthWindow& window,
                                   const OwnershipIndex& ownership,
                                   std::span<const AttorneyRank> ranking);

struct DataQuality {
  // column name -> number of cells filled by imputation
  std::map<std::string, std::size_t> imputed;
  std::size_t properties_missing_neighborhood = 0;
  std::size_t properties_missing_owner = 0;
};

// Design-matrix view of one feature/label window pair. `data` is row-major
// with rows() x columns.size() cells; labels[i] is 1 when property i has at
// least one filing in the label window.
struct LabeledDataset {
  FeatureSet feature_set = FeatureSet::E;
  dates::WindowPair windows;
  std::vector<std::string> columns;
  std::vector<std::string> property_ids;
  std::vector<double> data;
  std::vector<int> labels;
  DataQuality quality;

  std::size_t rows() const { return property_ids.size(); }
  double at(std::size_t row, std::size_t col) const {
    return data[row * columns.size() + col];
  }
};

// Column names for a feature set given the feature-window length in months:
// per-month filing counts, then 3-month block subtotals (last block may cover
// fewer months), then the neighborhood and owner blocks as the set widens.
std::vector<std::string> feature_columns(FeatureSet set, int feature_months);

// Assembles features from the feature window and labels from the label
// window. Missing neighborhood and owner numerics are imputed with the column
// median over present values (counted per column in the quality report);
// missing booleans and one-hot cells become 0. Attorney ranks are computed
// from filings inside the feature window. Owner attributes resolve on the
// last day of the feature window.
LabeledDataset build_dataset(std::span<const PropertyRecord> properties,
                             std::span<const EvictionFiling> filings,
                             std::span<const NeighborhoodRow> neighborhoods,
                             const OwnershipIndex& ownership,
                             const dates::WindowPair& windows,
                             FeatureSet feature_set);

// Share of positive labels; throws std::invalid_argument on an empty dataset.
double base_rate(const LabeledDataset& ds);

}  // namespace evrisk::data
