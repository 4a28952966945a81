#include <doctest.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "core/data_model.hpp"

using namespace evrisk;
using namespace evrisk::data;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("evrisk_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

PropertyRecord make_property(const std::string& id, double lat, double lon, int units,
                             const std::string& owner, const std::string& block,
                             const std::string& group, bool rental = true) {
  return {id, {lat, lon}, units, owner, block, group, rental};
}

bool has_issue(const LoadReport& report, std::size_t row, const std::string& field) {
  for (const auto& issue : report.issues) {
    if (issue.row == row && issue.field == field) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("property loader round-trips and filters the universe") {
  TempDir dir("props");
  std::vector<PropertyRecord> recs = {
      make_property("P1", 38.6, -90.2, 4, "O1", "B1", "G1"),
      make_property("P2", 38.61, -90.21, 1, "O1", "B1", "G1"),          // single unit
      make_property("P3", 38.62, -90.22, 10, "O2", "B2", "G1", false),  // not a rental
      make_property("P4", 38.63, -90.23, 2, "O3", "B2", "G1"),
  };
  write_properties(dir.file("p.csv"), recs);

  auto loaded = load_properties(dir.file("p.csv"));
  CHECK(loaded.report.rows_read == 4);
  CHECK(loaded.report.rows_loaded == 2);
  CHECK(loaded.report.rows_filtered == 2);
  CHECK(loaded.report.rows_rejected == 0);
  REQUIRE(loaded.records.size() == 2);
  CHECK(loaded.records[0].property_id == "P1");
  CHECK(loaded.records[1].property_id == "P4");
  CHECK(loaded.records[0].location.latitude == doctest::Approx(38.6));
  CHECK(loaded.records[0].units == 4);
  CHECK(loaded.records[0].block_group_id == "G1");

  auto keep_all = load_properties(dir.file("p.csv"), {.min_units = 1, .rentals_only = false});
  CHECK(keep_all.records.size() == 4);
}

TEST_CASE("property loader rejects malformed rows with row and field named") {
  TempDir dir("props_bad");
  write_text(dir.file("p.csv"),
             "property_id,latitude,longitude,units,owner_id,block_id,block_group_id,is_rental\n"
             "P1,38.6,-90.2,4,O1,B1,G1,1\n"
             "P2,notanumber,-90.2,4,O1,B1,G1,1\n"
             "P3,38.6,-90.2,zero,O1,B1,G1,1\n"
             "P1,38.6,-90.2,4,O1,B1,G1,1\n"
             "P4,95.0,-90.2,4,O1,B1,G1,1\n"
             "P5,38.6,-90.2,4,,B1,G1,1\n"
             "P6,38.6,-90.2,4,O1,B1,G1,maybe\n"
             "P7,38.6,-90.2,0,O1,B1,G1,1\n");
  auto loaded = load_properties(dir.file("p.csv"));
  CHECK(loaded.report.rows_read == 8);
  CHECK(loaded.report.rows_loaded == 1);
  CHECK(loaded.report.rows_rejected == 7);
  CHECK(loaded.records[0].property_id == "P1");
  CHECK(has_issue(loaded.report, 3, "latitude"));
  CHECK(has_issue(loaded.report, 4, "units"));
  CHECK(has_issue(loaded.report, 5, "property_id"));  // duplicate
  CHECK(has_issue(loaded.report, 6, "latitude"));     // out of range
  CHECK(has_issue(loaded.report, 7, "owner_id"));
  CHECK(has_issue(loaded.report, 8, "is_rental"));
  CHECK(has_issue(loaded.report, 9, "units"));

  write_text(dir.file("missing.csv"), "property_id,latitude\nP1,38.6\n");
  CHECK_THROWS_AS((void)load_properties(dir.file("missing.csv")), std::invalid_argument);
}

TEST_CASE("filing loader keeps optional attorneys and rejects bad dates") {
  TempDir dir("filings");
  std::vector<EvictionFiling> recs = {
      {"C1", "P1", {2023, 1, 15}, "A01"},
      {"C2", "P1", {2023, 2, 28}, ""},
      {"C3", "P2", {2024, 2, 29}, "A02"},  // leap day
  };
  write_filings(dir.file("f.csv"), recs);
  auto loaded = load_filings(dir.file("f.csv"));
  CHECK(loaded.report.rows_loaded == 3);
  REQUIRE(loaded.records.size() == 3);
  CHECK(loaded.records[1].attorney_id.empty());
  CHECK(loaded.records[2].filing_date == dates::Date{2024, 2, 29});

  write_text(dir.file("bad.csv"),
             "case_id,property_id,filing_date,attorney_id\n"
             "C1,P1,2023-02-30,A01\n"
             "C2,P1,2023-01-15,\n"
             "C2,P1,2023-01-16,\n"
             ",P1,2023-01-15,\n");
  auto bad = load_filings(dir.file("bad.csv"));
  CHECK(bad.report.rows_loaded == 1);
  CHECK(bad.report.rows_rejected == 3);
  CHECK(has_issue(bad.report, 2, "filing_date"));
  CHECK(has_issue(bad.report, 4, "case_id"));  // duplicate
  CHECK(has_issue(bad.report, 5, "case_id"));  // empty
}

TEST_CASE("neighborhood loader keeps blanks as missing and range-checks rates") {
  TempDir dir("hood");
  NeighborhoodRow row;
  row.block_id = "B1";
  row.block_group_id = "G1";
  row.pct_under_18 = 0.25;
  row.median_household_income = 52000.0;
  // every other field left missing
  write_neighborhoods(dir.file("n.csv"), std::vector<NeighborhoodRow>{row});
  auto loaded = load_neighborhoods(dir.file("n.csv"));
  REQUIRE(loaded.records.size() == 1);
  CHECK(loaded.records[0].pct_under_18 == doctest::Approx(0.25));
  CHECK(loaded.records[0].median_household_income == doctest::Approx(52000.0));
  CHECK_FALSE(loaded.records[0].pct_black.has_value());
  CHECK_FALSE(loaded.records[0].grapi.has_value());

  std::string header = "block_id,block_group_id";
  for (const auto& meta : kNeighborhoodFields) header += std::string(",") + meta.name;
  write_text(dir.file("bad.csv"),
             header + "\n" +
                 "B1,G1,1.5,,,,,,,,,,,,,,,,,\n" +      // rate above 1
                 "B2,G1,,,,,,,-5,,,,,,,,,,,\n" +       // negative level
                 "B3,G1,0.5,,,,,,40000,,,,,,,,,,,\n");  // fine
  auto bad = load_neighborhoods(dir.file("bad.csv"));
  CHECK(bad.report.rows_loaded == 1);
  CHECK(bad.report.rows_rejected == 2);
  CHECK(has_issue(bad.report, 2, "pct_under_18"));
  CHECK(has_issue(bad.report, 3, "median_household_income"));
  CHECK(bad.records[0].block_id == "B3");
}

TEST_CASE("owner tenure loader validates dates and tenure overlaps") {
  TempDir dir("owners");
  std::vector<OwnerTenure> recs = {
      {"O1", "P1", {2020, 1, 1}, dates::Date{2023, 5, 10}, true, false, 3,
       LocationClass::in_state},
      {"O2", "P1", {2023, 5, 10}, std::nullopt, false, true, 1, LocationClass::local},
      {"O3", "P2", {2021, 7, 1}, std::nullopt, false, false, 2, LocationClass::out_of_state},
  };
  write_owner_tenures(dir.file("o.csv"), recs);
  auto loaded = load_owner_tenures(dir.file("o.csv"));
  CHECK(loaded.report.rows_loaded == 3);
  CHECK(loaded.report.rows_rejected == 0);
  CHECK(loaded.records[0].end_date == dates::Date{2023, 5, 10});
  CHECK_FALSE(loaded.records[1].end_date.has_value());
  CHECK(loaded.records[0].location_class == LocationClass::in_state);

  write_text(dir.file("bad.csv"),
             "owner_id,property_id,start_date,end_date,is_business,is_owner_occupied,"
             "property_count,location_class\n"
             "O1,P1,2020-01-01,2019-01-01,0,0,1,local\n"     // end before start
             "O1,P2,2020-01-01,,0,0,1,moon\n"                // bad location class
             "O1,P3,2020-01-01,2022-06-15,0,0,1,local\n"     // ok
             "O2,P3,2022-06-01,,0,0,1,local\n"               // overlaps the row above
             "O1,P4,2020-01-01,,0,0,1,local\n"               // ok, open-ended
             "O2,P4,2021-01-01,,0,0,1,local\n");             // after an open tenure
  auto bad = load_owner_tenures(dir.file("bad.csv"));
  CHECK(bad.report.rows_loaded == 2);
  CHECK(bad.report.rows_rejected == 4);
  CHECK(has_issue(bad.report, 2, "end_date"));
  CHECK(has_issue(bad.report, 3, "location_class"));
  CHECK(has_issue(bad.report, 5, "start_date"));  // overlap
  CHECK(has_issue(bad.report, 7, "start_date"));  // follows open-ended tenure
}

TEST_CASE("ownership index resolves transfer days to the later owner") {
  std::vector<OwnerTenure> tenures = {
      {"O1", "P1", {2020, 1, 1}, dates::Date{2023, 5, 10}, false, false, 1, LocationClass::local},
      {"O2", "P1", {2023, 5, 10}, std::nullopt, false, false, 1, LocationClass::local},
      {"O3", "P2", {2022, 1, 1}, dates::Date{2022, 12, 31}, false, false, 1,
       LocationClass::local},
  };
  OwnershipIndex index{tenures};

  REQUIRE(index.owner_at("P1", {2023, 5, 9}) != nullptr);
  CHECK(index.owner_at("P1", {2023, 5, 9})->owner_id == "O1");
  CHECK(index.owner_at("P1", {2023, 5, 10})->owner_id == "O2");  // same-day transfer
  CHECK(index.owner_at("P1", {2024, 1, 1})->owner_id == "O2");
  CHECK(index.owner_at("P1", {2019, 12, 31}) == nullptr);
  CHECK(index.owner_at("P2", {2022, 12, 31})->owner_id == "O3");  // inclusive end
  CHECK(index.owner_at("P2", {2023, 1, 1}) == nullptr);
  CHECK(index.owner_at("P9", {2023, 1, 1}) == nullptr);

  std::vector<OwnerTenure> overlapping = {
      {"O1", "P1", {2020, 1, 1}, dates::Date{2023, 5, 10}, false, false, 1, LocationClass::local},
      {"O2", "P1", {2023, 5, 9}, std::nullopt, false, false, 1, LocationClass::local},
  };
  CHECK_THROWS_AS(OwnershipIndex{overlapping}, std::invalid_argument);

  std::vector<OwnerTenure> after_open = {
      {"O1", "P1", {2020, 1, 1}, std::nullopt, false, false, 1, LocationClass::local},
      {"O2", "P1", {2023, 5, 9}, std::nullopt, false, false, 1, LocationClass::local},
  };
  CHECK_THROWS_AS(OwnershipIndex{after_open}, std::invalid_argument);
}

TEST_CASE("attorney ranking orders by count then id and respects the window") {
  std::vector<EvictionFiling> filings;
  auto add = [&](const std::string& atty, int month, int n) {
    for (int i = 0; i < n; ++i) {
      filings.push_back({"C" + std::to_string(filings.size()), "P1",
                         {2023, month, 5}, atty});
    }
  };
  add("A2", 1, 3);
  add("A1", 2, 3);   // ties with A2; A1 wins lexicographically
  add("A3", 3, 5);
  add("A4", 12, 9);  // outside the window
  filings.push_back({"C99", "P1", {2023, 1, 2}, ""});  // no attorney

  auto ranking = rank_attorneys(filings, dates::MonthWindow{{2023, 1}, {2023, 6}});
  REQUIRE(ranking.size() == 3);
  CHECK(ranking[0].attorney_id == "A3");
  CHECK(ranking[0].filings == 5);
  CHECK(ranking[1].attorney_id == "A1");
  CHECK(ranking[2].attorney_id == "A2");
}

TEST_CASE("owner attorney flags attribute filings through ownership at filing date") {
  // Ranking with 30 attorneys: T01..T30 in rank order.
  std::vector<AttorneyRank> ranking;
  for (int i = 1; i <= 30; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "T%02d", i);
    ranking.push_back({buf, static_cast<std::size_t>(100 - i)});
  }
  std::vector<OwnerTenure> tenures = {
      {"O1", "P1", {2020, 1, 1}, dates::Date{2023, 3, 15}, false, false, 1, LocationClass::local},
      {"O2", "P1", {2023, 3, 15}, std::nullopt, false, false, 1, LocationClass::local},
      {"O1", "P2", {2020, 1, 1}, std::nullopt, false, false, 1, LocationClass::local},
  };
  OwnershipIndex index{tenures};
  dates::MonthWindow window{{2023, 1}, {2023, 6}};

  std::vector<EvictionFiling> filings = {
      {"C1", "P1", {2023, 2, 1}, "T01"},   // O1 via rank 1
      {"C2", "P1", {2023, 4, 1}, "T27"},   // after the sale: O2 via rank 27
      {"C3", "P2", {2023, 5, 1}, "T30"},   // O1 via rank 30
      {"C4", "P2", {2022, 5, 1}, "T01"},   // outside window
      {"C5", "P2", {2023, 5, 2}, ""},      // no attorney
  };

  auto o1 = owner_attorney_flags("O1", filings, window, index, ranking);
  CHECK(o1.top25);
  CHECK(o1.top26to50);
  auto o2 = owner_attorney_flags("O2", filings, window, index, ranking);
  CHECK_FALSE(o2.top25);
  CHECK(o2.top26to50);
  auto o9 = owner_attorney_flags("O9", filings, window, index, ranking);
  CHECK_FALSE(o9.top25);
  CHECK_FALSE(o9.top26to50);
}

TEST_CASE("feature column layout follows the window length and feature set") {
  auto e7 = feature_columns(FeatureSet::E, 7);
  REQUIRE(e7.size() == 10);
  CHECK(e7[0] == "filings_month_1");
  CHECK(e7[6] == "filings_month_7");
  CHECK(e7[7] == "filings_quarter_1");
  CHECK(e7[9] == "filings_quarter_3");

  CHECK(feature_columns(FeatureSet::E, 6).size() == 8);   // 6 months + 2 blocks
  CHECK(feature_columns(FeatureSet::E, 1).size() == 2);   // 1 month + 1 block
  CHECK(feature_columns(FeatureSet::EN, 7).size() == 28);
  auto eno = feature_columns(FeatureSet::ENO, 7);
  REQUIRE(eno.size() == 37);
  CHECK(eno[10] == "pct_under_18");
  CHECK(eno[28] == "units");
  CHECK(eno[36] == "owner_out_of_state");
  CHECK_THROWS_AS((void)feature_columns(FeatureSet::E, 0), std::invalid_argument);
}

TEST_CASE("dataset assembly matches a hand-computed example") {
  std::vector<PropertyRecord> props = {
      make_property("P1", 38.60, -90.20, 4, "O1", "B1", "G1"),
      make_property("P2", 38.61, -90.21, 6, "O1", "B2", "G1"),
      make_property("P3", 38.62, -90.22, 2, "O2", "B9", "G2"),  // B9 has no census row
  };
  std::vector<EvictionFiling> filings = {
      {"C1", "P1", {2023, 1, 5}, "A1"},
      {"C2", "P1", {2023, 1, 20}, "A1"},
      {"C3", "P1", {2023, 3, 10}, ""},
      {"C4", "P1", {2023, 9, 1}, ""},    // label window
      {"C5", "P2", {2022, 12, 30}, ""},  // before the feature window
      {"C6", "P3", {2023, 10, 2}, ""},   // label window only
      {"C7", "PX", {2023, 2, 2}, ""},    // outside the universe
  };
  NeighborhoodRow b1;
  b1.block_id = "B1";
  b1.block_group_id = "G1";
  NeighborhoodRow b2 = b1;
  b2.block_id = "B2";
  for (const auto& meta : kNeighborhoodFields) {
    b1.*meta.member = 0.2;
    b2.*meta.member = 0.4;
  }
  b2.pct_black = std::nullopt;  // one missing cell: median of {0.2} fills it
  std::vector<NeighborhoodRow> hoods = {b1, b2};

  std::vector<OwnerTenure> tenures = {
      {"O1", "P1", {2020, 1, 1}, std::nullopt, true, false, 2, LocationClass::in_state},
      {"O1", "P2", {2020, 1, 1}, std::nullopt, true, false, 2, LocationClass::in_state},
      {"O3", "P3", {2020, 1, 1}, dates::Date{2023, 6, 1}, false, false, 1, LocationClass::local},
      {"O2", "P3", {2023, 6, 1}, std::nullopt, false, true, 1, LocationClass::local},
  };
  OwnershipIndex index{tenures};
  dates::WindowPair windows{{{2023, 1}, {2023, 7}}, {{2023, 8}, {2023, 10}}};

  auto ds = build_dataset(props, filings, hoods, index, windows, FeatureSet::ENO);
  REQUIRE(ds.rows() == 3);
  REQUIRE(ds.columns.size() == 37);
  CHECK(ds.labels == std::vector<int>{1, 0, 1});
  CHECK(base_rate(ds) == doctest::Approx(2.0 / 3.0));

  // P1 monthly counts: Jan 2, Mar 1; quarter 1 = 3.
  CHECK(ds.at(0, 0) == 2.0);
  CHECK(ds.at(0, 1) == 0.0);
  CHECK(ds.at(0, 2) == 1.0);
  CHECK(ds.at(0, 7) == 3.0);
  CHECK(ds.at(0, 8) == 0.0);
  // P2's December filing is in neither window.
  for (std::size_t c = 0; c < 10; ++c) CHECK(ds.at(1, c) == 0.0);
  // P3 filed only in the label window.
  for (std::size_t c = 0; c < 10; ++c) CHECK(ds.at(2, c) == 0.0);

  // Neighborhood block: P1 keeps 0.2 everywhere; P2 keeps 0.4 except the
  // missing pct_black cell, imputed with the only present value 0.2; P3 has
  // no census row, so every cell is the column median.
  const std::size_t pct_black_col = 13;  // 10 filing cols + 3 (under_18, occupied, white)
  CHECK(ds.columns[pct_black_col] == "pct_black");
  CHECK(ds.at(0, pct_black_col) == doctest::Approx(0.2));
  CHECK(ds.at(1, pct_black_col) == doctest::Approx(0.2));
  CHECK(ds.at(2, pct_black_col) == doctest::Approx(0.2));
  const std::size_t pct_white_col = 12;
  CHECK(ds.at(1, pct_white_col) == doctest::Approx(0.4));
  CHECK(ds.at(2, pct_white_col) == doctest::Approx(0.3));  // median of {0.2, 0.4}
  CHECK(ds.quality.properties_missing_neighborhood == 1);
  CHECK(ds.quality.imputed.at("pct_black") == 2);   // P2's cell + P3's row
  CHECK(ds.quality.imputed.at("pct_white") == 1);   // P3's row only

  // Owner block. Columns: units=28, count=29, business=30, occupied=31,
  // top25=32, top26to50=33, local=34, in_state=35, out=36.
  CHECK(ds.at(0, 28) == 4.0);
  CHECK(ds.at(1, 28) == 6.0);
  CHECK(ds.at(0, 29) == 2.0);
  CHECK(ds.at(0, 30) == 1.0);
  CHECK(ds.at(0, 31) == 0.0);
  CHECK(ds.at(0, 35) == 1.0);
  CHECK(ds.at(0, 34) == 0.0);
  // P3 resolves on 2023-07-31, after its June 1 sale to O2.
  CHECK(ds.at(2, 29) == 1.0);
  CHECK(ds.at(2, 31) == 1.0);
  CHECK(ds.at(2, 34) == 1.0);
  CHECK(ds.quality.properties_missing_owner == 0);

  // A1 filed twice in the window, so it holds rank 1 and flags O1's rows.
  CHECK(ds.at(0, 32) == 1.0);
  CHECK(ds.at(1, 32) == 1.0);  // same owner, flag carries to every holding
  CHECK(ds.at(0, 33) == 0.0);
  CHECK(ds.at(2, 32) == 0.0);
}

TEST_CASE("dataset handles a property with no owner tenure") {
  std::vector<PropertyRecord> props = {
      make_property("P1", 38.60, -90.20, 4, "O1", "B1", "G1"),
      make_property("P2", 38.61, -90.21, 8, "O9", "B1", "G1"),  // no tenure rows
  };
  std::vector<OwnerTenure> tenures = {
      {"O1", "P1", {2020, 1, 1}, std::nullopt, false, false, 5, LocationClass::local},
  };
  NeighborhoodRow b1;
  b1.block_id = "B1";
  b1.block_group_id = "G1";
  for (const auto& meta : kNeighborhoodFields) b1.*meta.member = 0.5;
  OwnershipIndex index{tenures};
  dates::WindowPair windows{{{2023, 1}, {2023, 7}}, {{2023, 8}, {2023, 10}}};

  auto ds = build_dataset(props, {}, std::vector<NeighborhoodRow>{b1}, index, windows,
                          FeatureSet::ENO);
  CHECK(ds.quality.properties_missing_owner == 1);
  CHECK(ds.at(1, 29) == 5.0);  // owner_property_count imputed with the median
  CHECK(ds.quality.imputed.at("owner_property_count") == 1);
  for (std::size_t c = 30; c <= 36; ++c) CHECK(ds.at(1, c) == 0.0);  // booleans default off
}

TEST_CASE("median imputation averages the middle pair on even counts") {
  std::vector<PropertyRecord> props = {
      make_property("P1", 38.60, -90.20, 2, "O1", "B1", "G1"),
      make_property("P2", 38.61, -90.21, 2, "O1", "B2", "G1"),
      make_property("P3", 38.62, -90.22, 2, "O1", "B3", "G1"),
      make_property("P4", 38.63, -90.23, 2, "O1", "B4", "G1"),
      make_property("P5", 38.64, -90.24, 2, "O1", "B5", "G1"),
  };
  std::vector<NeighborhoodRow> hoods;
  const double values[] = {0.1, 0.4, 0.2, 0.3};
  for (int i = 0; i < 4; ++i) {
    NeighborhoodRow row;
    row.block_id = "B" + std::to_string(i + 1);
    row.block_group_id = "G1";
    for (const auto& meta : kNeighborhoodFields) row.*meta.member = values[i];
    hoods.push_back(row);
  }
  // B5 exists but every field is missing; median of {0.1,0.4,0.2,0.3} = 0.25.
  NeighborhoodRow b5;
  b5.block_id = "B5";
  b5.block_group_id = "G1";
  hoods.push_back(b5);

  OwnershipIndex index{std::vector<OwnerTenure>{}};
  dates::WindowPair windows{{{2023, 1}, {2023, 7}}, {{2023, 8}, {2023, 10}}};
  auto ds = build_dataset(props, {}, hoods, index, windows, FeatureSet::EN);
  CHECK(ds.quality.properties_missing_neighborhood == 0);
  CHECK(ds.at(4, 10) == doctest::Approx(0.25));
  CHECK(ds.quality.imputed.at("pct_under_18") == 1);
}

TEST_CASE("base rate rejects an empty dataset") {
  LabeledDataset ds;
  CHECK_THROWS_AS((void)base_rate(ds), std::invalid_argument);
}
