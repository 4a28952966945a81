#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "core/policies.hpp"
#include "core/text.hpp"

using namespace evrisk;

namespace {

data::PropertyRecord prop(std::string id, double lat, double lon, int units,
                          std::string block_group = "BG1") {
  data::PropertyRecord p;
  p.property_id = std::move(id);
  p.location = {lat, lon};
  p.units = units;
  p.owner_id = "O1";
  p.block_id = p.property_id + "-blk";
  p.block_group_id = std::move(block_group);
  p.is_rental = true;
  return p;
}

data::EvictionFiling filing(std::string case_id, std::string property_id, int y, int m, int d) {
  return {std::move(case_id), std::move(property_id), dates::Date{y, m, d}, ""};
}

std::set<std::string> visit_set(const routing::RoutePlan& plan) {
  return {plan.visit_order.begin(), plan.visit_order.end()};
}

const dates::MonthWindow kPrior{dates::Month{2024, 1}, dates::Month{2024, 3}};
const dates::MonthWindow kTest{dates::Month{2024, 4}, dates::Month{2024, 6}};

}  // namespace

TEST_CASE("policy kind and control names round-trip") {
  using policy::PolicyKind;
  for (auto kind : {PolicyKind::neo_t_o, PolicyKind::rs_eviction_only,
                    PolicyKind::rs_eviction_neighborhood, PolicyKind::prior_eviction_count,
                    PolicyKind::neighborhood_canvass}) {
    auto name = policy::policy_kind_str(kind);
    auto parsed = policy::parse_policy_kind(name);
    REQUIRE(parsed.has_value());
    CHECK(*parsed == kind);
  }
  CHECK(policy::policy_kind_str(PolicyKind::neo_t_o) == "NEO-T-O");
  CHECK_FALSE(policy::parse_policy_kind("neo").has_value());
  CHECK(policy::parse_control("time") == policy::Control::time);
  CHECK(policy::parse_control("units") == policy::Control::units);
  CHECK_FALSE(policy::parse_control("hours").has_value());
  CHECK(policy::control_str(policy::Control::units) == "units");
}

TEST_CASE("NEO-T-O visits exactly the medium and high bins") {
  std::vector<data::PropertyRecord> props{
      prop("P1", 38.70, -90.30, 2),
      prop("P2", 38.69, -90.30, 3),
      prop("P3", 38.68, -90.30, 4),
      prop("P4", 38.67, -90.30, 5),
  };
  geo::CostParams params;

  // 0.2 sits in the low bin (upper-inclusive), 0.21 is medium.
  std::vector<double> scores{0.1, 0.2, 0.21, 0.9};
  auto plan = policy::plan_neo_t_o(props, scores, params, 7);
  CHECK(visit_set(plan) == std::set<std::string>{"P3", "P4"});
  long above = std::count_if(scores.begin(), scores.end(), [](double s) { return s > 0.2; });
  CHECK(plan.total_properties == above);
  CHECK(plan.total_units == 9);

  // Any rescaling that lands every property in the same bin selects the same
  // properties and routes them identically.
  std::vector<double> rescaled{0.12, 0.06, 0.79, 0.95};
  auto plan2 = policy::plan_neo_t_o(props, rescaled, params, 7);
  CHECK(plan2.visit_order == plan.visit_order);
  CHECK(plan2.total_time == plan.total_time);

  std::vector<double> all_low{0.05, 0.2, 0.1, 0.0};
  CHECK_THROWS_AS(policy::plan_neo_t_o(props, all_low, params, 7), std::invalid_argument);
  std::vector<double> short_scores{0.5, 0.5};
  CHECK_THROWS_AS(policy::plan_neo_t_o(props, short_scores, params, 7), std::invalid_argument);
}

TEST_CASE("risk-score policy ranks by score with property_id tie-break") {
  // Identical locations make routing cost knock time only: 0.1 h per unit.
  std::vector<data::PropertyRecord> props{
      prop("B", 38.70, -90.30, 1),
      prop("A", 38.70, -90.30, 1),
      prop("C", 38.70, -90.30, 1),
  };
  geo::CostParams params;
  double knock = geo::knock_time(1, params);

  std::vector<double> equal{0.5, 0.5, 0.5};
  auto plan = policy::plan_rs_budgeted(props, equal, knock + knock, params, 3);
  CHECK(visit_set(plan) == std::set<std::string>{"A", "B"});

  std::vector<double> ranked{0.4, 0.2, 0.9};
  auto plan2 = policy::plan_rs_budgeted(props, ranked, knock + knock, params, 3);
  CHECK(visit_set(plan2) == std::set<std::string>{"C", "B"});

  auto tiny = policy::plan_rs_budgeted(props, ranked, knock / 2, params, 3);
  CHECK(tiny.empty());

  CHECK_THROWS_AS(policy::plan_rs_budgeted(props, ranked, 0.0, params, 3), std::invalid_argument);
  std::vector<double> short_scores{0.5};
  CHECK_THROWS_AS(policy::plan_rs_budgeted(props, short_scores, 1.0, params, 3),
                  std::invalid_argument);
}

TEST_CASE("prior-count policy visits past filers only, most filings first") {
  std::vector<data::PropertyRecord> props{
      prop("A", 38.70, -90.30, 2),
      prop("B", 38.70, -90.30, 2),
      prop("C", 38.70, -90.30, 2),
      prop("D", 38.70, -90.30, 2),
  };
  std::vector<data::EvictionFiling> filings{
      filing("c1", "A", 2024, 1, 5),  filing("c2", "A", 2024, 2, 5),
      filing("c3", "A", 2024, 3, 5),  filing("c4", "B", 2024, 1, 20),
      filing("c5", "D", 2024, 5, 1),  // outside the prior window
      filing("c6", "ZZ", 2024, 1, 9), // not in the universe
  };
  geo::CostParams params;

  policy::Budget ample{policy::Control::time, 100.0, 0};
  auto plan = policy::plan_prior_count(props, filings, kPrior, ample, params, 5);
  CHECK(visit_set(plan) == std::set<std::string>{"A", "B"});

  // Equal counts rank by units, so with room for only one visit the larger
  // property wins.
  std::vector<data::PropertyRecord> sized{
      prop("X", 38.70, -90.30, 5),
      prop("Y", 38.70, -90.30, 2),
  };
  std::vector<data::EvictionFiling> one_each{
      filing("c1", "X", 2024, 2, 1),
      filing("c2", "Y", 2024, 2, 2),
  };
  policy::Budget one_visit{policy::Control::time, geo::knock_time(5, params), 0};
  auto plan2 = policy::plan_prior_count(sized, one_each, kPrior, one_visit, params, 5);
  CHECK(plan2.visit_order == std::vector<std::string>{"X"});

  // Equal counts and units fall back to property_id order.
  std::vector<data::PropertyRecord> same{
      prop("N2", 38.70, -90.30, 2),
      prop("N1", 38.70, -90.30, 2),
  };
  std::vector<data::EvictionFiling> same_counts{
      filing("c1", "N1", 2024, 2, 1),
      filing("c2", "N2", 2024, 2, 2),
  };
  policy::Budget one_small{policy::Control::time, geo::knock_time(2, params), 0};
  auto plan3 = policy::plan_prior_count(same, same_counts, kPrior, one_small, params, 5);
  CHECK(plan3.visit_order == std::vector<std::string>{"N1"});

  // Nothing qualifying yields an empty plan rather than an error.
  std::vector<data::EvictionFiling> none{filing("c1", "A", 2023, 6, 1)};
  auto plan4 = policy::plan_prior_count(props, none, kPrior, ample, params, 5);
  CHECK(plan4.empty());
  CHECK(plan4.total_properties == 0);
}

TEST_CASE("prior-count policy under a unit budget takes the longest ranked prefix") {
  std::vector<data::PropertyRecord> props{
      prop("A", 38.70, -90.30, 4),
      prop("B", 38.70, -90.30, 3),
      prop("C", 38.70, -90.30, 5),
  };
  std::vector<data::EvictionFiling> filings{
      filing("c1", "A", 2024, 1, 1), filing("c2", "A", 2024, 2, 1),
      filing("c3", "B", 2024, 1, 2), filing("c4", "B", 2024, 3, 2),
      filing("c5", "C", 2024, 2, 3),
  };
  geo::CostParams params;

  // Ranked A (2 filings, 4 units), B (2 filings, 3 units), C (1 filing).
  auto seven = policy::plan_prior_count(props, filings, kPrior,
                                        {policy::Control::units, 0.0, 7}, params, 5);
  CHECK(visit_set(seven) == std::set<std::string>{"A", "B"});
  CHECK(seven.total_units == 7);

  auto six = policy::plan_prior_count(props, filings, kPrior,
                                      {policy::Control::units, 0.0, 6}, params, 5);
  CHECK(six.visit_order == std::vector<std::string>{"A"});

  auto none = policy::plan_prior_count(props, filings, kPrior,
                                       {policy::Control::units, 0.0, 3}, params, 5);
  CHECK(none.empty());
}

TEST_CASE("neighborhood canvass sweeps block groups in filing order") {
  // Two far-apart groups; BG-north has three prior filings, BG-south one.
  std::vector<data::PropertyRecord> props{
      prop("P11", 38.700, -90.30, 1, "BG-north"),
      prop("P12", 38.699, -90.30, 1, "BG-north"),
      prop("P21", 38.600, -90.30, 2, "BG-south"),
      prop("P22", 38.599, -90.30, 2, "BG-south"),
  };
  std::vector<data::EvictionFiling> filings{
      filing("c1", "P11", 2024, 1, 1),
      filing("c2", "P11", 2024, 2, 1),
      filing("c3", "P12", 2024, 3, 1),
      filing("c4", "P21", 2024, 1, 15),
  };
  geo::CostParams params;
  auto north_tour = routing::route_tsp(
      std::vector<routing::RoutePoint>{{"P11", {38.700, -90.30}, 1}, {"P12", {38.699, -90.30}, 1}},
      params, 9);
  REQUIRE(north_tour.visit_order == std::vector<std::string>{"P11", "P12"});

  // A budget of exactly the first group's tour stops before the second group.
  auto exact = policy::plan_neighborhood(props, filings, kPrior,
                                         {policy::Control::time, north_tour.total_time, 0},
                                         params, 9);
  CHECK(exact.visit_order == std::vector<std::string>{"P11", "P12"});
  CHECK(exact.total_time == north_tour.total_time);

  // Extend the budget by the connecting leg plus one knock: the final group is
  // entered and walked one stop along its own tour. The fold order (all legs,
  // then all knocks) mirrors how plans total their time.
  double b = 0.0;
  b += north_tour.leg_times[0];
  b += geo::leg_time(geo::geodesic_miles({38.699, -90.30}, {38.600, -90.30}), params);
  b += geo::knock_time(1, params);
  b += geo::knock_time(1, params);
  b += geo::knock_time(2, params);
  auto partial = policy::plan_neighborhood(props, filings, kPrior,
                                           {policy::Control::time, b, 0}, params, 9);
  CHECK(partial.visit_order == std::vector<std::string>{"P11", "P12", "P21"});
  CHECK(partial.total_time == b);
  CHECK(partial.leg_times.size() == 2);
  CHECK(partial.knock_times.size() == 3);
  CHECK(partial.total_units == 4);

  // A budget below the very first knock visits nothing.
  auto nothing = policy::plan_neighborhood(props, filings, kPrior,
                                           {policy::Control::time, 0.05, 0}, params, 9);
  CHECK(nothing.empty());

  CHECK_THROWS_AS(policy::plan_neighborhood(props, filings, kPrior,
                                            {policy::Control::time, 0.0, 0}, params, 9),
                  std::invalid_argument);
}

TEST_CASE("neighborhood canvass breaks group ties by id and ranks zero-count groups last") {
  std::vector<data::PropertyRecord> props{
      prop("Z", 38.70, -90.10, 1, "g2"),
      prop("Y", 38.70, -90.20, 1, "g1"),
      prop("X", 38.70, -90.30, 1, "g3"),
  };
  std::vector<data::EvictionFiling> filings{
      filing("c1", "Z", 2024, 1, 1),
      filing("c2", "Y", 2024, 2, 1),
  };
  geo::CostParams params;

  // g1 and g2 tie on one filing each; g1 wins by id. g3 never filed and sorts last.
  auto one_group = policy::plan_neighborhood(props, filings, kPrior,
                                             {policy::Control::units, 0.0, 1}, params, 11);
  CHECK(one_group.visit_order == std::vector<std::string>{"Y"});

  auto all = policy::plan_neighborhood(props, filings, kPrior,
                                       {policy::Control::units, 0.0, 100}, params, 11);
  CHECK(all.visit_order == std::vector<std::string>{"Y", "Z", "X"});
}

TEST_CASE("neighborhood canvass under a unit budget stops before exceeding it") {
  std::vector<data::PropertyRecord> props{
      prop("P11", 38.700, -90.30, 1, "BG-north"),
      prop("P12", 38.699, -90.30, 1, "BG-north"),
      prop("P21", 38.600, -90.30, 2, "BG-south"),
      prop("P22", 38.599, -90.30, 2, "BG-south"),
  };
  std::vector<data::EvictionFiling> filings{
      filing("c1", "P11", 2024, 1, 1),
      filing("c2", "P12", 2024, 2, 1),
  };
  geo::CostParams params;

  auto three = policy::plan_neighborhood(props, filings, kPrior,
                                         {policy::Control::units, 0.0, 3}, params, 9);
  CHECK(three.visit_order == std::vector<std::string>{"P11", "P12"});
  CHECK(three.total_units == 2);  // next stop has 2 units and would exceed 3

  auto four = policy::plan_neighborhood(props, filings, kPrior,
                                        {policy::Control::units, 0.0, 4}, params, 9);
  CHECK(four.visit_order == std::vector<std::string>{"P11", "P12", "P21"});
  CHECK(four.total_units == 4);
}

TEST_CASE("evaluating a plan counts distinct discovered properties and raw filings") {
  routing::RoutePlan plan;
  plan.visit_order = {"A", "B", "C"};
  plan.leg_times = {0.0, 0.0};
  plan.knock_times = {0.1, 0.1, 0.1};
  plan.total_time = 0.3;
  plan.total_units = 3;
  plan.total_properties = 3;

  std::vector<data::EvictionFiling> filings{
      filing("c1", "A", 2024, 4, 1),  filing("c2", "A", 2024, 5, 1),
      filing("c3", "A", 2024, 6, 30), filing("c4", "B", 2024, 4, 15),
      filing("c5", "B", 2024, 7, 1),  // outside the test window
      filing("c6", "D", 2024, 5, 2),  // not visited
  };
  auto outcome = policy::evaluate_policy(plan, filings, kTest, 0.6);
  CHECK(outcome.evictions_discovered == 2);
  CHECK(outcome.filings_discovered == 4);
  CHECK(outcome.properties_visited == 3);
  CHECK(outcome.units_visited == 3);
  CHECK(outcome.outreach_time == 0.3);
  CHECK(outcome.normalized_time == doctest::Approx(0.5));
  CHECK(outcome.discovery_rate == doctest::Approx(2.0 / 3.0));
  CHECK_FALSE(outcome.empty_plan);

  // Without a reference the normalized column stays zero.
  auto bare = policy::evaluate_policy(plan, filings, kTest);
  CHECK(bare.normalized_time == 0.0);

  auto empty = policy::evaluate_policy(routing::RoutePlan{}, filings, kTest, 10.0);
  CHECK(empty.empty_plan);
  CHECK(empty.evictions_discovered == 0);
  CHECK(empty.properties_visited == 0);
  CHECK(empty.discovery_rate == 0.0);
  CHECK(empty.normalized_time == 0.0);
}

TEST_CASE("discovery lift rounds half-up to one decimal") {
  CHECK(policy::lift_percent(936, 731) == 28.0);
  CHECK(policy::lift_percent(936, 863) == 8.5);
  CHECK(policy::lift_percent(5, 5) == 0.0);
  CHECK(policy::lift_percent(3, 6) == -50.0);
  CHECK_THROWS_AS(policy::lift_percent(936, 0), std::invalid_argument);
}

namespace {

struct CompareFixture {
  std::vector<data::PropertyRecord> props;
  std::vector<data::EvictionFiling> filings;
  std::vector<double> scores_e, scores_en, scores_eno;

  CompareFixture() {
    auto add = [&](std::string id, double lat, double lon, int units, std::string bg) {
      props.push_back(prop(std::move(id), lat, lon, units, std::move(bg)));
    };
    add("P1", 38.700, -90.300, 3, "BG1");
    add("P2", 38.702, -90.301, 2, "BG1");
    add("P3", 38.699, -90.303, 4, "BG1");
    add("P4", 38.650, -90.300, 2, "BG2");
    add("P5", 38.652, -90.302, 6, "BG2");
    add("P6", 38.649, -90.299, 2, "BG2");
    add("P7", 38.600, -90.300, 5, "BG3");
    add("P8", 38.602, -90.301, 2, "BG3");
    add("P9", 38.599, -90.302, 3, "BG3");

    filings = {
        filing("f1", "P1", 2024, 1, 10), filing("f2", "P1", 2024, 2, 11),
        filing("f3", "P2", 2024, 3, 12), filing("f4", "P4", 2024, 1, 13),
        filing("t1", "P1", 2024, 4, 1),  filing("t2", "P4", 2024, 5, 2),
        filing("t3", "P4", 2024, 5, 20), filing("t4", "P7", 2024, 6, 3),
    };
    scores_eno = {0.90, 0.50, 0.10, 0.30, 0.15, 0.05, 0.85, 0.10, 0.05};
    scores_e = {0.80, 0.10, 0.05, 0.30, 0.05, 0.05, 0.90, 0.05, 0.05};
    scores_en = {0.60, 0.30, 0.05, 0.90, 0.10, 0.05, 0.70, 0.05, 0.05};
  }

  policy::PolicyInputs inputs() const {
    policy::PolicyInputs in;
    in.properties = props;
    in.filings = filings;
    in.prior_window = kPrior;
    in.test_window = kTest;
    in.scores_e = scores_e;
    in.scores_en = scores_en;
    in.scores_eno = scores_eno;
    return in;
  }
};

const std::vector<policy::PolicySpec> kDefaultSpecs{
    {policy::PolicyKind::neo_t_o, policy::Control::time},
    {policy::PolicyKind::rs_eviction_only, policy::Control::time},
    {policy::PolicyKind::rs_eviction_neighborhood, policy::Control::time},
    {policy::PolicyKind::prior_eviction_count, policy::Control::time},
    {policy::PolicyKind::prior_eviction_count, policy::Control::units},
    {policy::PolicyKind::neighborhood_canvass, policy::Control::time},
    {policy::PolicyKind::neighborhood_canvass, policy::Control::units},
};

}  // namespace

TEST_CASE("policy comparison holds every alternative to the reference budgets") {
  CompareFixture fx;
  auto report = policy::compare_policies(kDefaultSpecs, fx.inputs(), 42);

  REQUIRE(report.rows.size() == kDefaultSpecs.size());
  const auto& neo = report.rows[0];
  CHECK(neo.spec.kind == policy::PolicyKind::neo_t_o);
  CHECK(report.budget_hours == neo.plan.total_time);
  CHECK(report.budget_units == neo.plan.total_units);
  CHECK(neo.outcome.normalized_time == doctest::Approx(1.0));
  CHECK_FALSE(neo.has_lift);

  // NEO-T-O selects score > 0.2: P1, P2, P4, P7.
  CHECK(visit_set(neo.plan) == std::set<std::string>{"P1", "P2", "P4", "P7"});
  CHECK(neo.outcome.evictions_discovered == 3);  // P1, P4, P7 file in the test window
  CHECK(neo.outcome.filings_discovered == 4);

  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& row = report.rows[i];
    CHECK(row.spec.kind == kDefaultSpecs[i].kind);
    CHECK(row.spec.control == kDefaultSpecs[i].control);
    if (row.spec.control == policy::Control::time) {
      CHECK(row.outcome.outreach_time <= report.budget_hours);
      CHECK(row.outcome.normalized_time <= 1.0);
    } else {
      CHECK(row.outcome.units_visited <= report.budget_units);
    }
    CHECK(row.outcome.evictions_discovered <= row.outcome.properties_visited);
    if (i > 0 && row.outcome.evictions_discovered > 0) {
      CHECK(row.has_lift);
      CHECK(row.lift_pct == policy::lift_percent(neo.outcome.evictions_discovered,
                                                 row.outcome.evictions_discovered));
    }
  }

  auto again = policy::compare_policies(kDefaultSpecs, fx.inputs(), 42);
  REQUIRE(again.rows.size() == report.rows.size());
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    CHECK(again.rows[i].plan.visit_order == report.rows[i].plan.visit_order);
    CHECK(again.rows[i].outcome.evictions_discovered ==
          report.rows[i].outcome.evictions_discovered);
    CHECK(again.rows[i].outcome.outreach_time == report.rows[i].outcome.outreach_time);
    CHECK(again.rows[i].lift_pct == report.rows[i].lift_pct);
  }
}

TEST_CASE("policy comparison rejects bad spec lists and leaky windows") {
  CompareFixture fx;
  auto in = fx.inputs();

  CHECK_THROWS_AS(policy::compare_policies({}, in, 1), std::invalid_argument);

  std::vector<policy::PolicySpec> no_neo{{policy::PolicyKind::rs_eviction_only,
                                          policy::Control::time}};
  CHECK_THROWS_AS(policy::compare_policies(no_neo, in, 1), std::invalid_argument);

  std::vector<policy::PolicySpec> rs_units{
      {policy::PolicyKind::neo_t_o, policy::Control::time},
      {policy::PolicyKind::rs_eviction_only, policy::Control::units},
  };
  CHECK_THROWS_AS(policy::compare_policies(rs_units, in, 1), std::invalid_argument);

  auto leaky = in;
  leaky.prior_window = dates::MonthWindow{dates::Month{2024, 1}, dates::Month{2024, 4}};
  CHECK_THROWS(policy::compare_policies(kDefaultSpecs, leaky, 1));
}
