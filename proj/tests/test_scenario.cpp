#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "tcap/scenario.hpp"

using namespace tcap;
using nlohmann::json;

namespace {

json doc(const std::string& name) {
  std::ifstream in(test::data_path(name));
  return json::parse(in);
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

std::vector<std::string> violations_of(const json& j) {
  try {
    load_scenario(j.dump());
  } catch (const ValidationError& e) {
    return e.violations();
  }
  return {};
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("seven node network") {
    Scenario s = test::data("bay_area_7node.json");
    CHECK(s.nodes.size() == 7);
    CHECK(s.arcs.size() == 7);
    CHECK(s.stations.size() == 7);
    REQUIRE(s.od_pairs.size() == 1);
    CHECK(s.od_pairs[0].origin == "davis");
    CHECK(s.od_pairs[0].destination == "san_jose");
    CHECK(s.od_pairs[0].rate == 100);
    CHECK(validate_scenario(s).empty());
    CHECK(s.stations[*s.station_index("davis")].marginal_cost() == doctest::Approx(0.01714));
  }

  TEST_CASE("ten node network") {
    Scenario s = test::data("bay_area_10node.json");
    CHECK(s.nodes.size() == 10);
    CHECK(s.arcs.size() == 13);
    CHECK(s.od_pairs.size() == 3);
    CHECK(validate_scenario(s).empty());
  }

  TEST_CASE("every corpus file validates") {
    for (const char* f : {"bay_area_7node.json", "bay_area_7node_classes.json", "bay_area_10node.json",
                          "toy_two_path.json", "toy_mmc.json", "toy_demand_dependent.json"})
      CHECK_NOTHROW(test::data(f));
  }

  TEST_CASE("unknown node") {
    json j = doc("bay_area_7node.json");
    j["arcs"][0]["to"] = "oakland";
    CHECK(mentions(violations_of(j), "unknown node"));
  }

  TEST_CASE("negative travel time") {
    json j = doc("bay_area_7node.json");
    j["arcs"][2]["minutes"] = -4;
    CHECK(mentions(violations_of(j), "arc travel_time must be > 0"));
  }

  TEST_CASE("class without a reachable station") {
    json j = doc("toy_two_path.json");
    // A station on an unconnected node: the class can never charge.
    j["nodes"].push_back("island");
    j["stations"].push_back(j["stations"][0]);
    j["stations"].back()["node"] = "island";
    j["classes"] = json::array({{{"name", "stranded"}, {"allowed_stations", {"island"}}}});
    j["od_pairs"][0]["class"] = "stranded";
    auto v = violations_of(j);
    REQUIRE(v.size() == 1);
    CHECK(mentions(v, "od has no feasible path"));
  }

  TEST_CASE("other invariants") {
    json j = doc("toy_two_path.json");
    j["od_pairs"][0]["rate_ev_per_hr"] = 0;
    CHECK(mentions(violations_of(j), "rate must be finite and > 0"));

    j = doc("toy_two_path.json");
    j["stations"][1]["node"] = "a";
    CHECK(mentions(violations_of(j), "more than one station at node"));

    j = doc("toy_two_path.json");
    j["economics"]["alpha_min_per_usd"] = 0;
    CHECK(mentions(violations_of(j), "alpha must be > 0"));

    j = doc("toy_two_path.json");
    j["od_pairs"][0]["destination"] = "o";
    CHECK(mentions(violations_of(j), "origin equals destination"));
  }

  TEST_CASE("parse errors carry field context") {
    CHECK_THROWS_AS(load_scenario("{ not json"), ParseError);
    json j = doc("toy_two_path.json");
    j["arcs"][1].erase("minutes");
    try {
      load_scenario(j.dump());
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("arcs[1].minutes") != std::string::npos);
    }
    j = doc("toy_two_path.json");
    j["stations"][0]["wait_model"]["kind"] = "erlang";
    CHECK_THROWS_AS(load_scenario(j.dump()), ParseError);
  }

  TEST_CASE("round trip and determinism") {
    for (const char* f : {"bay_area_7node.json", "bay_area_7node_classes.json", "bay_area_10node.json",
                          "toy_mmc.json", "toy_demand_dependent.json"}) {
      Scenario a = test::data(f);
      Scenario b = test::data(f);
      CHECK(a == b);
      Scenario c = load_scenario(scenario_to_json(a));
      CHECK(a == c);
      CHECK(scenario_digest(a) == scenario_digest(c));
    }
    Scenario a = test::data("bay_area_7node.json");
    Scenario b = test::with_alpha(a, 11);
    CHECK(scenario_digest(a) != scenario_digest(b));
  }

  TEST_CASE("fees and defaults") {
    Scenario s = test::data("bay_area_7node.json");
    PricingScheme p = default_pricing(s);
    for (std::size_t j = 0; j < s.stations.size(); ++j) {
      CHECK(p.tau[j] == 0.0);
      CHECK(p.upsilon[j] == s.stations[j].marginal_cost());
    }
    CHECK(no_fee_pricing(s) == p);

    json j = doc("toy_two_path.json");
    j["economics"]["fees"] = json::array({{{"station", "b"}, {"tau_usd", 1.5}, {"upsilon_usd_per_kwh", 0.04}},
                                          {{"station", "a"}, {"tau_usd", 0.5}, {"upsilon_usd_per_kwh", 0.03}}});
    Scenario t = load_scenario(j.dump());
    PricingScheme q = default_pricing(t);
    CHECK(q.tau == std::vector<double>{0.5, 1.5});
    CHECK(q.upsilon == std::vector<double>{0.03, 0.04});
    CHECK(load_scenario(scenario_to_json(t)) == t);
  }

  TEST_CASE("classes restrict stations") {
    Scenario s = test::data("bay_area_7node_classes.json");
    REQUIRE(s.od_pairs.size() >= 3);
    auto all = s.allowed_stations(0);
    auto low = s.allowed_stations(2);
    CHECK(low.size() < all.size());
    CHECK(std::is_sorted(low.begin(), low.end()));
    CHECK(s.total_expected_energy() == doctest::Approx(40 * (s.od_pairs[0].rate + s.od_pairs[1].rate + s.od_pairs[2].rate)));
  }
}
