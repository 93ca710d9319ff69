#include <cmath>
#include <map>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "tcap/oracle.hpp"
#include "tcap/social.hpp"

using namespace tcap;

namespace {

// Flow error of the best-response oracle against solve_ue, matched by path key.
double br_error(const Scenario& s, const EquilibriumSolution& sol, int bins) {
  auto br = discretized_best_response(s, sol.pricing, bins);
  std::map<std::string, double> by_key;
  for (std::size_t k = 0; k < br.paths.size(); ++k) by_key[br.paths[k].key()] = br.flows[k];
  double err = 0.0;
  for (std::size_t i = 0; i < sol.flows.size(); ++i)
    err = std::max(err, std::abs(sol.flows[i] - by_key.at(sol.layout.paths[i].key())));
  return err;
}

Scenario single_path(double alpha) {
  nlohmann::json j = nlohmann::json::parse(R"({
    "name": "single",
    "nodes": ["o", "s", "d"],
    "arcs": [{"id": "o-s", "from": "o", "to": "s", "minutes": 12}, {"id": "s-d", "from": "s", "to": "d", "minutes": 8}],
    "stations": [{"node": "s", "capacity_scale": 10, "wait_model": {"kind": "polynomial", "params": {"a": 0.4, "b": 3, "x": 10}},
                  "lmp_usd_per_mwh": 20}],
    "distributions": {"u": {"kind": "uniform", "min_kwh": 0, "max_kwh": 80}},
    "od_pairs": [{"origin": "o", "destination": "d", "rate_ev_per_hr": 100, "distribution": "u"}],
    "economics": {"alpha_min_per_usd": 1}
  })");
  j["economics"]["alpha_min_per_usd"] = alpha;
  return load_scenario(j.dump());
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("symmetric toy splits evenly at any resolution") {
    Scenario s = test::two_path(20, 20, 25, 25);
    for (int bins : {10, 101, 1000}) {
      auto br = discretized_best_response(s, default_pricing(s), bins);
      CHECK(br.converged);
      CHECK(std::abs(br.flows[0] - 50) <= 1e-6);
      CHECK(std::abs(br.flows[1] - 50) <= 1e-6);
    }
  }

  TEST_CASE("split point matches the closed-form threshold") {
    Scenario s = test::data("toy_two_path.json");
    PricingScheme p = default_pricing(s);
    auto br = discretized_best_response(s, p, 1000);
    REQUIRE(br.converged);
    // Enumeration order: station a, then station b. a has the higher price, so
    // it serves the small requests.
    REQUIRE(s.stations[br.paths[0].station].node == "a");
    const double alpha = s.economics.alpha;
    auto psi = [&](std::size_t k) {
      std::size_t j = br.paths[k].station;
      return br.paths[k].minutes + wait_time(s.stations[j].wait, br.flows[k]) + alpha * p.tau[j];
    };
    double theta_a = effective_price(s, 0, p.upsilon[0], alpha);
    double theta_b = effective_price(s, 1, p.upsilon[1], alpha);
    double closed = (psi(1) - psi(0)) / (alpha * (theta_a - theta_b));
    double split = s.demand(0).inverse_cdf(br.flows[0] / 100);
    CHECK(std::abs(split - closed) <= 80.0 / 1000);
  }

  TEST_CASE("best response agrees with the solver") {
    Scenario toy = test::data("toy_two_path.json");
    auto toy_sol = solve_ue(toy, {});
    CHECK(br_error(toy, toy_sol, 2000) <= 0.02 * 100);

    Scenario bay = test::data("bay_area_7node.json");
    auto bay_sol = solve_ue(bay, {});
    CHECK(br_error(bay, bay_sol, 500) <= 0.02 * 100);
    CHECK(br_error(bay, bay_sol, 2000) <= 0.02 * 100);
  }

  TEST_CASE("best response error shrinks with resolution") {
    Scenario toy = test::data("toy_two_path.json");
    auto sol = solve_ue(toy, {});
    double e100 = br_error(toy, sol, 100), e500 = br_error(toy, sol, 500), e2000 = br_error(toy, sol, 2000);
    CHECK(e500 <= e100 + 0.05);
    CHECK(e2000 <= e500 + 0.05);
    CHECK(e2000 < 0.5);
  }

  TEST_CASE("best response guards its inputs") {
    Scenario s = test::data("toy_two_path.json");
    CHECK_THROWS_AS(discretized_best_response(s, default_pricing(s), 5), std::invalid_argument);
    CHECK_THROWS_AS(discretized_best_response(s, default_pricing(s), 100, 0.0), std::invalid_argument);
  }

  TEST_CASE("brute force paths") {
    CHECK(brute_force_paths(test::data("bay_area_7node.json"), 0).size() == 9);
    Scenario two = load_scenario(R"({
      "name": "two", "nodes": ["o", "d"], "arcs": [{"id": "o-d", "from": "o", "to": "d", "minutes": 5}],
      "stations": [{"node": "d", "capacity_scale": 1, "wait_model": {"kind": "polynomial", "params": {"a": 1, "b": 1, "x": 1}},
                    "lmp_usd_per_mwh": 10}],
      "distributions": {"u": {"kind": "uniform", "min_kwh": 0, "max_kwh": 80}},
      "od_pairs": [{"origin": "o", "destination": "d", "rate_ev_per_hr": 1, "distribution": "u"}],
      "economics": {"alpha_min_per_usd": 1}})");
    CHECK(brute_force_paths(two, 0).size() == 1);

    nlohmann::json j = nlohmann::json::parse(scenario_to_json(test::data("toy_two_path.json")));
    j["nodes"].push_back("island");
    j["stations"].push_back(j["stations"][0]);
    j["stations"].back()["node"] = "island";
    j["classes"] = nlohmann::json::array({{{"name", "stranded"}, {"allowed_stations", {"island"}}}});
    j["od_pairs"][0]["class"] = "stranded";
    CHECK(brute_force_paths(parse_scenario(j.dump()), 0).empty());

    Scenario big = test::data("toy_two_path.json");
    for (int i = 0; i < 10; ++i) big.nodes.push_back("n" + std::to_string(i));
    CHECK_THROWS_AS(brute_force_paths(big, 0), std::length_error);
  }

  TEST_CASE("monte carlo is deterministic given the seed") {
    Scenario s = test::data("bay_area_7node.json");
    auto sol = solve_ue(s, {});
    auto a = monte_carlo_social_cost(s, sol.layout, sol.flows, sol.pricing, 20000, 8);
    auto b = monte_carlo_social_cost(s, sol.layout, sol.flows, sol.pricing, 20000, 8);
    auto c = monte_carlo_social_cost(s, sol.layout, sol.flows, sol.pricing, 20000, 9);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    CHECK(a.value != c.value);
  }

  TEST_CASE("monte carlo on a single path") {
    // alpha 1 and a 1 $/kWh price turn the sampled cost into minutes + eps,
    // so the energy part is the sampled mean of U[0,80].
    Scenario s = single_path(1);
    PricingScheme p = no_fee_pricing(s);
    p.upsilon[0] = 1.0;
    PathLayout layout = ue_layout(s, p);
    auto mc = monte_carlo_social_cost(s, layout, {100}, p, 100000, 3, Accounting::kUserProgram);
    double exact = 100 * (20 + 40) + wait_integral(s.stations[0].wait, 100);
    CHECK(mc.std_error > 0);
    CHECK(std::abs(mc.value - exact) <= 3 * mc.std_error);
    double sampled_mean = (mc.value - 100 * 20 - wait_integral(s.stations[0].wait, 100)) / 100;
    CHECK(std::abs(sampled_mean - 40) <= 3 * mc.std_error / 100);
  }

  TEST_CASE("monte carlo agrees with both programs on the seven node network") {
    Scenario s = test::data("bay_area_7node.json");
    auto ue = solve_ue(s, {});
    auto mu = monte_carlo_social_cost(s, ue.layout, ue.flows, ue.pricing, 1000000, 17, Accounting::kUserProgram);
    CHECK(std::abs(mu.value - ue.objective) <= 1e-3 * ue.objective);

    auto so = solve_so(s, {}, FeeUnits::kLagrangian);
    auto ms = monte_carlo_social_cost(s, so.layout, so.flows, no_fee_pricing(s), 1000000, 17);
    double exact = so_objective(s, so.layout, so.flows);
    CHECK(std::abs(ms.value - exact) <= 1e-3 * exact);
  }

  TEST_CASE("grid search split") {
    Scenario s = test::two_path(20, 20, 25, 25);
    PathLayout layout = ue_layout(s, default_pricing(s));
    double x = grid_search_split(layout, [](const std::vector<double>& f) { return (f[0] - 30) * (f[0] - 30); }, 1000);
    CHECK(x == doctest::Approx(30));
    Scenario bay = test::data("bay_area_7node.json");
    CHECK_THROWS_AS(grid_search_split(ue_layout(bay, default_pricing(bay)), [](const std::vector<double>&) { return 0.0; }, 10),
                    std::invalid_argument);
  }
}
