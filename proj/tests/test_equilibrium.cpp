#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "tcap/equilibrium.hpp"
#include "tcap/oracle.hpp"

using namespace tcap;

namespace {

const char* kLine = R"({
  "name": "line",
  "nodes": ["o", "s", "d"],
  "arcs": [{"id": "o-s", "from": "o", "to": "s", "minutes": %A}, {"id": "s-d", "from": "s", "to": "d", "minutes": %B}],
  "stations": [{"node": "s", "capacity_scale": 1, "wait_model": {"kind": "polynomial", "params": %W},
                "lmp_usd_per_mwh": 20}],
  "distributions": {"u": {"kind": "uniform", "min_kwh": 0, "max_kwh": 80}},
  "od_pairs": [{"origin": "o", "destination": "d", "rate_ev_per_hr": 100, "distribution": "u"}],
  "economics": {"alpha_min_per_usd": 10}
})";

Scenario line(double a, double b, const std::string& wait) {
  std::string t = kLine;
  t.replace(t.find("%A"), 2, std::to_string(a));
  t.replace(t.find("%B"), 2, std::to_string(b));
  t.replace(t.find("%W"), 2, wait);
  return load_scenario(t);
}

std::vector<Scenario> univariate_corpus() {
  Scenario bay = test::data("bay_area_7node.json");
  return {test::with_alpha(bay, 1),  bay, test::with_alpha(bay, 25), test::data("bay_area_7node_classes.json"),
          test::data("bay_area_10node.json"), test::data("toy_two_path.json"), test::data("toy_mmc.json")};
}

SolverOptions opts() { return SolverOptions{}; }

}  // namespace

TEST_SUITE("equilibrium") {
  TEST_CASE("objective on a single path") {
    Scenario s = line(10, 10, R"({"a": 0.4, "b": 3, "x": 10})");
    PricingScheme p = no_fee_pricing(s);
    p.upsilon[0] = 0.0;
    PathLayout layout = ue_layout(s, p);
    std::vector<double> f{100.0};
    double road_and_wait = 2000 + wait_integral(s.stations[0].wait, 100);
    CHECK(ue_objective(s, layout, f, p) == doctest::Approx(road_and_wait));
    p.upsilon[0] = 0.02;
    CHECK(ue_objective(s, layout, f, p) == doctest::Approx(road_and_wait + 800));
    p.tau[0] = 1.5;
    CHECK(ue_objective(s, layout, f, p) == doctest::Approx(road_and_wait + 800 + 10 * 1.5 * 100));
  }

  TEST_CASE("identical parallel paths have equal partials") {
    Scenario s = test::two_path(20, 20, 25, 25);
    PricingScheme p = default_pricing(s);
    PathLayout layout = ue_layout(s, p);
    auto g = ue_gradient(s, layout, {50, 50}, p);
    CHECK(g[0] == doctest::Approx(g[1]));
  }

  TEST_CASE("gradient matches central differences") {
    std::vector<Scenario> corpus = univariate_corpus();
    corpus.push_back(test::data("toy_demand_dependent.json"));
    std::mt19937_64 rng(2024);
    for (const Scenario& s : corpus) {
      PricingScheme p = default_pricing(s);
      Program prog(s, ProgramKind::kUserEquilibrium, p, ue_layout(s, p));
      auto fn = [&](const std::vector<double>& x) { return prog.value(x); };
      double worst = 0.0;
      int tested = 0;
      while (tested < 100) {
        auto f = test::random_feasible(prog.layout(), rng, 0.01);
        if (!test::well_inside(prog, f)) continue;
        std::vector<double> g(f.size());
        prog.gradient(f, g);
        worst = std::max(worst, test::fd_error(fn, prog.layout(), f, g, test::fd_step(prog, f)));
        ++tested;
      }
      INFO(s.name);
      CHECK(worst <= 1e-6);
    }
  }

  TEST_CASE("gradient at a collapsed segment uses the shared quantile") {
    Scenario s = test::data("bay_area_7node.json");
    PricingScheme p = default_pricing(s);
    PathLayout layout = ue_layout(s, p);
    std::vector<double> f(layout.paths.size(), 0.0);
    f[0] = 40;
    f[3] = 60;
    Program prog(s, ProgramKind::kUserEquilibrium, p, layout);
    std::vector<double> g(f.size());
    prog.gradient(f, g);
    auto fn = [&](const std::vector<double>& x) { return prog.value(x); };
    CHECK(test::fd_error(fn, layout, f, g, 1e-6) <= 1e-6);
  }

  TEST_CASE("symmetric toy splits evenly") {
    Scenario s = test::two_path(20, 20, 25, 25);
    auto sol = solve_ue(s, opts());
    CHECK(sol.converged);
    CHECK(sol.flows[0] == doctest::Approx(50).epsilon(1e-7));
    CHECK(sol.flows[1] == doctest::Approx(50).epsilon(1e-7));
  }

  TEST_CASE("unequal prices agree with best response") {
    Scenario s = test::data("toy_two_path.json");
    auto sol = solve_ue(s, opts());
    REQUIRE(sol.converged);
    auto br = discretized_best_response(s, default_pricing(s), 2000);
    CHECK(br.converged);
    for (std::size_t i = 0; i < sol.flows.size(); ++i)
      for (std::size_t k = 0; k < br.paths.size(); ++k)
        if (br.paths[k].key() == sol.layout.paths[i].key()) CHECK(std::abs(sol.flows[i] - br.flows[k]) <= 2.0);
  }

  TEST_CASE("east route carries more at small alpha") {
    Scenario s = test::with_alpha(test::data("bay_area_7node.json"), 0.1);
    auto sol = solve_ue(s, opts());
    REQUIRE(sol.converged);
    CHECK(test::flow_via(s, sol.layout, sol.flows, "concord") > test::flow_via(s, sol.layout, sol.flows, "winters"));
  }

  TEST_CASE("converged solves certify equilibrium") {
    Scenario bay = test::data("bay_area_7node.json");
    std::vector<Scenario> corpus = univariate_corpus();
    corpus.push_back(test::with_alpha(bay, 5));
    for (const Scenario& s : corpus) {
      auto sol = solve_ue(s, opts());
      INFO(s.name << " alpha " << s.economics.alpha);
      REQUIRE(sol.converged);
      CHECK(sol.wardrop_gap <= 1e-4);

      for (const auto& b : sol.layout.blocks) {
        double sum = 0.0;
        for (std::size_t i = 0; i < b.count; ++i) {
          CHECK(sol.flows[b.begin + i] >= 0.0);
          sum += sol.flows[b.begin + i];
        }
        CHECK(sum == doctest::Approx(b.q).epsilon(1e-12));
      }

      auto closed = intercept_thresholds(s, sol.layout, sol.flows, sol.pricing);
      for (std::size_t k = 0; k < sol.layout.blocks.size(); ++k) {
        const auto& pi = sol.thresholds[k];
        const double eps_max = s.demand(sol.layout.blocks[k].od).max_kwh();
        for (std::size_t i = 1; i < pi.size(); ++i) CHECK(pi[i] >= pi[i - 1]);
        for (std::size_t i = 1; i + 1 < pi.size(); ++i)
          if (std::isfinite(closed[k][i]) && pi[i] > 1e-9 && pi[i] < eps_max - 1e-9)
            CHECK(std::abs(closed[k][i] - pi[i]) <= 1e-6 * eps_max);
      }
    }
  }

  TEST_CASE("ranked costs meet at interior thresholds") {
    Scenario s = test::data("bay_area_7node.json");
    auto sol = solve_ue(s, opts());
    REQUIRE(sol.converged);
    Program prog(s, ProgramKind::kUserEquilibrium, sol.pricing, sol.layout);
    StationState st = prog.state(sol.flows);
    const auto& pi = sol.thresholds[0];
    int checked = 0;
    for (std::size_t i = 0; i + 1 < sol.flows.size(); ++i) {
      if (sol.flows[i] <= 1e-6) continue;
      std::size_t j = i + 1;
      while (j < sol.flows.size() && sol.flows[j] <= 1e-6) ++j;
      if (j == sol.flows.size()) break;
      double e = pi[i + 1];
      double ci = trip_cost(s, sol.layout.paths[i], e, st, sol.pricing);
      double cj = trip_cost(s, sol.layout.paths[j], e, st, sol.pricing);
      CHECK(ci == doctest::Approx(cj).epsilon(1e-6));
      ++checked;
    }
    CHECK(checked >= 1);
  }

  TEST_CASE("cheapest station serves the largest requests") {
    Scenario s = test::data("bay_area_7node.json");
    auto sol = solve_ue(s, opts());
    std::size_t last = sol.flows.size();
    while (last-- > 0)
      if (sol.flows[last] > 1e-6) break;
    CHECK(s.stations[sol.layout.paths[last].station].node == "davis");
    CHECK(sol.thresholds[0][last + 1] == 80.0);
  }

  TEST_CASE("threshold examples") {
    auto d = DemandDistribution::uniform(0, 80);
    CHECK(extract_thresholds({50, 50}, 100, d) == std::vector<double>{0, 40, 80});
    CHECK(extract_thresholds({0, 100}, 100, d) == std::vector<double>{0, 0, 80});
    auto f = flows_from_thresholds({0, 40, 80}, 100, d);
    CHECK(f[0] == doctest::Approx(50));
    CHECK(f[1] == doctest::Approx(50));
    CHECK(flows_from_thresholds({0, 80}, 100, d) == std::vector<double>{100});
    f = flows_from_thresholds({0, 20, 20, 80}, 100, d);
    CHECK(f[0] == doctest::Approx(25));
    CHECK(f[1] == 0.0);
    CHECK(f[2] == doctest::Approx(75));
  }

  TEST_CASE("threshold round trip") {
    std::mt19937_64 rng(77);
    std::vector<DemandDistribution> laws{DemandDistribution::uniform(0, 80), DemandDistribution::uniform(12, 55),
                                         DemandDistribution::piecewise({{5, 0}, {20, 0.6}, {50, 0.95}, {70, 1}}),
                                         DemandDistribution::piecewise({{0, 0}, {20, 0.8}, {80, 1}})};
    std::exponential_distribution<double> ex(1.0);
    std::bernoulli_distribution zero(0.25);
    for (const auto& d : laws)
      for (int trial = 0; trial < 200; ++trial) {
        double q = 10 + 190 * ex(rng);
        std::size_t k = 1 + trial % 9;
        std::vector<double> f(k);
        double sum = 0.0;
        for (auto& x : f) sum += x = zero(rng) ? 0.0 : ex(rng);
        if (sum == 0.0) f[0] = sum = 1.0;
        for (auto& x : f) x *= q / sum;
        auto back = flows_from_thresholds(extract_thresholds(f, q, d), q, d);
        CHECK(test::max_abs_diff(back, f) <= 1e-9 * q);
      }
  }

  TEST_CASE("random starts reach the same flows") {
    for (const Scenario& s : univariate_corpus()) {
      PricingScheme p = default_pricing(s);
      Program prog(s, ProgramKind::kUserEquilibrium, p, ue_layout(s, p));
      std::mt19937_64 rng(31);
      std::vector<std::vector<double>> sols;
      for (int k = 0; k < 5; ++k) sols.push_back(minimize(prog, prog.random_start(rng), opts()).flows);
      INFO(s.name << " alpha " << s.economics.alpha);
      for (int k = 1; k < 5; ++k) CHECK(test::max_abs_diff(sols[0], sols[k]) <= 1e-5 * prog.max_rate());
    }
  }

  TEST_CASE("accepted steps never increase the objective") {
    for (const Scenario& s : univariate_corpus()) {
      PricingScheme p = default_pricing(s);
      Program prog(s, ProgramKind::kUserEquilibrium, p, ue_layout(s, p));
      auto r = minimize(prog, prog.uniform_start(), opts(), true);
      for (std::size_t i = 1; i < r.trace.size(); ++i)
        CHECK(r.trace[i] <= r.trace[i - 1] + 1e-12 * std::abs(r.trace[i - 1]));
    }
  }

  TEST_CASE("trip cost") {
    Scenario s = line(20, 25, R"({"a": 2, "b": 1, "x": 1})");
    auto paths = enumerate_feasible_paths(s, 0);
    StationState st{{1.0}, {0.0}};
    PricingScheme p = no_fee_pricing(s);
    p.upsilon[0] = 0.02;
    CHECK(trip_cost(s, paths[0], 40, st, p) == doctest::Approx(103));
    CHECK(trip_cost(s, paths[0], 0, st, p) == doctest::Approx(47));
  }

  TEST_CASE("wardrop gap") {
    Scenario sym = test::two_path(20, 20, 25, 25);
    PricingScheme p = default_pricing(sym);
    PathLayout layout = ue_layout(sym, p);
    CHECK(wardrop_gap(sym, layout, {50, 50}, p) <= 1e-12);

    Scenario s = test::data("toy_two_path.json");
    p = default_pricing(s);
    layout = ue_layout(s, p);
    CHECK(wardrop_gap(s, layout, {100, 0}, p) > 0.0);
    CHECK(wardrop_gap(s, layout, {0, 100}, p) > 0.0);
  }

  TEST_CASE("objective agrees with per-user accounting") {
    Scenario s = test::data("bay_area_7node.json");
    auto sol = solve_ue(s, opts());
    auto mc = monte_carlo_social_cost(s, sol.layout, sol.flows, sol.pricing, 100000, 5, Accounting::kUserProgram);
    CHECK(std::abs(mc.value - sol.objective) <= 1e-3 * sol.objective);
  }

  TEST_CASE("load-dependent waits report every stationary point") {
    Scenario s = test::data("toy_demand_dependent.json");
    auto sol = solve_ue(s, opts());
    CHECK(sol.nonconvex);
    CHECK(sol.converged);
    CHECK_FALSE(sol.stationary_points.empty());
    PricingScheme p = default_pricing(s);
    Program prog(s, ProgramKind::kUserEquilibrium, p, sol.layout);
    for (const auto& pt : sol.stationary_points) {
      std::vector<double> g(pt.size());
      prog.gradient(pt, g);
      CHECK(prog.residual(pt, g) <= 1e-6);
    }
  }

  TEST_CASE("iteration cap reports non-convergence") {
    SolverOptions o;
    o.max_iters = 1;
    auto sol = solve_ue(test::data("bay_area_10node.json"), o);
    CHECK_FALSE(sol.converged);
    CHECK_FALSE(sol.diagnostics.empty());
  }
}
