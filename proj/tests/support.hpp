#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "tcap/equilibrium.hpp"
#include "tcap/scenario.hpp"

namespace tcap::test {

inline std::string data_path(const std::string& name) { return std::string(TCAP_DATA_DIR) + "/" + name; }

inline Scenario data(const std::string& name) { return load_scenario_file(data_path(name)); }

inline Scenario with_alpha(Scenario s, double alpha) {
  s.economics.alpha = alpha;
  return s;
}

// Two disjoint o->x->d routes of `m1` and `m2` road minutes each, stations at
// the midpoints with the given LMPs and the experiment's polynomial wait.
inline Scenario two_path(double m1, double m2, double lmp1, double lmp2, double q = 100.0, double alpha = 10.0) {
  std::string text = R"({
    "name": "two_path",
    "nodes": ["o", "a", "b", "d"],
    "arcs": [
      {"id": "o-a", "from": "o", "to": "a", "minutes": )" + std::to_string(m1 / 2) + R"(},
      {"id": "a-d", "from": "a", "to": "d", "minutes": )" + std::to_string(m1 / 2) + R"(},
      {"id": "o-b", "from": "o", "to": "b", "minutes": )" + std::to_string(m2 / 2) + R"(},
      {"id": "b-d", "from": "b", "to": "d", "minutes": )" + std::to_string(m2 / 2) + R"(}
    ],
    "stations": [
      {"node": "a", "capacity_scale": 10, "wait_model": {"kind": "polynomial", "params": {"a": 0.4, "b": 3, "x": 10}},
       "lmp_usd_per_mwh": )" + std::to_string(lmp1) + R"(},
      {"node": "b", "capacity_scale": 10, "wait_model": {"kind": "polynomial", "params": {"a": 0.4, "b": 3, "x": 10}},
       "lmp_usd_per_mwh": )" + std::to_string(lmp2) + R"(}
    ],
    "distributions": {"u": {"kind": "uniform", "min_kwh": 0, "max_kwh": 80}},
    "od_pairs": [{"origin": "o", "destination": "d", "rate_ev_per_hr": )" + std::to_string(q) + R"(, "distribution": "u"}],
    "economics": {"alpha_min_per_usd": )" + std::to_string(alpha) + R"(}
  })";
  return load_scenario(text);
}

// Random point of the product of scaled simplices with every coordinate at
// least `floor` of its block rate.
inline std::vector<double> random_feasible(const PathLayout& layout, std::mt19937_64& rng, double floor = 0.0) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> f(layout.paths.size());
  for (const auto& b : layout.blocks) {
    double sum = 0.0;
    for (std::size_t i = 0; i < b.count; ++i) sum += f[b.begin + i] = ex(rng);
    double free = b.q * (1.0 - floor * static_cast<double>(b.count));
    for (std::size_t i = 0; i < b.count; ++i) f[b.begin + i] = floor * b.q + free * f[b.begin + i] / sum;
  }
  return f;
}

// Largest relative error of g against central differences of fn.
template <class Fn>
double fd_error(Fn&& fn, const PathLayout& layout, const std::vector<double>& f, const std::vector<double>& g, double h) {
  // Central differences with one Richardson step. The last path of a block
  // sits on Q = q, where the extended quantile integral is only C1, so it
  // takes the backward second-order stencil; coordinates within 2h of zero
  // take the forward one so flows stay nonnegative.
  std::vector<bool> last(f.size(), false);
  for (const auto& b : layout.blocks)
    if (b.count > 0) last[b.begin + b.count - 1] = true;
  double worst = 0.0;
  std::vector<double> x = f;
  auto at = [&](std::size_t i, double d) {
    x[i] = f[i] + d;
    double v = fn(x);
    x[i] = f[i];
    return v;
  };
  const double f0 = fn(f);
  for (std::size_t i = 0; i < f.size(); ++i) {
    double fd;
    if (f[i] < 2 * h) {
      fd = (-3 * f0 + 4 * at(i, h) - at(i, 2 * h)) / (2 * h);
    } else if (last[i]) {
      fd = (3 * f0 - 4 * at(i, -h) + at(i, -2 * h)) / (2 * h);
    } else {
      auto c = [&](double k) { return (at(i, k) - at(i, -k)) / (2 * k); };
      fd = (4 * c(h / 2) - c(h)) / 3;
    }
    worst = std::max(worst, std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i])));
  }
  return worst;
}

// True when every station runs below `rho` of its saturation point. Closer
// to the pole the objective is too large for double-precision differences.
inline bool well_inside(const Program& prog, const std::vector<double>& f, double rho = 0.95) {
  const Scenario& s = prog.scenario();
  StationState st = prog.state(f);
  for (std::size_t j = 0; j < s.stations.size(); ++j) {
    const WaitModel& m = s.stations[j].wait;
    if (st.arrivals[j] > rho * m.saturation_rate()) return false;
    if (!m.univariate() && st.loads[j] > rho * m.c) return false;
  }
  return true;
}

// Step for fd_error: 1e-6 of the largest OD rate, shrunk near a saturated
// station so the stencil stays far inside the pole.
inline double fd_step(const Program& prog, const std::vector<double>& f) {
  const Scenario& s = prog.scenario();
  StationState st = prog.state(f);
  double eps_max = 0.0;
  for (std::size_t k = 0; k < s.od_pairs.size(); ++k) eps_max = std::max(eps_max, s.demand(k).max_kwh());
  double h = 1e-6 * prog.max_rate();
  for (std::size_t j = 0; j < s.stations.size(); ++j) {
    const WaitModel& m = s.stations[j].wait;
    if (std::isfinite(m.saturation_rate())) h = std::min(h, 1e-4 * (m.saturation_rate() - st.arrivals[j]));
    if (!m.univariate()) h = std::min(h, 1e-4 * (m.c - st.loads[j]) / eps_max);
  }
  return h;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Flow on paths through `node`, summed over every OD pair.
inline double flow_via(const Scenario& s, const PathLayout& layout, const std::vector<double>& f,
                       const std::string& node) {
  std::size_t n = *s.node_index(node);
  double sum = 0.0;
  for (std::size_t i = 0; i < layout.paths.size(); ++i)
    if (std::find(layout.paths[i].nodes.begin(), layout.paths[i].nodes.end(), n) != layout.paths[i].nodes.end())
      sum += f[i];
  return sum;
}

}  // namespace tcap::test
