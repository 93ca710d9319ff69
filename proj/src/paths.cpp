#include "tcap/paths.hpp"

#include <algorithm>
#include <numeric>

namespace tcap {

std::string ChargingPath::key() const {
  std::string k = std::to_string(od) + ":";
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    if (i) k += ",";
    k += std::to_string(arcs[i]);
  }
  return k + "@" + std::to_string(station);
}

namespace {

struct Dfs {
  const Scenario& s;
  std::size_t od;
  std::size_t dest;
  std::vector<int> station_at;  // station index per node or -1
  std::vector<bool> allowed;    // per station
  std::vector<std::vector<std::size_t>> out_arcs;
  std::vector<bool> on_path;
  std::vector<std::size_t> arc_stack;
  std::vector<std::size_t> node_stack;
  std::vector<ChargingPath> found;

  void visit(std::size_t u, double minutes) {
    if (u == dest) {
      for (std::size_t n : node_stack) {
        int st = station_at[n];
        if (st < 0 || !allowed[st]) continue;
        ChargingPath p;
        p.od = od;
        p.arcs = arc_stack;
        p.nodes = node_stack;
        p.station = static_cast<std::size_t>(st);
        p.minutes = minutes;
        found.push_back(std::move(p));
      }
      return;
    }
    for (std::size_t a : out_arcs[u]) {
      std::size_t v = *s.node_index(s.arcs[a].to);
      if (on_path[v]) continue;
      on_path[v] = true;
      arc_stack.push_back(a);
      node_stack.push_back(v);
      visit(v, minutes + s.arcs[a].minutes);
      node_stack.pop_back();
      arc_stack.pop_back();
      on_path[v] = false;
    }
  }
};

}  // namespace

std::vector<ChargingPath> enumerate_feasible_paths(const Scenario& s, std::size_t od) {
  const OdPair& pair = s.od_pairs.at(od);
  auto o = s.node_index(pair.origin);
  auto d = s.node_index(pair.destination);
  if (!o || !d) return {};

  Dfs dfs{s, od, *d, {}, {}, {}, {}, {}, {}, {}};
  dfs.station_at.assign(s.nodes.size(), -1);
  for (std::size_t j = 0; j < s.stations.size(); ++j)
    if (auto n = s.node_index(s.stations[j].node)) dfs.station_at[*n] = static_cast<int>(j);
  dfs.allowed.assign(s.stations.size(), false);
  for (std::size_t j : s.allowed_stations(od)) dfs.allowed[j] = true;
  dfs.out_arcs.resize(s.nodes.size());
  for (std::size_t a = 0; a < s.arcs.size(); ++a) {
    auto from = s.node_index(s.arcs[a].from);
    auto to = s.node_index(s.arcs[a].to);
    if (from && to) dfs.out_arcs[*from].push_back(a);
  }
  dfs.on_path.assign(s.nodes.size(), false);
  dfs.on_path[*o] = true;
  dfs.node_stack.push_back(*o);
  dfs.visit(*o, 0.0);
  return dfs.found;
}

double effective_price(const Scenario& s, std::size_t station, double upsilon, double alpha) {
  return upsilon + (s.gamma(station) - s.economics.gamma_min_per_kwh) / alpha;
}

std::vector<std::size_t> order_paths_by_price(const std::vector<double>& prices,
                                              const std::vector<double>& intercepts,
                                              const std::vector<std::size_t>& stations) {
  std::vector<std::size_t> idx(prices.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (prices[a] != prices[b]) return prices[a] > prices[b];
    if (intercepts[a] != intercepts[b]) return intercepts[a] < intercepts[b];
    return stations[a] < stations[b];
  });
  return idx;
}

double path_intercept(const Scenario& s, const ChargingPath& p, const std::vector<double>& lambda,
                      const PricingScheme& fees, double alpha) {
  return p.minutes + wait_time(s.stations[p.station].wait, lambda.at(p.station)) + alpha * fees.tau.at(p.station);
}

std::string describe_path(const Scenario& s, const ChargingPath& p) {
  std::string out;
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    if (i) out += " > ";
    const std::string& n = s.nodes[p.nodes[i]];
    out += n;
    if (s.stations[p.station].node == n) out += "*";
  }
  return out;
}

}  // namespace tcap
