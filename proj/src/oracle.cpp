#include "tcap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>

namespace tcap {

BestResponseResult discretized_best_response(const Scenario& s, const PricingScheme& prices, int n_bins,
                                             double damping, int max_rounds) {
  if (n_bins < 10) throw std::invalid_argument("best response needs at least 10 bins");
  if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("damping must be in (0,1]");
  const double alpha = s.economics.alpha;
  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t J = s.stations.size();

  BestResponseResult res;
  struct Od {
    std::size_t first;
    std::size_t count;
    double q;
    std::vector<double> eps;
  };
  std::vector<Od> ods;
  double qmax = 0.0;
  for (std::size_t k = 0; k < s.od_pairs.size(); ++k) {
    auto paths = enumerate_feasible_paths(s, k);
    Od od{res.paths.size(), paths.size(), s.od_pairs[k].rate, {}};
    const DemandDistribution& d = s.demand(k);
    for (int b = 0; b < n_bins; ++b) od.eps.push_back(d.inverse_cdf((b + 0.5) / n_bins));
    res.paths.insert(res.paths.end(), paths.begin(), paths.end());
    qmax = std::max(qmax, od.q);
    ods.push_back(std::move(od));
  }

  // mass[od][bin][path], EV/hr; every bin starts spread evenly
  std::vector<std::vector<std::vector<double>>> mass;
  std::vector<double> lam(J, 0.0), load(J, 0.0);
  for (const auto& od : ods) {
    double m = od.q / n_bins / static_cast<double>(od.count);
    mass.emplace_back(n_bins, std::vector<double>(od.count, m));
    for (int b = 0; b < n_bins; ++b)
      for (std::size_t i = 0; i < od.count; ++i) {
        std::size_t j = res.paths[od.first + i].station;
        lam[j] += m;
        load[j] += m * od.eps[b];
      }
  }

  // Cost of path i for a user needing eps when station j sees extra arrivals dl.
  auto cost = [&](const Od& od, std::size_t i, double eps, double dl) {
    const ChargingPath& p = res.paths[od.first + i];
    std::size_t j = p.station;
    const WaitModel& m = s.stations[j].wait;
    double l = lam[j] + dl;
    if (l >= m.saturation_rate()) return inf;
    double c = p.minutes + s.gamma(j) * eps + wait_time(m, std::max(l, 0.0)) +
               alpha * (prices.tau[j] + prices.upsilon[j] * eps);
    if (!m.univariate()) {
      double u = load[j] + dl * eps;
      if (u >= m.c) return inf;
      c += demand_wait_rate(m, std::max(u, 0.0)) * eps;
    }
    return c;
  };
  auto shift = [&](std::size_t j, double dl, double eps) {
    lam[j] += dl;
    load[j] += dl * eps;
  };

  // Gauss-Seidel over bins: a bin moves mass from a dearer used path to its
  // cheapest one until the two costs meet or the dearer path is empty.
  const double tol = 1e-10;
  for (res.rounds = 0; res.rounds < max_rounds; ++res.rounds) {
    double gap = 0.0;
    for (std::size_t o = 0; o < ods.size(); ++o)
      for (int b = 0; b < n_bins; ++b) {
        const Od& od = ods[o];
        const double eps = od.eps[b];
        auto& y = mass[o][b];
        std::size_t best = 0;
        double best_cost = inf;
        for (std::size_t i = 0; i < od.count; ++i) {
          double c = cost(od, i, eps, 0.0);
          if (c < best_cost) {
            best_cost = c;
            best = i;
          }
        }
        std::size_t jb = res.paths[od.first + best].station;
        for (std::size_t i = 0; i < od.count; ++i) {
          if (i == best || y[i] <= 0.0) continue;
          std::size_t ja = res.paths[od.first + i].station;
          double ca = cost(od, i, eps, 0.0);
          if (ca - best_cost <= 0.0) continue;
          gap = std::max(gap, ca - best_cost);
          // excess(x) = c_i - c_best after moving x; decreasing in x
          auto excess = [&](double x) {
            if (ja == jb) return cost(od, i, eps, 0.0) - cost(od, best, eps, 0.0);
            return cost(od, i, eps, -x) - cost(od, best, eps, x);
          };
          double lo = 0.0, hi = y[i];
          if (excess(hi) > 0.0) {
            lo = hi;
          } else {
            for (int it = 0; it < 100 && hi - lo > 1e-15 * od.q; ++it) {
              double mid = 0.5 * (lo + hi);
              (excess(mid) > 0.0 ? lo : hi) = mid;
            }
          }
          double x = damping * lo;
          y[i] -= x;
          y[best] += x;
          shift(ja, -x, eps);
          shift(jb, x, eps);
          best_cost = cost(od, best, eps, 0.0);
        }
      }
    if (gap <= tol * std::max(1.0, qmax)) {
      res.converged = true;
      ++res.rounds;
      break;
    }
  }

  res.flows.assign(res.paths.size(), 0.0);
  for (std::size_t o = 0; o < ods.size(); ++o)
    for (int b = 0; b < n_bins; ++b)
      for (std::size_t i = 0; i < ods[o].count; ++i) res.flows[ods[o].first + i] += mass[o][b][i];
  return res;
}

std::vector<ChargingPath> brute_force_paths(const Scenario& s, std::size_t od) {
  const std::size_t V = s.nodes.size();
  if (V > 12) throw std::length_error("brute_force_paths is limited to 12 nodes");
  const OdPair& pair = s.od_pairs.at(od);
  std::size_t o = *s.node_index(pair.origin);
  std::size_t d = *s.node_index(pair.destination);

  // arcs_between[u][v] lists parallel arcs u->v
  std::vector<std::vector<std::vector<std::size_t>>> arcs_between(V, std::vector<std::vector<std::size_t>>(V));
  for (std::size_t a = 0; a < s.arcs.size(); ++a)
    arcs_between[*s.node_index(s.arcs[a].from)][*s.node_index(s.arcs[a].to)].push_back(a);
  std::vector<std::size_t> allowed = s.allowed_stations(od);

  std::vector<ChargingPath> out;
  std::deque<std::vector<std::size_t>> queue{{o}};
  while (!queue.empty()) {
    std::vector<std::size_t> seq = queue.front();
    queue.pop_front();
    std::size_t u = seq.back();
    if (u == d) {
      // expand parallel arcs
      std::vector<std::vector<std::size_t>> arc_lists{{}};
      for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
        std::vector<std::vector<std::size_t>> grown;
        for (const auto& base : arc_lists)
          for (std::size_t a : arcs_between[seq[k]][seq[k + 1]]) {
            grown.push_back(base);
            grown.back().push_back(a);
          }
        arc_lists = std::move(grown);
      }
      for (const auto& arcs : arc_lists)
        for (std::size_t j : allowed) {
          std::size_t sn = *s.node_index(s.stations[j].node);
          if (std::find(seq.begin(), seq.end(), sn) == seq.end()) continue;
          ChargingPath p;
          p.od = od;
          p.arcs = arcs;
          p.nodes = seq;
          p.station = j;
          for (std::size_t a : arcs) p.minutes += s.arcs[a].minutes;
          out.push_back(p);
        }
      continue;
    }
    for (std::size_t v = 0; v < V; ++v) {
      if (arcs_between[u][v].empty()) continue;
      if (std::find(seq.begin(), seq.end(), v) != seq.end()) continue;
      auto next = seq;
      next.push_back(v);
      queue.push_back(std::move(next));
    }
  }
  return out;
}

MonteCarloResult monte_carlo_social_cost(const Scenario& s, const PathLayout& layout, const std::vector<double>& f,
                                         const PricingScheme& prices, std::size_t n_samples, std::uint64_t seed,
                                         Accounting acc) {
  const double alpha = s.economics.alpha;
  const std::size_t J = s.stations.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  struct Sample {
    std::size_t path;
    double eps;
  };
  std::vector<std::vector<Sample>> samples;
  std::vector<double> lam(J, 0.0), load(J, 0.0);
  for (const auto& b : layout.blocks) {
    const DemandDistribution& d = s.demand(b.od);
    std::vector<double> pi(b.count);
    double cum = 0.0;
    for (std::size_t i = 0; i < b.count; ++i) {
      cum += f[b.begin + i];
      pi[i] = i + 1 == b.count ? d.max_kwh() : d.inverse_cdf(std::clamp(cum / b.q, 0.0, 1.0));
    }
    std::vector<Sample> ss;
    for (std::size_t n = 0; n < n_samples; ++n) {
      double eps = d.inverse_cdf(unif(rng));
      std::size_t i = 0;
      while (i + 1 < b.count && eps >= pi[i]) ++i;
      ss.push_back({b.begin + i, eps});
      std::size_t j = layout.paths[b.begin + i].station;
      lam[j] += b.q / n_samples;
      load[j] += b.q * eps / n_samples;
    }
    samples.push_back(std::move(ss));
  }

  MonteCarloResult res;
  double var = 0.0;
  for (std::size_t k = 0; k < layout.blocks.size(); ++k) {
    const OdBlock& b = layout.blocks[k];
    double sum = 0.0, sum2 = 0.0;
    for (const Sample& x : samples[k]) {
      const ChargingPath& p = layout.paths[x.path];
      std::size_t j = p.station;
      const Station& st = s.stations[j];
      double excess = (s.gamma(j) - s.economics.gamma_min_per_kwh) * x.eps;
      double c = p.minutes + excess;
      if (acc == Accounting::kUserProgram) {
        c += alpha * (prices.tau[j] + prices.upsilon[j] * x.eps);
      } else {
        c += wait_time(st.wait, lam[j]) + alpha * st.marginal_cost() * x.eps;
        if (!st.wait.univariate()) c += demand_wait_rate(st.wait, load[j]) * x.eps;
      }
      sum += c;
      sum2 += c * c;
    }
    double n = static_cast<double>(samples[k].size());
    double mean = sum / n;
    res.value += b.q * mean;
    var += b.q * b.q * std::max(0.0, sum2 / n - mean * mean) / n;
  }
  for (std::size_t j = 0; j < J; ++j) {
    const Station& st = s.stations[j];
    if (acc == Accounting::kUserProgram) {
      res.value += wait_integral(st.wait, lam[j]) + demand_wait_potential(st.wait, load[j]);
    } else {
      res.value += alpha * st.quad_cost * load[j] * load[j];
    }
  }
  res.std_error = std::sqrt(var);
  return res;
}

double grid_search_split(const PathLayout& layout, const std::function<double(const std::vector<double>&)>& objective,
                         int n_grid) {
  if (layout.blocks.size() != 1 || layout.blocks[0].count != 2)
    throw std::invalid_argument("grid_search_split needs one OD with two paths");
  double q = layout.blocks[0].q;
  double best_x = 0.0, best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n_grid; ++k) {
    double x = q * k / n_grid;
    double v = objective({x, q - x});
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace tcap
