#include "tcap/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tcap {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kShrink = 0.5;
constexpr int kMaxBacktracks = 80;
constexpr int kGapGrid = 1000;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

MinimizeResult minimize(const Program& prog, std::vector<double> f, const SolverOptions& opts,
                        bool keep_trace) {
  MinimizeResult res;
  const std::size_t n = prog.size();
  prog.project(f);
  double F = prog.value(f);
  if (!std::isfinite(F)) {
    // Pull the start toward the uniform split until every station is below
    // saturation.
    auto u = prog.uniform_start();
    for (int t = 0; t < 60 && !std::isfinite(F); ++t) {
      for (std::size_t i = 0; i < n; ++i) f[i] = 0.5 * (f[i] + u[i]);
      F = prog.value(f);
    }
    if (!std::isfinite(F)) throw SaturationError("no start below station saturation");
  }
  std::vector<double> g(n), ft(n), gt(n), d(n);
  prog.gradient(f, g);
  prog.center(f, g);
  const double tol = opts.residual_tol * prog.max_rate();
  double step = 0.1 * prog.max_rate() / std::max(inf_norm(g), 1e-12);
  const bool convex = prog.scenario().univariate();
  if (keep_trace) res.trace.push_back(F);

  int it = 0;
  double r = prog.residual(f, g);
  for (; it < opts.max_iters; ++it) {
    if (r <= tol) {
      res.stationary = true;
      break;
    }

    double t = step;
    bool accepted = false;
    double Ft = F;
    for (int ls = 0; ls < kMaxBacktracks; ++ls) {
      for (std::size_t i = 0; i < n; ++i) ft[i] = f[i] - t * g[i];
      prog.project(ft);
      for (std::size_t i = 0; i < n; ++i) d[i] = ft[i] - f[i];
      if (inf_norm(d) == 0.0) break;
      double slope = dot(g, d);
      Ft = prog.value(ft);
      if (Ft <= F + kArmijo * slope) {
        accepted = true;
        break;
      }
      // Near the optimum F cannot resolve the decrease. For a convex program
      // phi'(t) <= c phi'(0) implies the Armijo condition, and derivatives do
      // not cancel.
      if (convex && std::isfinite(Ft)) {
        prog.gradient(ft, gt);
        prog.center(ft, gt);
        if (dot(gt, d) <= kArmijo * slope) {
          accepted = true;
          break;
        }
      }
      t *= kShrink;
    }
    if (!accepted) {
      res.stalled = true;
      break;
    }

    prog.gradient(ft, gt);
    prog.center(ft, gt);
    double ss = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ss += d[i] * d[i];
      sy += d[i] * (gt[i] - g[i]);
    }
    step = sy > 0.0 ? ss / sy : 2.0 * t;
    step = std::clamp(step, 1e-14, 1e14);
    f.swap(ft);
    g.swap(gt);
    F = Ft;
    if (keep_trace) res.trace.push_back(F);
    r = prog.residual(f, g);
  }
  res.flows = std::move(f);
  res.value = F;
  res.residual = r;
  res.iterations = it;
  return res;
}

double ue_objective(const Scenario& s, const PathLayout& layout, const std::vector<double>& f,
                    const PricingScheme& prices) {
  return Program(s, ProgramKind::kUserEquilibrium, prices, layout).value(f);
}

std::vector<double> ue_gradient(const Scenario& s, const PathLayout& layout, const std::vector<double>& f,
                                const PricingScheme& prices) {
  std::vector<double> g(f.size());
  Program(s, ProgramKind::kUserEquilibrium, prices, layout).gradient(f, g);
  return g;
}

PathLayout ue_layout(const Scenario& s, const PricingScheme& prices) {
  std::vector<double> theta(s.stations.size());
  for (std::size_t j = 0; j < s.stations.size(); ++j)
    theta[j] = effective_price(s, j, prices.upsilon.at(j), s.economics.alpha);
  return ranked_layout(s, theta, prices.tau);
}

std::vector<double> extract_thresholds(const std::vector<double>& block_flows, double q,
                                       const DemandDistribution& d) {
  std::vector<double> pi(block_flows.size() + 1);
  pi.front() = d.min_kwh();
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < block_flows.size(); ++i) {
    cum += block_flows[i];
    pi[i + 1] = d.inverse_cdf(std::clamp(cum / q, 0.0, 1.0));
  }
  pi.back() = d.max_kwh();
  return pi;
}

std::vector<std::vector<double>> extract_thresholds(const Scenario& s, const PathLayout& layout,
                                                    const std::vector<double>& f) {
  std::vector<std::vector<double>> out;
  for (const auto& b : layout.blocks) {
    std::vector<double> bf(f.begin() + b.begin, f.begin() + b.begin + b.count);
    out.push_back(extract_thresholds(bf, b.q, s.demand(b.od)));
  }
  return out;
}

std::vector<double> flows_from_thresholds(const std::vector<double>& pi, double q, const DemandDistribution& d) {
  std::vector<double> f;
  for (std::size_t i = 1; i < pi.size(); ++i) f.push_back(q * (d.cdf(pi[i]) - d.cdf(pi[i - 1])));
  return f;
}

double trip_cost(const Scenario& s, const ChargingPath& p, double eps, const StationState& state,
                 const PricingScheme& prices) {
  const Station& st = s.stations[p.station];
  double cost = p.minutes + s.gamma(p.station) * eps + wait_time(st.wait, state.arrivals[p.station]);
  if (!st.wait.univariate()) cost += demand_wait_rate(st.wait, state.loads[p.station]) * eps;
  return cost + s.economics.alpha * (prices.tau[p.station] + prices.upsilon[p.station] * eps);
}

std::vector<std::vector<double>> intercept_thresholds(const Scenario& s, const PathLayout& layout,
                                                      const std::vector<double>& f,
                                                      const PricingScheme& prices) {
  Program prog(s, ProgramKind::kUserEquilibrium, prices, layout);
  StationState st = prog.state(f);
  const double alpha = s.economics.alpha;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> out;
  for (const auto& b : layout.blocks) {
    std::vector<double> pi(b.count + 1, nan);
    auto used = [&](std::size_t i) { return f[b.begin + i] > 1e-9 * b.q; };
    auto psi = [&](std::size_t i) {
      const ChargingPath& p = layout.paths[b.begin + i];
      return p.minutes + wait_time(s.stations[p.station].wait, st.arrivals[p.station]) + alpha * prices.tau[p.station];
    };
    auto slope = [&](std::size_t i) {
      const ChargingPath& p = layout.paths[b.begin + i];
      const WaitModel& m = s.stations[p.station].wait;
      double extra = m.univariate() ? 0.0 : demand_wait_rate(m, st.loads[p.station]);
      return alpha * effective_price(s, p.station, prices.upsilon[p.station], alpha) + extra;
    };
    for (std::size_t i = 1; i < b.count; ++i) {
      std::optional<std::size_t> lo, hi;
      for (std::size_t k = i; k-- > 0;)
        if (used(k)) {
          lo = k;
          break;
        }
      for (std::size_t k = i; k < b.count; ++k)
        if (used(k)) {
          hi = k;
          break;
        }
      if (!lo || !hi) continue;
      double ds = slope(*lo) - slope(*hi);
      if (ds == 0.0) continue;
      pi[i] = (psi(*hi) - psi(*lo)) / ds;
    }
    out.push_back(pi);
  }
  return out;
}

double wardrop_gap(const Scenario& s, const PathLayout& layout, const std::vector<double>& f,
                   const PricingScheme& prices) {
  Program prog(s, ProgramKind::kUserEquilibrium, prices, layout);
  StationState st = prog.state(f);
  double excess = 0.0, base = 0.0;
  for (const auto& b : layout.blocks) {
    const DemandDistribution& d = s.demand(b.od);
    std::vector<double> upper(b.count);
    double cum = 0.0;
    for (std::size_t i = 0; i < b.count; ++i) upper[i] = (cum += f[b.begin + i]) / b.q;
    upper.back() = std::numeric_limits<double>::infinity();
    double ex = 0.0, mn = 0.0;
    std::size_t seg = 0;
    for (int m = 0; m < kGapGrid; ++m) {
      double t = (m + 0.5) / kGapGrid;
      double eps = d.inverse_cdf(t);
      while (t >= upper[seg]) ++seg;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < b.count; ++i)
        best = std::min(best, trip_cost(s, layout.paths[b.begin + i], eps, st, prices));
      double mine = trip_cost(s, layout.paths[b.begin + seg], eps, st, prices);
      ex += mine - best;
      mn += best;
    }
    excess += b.q * ex / kGapGrid;
    base += b.q * mn / kGapGrid;
  }
  return base > 0.0 ? std::max(0.0, excess / base) : 0.0;
}

EquilibriumSolution make_solution(const Program& prog, const MinimizeResult& r) {
  const Scenario& s = prog.scenario();
  EquilibriumSolution sol;
  sol.kind = prog.kind();
  sol.layout = prog.layout();
  sol.pricing = prog.kind() == ProgramKind::kUserEquilibrium ? prog.pricing() : no_fee_pricing(s);
  sol.flows = r.flows;
  StationState st = prog.state(r.flows);
  sol.arrivals = st.arrivals;
  sol.loads = st.loads;
  for (std::size_t j = 0; j < s.stations.size(); ++j) sol.waits.push_back(wait_time(s.stations[j].wait, st.arrivals[j]));
  sol.thresholds = extract_thresholds(s, sol.layout, sol.flows);
  sol.objective = r.value;
  sol.residual = r.residual;
  sol.iterations = r.iterations;
  if (prog.kind() == ProgramKind::kUserEquilibrium)
    sol.wardrop_gap = wardrop_gap(s, sol.layout, sol.flows, sol.pricing);
  if (r.stalled) sol.diagnostics.push_back("objective stalled before the residual target");
  return sol;
}

EquilibriumSolution solve_ue(const Scenario& s, const SolverOptions& opts, const std::optional<PricingScheme>& prices) {
  PricingScheme p = prices ? *prices : default_pricing(s);
  Program prog(s, ProgramKind::kUserEquilibrium, p, ue_layout(s, p));

  if (s.univariate()) {
    MinimizeResult r = minimize(prog, prog.uniform_start(), opts);
    EquilibriumSolution sol = make_solution(prog, r);
    sol.converged = (r.stationary || r.stalled) && sol.wardrop_gap <= opts.gap_tol;
    if (!sol.converged) sol.diagnostics.push_back("wardrop gap or residual target not reached");
    return sol;
  }

  // Load-dependent waits make the program nonconvex: collect the stationary
  // points reached from several seeded starts and keep the lowest.
  std::mt19937_64 rng(opts.seed);
  std::vector<MinimizeResult> runs;
  runs.push_back(minimize(prog, prog.uniform_start(), opts));
  for (int k = 1; k < std::max(1, opts.starts); ++k) runs.push_back(minimize(prog, prog.random_start(rng), opts));

  std::size_t best = 0;
  for (std::size_t k = 1; k < runs.size(); ++k)
    if (runs[k].value < runs[best].value) best = k;
  EquilibriumSolution sol = make_solution(prog, runs[best]);
  sol.nonconvex = true;
  const double sep = 1e-4 * prog.max_rate();
  bool all_stationary = true;
  for (const auto& r : runs) {
    all_stationary = all_stationary && r.residual <= 1e-6;
    bool distinct = true;
    for (const auto& pt : sol.stationary_points) {
      double dmax = 0.0;
      for (std::size_t i = 0; i < pt.size(); ++i) dmax = std::max(dmax, std::abs(pt[i] - r.flows[i]));
      distinct = distinct && dmax > sep;
    }
    if (distinct) {
      sol.stationary_points.push_back(r.flows);
      sol.stationary_objectives.push_back(r.value);
    }
  }
  sol.converged = all_stationary;
  if (!all_stationary) sol.diagnostics.push_back("some starts did not reach a stationary point");
  sol.diagnostics.push_back("load-dependent waits: " + std::to_string(sol.stationary_points.size()) +
                            " distinct stationary point(s) from " + std::to_string(runs.size()) + " starts");
  return sol;
}

}  // namespace tcap
