#include "tcap/social.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace tcap {

const char* to_string(FeeUnits u) { return u == FeeUnits::kNominal ? "nominal" : "lagrangian"; }

FeeUnits fee_units_from_string(const std::string& s) {
  if (s == "nominal") return FeeUnits::kNominal;
  if (s == "lagrangian") return FeeUnits::kLagrangian;
  throw std::invalid_argument("unknown fee units '" + s + "' (expected nominal or lagrangian)");
}

StationLoadReport expected_station_load(const Scenario& s, const PathLayout& layout, const std::vector<double>& f) {
  Program prog(s, ProgramKind::kSocialOptimum, no_fee_pricing(s), layout);
  StationState st = prog.state(f);
  StationLoadReport rep{st.arrivals, st.loads, {}};
  for (std::size_t j = 0; j < s.stations.size(); ++j) {
    const WaitModel& m = s.stations[j].wait;
    bool saturated = st.arrivals[j] >= m.saturation_rate();
    rep.waits.push_back(saturated ? std::numeric_limits<double>::infinity() : wait_time(m, st.arrivals[j]));
  }
  return rep;
}

double so_objective(const Scenario& s, const PathLayout& layout, const std::vector<double>& f) {
  return Program(s, ProgramKind::kSocialOptimum, no_fee_pricing(s), layout).value(f);
}

std::vector<double> so_gradient(const Scenario& s, const PathLayout& layout, const std::vector<double>& f) {
  std::vector<double> g(f.size());
  Program(s, ProgramKind::kSocialOptimum, no_fee_pricing(s), layout).gradient(f, g);
  return g;
}

double social_cost(const Scenario& s, const EquilibriumSolution& sol) {
  return so_objective(s, sol.layout, sol.flows);
}

PathLayout so_layout(const Scenario& s, const std::vector<double>& loads) {
  std::vector<double> price(s.stations.size());
  for (std::size_t j = 0; j < s.stations.size(); ++j) {
    double marginal = s.stations[j].marginal_cost() + 2.0 * s.stations[j].quad_cost * loads.at(j);
    price[j] = effective_price(s, j, marginal, s.economics.alpha);
  }
  return ranked_layout(s, price, std::vector<double>(s.stations.size(), 0.0));
}

namespace {

std::vector<double> remap(const PathLayout& from, const std::vector<double>& f, const PathLayout& to) {
  std::map<std::string, double> by_key;
  for (std::size_t i = 0; i < from.paths.size(); ++i) by_key[from.paths[i].key()] = f[i];
  std::vector<double> out;
  for (const auto& p : to.paths) out.push_back(by_key.at(p.key()));
  return out;
}

bool same_order(const PathLayout& a, const PathLayout& b) {
  for (std::size_t i = 0; i < a.paths.size(); ++i)
    if (a.paths[i].key() != b.paths[i].key()) return false;
  return true;
}

}  // namespace

EquilibriumSolution solve_so(const Scenario& s, const SolverOptions& opts, FeeUnits units) {
  ProgramKind kind = units == FeeUnits::kNominal ? ProgramKind::kFeeDesign : ProgramKind::kSocialOptimum;
  PathLayout layout = so_layout(s, std::vector<double>(s.stations.size(), 0.0));
  Program prog(s, kind, no_fee_pricing(s), layout);
  MinimizeResult r = minimize(prog, prog.uniform_start(), opts);

  bool nonlinear = false;
  for (const auto& st : s.stations) nonlinear = nonlinear || st.quad_cost > 0.0;
  std::vector<std::string> notes;
  for (int round = 0; nonlinear && round < 10; ++round) {
    PathLayout next = so_layout(s, prog.state(r.flows).loads);
    if (same_order(next, prog.layout())) break;
    notes.push_back("path ranking recomputed from marginal costs at the current loads");
    std::vector<double> warm = remap(prog.layout(), r.flows, next);
    prog = Program(s, kind, no_fee_pricing(s), next);
    r = minimize(prog, warm, opts);
  }

  EquilibriumSolution sol = make_solution(prog, r);
  sol.diagnostics.insert(sol.diagnostics.end(), notes.begin(), notes.end());
  sol.converged = r.stationary || (r.stalled && r.residual <= 1e-6 * prog.max_rate());
  if (!sol.converged) sol.diagnostics.push_back("residual target not reached");
  return sol;
}

PricingScheme optimal_prices(const Scenario& s, const EquilibriumSolution& so, FeeUnits units) {
  const double alpha = s.economics.alpha;
  PricingScheme p;
  for (std::size_t j = 0; j < s.stations.size(); ++j) {
    const Station& st = s.stations[j];
    double lam = so.arrivals.at(j);
    double u = so.loads.at(j);
    double tau = lam * wait_time_derivative(st.wait, lam);
    double upsilon = st.marginal_cost() + 2.0 * st.quad_cost * u;
    if (units == FeeUnits::kLagrangian) {
      tau /= alpha;
      if (!st.wait.univariate()) upsilon += u * demand_wait_rate_derivative(st.wait, u) / alpha;
    }
    p.tau.push_back(tau);
    p.upsilon.push_back(upsilon);
  }
  return p;
}

EnforcementReport verify_so_enforcement(const Scenario& s, const PricingScheme& prices,
                                        const EquilibriumSolution& so, const SolverOptions& opts) {
  EnforcementReport rep;
  rep.ue = solve_ue(s, opts, prices);
  std::vector<double> so_flows = remap(so.layout, so.flows, rep.ue.layout);
  for (const auto& b : rep.ue.layout.blocks)
    for (std::size_t i = b.begin; i < b.begin + b.count; ++i) {
      double dev = std::abs(rep.ue.flows[i] - so_flows[i]);
      rep.max_flow_deviation = std::max(rep.max_flow_deviation, dev);
      rep.max_relative_deviation = std::max(rep.max_relative_deviation, dev / b.q);
    }
  rep.ue_social_cost = social_cost(s, rep.ue);
  rep.so_social_cost = social_cost(s, so);
  rep.relative_cost_gap = (rep.ue_social_cost - rep.so_social_cost) / rep.so_social_cost;
  return rep;
}

}  // namespace tcap
