#pragma once

#include <vector>

#include "tcap/equilibrium.hpp"

namespace tcap {

// How plug-in fees derived from lambda T'(lambda) are read.
//   kNominal:    tau = lambda T'(lambda) in dollars, at the minimizer of the
//                fee-design program (the convention behind the reference
//                fee levels)
//   kLagrangian: tau = lambda T'(lambda) / alpha at the social optimum, the
//                fee that makes the social optimum a user equilibrium
enum class FeeUnits { kNominal, kLagrangian };

const char* to_string(FeeUnits u);
FeeUnits fee_units_from_string(const std::string& s);

struct StationLoadReport {
  std::vector<double> arrivals;  // EV/hr
  std::vector<double> loads;     // kWh/hr
  std::vector<double> waits;     // minutes
};

StationLoadReport expected_station_load(const Scenario& s, const PathLayout& layout, const std::vector<double>& f);

// Road latency + lambda T + alpha D(U), with the population split by the
// layout's ranking.
double so_objective(const Scenario& s, const PathLayout& layout, const std::vector<double>& f);
std::vector<double> so_gradient(const Scenario& s, const PathLayout& layout, const std::vector<double>& f);
double social_cost(const Scenario& s, const EquilibriumSolution& sol);

// Ranks paths by decreasing marginal electricity cost D'(U) at the given loads.
PathLayout so_layout(const Scenario& s, const std::vector<double>& loads);

EquilibriumSolution solve_so(const Scenario& s, const SolverOptions& opts, FeeUnits units = FeeUnits::kNominal);

PricingScheme optimal_prices(const Scenario& s, const EquilibriumSolution& so, FeeUnits units = FeeUnits::kNominal);

struct EnforcementReport {
  EquilibriumSolution ue;
  double max_flow_deviation = 0.0;           // EV/hr over all paths
  double max_relative_deviation = 0.0;       // deviation / q of the path's OD
  double ue_social_cost = 0.0;
  double so_social_cost = 0.0;
  double relative_cost_gap = 0.0;            // (ue - so) / so
};

// Solves the user equilibrium with `prices` installed and compares it to `so`.
EnforcementReport verify_so_enforcement(const Scenario& s, const PricingScheme& prices,
                                        const EquilibriumSolution& so, const SolverOptions& opts);

}  // namespace tcap
