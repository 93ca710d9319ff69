#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tcap/program.hpp"

namespace tcap {

struct EquilibriumSolution {
  ProgramKind kind = ProgramKind::kUserEquilibrium;
  PathLayout layout;
  PricingScheme pricing;     // prices users face (UE) or marginal costs
  std::vector<double> flows;  // per ranked path, EV/hr
  std::vector<std::vector<double>> thresholds;  // per OD block, K+1 entries, kWh
  std::vector<double> arrivals;  // per station, EV/hr
  std::vector<double> loads;     // per station, kWh/hr
  std::vector<double> waits;     // per station, minutes (arrival-driven part)
  double objective = 0.0;
  double wardrop_gap = std::numeric_limits<double>::quiet_NaN();
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  bool nonconvex = false;
  std::vector<std::vector<double>> stationary_points;
  std::vector<double> stationary_objectives;
  std::vector<std::string> diagnostics;
};

struct MinimizeResult {
  std::vector<double> flows;
  double value = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool stationary = false;  // residual target met
  bool stalled = false;     // no further decrease possible in floating point
  std::vector<double> trace;  // objective at every accepted iterate
};

// Projected gradient with Armijo backtracking and Barzilai-Borwein trial steps.
MinimizeResult minimize(const Program& prog, std::vector<double> start, const SolverOptions& opts,
                        bool keep_trace = false);

double ue_objective(const Scenario& s, const PathLayout& layout, const std::vector<double>& f,
                    const PricingScheme& prices);
std::vector<double> ue_gradient(const Scenario& s, const PathLayout& layout, const std::vector<double>& f,
                                const PricingScheme& prices);

PathLayout ue_layout(const Scenario& s, const PricingScheme& prices);
EquilibriumSolution solve_ue(const Scenario& s, const SolverOptions& opts,
                             const std::optional<PricingScheme>& prices = std::nullopt);

// pi^i = G^-1(Q^i/q), with pi^0 = eps_min and pi^K = eps_max.
std::vector<double> extract_thresholds(const std::vector<double>& block_flows, double q,
                                       const DemandDistribution& d);
std::vector<std::vector<double>> extract_thresholds(const Scenario& s, const PathLayout& layout,
                                                    const std::vector<double>& f);
std::vector<double> flows_from_thresholds(const std::vector<double>& pi, double q, const DemandDistribution& d);

// Closed-form threshold between adjacent ranked paths from their intercepts
// and prices; NaN where the prices coincide.
std::vector<std::vector<double>> intercept_thresholds(const Scenario& s, const PathLayout& layout,
                                                      const std::vector<double>& f,
                                                      const PricingScheme& prices);

// Absolute cost in minutes of an EV needing eps kWh on path p.
double trip_cost(const Scenario& s, const ChargingPath& p, double eps, const StationState& state,
                 const PricingScheme& prices);

// Mean excess of assigned over best-path cost divided by mean best-path
// cost, over 1000 quantile users per OD, weighted by OD rate.
double wardrop_gap(const Scenario& s, const PathLayout& layout, const std::vector<double>& f,
                   const PricingScheme& prices);

// Fills thresholds, station state and diagnostics from a minimizer result.
EquilibriumSolution make_solution(const Program& prog, const MinimizeResult& r);

}  // namespace tcap
