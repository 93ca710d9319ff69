#pragma once

#include <string>
#include <vector>

#include "tcap/equilibrium.hpp"

namespace tcap {

constexpr int kSchemaVersion = 1;

struct PathRow {
  std::size_t rank = 0;  // position within its OD after price ranking
  std::string origin;
  std::string destination;
  std::string station;
  std::string route;
  double minutes = 0.0;
  double theta = 0.0;  // effective electricity price, $/kWh
  double flow = 0.0;
  double eps_lo = 0.0;  // segment of the energy range served, kWh
  double eps_hi = 0.0;
};

struct StationRow {
  std::string node;
  double arrivals = 0.0;       // EV/hr
  double wait = 0.0;           // minutes per EV, arrival-driven part
  double load = 0.0;           // kWh/hr
  double tau = 0.0;            // $
  double upsilon = 0.0;        // $/kWh
  double marginal_cost = 0.0;  // $/kWh
  double wait_total = 0.0;     // minutes per hour: lambda T, plus load-driven waits
  double wait_integral = 0.0;  // int_0^lambda T
  double electricity = 0.0;    // $ per hour: marginal_cost * U
};

struct Totals {
  double wait_minutes = 0.0;
  double wait_integral = 0.0;
  double electricity_usd = 0.0;
  bool operator==(const Totals&) const = default;
};

struct ResultBundle {
  std::string scenario_name;
  std::string scenario_digest;
  std::string mode;        // ue | so
  std::string fee_source;  // none | scenario | optimal
  std::string fee_units;   // nominal | lagrangian
  double alpha = 0.0;
  std::vector<PathRow> paths;
  std::vector<StationRow> stations;
  Totals totals;
  double objective = 0.0;
  double social_cost = 0.0;
  double wardrop_gap = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  bool nonconvex = false;
  std::size_t stationary_points = 0;
  std::vector<std::string> diagnostics;
};

// `shown` is the price vector printed per station: the prices users face for
// a UE solve, the derived optimal prices for an SO solve.
ResultBundle make_bundle(const Scenario& s, const EquilibriumSolution& sol, const std::string& mode,
                         const std::string& fee_source, const std::string& fee_units, const PricingScheme& shown);
Totals recompute_totals(const std::vector<StationRow>& rows);

std::string bundle_to_json(const ResultBundle& b);
std::string stations_csv(const ResultBundle& b);
std::string paths_csv(const ResultBundle& b);
std::string bundle_table(const ResultBundle& b);

}  // namespace tcap
