#pragma once

#include <string>
#include <vector>

#include "tcap/scenario.hpp"

namespace tcap {

// Simple o->d route plus the one station on it where the EV charges. A
// route passing several allowed stations yields one path per station.
struct ChargingPath {
  std::size_t od = 0;
  std::vector<std::size_t> arcs;   // indices into Scenario::arcs
  std::vector<std::size_t> nodes;  // indices into Scenario::nodes, origin first
  std::size_t station = 0;         // index into Scenario::stations
  double minutes = 0.0;

  // Stable identity across rankings: od, arc sequence and station.
  std::string key() const;
  bool operator==(const ChargingPath&) const = default;
};

// Exhaustive DFS; routes follow arc declaration order at every branch and
// stations follow route order.
std::vector<ChargingPath> enumerate_feasible_paths(const Scenario& s, std::size_t od);

// theta = upsilon + (gamma_j - gamma_ref) / alpha, in $/kWh.
double effective_price(const Scenario& s, std::size_t station, double upsilon, double alpha);

// Ranking by nonincreasing price; ties by ascending intercept, then station.
// Returns indices into the inputs.
std::vector<std::size_t> order_paths_by_price(const std::vector<double>& prices,
                                              const std::vector<double>& intercepts,
                                              const std::vector<std::size_t>& stations);

// psi = road minutes + T_j(lambda_j) + alpha tau_j.
double path_intercept(const Scenario& s, const ChargingPath& p, const std::vector<double>& lambda,
                      const PricingScheme& fees, double alpha);

std::string describe_path(const Scenario& s, const ChargingPath& p);

}  // namespace tcap
