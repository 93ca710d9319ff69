#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tcap/program.hpp"

namespace tcap {

// Reference implementations for tests. They share the data model and the
// wait/demand primitives but none of the solver code.

struct BestResponseResult {
  std::vector<ChargingPath> paths;  // enumeration order, all OD pairs
  std::vector<double> flows;
  int rounds = 0;
  bool converged = false;
};

// Users binned into n_bins equal-probability bins per OD (midpoint energy).
// Each round every bin shifts mass from dearer paths to its cheapest one until
// the costs meet; `damping` scales each shift. Converged when no used path is
// dearer than the bin's cheapest by more than 1e-10 * max(1, q).
BestResponseResult discretized_best_response(const Scenario& s, const PricingScheme& prices, int n_bins,
                                             double damping = 1.0, int max_rounds = 5000);

// Breadth-first expansion of partial routes; |V| <= 12.
std::vector<ChargingPath> brute_force_paths(const Scenario& s, std::size_t od);

enum class Accounting { kUserProgram, kSocial };

struct MonteCarloResult {
  double value = 0.0;
  double std_error = 0.0;
};

// Samples users' energy needs, assigns them by the threshold partition of f,
// and accumulates per-user costs. kUserProgram reproduces the user program's
// value, kSocial the social cost.
MonteCarloResult monte_carlo_social_cost(const Scenario& s, const PathLayout& layout, const std::vector<double>& f,
                                         const PricingScheme& prices, std::size_t n_samples, std::uint64_t seed,
                                         Accounting acc = Accounting::kSocial);

// Minimizes objective over the split (x, q - x) of a single two-path OD.
double grid_search_split(const PathLayout& layout, const std::function<double(const std::vector<double>&)>& objective,
                         int n_grid);

}  // namespace tcap
