#pragma once

#include <random>
#include <span>
#include <vector>

#include "tcap/paths.hpp"
#include "tcap/scenario.hpp"

namespace tcap {

// Which convex program the flows minimize.
//   kUserEquilibrium: road + int T + alpha tau lambda + alpha theta-weighted E terms
//   kSocialOptimum:   road + lambda T + alpha D(U)
//   kFeeDesign:       the user program with the fee tau(lambda) = lambda T'(lambda)
//                     charged at the station's own arrival rate; its minimizer
//                     yields the fee levels quoted in dollars (nominal units)
enum class ProgramKind { kUserEquilibrium, kSocialOptimum, kFeeDesign };

struct OdBlock {
  std::size_t od = 0;
  double q = 0.0;
  std::size_t begin = 0;
  std::size_t count = 0;
};

// All feasible paths, grouped per OD pair and ranked within each group by
// nonincreasing price. Flow vectors index into `paths`.
struct PathLayout {
  std::vector<ChargingPath> paths;
  std::vector<OdBlock> blocks;
};

// Ranks each OD's paths by station_price (desc), then by the zero-flow
// intercept road + T(0) + alpha tau, then by station index.
PathLayout ranked_layout(const Scenario& s, const std::vector<double>& station_price,
                         const std::vector<double>& station_tau);

struct StationState {
  std::vector<double> arrivals;  // lambda_j, EV/hr
  std::vector<double> loads;     // U_j, kWh/hr
};

class Program {
 public:
  Program(Scenario s, ProgramKind kind, PricingScheme prices, PathLayout layout);

  const Scenario& scenario() const { return s_; }
  ProgramKind kind() const { return kind_; }
  const PricingScheme& pricing() const { return prices_; }
  const PathLayout& layout() const { return layout_; }
  std::size_t size() const { return layout_.paths.size(); }
  double max_rate() const { return max_rate_; }
  // Linear energy weight of each ranked path (minutes per kWh).
  const std::vector<double>& energy_weights() const { return weight_; }

  StationState state(std::span<const double> f) const;
  // Infinity when a station saturates.
  double value(std::span<const double> f) const;
  void gradient(std::span<const double> f, std::span<double> g) const;

  void project(std::span<double> f) const;
  double residual(std::span<const double> f, std::span<const double> g) const;
  // Shifts g by its flow-weighted mean within each block. Projection is
  // invariant to the shift and it keeps f - t g free of cancellation.
  void center(std::span<const double> f, std::span<double> g) const;
  std::vector<double> uniform_start() const;
  std::vector<double> random_start(std::mt19937_64& rng) const;

 private:
  double station_value(std::size_t j, double lambda) const;
  double station_slope(std::size_t j, double lambda) const;
  double load_value(std::size_t j, double load) const;
  double load_slope(std::size_t j, double load) const;

  Scenario s_;
  ProgramKind kind_;
  PricingScheme prices_;
  PathLayout layout_;
  std::vector<double> weight_;
  double max_rate_ = 0.0;
};

// Euclidean projection onto {x >= 0, sum x = total}, sort based.
void project_simplex(std::span<double> x, double total);

}  // namespace tcap
