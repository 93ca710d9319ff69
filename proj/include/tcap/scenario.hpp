#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tcap/demand.hpp"
#include "tcap/wait.hpp"

namespace tcap {

// Canonical units: minutes, kWh, $, EV/hr. LMPs arrive in $/MWh.
constexpr double kDefaultGamma = 1.2;  // min/kWh, a 50 kW charger

struct Arc {
  std::string id;
  std::string from;
  std::string to;
  double minutes = 0.0;
  bool operator==(const Arc&) const = default;
};

struct Station {
  std::string node;
  double capacity_scale = 1.0;
  WaitModel wait;
  double lmp_usd_per_mwh = 0.0;
  std::optional<double> gamma_min_per_kwh;
  // D(U) = marginal_cost * U + quad_cost * U^2
  double quad_cost = 0.0;

  double marginal_cost() const { return lmp_usd_per_mwh / 1000.0; }
  bool operator==(const Station&) const = default;
};

struct VehicleClass {
  std::string name;
  std::vector<std::string> allowed_stations;
  bool operator==(const VehicleClass&) const = default;
};

struct OdPair {
  std::string origin;
  std::string destination;
  double rate = 0.0;
  std::string distribution;
  std::string vehicle_class;  // empty: every station allowed
  bool operator==(const OdPair&) const = default;
};

// Per-station plug-in fee tau ($) and electricity price upsilon ($/kWh),
// indexed like Scenario::stations.
struct PricingScheme {
  std::vector<double> tau;
  std::vector<double> upsilon;
  bool operator==(const PricingScheme&) const = default;
};

struct Economics {
  double alpha = 1.0;
  double gamma_min_per_kwh = kDefaultGamma;
  std::optional<PricingScheme> fees;
  bool operator==(const Economics&) const = default;
};

struct SolverOptions {
  double gap_tol = 1e-4;
  int max_iters = 50000;
  std::uint64_t seed = 0;
  int starts = 8;
  // Projected-gradient residual target, relative to the largest OD rate.
  double residual_tol = 1e-12;
  bool operator==(const SolverOptions&) const = default;
};

struct Scenario {
  std::string name;
  std::vector<std::string> nodes;
  std::vector<Arc> arcs;
  std::vector<Station> stations;
  std::map<std::string, DemandDistribution> distributions;
  std::vector<VehicleClass> classes;
  std::vector<OdPair> od_pairs;
  Economics economics;
  SolverOptions solver;

  std::optional<std::size_t> node_index(const std::string& id) const;
  std::optional<std::size_t> station_index(const std::string& node) const;
  const DemandDistribution& demand(std::size_t od) const;
  // Station indices usable by the OD pair's class, ascending.
  std::vector<std::size_t> allowed_stations(std::size_t od) const;
  double gamma(std::size_t station) const;
  double total_expected_energy() const;
  bool univariate() const;

  bool operator==(const Scenario&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// Parses without checking invariants; throws ParseError with field context.
Scenario parse_scenario(const std::string& text);
// Parses and validates; throws ParseError or ValidationError.
Scenario load_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);
std::vector<std::string> validate_scenario(const Scenario& s);

std::string scenario_to_json(const Scenario& s);
// FNV-1a over the canonical serialization.
std::string scenario_digest(const Scenario& s);

// Scenario fees if present, otherwise tau = 0 and upsilon = marginal cost.
PricingScheme default_pricing(const Scenario& s);
PricingScheme no_fee_pricing(const Scenario& s);

}  // namespace tcap
