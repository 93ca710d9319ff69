#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tcap/bundle.hpp"
#include "tcap/social.hpp"

namespace tcap {

// State a CNO reaches by posting optimal prices. Nominal units report the
// fee-design minimizer itself; lagrangian units report the user equilibrium
// under the derived prices.
struct PricedState {
  EquilibriumSolution state;
  EquilibriumSolution so;
  PricingScheme prices;
};
PricedState priced_state(const Scenario& s, const SolverOptions& opts, FeeUnits units);

struct SweepPoint {
  double value = 0.0;
  ResultBundle bundle;
  std::string error;  // empty on success
};

enum class SweepFees { kNone, kOptimal };

// Solves one scenario per alpha value, in parallel over `threads` workers
// (0: TCAP_THREADS or the hardware concurrency). Failures are recorded per
// value. Output is sorted by value.
std::vector<SweepPoint> run_sweep(const Scenario& s, const std::vector<double>& alphas, const std::string& mode,
                                  SweepFees fees, FeeUnits units, const SolverOptions& opts, unsigned threads = 0);
std::string sweep_csv(const std::vector<SweepPoint>& pts);

// Vehicle populations per class for the range-limited experiment. The base
// scenario's first three OD pairs carry the high, medium and low classes.
struct Table2Case {
  double high = 0.0;
  double medium = 0.0;
  double low = 0.0;
  bool fees = false;
};
struct Table2Row {
  Table2Case spec;
  double electricity_usd = 0.0;
  double wait_integral = 0.0;
  double wait_total = 0.0;
  bool converged = true;
};
std::vector<Table2Case> default_table2_cases();
Table2Case parse_table2_case(const std::string& text);  // "100/0/0:yes"
Table2Row run_table2_case(const Scenario& base, const Table2Case& c, FeeUnits units, const SolverOptions& opts);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tcap
