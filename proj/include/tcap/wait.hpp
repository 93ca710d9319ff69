#pragma once

#include <stdexcept>

namespace tcap {

enum class WaitKind { kPolynomial, kMmc, kDemandDependent };

class SaturationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Station wait-time law. Arrival rates are in EV/hr, waits in minutes.
//   polynomial:        T(l) = a (l/x)^b
//   mmc:               c servers at mu per minute, T(l) = l'/(s(s-l')) with
//                      s = c mu and l' = l/60 the per-minute arrival rate
//   demand_dependent:  per-user wait (1/c) T(U/c) eps, T(u) = u/(1-u),
//                      driven by the station load U (kWh/hr) instead of l
struct WaitModel {
  WaitKind kind = WaitKind::kPolynomial;
  double a = 0.0;
  double b = 1.0;
  double x = 1.0;
  double c = 1.0;
  double mu = 1.0;

  static WaitModel polynomial(double a, double b, double x);
  static WaitModel mmc(double c, double mu);
  static WaitModel demand_dependent(double c);

  // True when the wait depends on arrivals only (convex, unique equilibrium).
  bool univariate() const { return kind != WaitKind::kDemandDependent; }
  // Arrival rate (EV/hr) at which the wait diverges; infinity if none.
  double saturation_rate() const;

  bool operator==(const WaitModel&) const = default;
};

// Arrival-driven part of the wait. Zero for demand_dependent stations.
double wait_time(const WaitModel& m, double lambda);
double wait_time_derivative(const WaitModel& m, double lambda);
double wait_time_second_derivative(const WaitModel& m, double lambda);
double wait_integral(const WaitModel& m, double lambda);

// Load-driven wait of a demand_dependent station.
double demand_wait(const WaitModel& m, double load, double eps);
// Per-kWh wait rate (1/c) T(U/c); the user wait is this times eps.
double demand_wait_rate(const WaitModel& m, double load);
double demand_wait_rate_derivative(const WaitModel& m, double load);
// int_0^U demand_wait_rate.
double demand_wait_potential(const WaitModel& m, double load);

}  // namespace tcap
