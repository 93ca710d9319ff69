#include "tcap/wait.hpp"

#include <cmath>
#include <limits>

namespace tcap {

namespace {

constexpr double kMinutesPerHour = 60.0;

void require_arrivals(const WaitModel& m, double lambda) {
  if (lambda < 0.0) throw std::domain_error("negative arrival rate");
  if (m.kind == WaitKind::kMmc && lambda >= m.saturation_rate())
    throw SaturationError("M/M/c station saturated: arrivals >= c*mu");
}

double utilization(const WaitModel& m, double load) {
  if (load < 0.0) throw std::domain_error("negative station load");
  double u = load / m.c;
  if (u >= 1.0) throw SaturationError("demand-dependent station saturated: load >= c");
  return u;
}

}  // namespace

WaitModel WaitModel::polynomial(double a, double b, double x) {
  if (!(a > 0.0) || !(b >= 1.0) || !(x > 0.0))
    throw std::invalid_argument("polynomial wait needs a > 0, b >= 1, x > 0");
  WaitModel m;
  m.kind = WaitKind::kPolynomial;
  m.a = a;
  m.b = b;
  m.x = x;
  return m;
}

WaitModel WaitModel::mmc(double c, double mu) {
  if (!(c > 0.0) || !(mu > 0.0)) throw std::invalid_argument("mmc wait needs c > 0, mu > 0");
  WaitModel m;
  m.kind = WaitKind::kMmc;
  m.c = c;
  m.mu = mu;
  return m;
}

WaitModel WaitModel::demand_dependent(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("demand_dependent wait needs c > 0");
  WaitModel m;
  m.kind = WaitKind::kDemandDependent;
  m.c = c;
  return m;
}

double WaitModel::saturation_rate() const {
  if (kind == WaitKind::kMmc) return c * mu * kMinutesPerHour;
  return std::numeric_limits<double>::infinity();
}

double wait_time(const WaitModel& m, double lambda) {
  require_arrivals(m, lambda);
  switch (m.kind) {
    case WaitKind::kPolynomial:
      return m.a * std::pow(lambda / m.x, m.b);
    case WaitKind::kMmc: {
      double s = m.c * m.mu;
      double l = lambda / kMinutesPerHour;
      return l / (s * (s - l));
    }
    case WaitKind::kDemandDependent:
      return 0.0;
  }
  return 0.0;
}

double wait_time_derivative(const WaitModel& m, double lambda) {
  require_arrivals(m, lambda);
  switch (m.kind) {
    case WaitKind::kPolynomial:
      if (lambda == 0.0) return m.b == 1.0 ? m.a / m.x : 0.0;
      return m.a * m.b * std::pow(lambda / m.x, m.b - 1.0) / m.x;
    case WaitKind::kMmc: {
      double r = m.c * m.mu - lambda / kMinutesPerHour;
      return 1.0 / (r * r) / kMinutesPerHour;
    }
    case WaitKind::kDemandDependent:
      return 0.0;
  }
  return 0.0;
}

double wait_time_second_derivative(const WaitModel& m, double lambda) {
  require_arrivals(m, lambda);
  switch (m.kind) {
    case WaitKind::kPolynomial:
      if (m.b == 1.0) return 0.0;
      if (lambda == 0.0) return m.b == 2.0 ? 2.0 * m.a / (m.x * m.x) : 0.0;
      return m.a * m.b * (m.b - 1.0) * std::pow(lambda / m.x, m.b - 2.0) / (m.x * m.x);
    case WaitKind::kMmc: {
      double r = m.c * m.mu - lambda / kMinutesPerHour;
      return 2.0 / (r * r * r) / (kMinutesPerHour * kMinutesPerHour);
    }
    case WaitKind::kDemandDependent:
      return 0.0;
  }
  return 0.0;
}

double wait_integral(const WaitModel& m, double lambda) {
  require_arrivals(m, lambda);
  switch (m.kind) {
    case WaitKind::kPolynomial:
      return m.a * lambda * std::pow(lambda / m.x, m.b) / (m.b + 1.0);
    case WaitKind::kMmc: {
      double r = lambda / kMinutesPerHour / (m.c * m.mu);
      return kMinutesPerHour * (-r - std::log1p(-r));
    }
    case WaitKind::kDemandDependent:
      return 0.0;
  }
  return 0.0;
}

double demand_wait_rate(const WaitModel& m, double load) {
  if (m.kind != WaitKind::kDemandDependent) return 0.0;
  double u = utilization(m, load);
  return u / (1.0 - u) / m.c;
}

double demand_wait_rate_derivative(const WaitModel& m, double load) {
  if (m.kind != WaitKind::kDemandDependent) return 0.0;
  double u = utilization(m, load);
  return 1.0 / ((1.0 - u) * (1.0 - u)) / (m.c * m.c);
}

double demand_wait_potential(const WaitModel& m, double load) {
  if (m.kind != WaitKind::kDemandDependent) return 0.0;
  double u = utilization(m, load);
  return -u - std::log1p(-u);
}

double demand_wait(const WaitModel& m, double load, double eps) {
  if (m.kind != WaitKind::kDemandDependent)
    throw std::invalid_argument("demand_wait needs a demand_dependent model");
  return demand_wait_rate(m, load) * eps;
}

}  // namespace tcap
