#include "tcap/program.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tcap {

PathLayout ranked_layout(const Scenario& s, const std::vector<double>& station_price,
                         const std::vector<double>& station_tau) {
  PathLayout layout;
  for (std::size_t k = 0; k < s.od_pairs.size(); ++k) {
    auto paths = enumerate_feasible_paths(s, k);
    std::vector<double> prices, intercepts;
    std::vector<std::size_t> stations;
    for (const auto& p : paths) {
      prices.push_back(station_price.at(p.station));
      intercepts.push_back(p.minutes + wait_time(s.stations[p.station].wait, 0.0) +
                           s.economics.alpha * station_tau.at(p.station));
      stations.push_back(p.station);
    }
    OdBlock block{k, s.od_pairs[k].rate, layout.paths.size(), paths.size()};
    for (std::size_t i : order_paths_by_price(prices, intercepts, stations)) layout.paths.push_back(paths[i]);
    layout.blocks.push_back(block);
  }
  return layout;
}

Program::Program(Scenario s, ProgramKind kind, PricingScheme prices, PathLayout layout)
    : s_(std::move(s)), kind_(kind), prices_(std::move(prices)), layout_(std::move(layout)) {
  const double alpha = s_.economics.alpha;
  weight_.reserve(layout_.paths.size());
  for (const auto& p : layout_.paths) {
    double excess = s_.gamma(p.station) - s_.economics.gamma_min_per_kwh;
    double price = kind_ == ProgramKind::kUserEquilibrium ? prices_.upsilon.at(p.station)
                                                          : s_.stations[p.station].marginal_cost();
    weight_.push_back(alpha * price + excess);
  }
  for (const auto& b : layout_.blocks) max_rate_ = std::max(max_rate_, b.q);
}

StationState Program::state(std::span<const double> f) const {
  StationState st;
  st.arrivals.assign(s_.stations.size(), 0.0);
  st.loads.assign(s_.stations.size(), 0.0);
  for (const auto& b : layout_.blocks) {
    const DemandDistribution& d = s_.demand(b.od);
    double cum = 0.0;
    double e_prev = 0.0;
    for (std::size_t i = 0; i < b.count; ++i) {
      const ChargingPath& p = layout_.paths[b.begin + i];
      double fi = f[b.begin + i];
      cum += fi;
      double e = d.quantile_integral_ext(cum / b.q);
      st.arrivals[p.station] += fi;
      st.loads[p.station] += b.q * (e - e_prev);
      e_prev = e;
    }
  }
  return st;
}

double Program::station_value(std::size_t j, double lambda) const {
  const WaitModel& m = s_.stations[j].wait;
  const double alpha = s_.economics.alpha;
  switch (kind_) {
    case ProgramKind::kUserEquilibrium:
      return wait_integral(m, lambda) + alpha * prices_.tau[j] * lambda;
    case ProgramKind::kSocialOptimum:
      return lambda * wait_time(m, lambda);
    case ProgramKind::kFeeDesign:
      return wait_integral(m, lambda) + alpha * lambda * lambda * wait_time_derivative(m, lambda);
  }
  return 0.0;
}

double Program::station_slope(std::size_t j, double lambda) const {
  const WaitModel& m = s_.stations[j].wait;
  const double alpha = s_.economics.alpha;
  switch (kind_) {
    case ProgramKind::kUserEquilibrium:
      return wait_time(m, lambda) + alpha * prices_.tau[j];
    case ProgramKind::kSocialOptimum:
      return wait_time(m, lambda) + lambda * wait_time_derivative(m, lambda);
    case ProgramKind::kFeeDesign:
      return wait_time(m, lambda) + alpha * (2.0 * lambda * wait_time_derivative(m, lambda) +
                                             lambda * lambda * wait_time_second_derivative(m, lambda));
  }
  return 0.0;
}

double Program::load_value(std::size_t j, double load) const {
  const Station& st = s_.stations[j];
  const double alpha = s_.economics.alpha;
  switch (kind_) {
    case ProgramKind::kUserEquilibrium:
      return demand_wait_potential(st.wait, load);
    case ProgramKind::kSocialOptimum:
      return alpha * st.quad_cost * load * load + load * demand_wait_rate(st.wait, load);
    case ProgramKind::kFeeDesign:
      return alpha * st.quad_cost * load * load + demand_wait_potential(st.wait, load);
  }
  return 0.0;
}

double Program::load_slope(std::size_t j, double load) const {
  const Station& st = s_.stations[j];
  const double alpha = s_.economics.alpha;
  switch (kind_) {
    case ProgramKind::kUserEquilibrium:
      return demand_wait_rate(st.wait, load);
    case ProgramKind::kSocialOptimum:
      return 2.0 * alpha * st.quad_cost * load + demand_wait_rate(st.wait, load) +
             load * demand_wait_rate_derivative(st.wait, load);
    case ProgramKind::kFeeDesign:
      return 2.0 * alpha * st.quad_cost * load + demand_wait_rate(st.wait, load);
  }
  return 0.0;
}

double Program::value(std::span<const double> f) const {
  try {
    double v = 0.0;
    for (const auto& b : layout_.blocks) {
      const DemandDistribution& d = s_.demand(b.od);
      double cum = 0.0;
      double e_prev = 0.0;
      for (std::size_t i = 0; i < b.count; ++i) {
        std::size_t n = b.begin + i;
        cum += f[n];
        double e = d.quantile_integral_ext(cum / b.q);
        v += f[n] * layout_.paths[n].minutes + b.q * weight_[n] * (e - e_prev);
        e_prev = e;
      }
    }
    StationState st = state(f);
    for (std::size_t j = 0; j < s_.stations.size(); ++j)
      v += station_value(j, st.arrivals[j]) + load_value(j, st.loads[j]);
    return v;
  } catch (const SaturationError&) {
    return std::numeric_limits<double>::infinity();
  }
}

void Program::gradient(std::span<const double> f, std::span<double> g) const {
  StationState st = state(f);
  std::vector<double> a(s_.stations.size()), bslope(s_.stations.size());
  for (std::size_t j = 0; j < s_.stations.size(); ++j) {
    a[j] = station_slope(j, st.arrivals[j]);
    bslope[j] = load_slope(j, st.loads[j]);
  }
  for (const auto& b : layout_.blocks) {
    const DemandDistribution& d = s_.demand(b.od);
    std::vector<double> quant(b.count);
    double cum = 0.0;
    for (std::size_t i = 0; i < b.count; ++i) {
      cum += f[b.begin + i];
      quant[i] = d.inverse_cdf_ext(cum / b.q);
    }
    // S_i = sum_{k>=i} (W_k - W_{k+1}) G^-1(Q^k/q), W = w + b, W_{K+1} = 0.
    double tail = 0.0;
    double w_next = 0.0;
    for (std::size_t i = b.count; i-- > 0;) {
      std::size_t n = b.begin + i;
      const ChargingPath& p = layout_.paths[n];
      double w = weight_[n] + bslope[p.station];
      tail += (w - w_next) * quant[i];
      w_next = w;
      g[n] = p.minutes + a[p.station] + tail;
    }
  }
}

void project_simplex(std::span<double> x, double total) {
  std::vector<double> u(x.begin(), x.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    double t = (cum - total) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  for (double& v : x) v = std::max(v - theta, 0.0);
}

void Program::project(std::span<double> f) const {
  for (const auto& b : layout_.blocks) project_simplex(f.subspan(b.begin, b.count), b.q);
}

void Program::center(std::span<const double> f, std::span<double> g) const {
  for (const auto& b : layout_.blocks) {
    if (b.q <= 0.0) continue;
    double m = 0.0;
    for (std::size_t i = 0; i < b.count; ++i) m += f[b.begin + i] * g[b.begin + i];
    m /= b.q;
    for (std::size_t i = 0; i < b.count; ++i) g[b.begin + i] -= m;
  }
}

double Program::residual(std::span<const double> f, std::span<const double> g) const {
  std::vector<double> y(g.begin(), g.end());
  center(f, y);
  for (std::size_t i = 0; i < f.size(); ++i) y[i] = f[i] - y[i];
  project(y);
  double r = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) r = std::max(r, std::abs(f[i] - y[i]));
  return r;
}

std::vector<double> Program::uniform_start() const {
  std::vector<double> f(size());
  for (const auto& b : layout_.blocks)
    for (std::size_t i = 0; i < b.count; ++i) f[b.begin + i] = b.q / static_cast<double>(b.count);
  return f;
}

std::vector<double> Program::random_start(std::mt19937_64& rng) const {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> f(size());
  for (const auto& b : layout_.blocks) {
    double sum = 0.0;
    for (std::size_t i = 0; i < b.count; ++i) sum += f[b.begin + i] = ex(rng);
    for (std::size_t i = 0; i < b.count; ++i) f[b.begin + i] *= b.q / sum;
  }
  return f;
}

}  // namespace tcap
