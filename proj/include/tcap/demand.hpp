#pragma once

#include <utility>
#include <vector>

namespace tcap {

enum class DemandKind { kUniform, kPiecewiseCdf };

// Energy-request law on a compact support [eps_min, eps_max] (kWh).
// Internally both kinds are a piecewise-linear CDF, so G^-1 is piecewise
// linear and E(x) = int_0^x G^-1 is piecewise quadratic.
class DemandDistribution {
 public:
  struct Breakpoint {
    double eps;
    double prob;
    bool operator==(const Breakpoint&) const = default;
  };

  static DemandDistribution uniform(double min_kwh, double max_kwh);
  static DemandDistribution piecewise(const std::vector<std::pair<double, double>>& points);

  DemandKind kind() const { return kind_; }
  const std::vector<Breakpoint>& points() const { return pts_; }
  double min_kwh() const { return pts_.front().eps; }
  double max_kwh() const { return pts_.back().eps; }
  double mean() const { return cum_e_.back(); }

  double cdf(double eps) const;
  double density(double eps) const;
  double inverse_cdf(double t) const;
  double quantile_integral(double x) const;
  double segment_mean_energy(double t_lo, double t_hi) const;

  // Unchecked variants used inside the solver. G^-1 is clamped outside [0,1]
  // and E continues linearly, which keeps E continuously differentiable when a
  // finite-difference probe steps slightly off the simplex.
  double inverse_cdf_ext(double t) const;
  double quantile_integral_ext(double x) const;

  bool operator==(const DemandDistribution& o) const {
    return kind_ == o.kind_ && pts_ == o.pts_;
  }

 private:
  DemandDistribution(DemandKind kind, std::vector<Breakpoint> pts);
  std::size_t segment_for_prob(double t) const;

  DemandKind kind_;
  std::vector<Breakpoint> pts_;
  std::vector<double> cum_e_;  // E at each breakpoint probability
};

}  // namespace tcap
