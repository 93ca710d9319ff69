#include "tcap/demand.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tcap {

DemandDistribution DemandDistribution::uniform(double min_kwh, double max_kwh) {
  if (!(min_kwh >= 0.0) || !(max_kwh > min_kwh) || !std::isfinite(max_kwh))
    throw std::invalid_argument("uniform demand needs 0 <= min_kwh < max_kwh < inf");
  return DemandDistribution(DemandKind::kUniform, {{min_kwh, 0.0}, {max_kwh, 1.0}});
}

DemandDistribution DemandDistribution::piecewise(
    const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw std::invalid_argument("piecewise_cdf needs at least two points");
  std::vector<Breakpoint> pts;
  pts.reserve(points.size());
  for (auto [e, p] : points) {
    if (!std::isfinite(e) || !std::isfinite(p))
      throw std::invalid_argument("piecewise_cdf points must be finite");
    pts.push_back({e, p});
  }
  if (pts.front().eps < 0.0) throw std::invalid_argument("piecewise_cdf support must start at >= 0 kWh");
  if (pts.front().prob != 0.0) throw std::invalid_argument("piecewise_cdf must start at probability 0");
  if (pts.back().prob != 1.0) throw std::invalid_argument("piecewise_cdf must end at probability 1");
  for (std::size_t k = 1; k < pts.size(); ++k) {
    if (!(pts[k].eps > pts[k - 1].eps))
      throw std::invalid_argument("piecewise_cdf energies must be strictly increasing");
    if (!(pts[k].prob > pts[k - 1].prob))
      throw std::invalid_argument("piecewise_cdf must be strictly increasing (flat segment at point " +
                                  std::to_string(k) + ")");
  }
  return DemandDistribution(DemandKind::kPiecewiseCdf, std::move(pts));
}

DemandDistribution::DemandDistribution(DemandKind kind, std::vector<Breakpoint> pts)
    : kind_(kind), pts_(std::move(pts)) {
  cum_e_.assign(pts_.size(), 0.0);
  for (std::size_t k = 1; k < pts_.size(); ++k) {
    double dp = pts_[k].prob - pts_[k - 1].prob;
    cum_e_[k] = cum_e_[k - 1] + 0.5 * (pts_[k].eps + pts_[k - 1].eps) * dp;
  }
}

std::size_t DemandDistribution::segment_for_prob(double t) const {
  auto it = std::upper_bound(pts_.begin(), pts_.end(), t,
                             [](double v, const Breakpoint& b) { return v < b.prob; });
  std::size_t k = static_cast<std::size_t>(it - pts_.begin());
  if (k == 0) return 0;
  return std::min(k - 1, pts_.size() - 2);
}

double DemandDistribution::cdf(double eps) const {
  if (eps <= min_kwh()) return 0.0;
  if (eps >= max_kwh()) return 1.0;
  auto it = std::upper_bound(pts_.begin(), pts_.end(), eps,
                             [](double v, const Breakpoint& b) { return v < b.eps; });
  const Breakpoint& hi = *it;
  const Breakpoint& lo = *(it - 1);
  return lo.prob + (eps - lo.eps) * (hi.prob - lo.prob) / (hi.eps - lo.eps);
}

double DemandDistribution::density(double eps) const {
  if (eps < min_kwh() || eps > max_kwh()) return 0.0;
  auto it = std::upper_bound(pts_.begin(), pts_.end(), eps,
                             [](double v, const Breakpoint& b) { return v < b.eps; });
  if (it == pts_.end()) --it;
  const Breakpoint& hi = *it;
  const Breakpoint& lo = *(it - 1);
  return (hi.prob - lo.prob) / (hi.eps - lo.eps);
}

double DemandDistribution::inverse_cdf(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("inverse_cdf: probability outside [0,1]");
  return inverse_cdf_ext(t);
}

double DemandDistribution::inverse_cdf_ext(double t) const {
  if (t <= 0.0) return min_kwh();
  if (t >= 1.0) return max_kwh();
  std::size_t k = segment_for_prob(t);
  const Breakpoint& lo = pts_[k];
  const Breakpoint& hi = pts_[k + 1];
  return lo.eps + (t - lo.prob) * (hi.eps - lo.eps) / (hi.prob - lo.prob);
}

double DemandDistribution::quantile_integral(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("quantile_integral: argument outside [0,1]");
  return quantile_integral_ext(x);
}

double DemandDistribution::quantile_integral_ext(double x) const {
  if (x <= 0.0) return min_kwh() * x;
  if (x >= 1.0) return mean() + max_kwh() * (x - 1.0);
  std::size_t k = segment_for_prob(x);
  const Breakpoint& lo = pts_[k];
  const Breakpoint& hi = pts_[k + 1];
  double s = (hi.eps - lo.eps) / (hi.prob - lo.prob);
  double d = x - lo.prob;
  return cum_e_[k] + lo.eps * d + 0.5 * s * d * d;
}

double DemandDistribution::segment_mean_energy(double t_lo, double t_hi) const {
  if (!(t_lo >= 0.0 && t_hi <= 1.0 && t_lo <= t_hi))
    throw std::domain_error("segment_mean_energy: need 0 <= t_lo <= t_hi <= 1");
  if (t_lo == t_hi) return 0.0;
  return quantile_integral_ext(t_hi) - quantile_integral_ext(t_lo);
}

}  // namespace tcap
