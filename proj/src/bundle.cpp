#include "tcap/bundle.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "tcap/social.hpp"

namespace tcap {

using nlohmann::json;

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

Totals recompute_totals(const std::vector<StationRow>& rows) {
  Totals t;
  for (const auto& r : rows) {
    t.wait_minutes += r.wait_total;
    t.wait_integral += r.wait_integral;
    t.electricity_usd += r.electricity;
  }
  return t;
}

ResultBundle make_bundle(const Scenario& s, const EquilibriumSolution& sol, const std::string& mode,
                         const std::string& fee_source, const std::string& fee_units, const PricingScheme& shown) {
  ResultBundle b;
  b.scenario_name = s.name;
  b.scenario_digest = scenario_digest(s);
  b.mode = mode;
  b.fee_source = fee_source;
  b.fee_units = fee_units;
  b.alpha = s.economics.alpha;

  for (std::size_t k = 0; k < sol.layout.blocks.size(); ++k) {
    const OdBlock& blk = sol.layout.blocks[k];
    for (std::size_t i = 0; i < blk.count; ++i) {
      const ChargingPath& p = sol.layout.paths[blk.begin + i];
      PathRow r;
      r.rank = i + 1;
      r.origin = s.od_pairs[blk.od].origin;
      r.destination = s.od_pairs[blk.od].destination;
      r.station = s.stations[p.station].node;
      r.route = describe_path(s, p);
      r.minutes = p.minutes;
      r.theta = effective_price(s, p.station, sol.pricing.upsilon[p.station], s.economics.alpha);
      r.flow = sol.flows[blk.begin + i];
      r.eps_lo = sol.thresholds[k][i];
      r.eps_hi = sol.thresholds[k][i + 1];
      b.paths.push_back(r);
    }
  }

  for (std::size_t j = 0; j < s.stations.size(); ++j) {
    const Station& st = s.stations[j];
    StationRow r;
    r.node = st.node;
    r.arrivals = sol.arrivals[j];
    r.wait = sol.waits[j];
    r.load = sol.loads[j];
    r.tau = shown.tau[j];
    r.upsilon = shown.upsilon[j];
    r.marginal_cost = st.marginal_cost();
    r.wait_total = r.arrivals * r.wait;
    if (!st.wait.univariate()) r.wait_total += r.load * demand_wait_rate(st.wait, r.load);
    r.wait_integral = wait_integral(st.wait, r.arrivals);
    r.electricity = r.marginal_cost * r.load;
    b.stations.push_back(r);
  }
  b.totals = recompute_totals(b.stations);

  b.objective = sol.objective;
  b.social_cost = social_cost(s, sol);
  b.wardrop_gap = sol.wardrop_gap;
  b.residual = sol.residual;
  b.iterations = sol.iterations;
  b.converged = sol.converged;
  b.nonconvex = sol.nonconvex;
  b.stationary_points = sol.stationary_points.size();
  b.diagnostics = sol.diagnostics;
  return b;
}

std::string bundle_to_json(const ResultBundle& b) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["scenario"] = {{"name", b.scenario_name}, {"digest", b.scenario_digest}};
  j["mode"] = b.mode;
  j["economics"] = {{"alpha_min_per_usd", b.alpha}, {"fees", b.fee_source}, {"fee_units", b.fee_units}};
  j["paths"] = json::array();
  for (const auto& r : b.paths)
    j["paths"].push_back({{"origin", r.origin},
                          {"destination", r.destination},
                          {"rank", r.rank},
                          {"station", r.station},
                          {"route", r.route},
                          {"minutes", r.minutes},
                          {"theta_usd_per_kwh", r.theta},
                          {"flow_ev_per_hr", r.flow},
                          {"eps_lo_kwh", r.eps_lo},
                          {"eps_hi_kwh", r.eps_hi}});
  j["stations"] = json::array();
  for (const auto& r : b.stations)
    j["stations"].push_back({{"node", r.node},
                             {"lambda_ev_per_hr", r.arrivals},
                             {"wait_min", r.wait},
                             {"load_kwh_per_hr", r.load},
                             {"tau_usd", r.tau},
                             {"upsilon_usd_per_kwh", r.upsilon},
                             {"marginal_cost_usd_per_kwh", r.marginal_cost},
                             {"wait_total_min", r.wait_total},
                             {"wait_integral_min", r.wait_integral},
                             {"electricity_usd", r.electricity}});
  j["totals"] = {{"wait_minutes", b.totals.wait_minutes},
                 {"wait_integral_minutes", b.totals.wait_integral},
                 {"electricity_usd", b.totals.electricity_usd}};
  j["diagnostics"] = {{"objective", number_or_null(b.objective)},
                      {"social_cost", number_or_null(b.social_cost)},
                      {"wardrop_gap", number_or_null(b.wardrop_gap)},
                      {"residual", b.residual},
                      {"iterations", b.iterations},
                      {"converged", b.converged},
                      {"nonconvex", b.nonconvex},
                      {"stationary_points", b.stationary_points},
                      {"messages", b.diagnostics}};
  return j.dump(2) + "\n";
}

std::string stations_csv(const ResultBundle& b) {
  std::ostringstream o;
  o.precision(10);
  o << "station,lambda_ev_per_hr,wait_min,load_kwh_per_hr,tau_usd,upsilon_usd_per_kwh,"
       "wait_total_min,wait_integral_min,electricity_usd\n";
  for (const auto& r : b.stations)
    o << r.node << ',' << r.arrivals << ',' << r.wait << ',' << r.load << ',' << r.tau << ',' << r.upsilon << ','
      << r.wait_total << ',' << r.wait_integral << ',' << r.electricity << '\n';
  return o.str();
}

std::string paths_csv(const ResultBundle& b) {
  std::ostringstream o;
  o.precision(10);
  o << "origin,destination,rank,station,route,minutes,theta_usd_per_kwh,flow_ev_per_hr,eps_lo_kwh,eps_hi_kwh\n";
  for (const auto& r : b.paths)
    o << r.origin << ',' << r.destination << ',' << r.rank << ',' << r.station << ",\"" << r.route << "\","
      << r.minutes << ',' << r.theta << ',' << r.flow << ',' << r.eps_lo << ',' << r.eps_hi << '\n';
  return o.str();
}

std::string bundle_table(const ResultBundle& b) {
  std::ostringstream o;
  char line[256];
  o << "mode " << b.mode << "  alpha " << b.alpha << "  fees " << b.fee_source;
  if (b.fee_source == "optimal" || b.mode == "so") o << " (" << b.fee_units << ")";
  o << "\n\n";
  std::snprintf(line, sizeof line, "%-28s %4s %-22s %8s %10s %9s %9s\n", "od", "rank", "station", "minutes", "theta",
                "flow", "eps_hi");
  o << line;
  for (const auto& r : b.paths) {
    std::string od = r.origin + "->" + r.destination;
    std::snprintf(line, sizeof line, "%-28s %4zu %-22s %8.1f %10.5f %9.3f %9.3f\n", od.c_str(), r.rank,
                  r.station.c_str(), r.minutes, r.theta, r.flow, r.eps_hi);
    o << line;
  }
  o << '\n';
  std::snprintf(line, sizeof line, "%-22s %9s %9s %10s %8s %10s\n", "station", "lambda", "wait", "load", "tau",
                "upsilon");
  o << line;
  for (const auto& r : b.stations) {
    std::snprintf(line, sizeof line, "%-22s %9.3f %9.3f %10.2f %8.3f %10.5f\n", r.node.c_str(), r.arrivals, r.wait,
                  r.load, r.tau, r.upsilon);
    o << line;
  }
  o << "\nwait (lambda*T) " << fmt("%.3f", b.totals.wait_minutes) << " min/hr, wait integral "
    << fmt("%.3f", b.totals.wait_integral) << ", electricity " << fmt("%.3f", b.totals.electricity_usd) << " $/hr\n";
  o << "objective " << fmt("%.6f", b.objective) << ", social cost " << fmt("%.6f", b.social_cost)
    << ", wardrop gap " << fmt("%.3g", b.wardrop_gap) << ", residual " << fmt("%.3g", b.residual) << ", iterations "
    << b.iterations << (b.converged ? ", converged" : ", NOT converged") << (b.nonconvex ? ", nonconvex" : "")
    << '\n';
  for (const auto& d : b.diagnostics) o << "note: " << d << '\n';
  return o.str();
}

}  // namespace tcap
