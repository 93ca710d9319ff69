#include "tcap/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "tcap/oracle.hpp"

namespace tcap {

using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNoConvergence = 3;

unsigned worker_count(unsigned requested) {
  if (requested) return requested;
  if (const char* env = std::getenv("TCAP_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Scenario with_alpha(Scenario s, double alpha) {
  s.economics.alpha = alpha;
  return s;
}

}  // namespace

PricedState priced_state(const Scenario& s, const SolverOptions& opts, FeeUnits units) {
  PricedState ps;
  ps.so = solve_so(s, opts, units);
  ps.prices = optimal_prices(s, ps.so, units);
  ps.state = units == FeeUnits::kNominal ? ps.so : solve_ue(s, opts, ps.prices);
  return ps;
}

std::vector<SweepPoint> run_sweep(const Scenario& s, const std::vector<double>& alphas, const std::string& mode,
                                  SweepFees fees, FeeUnits units, const SolverOptions& opts, unsigned threads) {
  std::vector<SweepPoint> pts(alphas.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < alphas.size(); k = next++) {
      SweepPoint& pt = pts[k];
      pt.value = alphas[k];
      try {
        Scenario sk = with_alpha(s, alphas[k]);
        if (mode == "so") {
          EquilibriumSolution so = solve_so(sk, opts, units);
          pt.bundle = make_bundle(sk, so, "so", "optimal", to_string(units), optimal_prices(sk, so, units));
        } else if (fees == SweepFees::kOptimal) {
          PricedState ps = priced_state(sk, opts, units);
          pt.bundle = make_bundle(sk, ps.state, "ue", "optimal", to_string(units), ps.prices);
        } else {
          PricingScheme none = no_fee_pricing(sk);
          EquilibriumSolution ue = solve_ue(sk, opts, none);
          pt.bundle = make_bundle(sk, ue, "ue", "none", to_string(units), none);
        }
      } catch (const std::exception& e) {
        pt.error = e.what();
      }
    }
  };
  unsigned n = std::min<unsigned>(worker_count(threads), static_cast<unsigned>(std::max<std::size_t>(1, alphas.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  std::sort(pts.begin(), pts.end(), [](const SweepPoint& a, const SweepPoint& b) { return a.value < b.value; });
  return pts;
}

std::string sweep_csv(const std::vector<SweepPoint>& pts) {
  std::ostringstream o;
  o.precision(10);
  o << "alpha,station,lambda_ev_per_hr,load_kwh_per_hr,wait_min,tau_usd,upsilon_usd_per_kwh,"
       "total_wait_min,total_wait_integral_min,total_electricity_usd,converged,status\n";
  for (const auto& pt : pts) {
    if (!pt.error.empty()) {
      std::string msg = pt.error;
      std::replace(msg.begin(), msg.end(), '"', '\'');
      o << pt.value << ",,,,,,,,,,false,\"error: " << msg << "\"\n";
      continue;
    }
    const ResultBundle& b = pt.bundle;
    for (const auto& r : b.stations)
      o << pt.value << ',' << r.node << ',' << r.arrivals << ',' << r.load << ',' << r.wait << ',' << r.tau << ','
        << r.upsilon << ',' << b.totals.wait_minutes << ',' << b.totals.wait_integral << ','
        << b.totals.electricity_usd << ',' << (b.converged ? "true" : "false") << ",ok\n";
  }
  return o.str();
}

std::vector<Table2Case> default_table2_cases() {
  return {{100, 0, 0, false}, {100, 0, 0, true},  {0, 0, 100, false},  {0, 0, 100, true},
          {0, 100, 0, false}, {0, 100, 0, true},  {50, 25, 25, false}, {50, 25, 25, true},
          {25, 25, 50, false}, {25, 25, 50, true}};
}

Table2Case parse_table2_case(const std::string& text) {
  Table2Case c;
  std::string counts = text, fee = "no";
  if (auto colon = text.find(':'); colon != std::string::npos) {
    counts = text.substr(0, colon);
    fee = text.substr(colon + 1);
  }
  char sep1 = 0, sep2 = 0;
  std::istringstream in(counts);
  if (!(in >> c.high >> sep1 >> c.medium >> sep2 >> c.low) || sep1 != '/' || sep2 != '/' || c.high < 0 ||
      c.medium < 0 || c.low < 0)
    throw std::invalid_argument("case must look like HIGH/MEDIUM/LOW[:yes|no], got '" + text + "'");
  if (fee == "yes" || fee == "fees") c.fees = true;
  else if (fee == "no" || fee == "none") c.fees = false;
  else throw std::invalid_argument("case fee flag must be yes or no, got '" + fee + "'");
  return c;
}

Table2Row run_table2_case(const Scenario& base, const Table2Case& c, FeeUnits units, const SolverOptions& opts) {
  if (base.od_pairs.size() < 3) throw std::invalid_argument("table2 needs a scenario with three class OD pairs");
  Table2Row row;
  row.spec = c;
  Scenario s = base;
  const double rates[3] = {c.high, c.medium, c.low};
  s.od_pairs.clear();
  for (int k = 0; k < 3; ++k)
    if (rates[k] > 0.0) {
      s.od_pairs.push_back(base.od_pairs[k]);
      s.od_pairs.back().rate = rates[k];
    }
  if (s.od_pairs.empty()) return row;

  EquilibriumSolution sol;
  PricingScheme shown;
  if (c.fees) {
    PricedState ps = priced_state(s, opts, units);
    sol = ps.state;
    shown = ps.prices;
  } else {
    shown = no_fee_pricing(s);
    sol = solve_ue(s, opts, shown);
  }
  ResultBundle b = make_bundle(s, sol, "ue", c.fees ? "optimal" : "none", to_string(units), shown);
  row.electricity_usd = b.totals.electricity_usd;
  row.wait_integral = b.totals.wait_integral;
  row.wait_total = b.totals.wait_minutes;
  row.converged = b.converged;
  return row;
}

namespace {

struct Common {
  std::string scenario;
  double alpha = std::nan("");
  std::string format = "table";
  std::string out;
  std::uint64_t seed = 0;
  double gap_tol = std::nan("");
  int max_iters = -1;
  int starts = -1;
  std::string fee_units = "nominal";
  bool seed_set = false;
};

void add_common(CLI::App* cmd, Common& c, bool solver_flags) {
  cmd->add_option("--scenario", c.scenario, "scenario file")->required();
  cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"table", "json", "csv"}));
  cmd->add_option("--out", c.out, "write output to this file");
  if (!solver_flags) return;
  cmd->add_option("--alpha", c.alpha, "override alpha (minutes per $)");
  cmd->add_option("--seed", c.seed, "seed for random starts")->each([&c](const std::string&) { c.seed_set = true; });
  cmd->add_option("--gap-tol", c.gap_tol, "Wardrop gap tolerance");
  cmd->add_option("--max-iters", c.max_iters, "iteration limit per solve");
  cmd->add_option("--starts", c.starts, "random starts for load-dependent waits");
  cmd->add_option("--fee-units", c.fee_units, "fee convention")->check(CLI::IsMember({"nominal", "lagrangian"}));
}

Scenario load(const Common& c) {
  Scenario s = load_scenario_file(c.scenario);
  if (!std::isnan(c.alpha)) {
    if (!(c.alpha > 0.0)) throw ValidationError({"economics: alpha must be > 0"});
    s.economics.alpha = c.alpha;
  }
  return s;
}

SolverOptions options(const Scenario& s, const Common& c) {
  SolverOptions o = s.solver;
  if (!std::isnan(c.gap_tol)) o.gap_tol = c.gap_tol;
  if (c.max_iters > 0) o.max_iters = c.max_iters;
  if (c.starts > 0) o.starts = c.starts;
  if (c.seed_set) o.seed = c.seed;
  return o;
}

void emit(const Common& c, std::ostream& out, const std::string& text) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw std::runtime_error("cannot write '" + c.out + "'");
  f << text;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> v;
  if (auto c1 = text.find(':'); c1 != std::string::npos) {
    auto c2 = text.find(':', c1 + 1);
    double lo = std::stod(text.substr(0, c1));
    double hi = std::stod(text.substr(c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1));
    double step = c2 == std::string::npos ? 1.0 : std::stod(text.substr(c2 + 1));
    if (!(step > 0.0)) throw std::invalid_argument("range step must be > 0");
    for (int k = 0; lo + k * step <= hi + 1e-9 * step; ++k) v.push_back(lo + k * step);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  }
  if (v.empty()) throw std::invalid_argument("no sweep values");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) throw std::invalid_argument("sweep values must be increasing");
  for (double x : v)
    if (!(x > 0.0)) throw std::invalid_argument("alpha values must be > 0");
  return v;
}

int cmd_paths(const Common& c, std::ostream& out) {
  Scenario s = load(c);
  PricingScheme p = default_pricing(s);
  PathLayout layout = ue_layout(s, p);
  if (c.format == "json") {
    json arr = json::array();
    for (const auto& b : layout.blocks)
      for (std::size_t i = 0; i < b.count; ++i) {
        const ChargingPath& path = layout.paths[b.begin + i];
        json arcs = json::array();
        for (std::size_t a : path.arcs) arcs.push_back(s.arcs[a].id);
        arr.push_back({{"origin", s.od_pairs[b.od].origin},
                       {"destination", s.od_pairs[b.od].destination},
                       {"index", i + 1},
                       {"station", s.stations[path.station].node},
                       {"arcs", arcs},
                       {"route", describe_path(s, path)},
                       {"minutes", path.minutes},
                       {"theta_usd_per_kwh", effective_price(s, path.station, p.upsilon[path.station], s.economics.alpha)}});
      }
    emit(c, out, json{{"schema_version", kSchemaVersion}, {"paths", arr}}.dump(2) + "\n");
    return 0;
  }
  std::ostringstream o;
  if (c.format == "csv") o << "origin,destination,index,station,arcs,minutes,theta_usd_per_kwh\n";
  for (const auto& b : layout.blocks)
    for (std::size_t i = 0; i < b.count; ++i) {
      const ChargingPath& path = layout.paths[b.begin + i];
      std::string arcs;
      for (std::size_t a : path.arcs) arcs += (arcs.empty() ? "" : " ") + s.arcs[a].id;
      double theta = effective_price(s, path.station, p.upsilon[path.station], s.economics.alpha);
      if (c.format == "csv") {
        o << s.od_pairs[b.od].origin << ',' << s.od_pairs[b.od].destination << ',' << i + 1 << ','
          << s.stations[path.station].node << ",\"" << arcs << "\"," << path.minutes << ',' << theta << '\n';
      } else {
        char line[256];
        std::snprintf(line, sizeof line, "%3zu  %-22s %7.1f min  theta %.5f  %s\n", i + 1,
                      s.stations[path.station].node.c_str(), path.minutes, theta, describe_path(s, path).c_str());
        if (i == 0) o << s.od_pairs[b.od].origin << " -> " << s.od_pairs[b.od].destination << " (" << b.count << " paths)\n";
        o << line;
      }
    }
  emit(c, out, o.str());
  return 0;
}

std::string render(const Common& c, const ResultBundle& b) {
  if (c.format == "json") return bundle_to_json(b);
  if (c.format == "csv") return stations_csv(b) + "\n" + paths_csv(b);
  return bundle_table(b);
}

int cmd_solve(const Common& c, const std::string& mode, const std::string& fees, std::ostream& out) {
  Scenario s = load(c);
  SolverOptions opts = options(s, c);
  FeeUnits units = fee_units_from_string(c.fee_units);
  ResultBundle b;
  if (mode == "so") {
    EquilibriumSolution so = solve_so(s, opts, units);
    b = make_bundle(s, so, "so", "optimal", c.fee_units, optimal_prices(s, so, units));
  } else if (fees == "optimal") {
    PricedState ps = priced_state(s, opts, units);
    b = make_bundle(s, ps.state, "ue", "optimal", c.fee_units, ps.prices);
  } else {
    PricingScheme p = fees == "none" ? no_fee_pricing(s) : default_pricing(s);
    std::string source = fees == "none" || !s.economics.fees ? "none" : "scenario";
    EquilibriumSolution ue = solve_ue(s, opts, p);
    b = make_bundle(s, ue, "ue", source, c.fee_units, p);
  }
  emit(c, out, render(c, b));
  return b.converged ? 0 : kExitNoConvergence;
}

int cmd_fees(const Common& c, std::ostream& out) {
  Scenario s = load(c);
  SolverOptions opts = options(s, c);
  FeeUnits units = fee_units_from_string(c.fee_units);
  EquilibriumSolution so = solve_so(s, opts, units);
  PricingScheme p = optimal_prices(s, so, units);
  std::ostringstream o;
  if (c.format == "json") {
    json arr = json::array();
    for (std::size_t j = 0; j < s.stations.size(); ++j)
      arr.push_back({{"station", s.stations[j].node},
                     {"tau_usd", p.tau[j]},
                     {"upsilon_usd_per_kwh", p.upsilon[j]},
                     {"lambda_ev_per_hr", so.arrivals[j]}});
    o << json{{"schema_version", kSchemaVersion},
              {"alpha_min_per_usd", s.economics.alpha},
              {"fee_units", c.fee_units},
              {"converged", so.converged},
              {"fees", arr}}
             .dump(2)
      << "\n";
  } else if (c.format == "csv") {
    o << "station,tau_usd,upsilon_usd_per_kwh,lambda_ev_per_hr\n";
    o.precision(10);
    for (std::size_t j = 0; j < s.stations.size(); ++j)
      o << s.stations[j].node << ',' << p.tau[j] << ',' << p.upsilon[j] << ',' << so.arrivals[j] << '\n';
  } else {
    o << "alpha " << s.economics.alpha << ", fee units " << c.fee_units << "\n";
    for (std::size_t j = 0; j < s.stations.size(); ++j) {
      char line[200];
      std::snprintf(line, sizeof line, "%-22s tau %8.4f $  upsilon %.5f $/kWh  lambda %8.3f\n",
                    s.stations[j].node.c_str(), p.tau[j], p.upsilon[j], so.arrivals[j]);
      o << line;
    }
  }
  emit(c, out, o.str());
  return so.converged ? 0 : kExitNoConvergence;
}

int cmd_verify(const Common& c, const std::string& fees, std::ostream& out) {
  Scenario s = load(c);
  SolverOptions opts = options(s, c);
  FeeUnits units = fee_units_from_string(c.fee_units);
  EquilibriumSolution so = solve_so(s, opts, units);
  PricingScheme p = fees == "scenario" ? default_pricing(s) : optimal_prices(s, so, units);
  EnforcementReport rep = verify_so_enforcement(s, p, so, opts);
  std::ostringstream o;
  if (c.format == "json") {
    o << json{{"schema_version", kSchemaVersion},
              {"fee_units", c.fee_units},
              {"max_flow_deviation_ev_per_hr", rep.max_flow_deviation},
              {"max_relative_deviation", rep.max_relative_deviation},
              {"ue_social_cost", rep.ue_social_cost},
              {"so_social_cost", rep.so_social_cost},
              {"relative_cost_gap", rep.relative_cost_gap},
              {"ue_converged", rep.ue.converged}}
             .dump(2)
      << "\n";
  } else {
    o << "fee units " << c.fee_units << "\n"
      << "max path-flow deviation " << fixed(rep.max_flow_deviation, 6) << " EV/hr ("
      << fixed(100.0 * rep.max_relative_deviation, 4) << "% of q)\n"
      << "social cost: UE under prices " << fixed(rep.ue_social_cost, 6) << ", target "
      << fixed(rep.so_social_cost, 6) << ", relative gap " << fixed(100.0 * rep.relative_cost_gap, 4) << "%\n";
  }
  emit(c, out, o.str());
  return rep.ue.converged ? 0 : kExitNoConvergence;
}

int cmd_sweep(const Common& c, const std::string& values, const std::string& mode, const std::string& fees,
              std::ostream& out) {
  Scenario s = load(c);
  SolverOptions opts = options(s, c);
  FeeUnits units = fee_units_from_string(c.fee_units);
  auto pts = run_sweep(s, parse_values(values), mode, fees == "optimal" ? SweepFees::kOptimal : SweepFees::kNone,
                       units, opts);
  if (c.format == "json") {
    json arr = json::array();
    for (const auto& pt : pts) {
      if (!pt.error.empty()) {
        arr.push_back({{"alpha", pt.value}, {"error", pt.error}});
        continue;
      }
      arr.push_back({{"alpha", pt.value}, {"bundle", json::parse(bundle_to_json(pt.bundle))}});
    }
    emit(c, out, json{{"schema_version", kSchemaVersion}, {"points", arr}}.dump(2) + "\n");
  } else if (c.format == "csv") {
    emit(c, out, sweep_csv(pts));
  } else {
    std::ostringstream o;
    o << "   alpha   wait(lambda*T)   wait integral   electricity  status\n";
    for (const auto& pt : pts) {
      char line[200];
      if (!pt.error.empty()) {
        std::snprintf(line, sizeof line, "%8.3f   error: %s\n", pt.value, pt.error.c_str());
      } else {
        std::snprintf(line, sizeof line, "%8.3f %16.3f %15.3f %13.3f  %s\n", pt.value, pt.bundle.totals.wait_minutes,
                      pt.bundle.totals.wait_integral, pt.bundle.totals.electricity_usd,
                      pt.bundle.converged ? "ok" : "not converged");
      }
      o << line;
    }
    emit(c, out, o.str());
  }
  return 0;
}

int cmd_table2(const Common& c, const std::vector<std::string>& case_specs, std::ostream& out) {
  Scenario s = load(c);
  SolverOptions opts = options(s, c);
  FeeUnits units = fee_units_from_string(c.fee_units);
  std::vector<Table2Case> cases;
  for (const auto& t : case_specs) cases.push_back(parse_table2_case(t));
  if (cases.empty()) cases = default_table2_cases();
  std::vector<Table2Row> rows;
  for (const auto& cs : cases) rows.push_back(run_table2_case(s, cs, units, opts));

  std::ostringstream o;
  if (c.format == "json") {
    json arr = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      arr.push_back({{"case", i + 1},
                     {"high", r.spec.high},
                     {"medium", r.spec.medium},
                     {"low", r.spec.low},
                     {"fees", r.spec.fees},
                     {"electricity_usd", r.electricity_usd},
                     {"wait_integral_min", r.wait_integral},
                     {"wait_total_min", r.wait_total},
                     {"converged", r.converged}});
    }
    o << json{{"schema_version", kSchemaVersion}, {"fee_units", c.fee_units}, {"cases", arr}}.dump(2) << "\n";
  } else if (c.format == "csv") {
    o << "case,high,medium,low,fees,electricity_usd,wait_integral_min,wait_total_min,converged\n";
    o.precision(10);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      o << i + 1 << ',' << r.spec.high << ',' << r.spec.medium << ',' << r.spec.low << ','
        << (r.spec.fees ? "yes" : "no") << ',' << r.electricity_usd << ',' << r.wait_integral << ',' << r.wait_total
        << ',' << (r.converged ? "true" : "false") << '\n';
    }
  } else {
    o << "case  high/med/low  fees  electricity $  waiting (integral)  waiting (lambda*T)\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      char line[200];
      std::string split = fixed(r.spec.high, 0) + "/" + fixed(r.spec.medium, 0) + "/" + fixed(r.spec.low, 0);
      std::snprintf(line, sizeof line, "%4zu  %-12s  %-4s  %13.2f  %18.2f  %18.2f%s\n", i + 1, split.c_str(),
                    r.spec.fees ? "yes" : "no", r.electricity_usd, r.wait_integral, r.wait_total,
                    r.converged ? "" : "  (not converged)");
      o << line;
    }
  }
  emit(c, out, o.str());
  bool ok = std::all_of(rows.begin(), rows.end(), [](const Table2Row& r) { return r.converged; });
  return ok ? 0 : kExitNoConvergence;
}

int cmd_oracle(const Common& c, const std::string& kind, int bins, std::size_t samples, std::ostream& out) {
  Scenario s = load(c);
  SolverOptions opts = options(s, c);
  std::ostringstream o;
  o.precision(10);
  if (kind == "paths") {
    for (std::size_t k = 0; k < s.od_pairs.size(); ++k) {
      auto paths = brute_force_paths(s, k);
      o << s.od_pairs[k].origin << " -> " << s.od_pairs[k].destination << ": " << paths.size() << " paths\n";
      for (const auto& p : paths) o << "  " << describe_path(s, p) << '\n';
    }
  } else if (kind == "best-response") {
    auto br = discretized_best_response(s, default_pricing(s), bins);
    o << "rounds " << br.rounds << (br.converged ? " (converged)" : " (round limit)") << "\n";
    for (std::size_t i = 0; i < br.paths.size(); ++i)
      o << describe_path(s, br.paths[i]) << "  " << br.flows[i] << '\n';
  } else if (kind == "monte-carlo") {
    EquilibriumSolution ue = solve_ue(s, opts);
    auto mc = monte_carlo_social_cost(s, ue.layout, ue.flows, ue.pricing, samples, opts.seed, Accounting::kSocial);
    o << "social cost analytic " << social_cost(s, ue) << "  monte carlo " << mc.value << " +- " << mc.std_error << '\n';
    auto mu = monte_carlo_social_cost(s, ue.layout, ue.flows, ue.pricing, samples, opts.seed, Accounting::kUserProgram);
    o << "user program analytic " << ue.objective << "  monte carlo " << mu.value << " +- " << mu.std_error << '\n';
  } else {
    throw std::invalid_argument("unknown oracle kind '" + kind + "'");
  }
  emit(c, out, o.str());
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Traffic and charge assignment for EV fast-charging networks"};
  app.require_subcommand(1);
  Common c;

  auto* paths = app.add_subcommand("paths", "list feasible charging paths");
  add_common(paths, c, false);

  std::string mode = "ue", fees = "scenario";
  auto* solve = app.add_subcommand("solve", "solve the user equilibrium or social optimum");
  add_common(solve, c, true);
  solve->add_option("--mode", mode, "ue or so")->check(CLI::IsMember({"ue", "so"}));
  solve->add_option("--fees", fees, "prices users face in ue mode")->check(CLI::IsMember({"scenario", "none", "optimal"}));

  auto* fee_cmd = app.add_subcommand("fees", "derive socially optimal plug-in fees and electricity prices");
  add_common(fee_cmd, c, true);

  std::string verify_fees = "optimal";
  auto* verify = app.add_subcommand("verify-enforcement", "check that prices induce the optimal flows");
  add_common(verify, c, true);
  verify->add_option("--fees", verify_fees, "optimal or scenario")->check(CLI::IsMember({"optimal", "scenario"}));

  std::string values = "1:25:1", param = "alpha", sweep_fees = "none", sweep_mode = "ue";
  auto* sweep = app.add_subcommand("sweep", "solve over a range of alpha values");
  add_common(sweep, c, true);
  sweep->add_option("--param", param, "swept parameter")->check(CLI::IsMember({"alpha"}));
  sweep->add_option("--values", values, "comma list or lo:hi:step");
  sweep->add_option("--mode", sweep_mode, "ue or so")->check(CLI::IsMember({"ue", "so"}));
  sweep->add_option("--fees", sweep_fees, "none or optimal")->check(CLI::IsMember({"none", "optimal"}));

  std::vector<std::string> cases;
  auto* table2 = app.add_subcommand("table2", "range-limited vehicle classes, with and without fees");
  add_common(table2, c, true);
  table2->add_option("--case", cases, "HIGH/MEDIUM/LOW[:yes|no], repeatable");

  std::string oracle_kind = "best-response";
  int bins = 2000;
  std::size_t samples = 100000;
  auto* oracle = app.add_subcommand("oracle", "reference computations for debugging");
  oracle->group("");
  add_common(oracle, c, true);
  oracle->add_option("--kind", oracle_kind, "best-response, paths or monte-carlo");
  oracle->add_option("--bins", bins, "energy bins per OD");
  oracle->add_option("--samples", samples, "Monte Carlo samples per OD");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*paths) return cmd_paths(c, out);
    if (*solve) return cmd_solve(c, mode, fees, out);
    if (*fee_cmd) return cmd_fees(c, out);
    if (*verify) return cmd_verify(c, verify_fees, out);
    if (*sweep) return cmd_sweep(c, values, sweep_mode, sweep_fees, out);
    if (*table2) return cmd_table2(c, cases, out);
    if (*oracle) return cmd_oracle(c, oracle_kind, bins, samples, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const SaturationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace tcap
