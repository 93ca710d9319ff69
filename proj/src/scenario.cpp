#include "tcap/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tcap/paths.hpp"

namespace tcap {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += "; ";
    out += v[i];
  }
  return out;
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + "." + key + ": missing field");
  return *it;
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number()) throw ParseError(where + "." + key + ": expected a number");
  return v.get<double>();
}

std::optional<double> opt_number(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw ParseError(where + "." + key + ": expected a number");
  return it->get<double>();
}

std::string text(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ParseError(where + "." + key + ": expected a string");
}

const json& array(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_array()) throw ParseError(where + "." + key + ": expected an array");
  return v;
}

std::string at(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

WaitModel parse_wait(const json& j, double capacity_scale, const std::string& where) {
  std::string kind = text(j, "kind", where);
  const json& p = j.contains("params") ? j.at("params") : j;
  std::string pw = j.contains("params") ? where + ".params" : where;
  WaitModel m;
  if (kind == "polynomial") {
    m.kind = WaitKind::kPolynomial;
    m.a = number(p, "a", pw);
    m.b = number(p, "b", pw);
    m.x = opt_number(p, "x", pw).value_or(capacity_scale);
  } else if (kind == "mmc") {
    m.kind = WaitKind::kMmc;
    m.c = opt_number(p, "c", pw).value_or(capacity_scale);
    m.mu = number(p, "mu", pw);
  } else if (kind == "demand_dependent") {
    m.kind = WaitKind::kDemandDependent;
    m.c = opt_number(p, "c", pw).value_or(capacity_scale);
  } else {
    throw ParseError(where + ".kind: unknown wait model '" + kind + "'");
  }
  return m;
}

json wait_to_json(const WaitModel& m) {
  switch (m.kind) {
    case WaitKind::kPolynomial:
      return {{"kind", "polynomial"}, {"params", {{"a", m.a}, {"b", m.b}, {"x", m.x}}}};
    case WaitKind::kMmc:
      return {{"kind", "mmc"}, {"params", {{"c", m.c}, {"mu", m.mu}}}};
    case WaitKind::kDemandDependent:
      return {{"kind", "demand_dependent"}, {"params", {{"c", m.c}}}};
  }
  return {};
}

DemandDistribution parse_distribution(const json& j, const std::string& where) {
  std::string kind = text(j, "kind", where);
  try {
    if (kind == "uniform") return DemandDistribution::uniform(number(j, "min_kwh", where), number(j, "max_kwh", where));
    if (kind == "piecewise_cdf") {
      std::vector<std::pair<double, double>> pts;
      const json& arr = array(j, "points", where);
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& p = arr[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
          throw ParseError(at(where + ".points", i) + ": expected [kwh, prob]");
        pts.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
      return DemandDistribution::piecewise(pts);
    }
  } catch (const std::invalid_argument& e) {
    throw ValidationError({where + ": " + e.what()});
  }
  throw ParseError(where + ".kind: unknown distribution '" + kind + "'");
}

json distribution_to_json(const DemandDistribution& d) {
  if (d.kind() == DemandKind::kUniform)
    return {{"kind", "uniform"}, {"min_kwh", d.min_kwh()}, {"max_kwh", d.max_kwh()}};
  json pts = json::array();
  for (const auto& b : d.points()) pts.push_back({b.eps, b.prob});
  return {{"kind", "piecewise_cdf"}, {"points", pts}};
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::runtime_error("invalid scenario: " + join(violations)), violations_(std::move(violations)) {}

std::optional<std::size_t> Scenario::node_index(const std::string& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i] == id) return i;
  return std::nullopt;
}

std::optional<std::size_t> Scenario::station_index(const std::string& node) const {
  for (std::size_t i = 0; i < stations.size(); ++i)
    if (stations[i].node == node) return i;
  return std::nullopt;
}

const DemandDistribution& Scenario::demand(std::size_t od) const {
  return distributions.at(od_pairs.at(od).distribution);
}

std::vector<std::size_t> Scenario::allowed_stations(std::size_t od) const {
  const std::string& cls = od_pairs.at(od).vehicle_class;
  std::vector<std::size_t> out;
  if (cls.empty()) {
    for (std::size_t j = 0; j < stations.size(); ++j) out.push_back(j);
    return out;
  }
  for (const auto& c : classes) {
    if (c.name != cls) continue;
    for (const auto& node : c.allowed_stations)
      if (auto j = station_index(node)) out.push_back(*j);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double Scenario::gamma(std::size_t station) const {
  return stations.at(station).gamma_min_per_kwh.value_or(economics.gamma_min_per_kwh);
}

double Scenario::total_expected_energy() const {
  double total = 0.0;
  for (std::size_t k = 0; k < od_pairs.size(); ++k) total += od_pairs[k].rate * demand(k).mean();
  return total;
}

bool Scenario::univariate() const {
  for (const auto& s : stations)
    if (!s.wait.univariate()) return false;
  return true;
}

Scenario parse_scenario(const std::string& source) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario is not well-formed: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("scenario: expected a top-level object");

  Scenario s;
  if (doc.contains("name") && doc["name"].is_string()) s.name = doc["name"].get<std::string>();

  const json& nodes = array(doc, "nodes", "scenario");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_string()) s.nodes.push_back(nodes[i].get<std::string>());
    else if (nodes[i].is_object()) s.nodes.push_back(text(nodes[i], "id", at("nodes", i)));
    else throw ParseError(at("nodes", i) + ": expected a node id");
  }

  const json& arcs = array(doc, "arcs", "scenario");
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    std::string w = at("arcs", i);
    Arc a;
    a.id = arcs[i].contains("id") ? text(arcs[i], "id", w) : std::to_string(i);
    a.from = text(arcs[i], "from", w);
    a.to = text(arcs[i], "to", w);
    a.minutes = number(arcs[i], "minutes", w);
    s.arcs.push_back(a);
  }

  const json& stations = array(doc, "stations", "scenario");
  for (std::size_t i = 0; i < stations.size(); ++i) {
    std::string w = at("stations", i);
    const json& j = stations[i];
    Station st;
    st.node = text(j, "node", w);
    st.capacity_scale = opt_number(j, "capacity_scale", w).value_or(1.0);
    st.wait = parse_wait(field(j, "wait_model", w), st.capacity_scale, w + ".wait_model");
    st.lmp_usd_per_mwh = number(j, "lmp_usd_per_mwh", w);
    st.gamma_min_per_kwh = opt_number(j, "gamma_min_per_kwh", w);
    st.quad_cost = opt_number(j, "quad_cost_usd_per_kwh2", w).value_or(0.0);
    s.stations.push_back(st);
  }

  const json& dists = field(doc, "distributions", "scenario");
  if (!dists.is_object()) throw ParseError("scenario.distributions: expected an object keyed by name");
  for (auto it = dists.begin(); it != dists.end(); ++it)
    s.distributions.emplace(it.key(), parse_distribution(it.value(), "distributions." + it.key()));

  if (doc.contains("classes")) {
    const json& classes = array(doc, "classes", "scenario");
    for (std::size_t i = 0; i < classes.size(); ++i) {
      std::string w = at("classes", i);
      VehicleClass c;
      c.name = text(classes[i], "name", w);
      const json& allowed = array(classes[i], "allowed_stations", w);
      for (std::size_t k = 0; k < allowed.size(); ++k) {
        if (!allowed[k].is_string()) throw ParseError(at(w + ".allowed_stations", k) + ": expected a node id");
        c.allowed_stations.push_back(allowed[k].get<std::string>());
      }
      s.classes.push_back(c);
    }
  }

  const json& ods = array(doc, "od_pairs", "scenario");
  for (std::size_t i = 0; i < ods.size(); ++i) {
    std::string w = at("od_pairs", i);
    OdPair od;
    od.origin = text(ods[i], "origin", w);
    od.destination = text(ods[i], "destination", w);
    od.rate = number(ods[i], "rate_ev_per_hr", w);
    od.distribution = text(ods[i], "distribution", w);
    if (ods[i].contains("class") && !ods[i]["class"].is_null()) od.vehicle_class = text(ods[i], "class", w);
    s.od_pairs.push_back(od);
  }

  const json& eco = field(doc, "economics", "scenario");
  s.economics.alpha = number(eco, "alpha_min_per_usd", "economics");
  s.economics.gamma_min_per_kwh = opt_number(eco, "gamma_min_per_kwh", "economics").value_or(kDefaultGamma);
  if (eco.contains("fees") && !eco["fees"].is_null()) {
    PricingScheme p;
    p.tau.assign(s.stations.size(), 0.0);
    p.upsilon.resize(s.stations.size());
    for (std::size_t j = 0; j < s.stations.size(); ++j) p.upsilon[j] = s.stations[j].marginal_cost();
    const json& fees = array(eco, "fees", "economics");
    for (std::size_t i = 0; i < fees.size(); ++i) {
      std::string w = at("economics.fees", i);
      std::string node = text(fees[i], "station", w);
      auto j = s.station_index(node);
      if (!j) throw ValidationError({w + ".station: unknown station '" + node + "'"});
      p.tau[*j] = opt_number(fees[i], "tau_usd", w).value_or(0.0);
      if (auto u = opt_number(fees[i], "upsilon_usd_per_kwh", w)) p.upsilon[*j] = *u;
    }
    s.economics.fees = p;
  }

  if (doc.contains("solver") && doc["solver"].is_object()) {
    const json& so = doc["solver"];
    s.solver.gap_tol = opt_number(so, "gap_tol", "solver").value_or(s.solver.gap_tol);
    s.solver.max_iters = static_cast<int>(opt_number(so, "max_iters", "solver").value_or(s.solver.max_iters));
    s.solver.seed = static_cast<std::uint64_t>(opt_number(so, "seed", "solver").value_or(0.0));
    s.solver.starts = static_cast<int>(opt_number(so, "starts", "solver").value_or(s.solver.starts));
  }
  return s;
}

std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> v;
  std::set<std::string> seen;
  for (const auto& n : s.nodes)
    if (!seen.insert(n).second) v.push_back("duplicate node '" + n + "'");

  for (const auto& a : s.arcs) {
    if (!s.node_index(a.from) || !s.node_index(a.to))
      v.push_back("arc '" + a.id + "': unknown node");
    if (!(a.minutes > 0.0) || !std::isfinite(a.minutes))
      v.push_back("arc '" + a.id + "': arc travel_time must be > 0");
  }

  std::set<std::string> station_nodes;
  for (const auto& st : s.stations) {
    std::string w = "station '" + st.node + "'";
    if (!s.node_index(st.node)) v.push_back(w + ": unknown node");
    if (!station_nodes.insert(st.node).second) v.push_back(w + ": more than one station at node");
    if (!(st.capacity_scale > 0.0)) v.push_back(w + ": capacity_scale must be > 0");
    if (!(st.lmp_usd_per_mwh >= 0.0)) v.push_back(w + ": marginal cost must be >= 0");
    if (!(st.quad_cost >= 0.0)) v.push_back(w + ": quadratic cost must be >= 0");
    if (st.gamma_min_per_kwh && !(*st.gamma_min_per_kwh > 0.0)) v.push_back(w + ": charge_rate_inverse must be > 0");
    const WaitModel& m = st.wait;
    switch (m.kind) {
      case WaitKind::kPolynomial:
        if (!(m.a > 0.0) || !(m.b >= 1.0) || !(m.x > 0.0)) v.push_back(w + ": polynomial wait needs a > 0, b >= 1, x > 0");
        break;
      case WaitKind::kMmc:
        if (!(m.c > 0.0) || !(m.mu > 0.0)) v.push_back(w + ": mmc wait needs c > 0, mu > 0");
        break;
      case WaitKind::kDemandDependent:
        if (!(m.c > 0.0)) v.push_back(w + ": demand_dependent wait needs c > 0");
        break;
    }
  }

  for (const auto& c : s.classes) {
    if (c.allowed_stations.empty()) v.push_back("class '" + c.name + "': allowed_stations is empty");
    for (const auto& n : c.allowed_stations)
      if (!s.station_index(n)) v.push_back("class '" + c.name + "': unknown station '" + n + "'");
  }

  if (!(s.economics.alpha > 0.0) || !std::isfinite(s.economics.alpha)) v.push_back("economics: alpha must be > 0");
  if (!(s.economics.gamma_min_per_kwh > 0.0)) v.push_back("economics: gamma must be > 0");
  if (s.economics.fees) {
    const auto& f = *s.economics.fees;
    if (f.tau.size() != s.stations.size() || f.upsilon.size() != s.stations.size())
      v.push_back("economics: fee vector size does not match stations");
  }

  bool refs_ok = v.empty();
  for (std::size_t k = 0; k < s.od_pairs.size(); ++k) {
    const OdPair& od = s.od_pairs[k];
    std::string w = "od " + od.origin + "->" + od.destination;
    if (!s.node_index(od.origin) || !s.node_index(od.destination)) {
      v.push_back(w + ": unknown node");
      refs_ok = false;
    }
    if (od.origin == od.destination) v.push_back(w + ": origin equals destination");
    if (!(od.rate > 0.0) || !std::isfinite(od.rate)) v.push_back(w + ": rate must be finite and > 0");
    if (!s.distributions.count(od.distribution)) {
      v.push_back(w + ": unknown distribution '" + od.distribution + "'");
      refs_ok = false;
    }
    if (!od.vehicle_class.empty()) {
      bool found = false;
      for (const auto& c : s.classes) found = found || c.name == od.vehicle_class;
      if (!found) {
        v.push_back(w + ": unknown class '" + od.vehicle_class + "'");
        refs_ok = false;
      }
    }
  }
  if (refs_ok) {
    for (std::size_t k = 0; k < s.od_pairs.size(); ++k)
      if (enumerate_feasible_paths(s, k).empty())
        v.push_back("od " + s.od_pairs[k].origin + "->" + s.od_pairs[k].destination + ": od has no feasible path");
  }
  return v;
}

Scenario load_scenario(const std::string& text) {
  Scenario s = parse_scenario(text);
  auto v = validate_scenario(s);
  if (!v.empty()) throw ValidationError(v);
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

std::string scenario_to_json(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["nodes"] = s.nodes;
  doc["arcs"] = json::array();
  for (const auto& a : s.arcs)
    doc["arcs"].push_back({{"id", a.id}, {"from", a.from}, {"to", a.to}, {"minutes", a.minutes}});
  doc["stations"] = json::array();
  for (const auto& st : s.stations) {
    json j = {{"node", st.node},
              {"capacity_scale", st.capacity_scale},
              {"wait_model", wait_to_json(st.wait)},
              {"lmp_usd_per_mwh", st.lmp_usd_per_mwh}};
    if (st.gamma_min_per_kwh) j["gamma_min_per_kwh"] = *st.gamma_min_per_kwh;
    if (st.quad_cost != 0.0) j["quad_cost_usd_per_kwh2"] = st.quad_cost;
    doc["stations"].push_back(j);
  }
  doc["distributions"] = json::object();
  for (const auto& [name, d] : s.distributions) doc["distributions"][name] = distribution_to_json(d);
  doc["classes"] = json::array();
  for (const auto& c : s.classes) doc["classes"].push_back({{"name", c.name}, {"allowed_stations", c.allowed_stations}});
  doc["od_pairs"] = json::array();
  for (const auto& od : s.od_pairs) {
    json j = {{"origin", od.origin},
              {"destination", od.destination},
              {"rate_ev_per_hr", od.rate},
              {"distribution", od.distribution}};
    if (!od.vehicle_class.empty()) j["class"] = od.vehicle_class;
    doc["od_pairs"].push_back(j);
  }
  json eco = {{"alpha_min_per_usd", s.economics.alpha}, {"gamma_min_per_kwh", s.economics.gamma_min_per_kwh}};
  if (s.economics.fees) {
    eco["fees"] = json::array();
    for (std::size_t j = 0; j < s.stations.size(); ++j)
      eco["fees"].push_back({{"station", s.stations[j].node},
                             {"tau_usd", s.economics.fees->tau[j]},
                             {"upsilon_usd_per_kwh", s.economics.fees->upsilon[j]}});
  }
  doc["economics"] = eco;
  doc["solver"] = {{"gap_tol", s.solver.gap_tol},
                   {"max_iters", s.solver.max_iters},
                   {"seed", s.solver.seed},
                   {"starts", s.solver.starts}};
  return doc.dump(2);
}

std::string scenario_digest(const Scenario& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : scenario_to_json(s)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

PricingScheme no_fee_pricing(const Scenario& s) {
  PricingScheme p;
  p.tau.assign(s.stations.size(), 0.0);
  for (const auto& st : s.stations) p.upsilon.push_back(st.marginal_cost());
  return p;
}

PricingScheme default_pricing(const Scenario& s) {
  return s.economics.fees ? *s.economics.fees : no_fee_pricing(s);
}

}  // namespace tcap
