#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "agraph/error.hpp"
#include "agraph/graph.hpp"
#include "agraph/model.hpp"
#include "agraph/plans.hpp"
#include "agraph/risk.hpp"
#include "agraph/search.hpp"

namespace agraph {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

using Json = nlohmann::ordered_json;

namespace detail {

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T field_or(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? field<T>(j, key) : fallback;
}

inline void check_version(const Json& j, const char* what) {
  if (field<int>(j, "format_version") != kFormatVersion)
    throw InputError(std::string(what) + ": unsupported format_version");
}

inline Json vulns_to_json(const std::vector<VulnRef>& vs) {
  Json out = Json::array();
  for (const auto& v : vs) out.push_back({{"id", v.id}, {"protocol", v.protocol}, {"grants", v.grants}});
  return out;
}

inline std::vector<VulnRef> vulns_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("vulnerabilities must be an array");
  std::vector<VulnRef> out;
  for (const auto& v : j) {
    VulnRef r{field<std::string>(v, "id"), field<std::string>(v, "protocol"), field_or<std::string>(v, "grants", "execCode")};
    if (r.grants != "execCode") throw InputError("vulnerability '" + r.id + "' grants unsupported privilege '" + r.grants + "'");
    out.push_back(std::move(r));
  }
  return out;
}

inline Json parse(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
}

}  // namespace detail

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path + "'");
}

// Two-space indented JSON followed by a newline.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---- scenario ----

inline Json to_json(const Instance& inst) {
  Json hosts = Json::array();
  for (const auto& h : inst.network.hosts)
    hosts.push_back({{"id", h.id},
                     {"src_protocols", h.src_protocols},
                     {"vulnerabilities", detail::vulns_to_json(h.vulnerabilities)},
                     {"is_internet", h.is_internet},
                     {"is_goal", h.is_goal}});
  Json conn = Json::array();
  for (const auto& f : inst.network.base_connectivity)
    conn.push_back({{"from", f.from}, {"to", f.to}, {"protocol", f.protocol}});

  Json types = Json::array();
  for (const auto& t : inst.layout.types) types.push_back(t.id);

  Json devices = Json::array();
  for (const auto& d : inst.layout.devices) {
    Json rc = Json::object();
    for (const auto& [p, r] : d.range_class) rc[p] = std::string(to_string(r));
    devices.push_back({{"id", d.id},
                       {"type", d.type_id},
                       {"src_protocols", d.src_protocols},
                       {"range_class", rc},
                       {"vulnerabilities", detail::vulns_to_json(d.vulnerabilities)}});
  }

  Json locations = Json::array();
  for (const auto& l : inst.layout.locations) {
    Json ranges = Json::object();
    for (const auto& [p, sets] : l.range_map)
      ranges[p] = {{"Short", sets[0]}, {"Medium", sets[1]}, {"Long", sets[2]}};
    locations.push_back({{"id", l.id}, {"type", l.type_id}, {"ranges", ranges}});
  }

  Json constraints = Json::array();
  for (const auto& c : inst.layout.constraints)
    constraints.push_back(
        {{"type", c.type_id}, {"locations", c.locations}, {"required_count", c.required_count}, {"devices", c.devices}});

  return {{"format_version", kFormatVersion},
          {"network", {{"hosts", hosts}, {"connectivity", conn}}},
          {"device_types", types},
          {"devices", devices},
          {"locations", locations},
          {"constraints", constraints}};
}

// Parses and validates a scenario; any problem is an InputError.
inline Instance instance_from_json(const Json& j) {
  detail::check_version(j, "scenario");
  Instance inst;
  const Json net = detail::field<Json>(j, "network");
  for (const auto& h : detail::field<Json>(net, "hosts")) {
    Host host;
    host.id = detail::field<std::string>(h, "id");
    host.src_protocols = detail::field_or<std::set<std::string>>(h, "src_protocols", {});
    host.vulnerabilities = detail::vulns_from_json(detail::field_or<Json>(h, "vulnerabilities", Json::array()));
    host.is_internet = detail::field_or<bool>(h, "is_internet", false);
    host.is_goal = detail::field_or<bool>(h, "is_goal", false);
    inst.network.hosts.push_back(std::move(host));
  }
  for (const auto& f : detail::field_or<Json>(net, "connectivity", Json::array()))
    inst.network.base_connectivity.insert(
        {detail::field<std::string>(f, "from"), detail::field<std::string>(f, "to"), detail::field<std::string>(f, "protocol")});

  for (const auto& t : detail::field_or<Json>(j, "device_types", Json::array())) {
    if (!t.is_string()) throw InputError("device_types entries must be strings");
    inst.layout.types.push_back({t.get<std::string>()});
  }
  for (const auto& d : detail::field_or<Json>(j, "devices", Json::array())) {
    IoTDevice dev;
    dev.id = detail::field<std::string>(d, "id");
    dev.type_id = detail::field<std::string>(d, "type");
    dev.src_protocols = detail::field_or<std::set<std::string>>(d, "src_protocols", {});
    const Json classes = detail::field_or<Json>(d, "range_class", Json::object());
    for (const auto& [p, r] : classes.items()) {
      if (!r.is_string()) throw InputError("range class of '" + dev.id + "' must be a string");
      dev.range_class[p] = range_class_from_string(r.get<std::string>());
    }
    dev.vulnerabilities = detail::vulns_from_json(detail::field_or<Json>(d, "vulnerabilities", Json::array()));
    inst.layout.devices.push_back(std::move(dev));
  }
  for (const auto& l : detail::field_or<Json>(j, "locations", Json::array())) {
    Location loc;
    loc.id = detail::field<std::string>(l, "id");
    loc.type_id = detail::field<std::string>(l, "type");
    const Json ranges = detail::field_or<Json>(l, "ranges", Json::object());
    for (const auto& [p, sets] : ranges.items()) {
      RangeSets rs;
      for (RangeClass r : kRangeClasses)
        rs[static_cast<std::size_t>(r)] = detail::field_or<HostSet>(sets, std::string(to_string(r)).c_str(), {});
      loc.range_map[p] = std::move(rs);
    }
    inst.layout.locations.push_back(std::move(loc));
  }
  for (const auto& c : detail::field_or<Json>(j, "constraints", Json::array())) {
    const auto n = detail::field<long long>(c, "required_count");
    if (n < 0) throw InputError("required_count must be non-negative");
    inst.layout.constraints.push_back({detail::field<std::string>(c, "type"),
                                       detail::field<std::vector<std::string>>(c, "locations"),
                                       static_cast<std::size_t>(n),
                                       detail::field<std::vector<std::string>>(c, "devices")});
  }
  validate(inst);
  return inst;
}

inline Instance load_instance(const std::string& path) {
  return instance_from_json(detail::parse(read_file(path), path.c_str()));
}

// ---- deployment ----

inline Json to_json(const Deployment& d) {
  Json placements = Json::object();
  for (const auto& [dev, loc] : d.placements) placements[dev] = loc;
  Json forbidden = Json::array();
  for (const auto& [dev, loc] : d.forbidden) forbidden.push_back({dev, loc});
  return {{"format_version", kFormatVersion}, {"placements", placements}, {"forbidden", forbidden}};
}

inline Deployment deployment_from_json(const Json& j) {
  detail::check_version(j, "deployment");
  Deployment d;
  const Json placements = detail::field_or<Json>(j, "placements", Json::object());
  for (const auto& [dev, loc] : placements.items()) {
    if (loc.is_null()) continue;  // explicit ⊥
    if (!loc.is_string()) throw InputError("placement of '" + dev + "' must be a location id or null");
    d.placements[dev] = loc.get<std::string>();
  }
  for (const auto& pair : detail::field_or<Json>(j, "forbidden", Json::array())) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string())
      throw InputError("forbidden entries must be [device, location] pairs");
    d.forbidden.insert({pair[0].get<std::string>(), pair[1].get<std::string>()});
  }
  return d;
}

inline Deployment load_deployment(const std::string& path) {
  return deployment_from_json(detail::parse(read_file(path), path.c_str()));
}

// ---- metrics, risk, graphs ----

inline Json to_json(const PlanMetrics& m) {
  return {{"opt_len", m.opt_len}, {"opt_cnt", m.opt_cnt}, {"opt_exp", m.opt_exp}, {"opt_prv", m.opt_prv}};
}

inline Json to_json(const RiskScore& r) {
  Json components = Json::object();
  for (std::size_t i = 0; i < r.components.size(); ++i) components[std::string(kRiskComponentNames[i])] = r.components[i];
  return {{"value", r.value}, {"components", components}};
}

inline Json to_json(const AttackGraph& g) {
  Json nodes = Json::array();
  for (NodeId n = 0; n < g.size(); ++n)
    nodes.push_back({{"id", n}, {"kind", std::string(to_string(g.kind(n)))}, {"label", g.label(n)}});
  Json edges = Json::array();
  for (const auto& [a, b] : g.edges()) edges.push_back({a, b});
  Json out = {{"format_version", kFormatVersion}, {"nodes", nodes}, {"edges", edges}};
  if (g.has_goal()) out["goal"] = g.goal();
  return out;
}

struct ResultRecord {
  ProblemKind problem = ProblemKind::Fdmr;
  std::uint64_t seed = 0;
  bool heuristic = true;
  bool strong_heuristic = false;
  bool monotone_prune = true;
  SearchResult search;
};

// Everything except elapsed_ms is a deterministic function of the inputs.
inline Json to_json(const ResultRecord& r) {
  Json depl = to_json(r.search.best);
  depl.erase("format_version");
  return {{"format_version", kFormatVersion},
          {"tool_version", kToolVersion},
          {"problem", std::string(to_string(r.problem))},
          {"seed", r.seed},
          {"heuristic", r.heuristic ? (r.strong_heuristic ? "strong" : "on") : "off"},
          {"monotone_prune", r.monotone_prune},
          {"objective", r.search.objective},
          {"deployment", depl},
          {"risk", to_json(r.search.evaluation.risk)},
          {"metrics", to_json(r.search.evaluation.metrics)},
          {"expanded_nodes", r.search.expanded},
          {"generated_nodes", r.search.generated},
          {"risk_evaluations", r.search.risk_evaluations},
          {"elapsed_ms", r.search.elapsed_ms}};
}

// ---- CSV ----

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Header plus rows, comma separated, LF line endings. Cells must not contain
// commas, quotes or newlines (all ids and numbers written here qualify).
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw InputError("csv row has the wrong number of cells");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].find_first_of(",\"\n\r") != std::string::npos) throw InputError("csv cell needs quoting: " + cells[i]);
      if (i) out_ += ',';
      out_ += cells[i];
    }
    out_ += '\n';
  }

  const std::string& str() const { return out_; }

 private:
  std::size_t columns_;
  std::string out_;
};

}  // namespace agraph
