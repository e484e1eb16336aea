#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agraph/error.hpp"

namespace agraph {

// Radio reach abstraction. Short ⊆ Medium ⊆ Long per (location, protocol).
enum class RangeClass { Short = 0, Medium = 1, Long = 2 };

inline constexpr std::array<RangeClass, 3> kRangeClasses = {RangeClass::Short, RangeClass::Medium,
                                                            RangeClass::Long};

inline std::string_view to_string(RangeClass r) {
  switch (r) {
    case RangeClass::Short: return "Short";
    case RangeClass::Medium: return "Medium";
    case RangeClass::Long: return "Long";
  }
  return "?";
}

inline RangeClass range_class_from_string(std::string_view s) {
  if (s == "Short") return RangeClass::Short;
  if (s == "Medium") return RangeClass::Medium;
  if (s == "Long") return RangeClass::Long;
  throw InputError("unknown range class '" + std::string(s) + "'");
}

using HostSet = std::set<std::string>;

struct VulnRef {
  std::string id;
  std::string protocol;          // protocol over which it is exploitable
  std::string grants = "execCode";

  friend bool operator==(const VulnRef&, const VulnRef&) = default;
};

struct Host {
  std::string id;
  std::set<std::string> src_protocols;
  std::vector<VulnRef> vulnerabilities;
  bool is_internet = false;
  bool is_goal = false;

  friend bool operator==(const Host&, const Host&) = default;
};

struct DeviceType {
  std::string id;

  friend bool operator==(const DeviceType&, const DeviceType&) = default;
};

struct IoTDevice {
  std::string id;
  std::string type_id;
  std::set<std::string> src_protocols;
  std::map<std::string, RangeClass> range_class;  // protocol -> class
  std::vector<VulnRef> vulnerabilities;

  friend bool operator==(const IoTDevice&, const IoTDevice&) = default;
};

// Host sets reachable from a location, indexed by RangeClass.
using RangeSets = std::array<HostSet, 3>;

struct Location {
  std::string id;
  std::string type_id;
  std::map<std::string, RangeSets> range_map;  // protocol -> nested host sets

  friend bool operator==(const Location&, const Location&) = default;
};

// C(t) = (L(t), n(t), D(t)).
struct Constraint {
  std::string type_id;
  std::vector<std::string> locations;
  std::size_t required_count = 0;
  std::vector<std::string> devices;

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

struct ConnectivityFact {
  std::string from;
  std::string to;
  std::string protocol;

  friend auto operator<=>(const ConnectivityFact&, const ConnectivityFact&) = default;
};

struct NetworkModel {
  std::vector<Host> hosts;
  std::set<ConnectivityFact> base_connectivity;

  const Host* find_host(std::string_view id) const {
    for (const auto& h : hosts)
      if (h.id == id) return &h;
    return nullptr;
  }

  const Host& internet() const {
    for (const auto& h : hosts)
      if (h.is_internet) return h;
    throw InputError("network has no internet host");
  }

  const Host& goal() const {
    for (const auto& h : hosts)
      if (h.is_goal) return h;
    throw InputError("network has no goal host");
  }

  friend bool operator==(const NetworkModel&, const NetworkModel&) = default;
};

struct DeploymentScenario {
  std::vector<DeviceType> types;
  std::vector<IoTDevice> devices;
  std::vector<Location> locations;
  std::vector<Constraint> constraints;

  const IoTDevice* find_device(std::string_view id) const {
    for (const auto& d : devices)
      if (d.id == id) return &d;
    return nullptr;
  }

  const Location* find_location(std::string_view id) const {
    for (const auto& l : locations)
      if (l.id == id) return &l;
    return nullptr;
  }

  const Constraint* constraint_for(std::string_view type_id) const {
    for (const auto& c : constraints)
      if (c.type_id == type_id) return &c;
    return nullptr;
  }

  const IoTDevice& device(std::string_view id) const {
    if (const auto* d = find_device(id)) return *d;
    throw InputError("unknown device '" + std::string(id) + "'");
  }

  const Location& location(std::string_view id) const {
    if (const auto* l = find_location(id)) return *l;
    throw InputError("unknown location '" + std::string(id) + "'");
  }

  std::size_t total_required() const {
    std::size_t n = 0;
    for (const auto& c : constraints) n += c.required_count;
    return n;
  }

  friend bool operator==(const DeploymentScenario&, const DeploymentScenario&) = default;
};

// Everything a command needs: the organizational network plus the IoT layout.
struct Instance {
  NetworkModel network;
  DeploymentScenario layout;

  friend bool operator==(const Instance&, const Instance&) = default;
};

// A partial map device -> location. Devices absent from `placements` are at ⊥.
// `forbidden` records search-tree "do not deploy d at l" decisions.
struct Deployment {
  std::map<std::string, std::string> placements;
  std::set<std::pair<std::string, std::string>> forbidden;

  std::size_t deployed_count() const { return placements.size(); }

  std::optional<std::string> location_of(const std::string& device) const {
    if (auto it = placements.find(device); it != placements.end()) return it->second;
    return std::nullopt;
  }

  // "d1@l1;d2@l2", sorted by device id. Empty deployment is "".
  std::string canonical() const {
    std::string out;
    for (const auto& [d, l] : placements) {
      if (!out.empty()) out += ';';
      out += d;
      out += '@';
      out += l;
    }
    return out;
  }

  friend bool operator==(const Deployment&, const Deployment&) = default;
};

// Hosts an IoT device at `location` may reach over `protocol` with `range`.
// std::nullopt stands for ⊥, whose range is empty.
inline HostSet hosts_in_range(const DeploymentScenario& layout, const std::optional<std::string>& location,
                              const std::string& protocol, RangeClass range) {
  if (!location) return {};
  const Location& loc = layout.location(*location);
  const auto it = loc.range_map.find(protocol);
  if (it == loc.range_map.end()) return {};
  return it->second[static_cast<std::size_t>(range)];
}

// Every placed device sits at a location of its own type, no location holds two
// devices, and no forbidden pair is used. Unknown ids throw InputError.
inline bool is_valid(const Deployment& depl, const DeploymentScenario& layout) {
  std::set<std::string> occupied;
  for (const auto& [device_id, location_id] : depl.placements) {
    const IoTDevice& d = layout.device(device_id);
    const Location& l = layout.location(location_id);
    if (l.type_id != d.type_id) return false;
    if (!occupied.insert(location_id).second) return false;
    if (depl.forbidden.contains({device_id, location_id})) return false;
  }
  for (const auto& [device_id, location_id] : depl.forbidden) {
    layout.device(device_id);
    layout.location(location_id);
  }
  return true;
}

// Number of devices of `type_id` that `depl` places.
inline std::size_t deployed_of_type(const Deployment& depl, const DeploymentScenario& layout,
                                    std::string_view type_id) {
  std::size_t n = 0;
  for (const auto& [device_id, location_id] : depl.placements)
    if (layout.device(device_id).type_id == type_id) ++n;
  return n;
}

// Valid, and exactly n(t) locations of every L(t) are filled.
inline bool is_full(const Deployment& depl, const DeploymentScenario& layout) {
  if (!is_valid(depl, layout)) return false;
  for (const auto& c : layout.constraints)
    if (deployed_of_type(depl, layout, c.type_id) != c.required_count) return false;
  return true;
}

// Valid, and no type exceeds its n(t). The MURD feasible set.
inline bool within_constraints(const Deployment& depl, const DeploymentScenario& layout) {
  if (!is_valid(depl, layout)) return false;
  for (const auto& c : layout.constraints)
    if (deployed_of_type(depl, layout, c.type_id) > c.required_count) return false;
  return true;
}

// Throws InfeasibleError when some C(t) cannot be met.
inline void check_feasible(const DeploymentScenario& layout) {
  for (const auto& c : layout.constraints) {
    if (c.required_count > c.locations.size())
      throw InfeasibleError("n(" + c.type_id + ") exceeds |L(" + c.type_id + ")|");
    if (c.required_count > c.devices.size())
      throw InfeasibleError("n(" + c.type_id + ") exceeds |D(" + c.type_id + ")|");
  }
}

namespace detail {

template <typename Range, typename Proj>
void require_unique(const Range& items, Proj proj, std::string_view what) {
  std::set<std::string> seen;
  for (const auto& item : items) {
    const std::string& id = proj(item);
    if (id.empty()) throw InputError(std::string(what) + " with empty id");
    if (!seen.insert(id).second) throw InputError("duplicate " + std::string(what) + " id '" + id + "'");
  }
}

}  // namespace detail

// Checks every structural invariant of an instance; throws InputError on the
// first violation. Loaders and the generator both call this. Constraints with
// n(t) > |L(t)| or n(t) > |D(t)| load fine; they are reported as infeasible by
// the operations that need a full deployment (see check_feasible).
inline void validate(const Instance& inst) {
  const NetworkModel& net = inst.network;
  const DeploymentScenario& layout = inst.layout;

  detail::require_unique(net.hosts, [](const Host& h) -> const std::string& { return h.id; }, "host");
  detail::require_unique(layout.devices, [](const IoTDevice& d) -> const std::string& { return d.id; }, "device");
  detail::require_unique(layout.locations, [](const Location& l) -> const std::string& { return l.id; },
                         "location");
  detail::require_unique(layout.types, [](const DeviceType& t) -> const std::string& { return t.id; },
                         "device type");
  for (const auto& d : layout.devices)
    if (net.find_host(d.id)) throw InputError("id '" + d.id + "' names both a host and a device");

  const auto internet_count = std::count_if(net.hosts.begin(), net.hosts.end(), [](const Host& h) { return h.is_internet; });
  const auto goal_count = std::count_if(net.hosts.begin(), net.hosts.end(), [](const Host& h) { return h.is_goal; });
  if (internet_count != 1) throw InputError("network needs exactly one internet host");
  if (goal_count != 1) throw InputError("network needs exactly one goal host");
  if (net.internet().id == net.goal().id) throw InputError("internet host cannot be the goal");

  std::set<std::string> wired_protocols;
  for (const auto& f : net.base_connectivity) {
    if (!net.find_host(f.from) || !net.find_host(f.to))
      throw InputError("connectivity fact references unknown host: " + f.from + " -> " + f.to);
    if (f.from == f.to) throw InputError("self connectivity on host '" + f.from + "'");
    wired_protocols.insert(f.protocol);
  }
  for (const auto& h : net.hosts) {
    for (const auto& v : h.vulnerabilities)
      if (!h.src_protocols.contains(v.protocol) && !wired_protocols.contains(v.protocol))
        throw InputError("vulnerability '" + v.id + "' on host '" + h.id + "' uses unsupported protocol '" +
                         v.protocol + "'");
  }

  std::set<std::string> type_ids;
  for (const auto& t : layout.types) type_ids.insert(t.id);

  for (const auto& d : layout.devices) {
    if (!type_ids.contains(d.type_id)) throw InputError("device '" + d.id + "' has unknown type '" + d.type_id + "'");
    for (const auto& p : d.src_protocols)
      if (!d.range_class.contains(p)) throw InputError("device '" + d.id + "' lacks a range class for '" + p + "'");
    for (const auto& v : d.vulnerabilities)
      if (!d.src_protocols.contains(v.protocol))
        throw InputError("vulnerability '" + v.id + "' on device '" + d.id + "' uses unsupported protocol '" +
                         v.protocol + "'");
  }

  for (const auto& l : layout.locations) {
    if (!type_ids.contains(l.type_id))
      throw InputError("location '" + l.id + "' has unknown type '" + l.type_id + "'");
    for (const auto& [protocol, sets] : l.range_map) {
      for (const auto& set : sets)
        for (const auto& h : set)
          if (!net.find_host(h))
            throw InputError("location '" + l.id + "' range references unknown host '" + h + "'");
      const bool nested = std::includes(sets[1].begin(), sets[1].end(), sets[0].begin(), sets[0].end()) &&
                          std::includes(sets[2].begin(), sets[2].end(), sets[1].begin(), sets[1].end());
      if (!nested)
        throw InputError("location '" + l.id + "' protocol '" + protocol + "' violates Short ⊆ Medium ⊆ Long");
    }
  }

  // Type partition: every location in exactly one L(t), one constraint per type.
  std::set<std::string> constrained_types;
  std::map<std::string, int> location_uses;
  for (const auto& c : layout.constraints) {
    if (!type_ids.contains(c.type_id)) throw InputError("constraint for unknown type '" + c.type_id + "'");
    if (!constrained_types.insert(c.type_id).second)
      throw InputError("more than one constraint for type '" + c.type_id + "'");
    for (const auto& lid : c.locations) {
      const Location& l = layout.location(lid);
      if (l.type_id != c.type_id)
        throw InputError("location '" + lid + "' in L(" + c.type_id + ") has type '" + l.type_id + "'");
      ++location_uses[lid];
    }
    std::set<std::string> listed(c.devices.begin(), c.devices.end());
    if (listed.size() != c.devices.size()) throw InputError("duplicate device in D(" + c.type_id + ")");
    for (const auto& did : c.devices)
      if (layout.device(did).type_id != c.type_id)
        throw InputError("device '" + did + "' in D(" + c.type_id + ") has another type");
    for (const auto& d : layout.devices)
      if (d.type_id == c.type_id && !listed.contains(d.id))
        throw InputError("device '" + d.id + "' missing from D(" + c.type_id + ")");
  }
  for (const auto& l : layout.locations)
    if (location_uses[l.id] != 1) throw InputError("location '" + l.id + "' must appear in exactly one L(t)");
  for (const auto& t : layout.types)
    if (!constrained_types.contains(t.id)) throw InputError("type '" + t.id + "' has no constraint");
}

}  // namespace agraph
