#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "agraph/error.hpp"
#include "agraph/graph.hpp"
#include "agraph/model.hpp"

namespace agraph {

// Connectivity after placing devices: the base facts plus, for every deployed
// device d at l and every protocol p shared by d and host h with
// h ∈ range(l, p, class(d, p)), the pair (d, h, p) and (h, d, p).
inline std::set<ConnectivityFact> augment_connectivity(const NetworkModel& net, const DeploymentScenario& layout,
                                                       const Deployment& depl) {
  if (!is_valid(depl, layout)) throw InputError("invalid deployment: " + depl.canonical());
  std::set<ConnectivityFact> facts = net.base_connectivity;
  for (const auto& [device_id, location_id] : depl.placements) {
    const IoTDevice& d = layout.device(device_id);
    for (const auto& p : d.src_protocols) {
      for (const auto& h : hosts_in_range(layout, location_id, p, d.range_class.at(p))) {
        const Host* host = net.find_host(h);
        if (host == nullptr || !host->src_protocols.contains(p)) continue;
        facts.insert({d.id, h, p});
        facts.insert({h, d.id, p});
      }
    }
  }
  return facts;
}

struct BuildOptions {
  // Drop nodes from which the goal privilege is not reachable.
  bool prune_irrelevant = true;
};

// Compiles (network, layout) once so per-deployment graphs are cheap. Two
// rules are chained forward from the internet host:
//
//   R0  attackerLocated(h)                                   => presence(h) => execCode(h)
//   R1  execCode(a) ∧ conn(a, b, p) ∧ vuln(b, v) over p      => remote(v, a, b) => execCode(b)
//
// Node identity is the rule instantiation, so node order and labels do not
// depend on discovery order.
class GraphCompiler {
 public:
  GraphCompiler(const NetworkModel& net, const DeploymentScenario& layout) : layout_(&layout) {
    for (const auto& h : net.hosts) names_.push_back(h.id);
    for (const auto& d : layout.devices) names_.push_back(d.id);
    std::sort(names_.begin(), names_.end());
    for (std::uint32_t i = 0; i < names_.size(); ++i) index_[names_[i]] = i;
    if (index_.size() != names_.size()) throw InputError("host and device ids must be distinct");

    vulns_.resize(names_.size());
    base_out_.resize(names_.size());

    // Protocol and vulnerability indices follow sorted names so that input
    // order never leaks into node order.
    std::set<std::string> all_protocols;
    std::map<std::string, std::vector<VulnRef>> owned;
    for (const auto& h : net.hosts) owned[h.id] = h.vulnerabilities;
    for (const auto& d : layout.devices) owned[d.id] = d.vulnerabilities;
    for (auto& [owner, vs] : owned) {
      std::sort(vs.begin(), vs.end(), [](const VulnRef& a, const VulnRef& b) {
        return std::tie(a.id, a.protocol) < std::tie(b.id, b.protocol);
      });
      for (const auto& v : vs) all_protocols.insert(v.protocol);
    }
    for (const auto& f : net.base_connectivity) all_protocols.insert(f.protocol);
    for (const auto& d : layout.devices) all_protocols.insert(d.src_protocols.begin(), d.src_protocols.end());
    std::map<std::string, std::uint32_t> protocol_index;
    for (const auto& p : all_protocols) {
      protocol_index[p] = static_cast<std::uint32_t>(protocols_.size());
      protocols_.push_back(p);
    }
    auto protocol = [&](const std::string& p) {
      auto [it, inserted] = protocol_index.try_emplace(p, static_cast<std::uint32_t>(protocols_.size()));
      if (inserted) protocols_.push_back(p);
      return it->second;
    };
    for (const auto& [owner, vs] : owned)
      for (const auto& v : vs) {
        vulns_[index_.at(owner)].push_back({static_cast<std::uint32_t>(vuln_names_.size()), protocol(v.protocol)});
        vuln_names_.push_back(v.id);
      }
    for (const auto& f : net.base_connectivity)
      base_out_[entity(f.from)].push_back({entity(f.to), protocol(f.protocol)});

    internet_ = entity(net.internet().id);
    goal_ = entity(net.goal().id);

    // SRC links each (device, location) pair would create.
    links_.resize(layout.devices.size());
    for (std::size_t di = 0; di < layout.devices.size(); ++di) {
      const IoTDevice& d = layout.devices[di];
      device_slot_[d.id] = di;
      links_[di].resize(layout.locations.size());
      for (std::size_t li = 0; li < layout.locations.size(); ++li) {
        const Location& l = layout.locations[li];
        if (l.type_id != d.type_id) continue;
        for (const auto& p : d.src_protocols) {
          const auto rm = l.range_map.find(p);
          if (rm == l.range_map.end()) continue;
          for (const auto& h : rm->second[static_cast<std::size_t>(d.range_class.at(p))]) {
            const Host* host = net.find_host(h);
            if (host == nullptr || !host->src_protocols.contains(p)) continue;
            links_[di][li].push_back({entity(h), protocol(p)});
          }
        }
      }
    }
    for (std::size_t li = 0; li < layout.locations.size(); ++li) location_slot_[layout.locations[li].id] = li;
  }

  AttackGraph build(const Deployment& depl, const BuildOptions& opts = {}) const {
    if (!is_valid(depl, *layout_)) throw InputError("invalid deployment: " + depl.canonical());

    // Extra adjacency contributed by deployed devices.
    std::vector<std::vector<Link>> extra(names_.size());
    for (const auto& [device_id, location_id] : depl.placements) {
      const std::size_t di = device_slot_.at(device_id);
      const std::uint32_t d = index_.at(device_id);
      for (const Link& link : links_[di][location_slot_.at(location_id)]) {
        extra[d].push_back({link.to, link.protocol});
        extra[link.to].push_back({d, link.protocol});
      }
    }

    Chain chain(names_.size(), vuln_names_.size());
    const std::uint32_t located = chain.node({NodeKind::Fact, kAttackerLocated, internet_, 0, 0});
    const std::uint32_t presence = chain.node({NodeKind::Exploit, kPresence, internet_, 0, 0});
    chain.edge(located, presence);
    chain.edge(presence, chain.privilege(internet_));

    std::deque<std::uint32_t> frontier{internet_};
    std::vector<bool> reached(names_.size(), false);
    reached[internet_] = true;
    while (!frontier.empty()) {
      const std::uint32_t a = frontier.front();
      frontier.pop_front();
      const std::uint32_t priv_a = chain.privilege(a);
      auto fire = [&](const Link& link) {
        const std::uint32_t b = link.to;
        std::uint32_t conn = kNone;
        for (const Vuln& v : vulns_[b]) {
          if (v.protocol != link.protocol) continue;
          if (conn == kNone) conn = chain.node({NodeKind::Fact, kConn, a, b, link.protocol});
          const std::uint32_t vf = chain.vuln_fact(b, v.name);
          const std::uint32_t ex = chain.node({NodeKind::Exploit, kRemote, v.name, a, b});
          chain.edge(priv_a, ex);
          chain.edge(conn, ex);
          chain.edge(vf, ex);
          chain.edge(ex, chain.privilege(b));
          if (!reached[b]) {
            reached[b] = true;
            frontier.push_back(b);
          }
        }
      };
      for (const Link& link : base_out_[a]) fire(link);
      for (const Link& link : extra[a]) fire(link);
    }

    if (!reached[goal_]) throw InfeasibleError("goal host '" + names_[goal_] + "' is unreachable");

    const std::size_t n = chain.keys.size();
    std::vector<bool> keep(n, true);
    if (opts.prune_irrelevant) {
      std::vector<std::vector<std::uint32_t>> reverse(n);
      for (const auto& [from, to] : chain.edges) reverse[to].push_back(from);
      keep.assign(n, false);
      std::vector<std::uint32_t> stack{chain.privilege(goal_)};
      keep[stack.back()] = true;
      while (!stack.empty()) {
        const std::uint32_t x = stack.back();
        stack.pop_back();
        for (std::uint32_t y : reverse[x])
          if (!keep[y]) {
            keep[y] = true;
            stack.push_back(y);
          }
      }
    }

    std::vector<std::uint32_t> order;
    for (std::uint32_t i = 0; i < n; ++i)
      if (keep[i]) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) { return chain.keys[x] < chain.keys[y]; });

    std::vector<NodeId> remap(n, 0);
    AttackGraph g;
    for (std::uint32_t i : order) remap[i] = g.add_node(chain.keys[i].kind, label(chain.keys[i]));
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const auto& [from, to] : chain.edges)
      if (keep[from] && keep[to]) edges.emplace_back(remap[from], remap[to]);
    std::sort(edges.begin(), edges.end());
    for (const auto& [from, to] : edges) g.add_edge(from, to);
    g.set_goal(remap[chain.privilege(goal_)]);
    return g;
  }

 private:
  static constexpr std::uint32_t kNone = ~std::uint32_t{0};

  // Rule-instantiation tags, ordered within each node kind.
  enum : std::uint8_t { kAttackerLocated = 0, kConn = 1, kVuln = 2, kPresence = 0, kRemote = 1, kExec = 0 };

  struct Key {
    NodeKind kind;
    std::uint8_t rule;
    std::uint32_t x, y, z;

    friend bool operator<(const Key& a, const Key& b) {
      return std::tie(a.kind, a.rule, a.x, a.y, a.z) < std::tie(b.kind, b.rule, b.x, b.y, b.z);
    }
  };

  struct Link {
    std::uint32_t to;
    std::uint32_t protocol;
  };

  struct Vuln {
    std::uint32_t name;
    std::uint32_t protocol;
  };

  // Nodes created during one forward-chaining run. Privileges and vulnerability
  // facts are shared; everything else is created exactly once by construction.
  struct Chain {
    Chain(std::size_t entities, std::size_t vulns) : priv(entities, kNone), vuln(vulns, kNone) {}

    std::uint32_t node(const Key& k) {
      keys.push_back(k);
      return static_cast<std::uint32_t>(keys.size() - 1);
    }
    std::uint32_t privilege(std::uint32_t entity) {
      if (priv[entity] == kNone) priv[entity] = node({NodeKind::Privilege, kExec, entity, 0, 0});
      return priv[entity];
    }
    std::uint32_t vuln_fact(std::uint32_t owner, std::uint32_t name) {
      if (vuln[name] == kNone) vuln[name] = node({NodeKind::Fact, kVuln, owner, name, 0});
      return vuln[name];
    }
    void edge(std::uint32_t from, std::uint32_t to) { edges.emplace_back(from, to); }

    std::vector<Key> keys;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::vector<std::uint32_t> priv;
    std::vector<std::uint32_t> vuln;
  };

  std::uint32_t entity(const std::string& id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) throw InputError("unknown host or device '" + id + "'");
    return it->second;
  }

  std::string label(const Key& k) const {
    switch (k.kind) {
      case NodeKind::Privilege: return "execCode(" + names_[k.x] + ")";
      case NodeKind::Exploit:
        if (k.rule == kPresence) return "presence(" + names_[k.x] + ")";
        return "remote(" + vuln_names_[k.x] + "," + names_[k.y] + "," + names_[k.z] + ")";
      case NodeKind::Fact:
        if (k.rule == kAttackerLocated) return "attackerLocated(" + names_[k.x] + ")";
        if (k.rule == kConn) return "conn(" + names_[k.x] + "," + names_[k.y] + "," + protocols_[k.z] + ")";
        return "vuln(" + names_[k.x] + "," + vuln_names_[k.y] + ")";
    }
    return {};
  }

  const DeploymentScenario* layout_;
  std::vector<std::string> names_;
  std::map<std::string, std::uint32_t> index_;
  std::vector<std::string> protocols_;
  std::vector<std::string> vuln_names_;
  std::vector<std::vector<Vuln>> vulns_;
  std::vector<std::vector<Link>> base_out_;
  std::vector<std::vector<std::vector<Link>>> links_;  // [device slot][location slot]
  std::map<std::string, std::size_t> device_slot_;
  std::map<std::string, std::size_t> location_slot_;
  std::uint32_t internet_ = 0;
  std::uint32_t goal_ = 0;
};

// One-shot convenience around GraphCompiler.
inline AttackGraph build_attack_graph(const NetworkModel& net, const DeploymentScenario& layout,
                                      const Deployment& depl, const BuildOptions& opts = {}) {
  return GraphCompiler(net, layout).build(depl, opts);
}

}  // namespace agraph
