#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agraph/error.hpp"

namespace agraph {

enum class NodeKind : std::uint8_t { Fact, Exploit, Privilege };

inline std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Fact: return "fact";
    case NodeKind::Exploit: return "exploit";
    case NodeKind::Privilege: return "privilege";
  }
  return "?";
}

using NodeId = std::uint32_t;

// Logical attack graph. Edges point along the implied logical operation:
// fact/privilege -> exploit (precondition, AND) and exploit -> privilege
// (grant, OR). `in(n)` is pre(e) for an exploit and obt(p) for a privilege.
class AttackGraph {
 public:
  NodeId add_node(NodeKind kind, std::string label) {
    kinds_.push_back(kind);
    labels_.push_back(std::move(label));
    in_.emplace_back();
    out_.emplace_back();
    return static_cast<NodeId>(kinds_.size() - 1);
  }

  void add_edge(NodeId from, NodeId to) {
    check(from);
    check(to);
    const NodeKind a = kinds_[from];
    const NodeKind b = kinds_[to];
    const bool ok = (b == NodeKind::Exploit && a != NodeKind::Exploit) ||
                    (a == NodeKind::Exploit && b == NodeKind::Privilege);
    if (!ok)
      throw InputError("edge " + labels_[from] + " -> " + labels_[to] + " joins " + std::string(to_string(a)) +
                       " to " + std::string(to_string(b)));
    auto& ins = in_[to];
    if (std::find(ins.begin(), ins.end(), from) != ins.end()) return;
    ins.push_back(from);
    out_[from].push_back(to);
  }

  void set_goal(NodeId g) {
    check(g);
    if (kinds_[g] != NodeKind::Privilege) throw InputError("goal '" + labels_[g] + "' is not a privilege");
    goal_ = g;
  }

  std::size_t size() const { return kinds_.size(); }
  NodeKind kind(NodeId n) const { return kinds_[n]; }
  const std::string& label(NodeId n) const { return labels_[n]; }
  const std::vector<NodeId>& in(NodeId n) const { return in_[n]; }
  const std::vector<NodeId>& out(NodeId n) const { return out_[n]; }
  bool has_goal() const { return goal_.has_value(); }

  NodeId goal() const {
    if (!goal_) throw InputError("attack graph has no goal");
    return *goal_;
  }

  std::size_t count(NodeKind k) const { return static_cast<std::size_t>(std::count(kinds_.begin(), kinds_.end(), k)); }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& o : out_) n += o.size();
    return n;
  }

  // (from, to) pairs ordered by source then insertion.
  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> e;
    for (NodeId n = 0; n < size(); ++n)
      for (NodeId t : out_[n]) e.emplace_back(n, t);
    return e;
  }

  std::optional<NodeId> find(std::string_view label) const {
    for (NodeId n = 0; n < size(); ++n)
      if (labels_[n] == label) return n;
    return std::nullopt;
  }

  // Every exploit has at least one precondition and exactly one grant.
  void check_exploit_shape() const {
    for (NodeId n = 0; n < size(); ++n) {
      if (kinds_[n] != NodeKind::Exploit) continue;
      if (in_[n].empty()) throw InputError("exploit '" + labels_[n] + "' has no precondition");
      if (out_[n].size() != 1) throw InputError("exploit '" + labels_[n] + "' must grant exactly one privilege");
    }
  }

 private:
  void check(NodeId n) const {
    if (n >= kinds_.size()) throw InputError("node id out of range");
  }

  std::vector<NodeKind> kinds_;
  std::vector<std::string> labels_;
  std::vector<std::vector<NodeId>> in_;
  std::vector<std::vector<NodeId>> out_;
  std::optional<NodeId> goal_;
};

}  // namespace agraph
