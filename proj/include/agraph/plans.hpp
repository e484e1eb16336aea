#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "agraph/error.hpp"
#include "agraph/graph.hpp"

namespace agraph {

// A plan is a node set: it contains the goal, every exploit's preconditions,
// one granting exploit per privilege, and admits an acyclic justification
// order (no privilege is supported only through itself).
struct AttackPlan {
  std::vector<NodeId> nodes;  // sorted
  std::size_t exploits = 0;
  std::size_t privileges = 0;

  friend bool operator==(const AttackPlan&, const AttackPlan&) = default;
  friend auto operator<=>(const AttackPlan& a, const AttackPlan& b) { return a.nodes <=> b.nodes; }
};

struct PlanMetrics {
  std::size_t opt_len = 0;  // nodes in a shortest plan
  std::uint64_t opt_cnt = 0;  // number of distinct shortest plans
  double opt_exp = 0.0;  // mean exploit count over shortest plans
  double opt_prv = 0.0;  // mean privilege count over shortest plans

  friend bool operator==(const PlanMetrics&, const PlanMetrics&) = default;
};

struct PlanOptions {
  // Exceeding this many shortest plans is an error rather than a truncation.
  std::uint64_t max_plans = 1'000'000;
  // Keep the plans themselves, not only their statistics.
  bool collect = false;
};

namespace detail {

// Backward branch and bound over justification subgraphs.
//
// The state is a node set S plus the privileges in S still waiting for a
// supporting exploit ("open"). Expanding an open privilege q picks one
// exploit e ∈ obt(q) and adds e and pre(e) to S. Each privilege of a minimal
// plan holds exactly one granting exploit, so every minimal plan corresponds
// to exactly one sequence of choices and no deduplication is needed.
//
// Lower bound on the final size:
//  * fact-local graphs (every fact feeds exploits of a single privilege):
//    each open q still needs an exploit and that exploit's facts, none of
//    which can already be in S;
//  * linear graphs (at most one privilege precondition per exploit): S is a
//    chain of ancestors of the single open q, so q's remaining chain is at
//    least the static shortest chain below q.
class ShortestPlanSearch {
 public:
  ShortestPlanSearch(const AttackGraph& g, const PlanOptions& opts) : g_(g), opts_(opts) {
    const std::size_t n = g.size();
    facts_of_.resize(n);
    privs_of_.resize(n);
    linear_ = true;
    for (NodeId v = 0; v < n; ++v) {
      if (g.kind(v) != NodeKind::Exploit) continue;
      for (NodeId p : g.in(v)) (g.kind(p) == NodeKind::Fact ? facts_of_ : privs_of_)[v].push_back(p);
      if (privs_of_[v].size() > 1) linear_ = false;
    }
    fact_local_ = true;
    for (NodeId f = 0; f < n && fact_local_; ++f) {
      if (g.kind(f) != NodeKind::Fact) continue;
      std::vector<NodeId> granted;
      for (NodeId e : g.out(f))
        for (NodeId p : g.out(e)) granted.push_back(p);
      std::sort(granted.begin(), granted.end());
      if (std::unique(granted.begin(), granted.end()) - granted.begin() > 1) fact_local_ = false;
    }

    compute_derivable();
    compute_chain_bounds();

    candidates_.resize(n);
    local_.assign(n, kInf);
    for (NodeId q = 0; q < n; ++q) {
      if (g.kind(q) != NodeKind::Privilege) continue;
      for (NodeId e : g.in(q))
        if (derivable_[e]) {
          candidates_[q].push_back(e);
          local_[q] = std::min(local_[q], 1 + (fact_local_ ? facts_of_[e].size() : 0));
        }
      std::stable_sort(candidates_[q].begin(), candidates_[q].end(),
                       [&](NodeId a, NodeId b) { return exploit_cost(a) < exploit_cost(b); });
    }

    in_s_.assign(n, 0);
    chosen_.assign(n, kNoNode);
    mark_.assign(n, 0);
  }

  void run() {
    const NodeId goal = g_.goal();
    if (!derivable_[goal]) return;
    add(goal);
    open_.push_back(goal);
    dfs();
  }

  std::size_t best() const { return best_; }
  std::uint64_t count() const { return count_; }
  std::uint64_t exploit_sum() const { return exploit_sum_; }
  std::uint64_t privilege_sum() const { return privilege_sum_; }
  std::vector<AttackPlan>& plans() { return plans_; }

 private:
  static constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 4;
  static constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

  // Forward fixpoint ignoring cycles: which nodes can ever be obtained.
  void compute_derivable() {
    const std::size_t n = g_.size();
    derivable_.assign(n, 0);
    std::vector<std::size_t> missing(n, 0);
    std::vector<NodeId> work;
    for (NodeId v = 0; v < n; ++v) {
      if (g_.kind(v) == NodeKind::Fact) {
        derivable_[v] = 1;
        work.push_back(v);
      } else if (g_.kind(v) == NodeKind::Exploit) {
        missing[v] = g_.in(v).size();
      }
    }
    while (!work.empty()) {
      const NodeId v = work.back();
      work.pop_back();
      for (NodeId w : g_.out(v)) {
        if (derivable_[w]) continue;
        if (g_.kind(w) == NodeKind::Exploit && --missing[w] > 0) continue;
        derivable_[w] = 1;
        work.push_back(w);
      }
    }
  }

  // Shortest standalone chain below each privilege, counting the privilege,
  // its exploits, intermediate privileges and (when fact-local) facts.
  void compute_chain_bounds() {
    const std::size_t n = g_.size();
    chain_.assign(n, kInf);
    if (!linear_) return;
    using Item = std::pair<std::size_t, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (NodeId e = 0; e < n; ++e) {
      if (g_.kind(e) != NodeKind::Exploit || !privs_of_[e].empty()) continue;
      for (NodeId q : g_.out(e)) relax(q, step_cost(e), pq);
    }
    while (!pq.empty()) {
      const auto [d, q] = pq.top();
      pq.pop();
      if (d != chain_[q]) continue;
      for (NodeId e : g_.out(q))
        for (NodeId r : g_.out(e)) relax(r, d + step_cost(e), pq);
    }
  }

  template <typename Queue>
  void relax(NodeId q, std::size_t d, Queue& pq) {
    if (d < chain_[q]) {
      chain_[q] = d;
      pq.push({d, q});
    }
  }

  std::size_t step_cost(NodeId e) const { return 2 + (fact_local_ ? facts_of_[e].size() : 0); }

  std::size_t exploit_cost(NodeId e) const {
    std::size_t c = step_cost(e);
    for (NodeId p : privs_of_[e]) c = std::min(kInf, c + (chain_[p] == kInf ? 0 : chain_[p]));
    return c;
  }

  std::size_t lower_bound() const {
    std::size_t extra = 0;
    for (NodeId q : open_) extra += local_[q];
    if (linear_ && open_.size() == 1) extra = std::max(extra, chain_[open_.front()] - 1);
    return size_ + extra;
  }

  void add(NodeId v) {
    in_s_[v] = 1;
    ++size_;
    trail_.push_back(v);
    if (g_.kind(v) == NodeKind::Exploit) ++exploits_;
    if (g_.kind(v) == NodeKind::Privilege) ++privileges_;
  }

  void undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
      const NodeId v = trail_.back();
      trail_.pop_back();
      in_s_[v] = 0;
      --size_;
      if (g_.kind(v) == NodeKind::Exploit) --exploits_;
      if (g_.kind(v) == NodeKind::Privilege) --privileges_;
    }
  }

  // True when `from` already depends (through chosen exploits) on `target`.
  bool depends_on(NodeId from, NodeId target) {
    ++stamp_;
    std::vector<NodeId> stack{from};
    mark_[from] = stamp_;
    while (!stack.empty()) {
      const NodeId x = stack.back();
      stack.pop_back();
      if (x == target) return true;
      if (chosen_[x] == kNoNode) continue;
      for (NodeId y : privs_of_[chosen_[x]])
        if (mark_[y] != stamp_) {
          mark_[y] = stamp_;
          stack.push_back(y);
        }
    }
    return false;
  }

  void record() {
    if (size_ < best_) {
      best_ = size_;
      count_ = 0;
      exploit_sum_ = 0;
      privilege_sum_ = 0;
      plans_.clear();
    }
    ++count_;
    if (count_ > opts_.max_plans)
      throw ResourceError("more than " + std::to_string(opts_.max_plans) + " shortest attack plans");
    exploit_sum_ += exploits_;
    privilege_sum_ += privileges_;
    if (opts_.collect) {
      AttackPlan p;
      p.nodes = trail_;
      std::sort(p.nodes.begin(), p.nodes.end());
      p.exploits = exploits_;
      p.privileges = privileges_;
      plans_.push_back(std::move(p));
    }
  }

  void dfs() {
    if (open_.empty()) {
      record();
      return;
    }
    const NodeId q = open_.back();
    open_.pop_back();
    for (NodeId e : candidates_[q]) {
      bool cyclic = false;
      for (NodeId p : privs_of_[e])
        if (p == q || (in_s_[p] && depends_on(p, q))) {
          cyclic = true;
          break;
        }
      if (cyclic) continue;

      const std::size_t trail_mark = trail_.size();
      const std::size_t open_mark = open_.size();
      chosen_[q] = e;
      add(e);
      for (NodeId f : facts_of_[e])
        if (!in_s_[f]) add(f);
      for (NodeId p : privs_of_[e])
        if (!in_s_[p]) {
          add(p);
          open_.push_back(p);
        }
      if (lower_bound() <= best_) dfs();
      open_.resize(open_mark);
      undo_to(trail_mark);
      chosen_[q] = kNoNode;
    }
    open_.push_back(q);
  }

  const AttackGraph& g_;
  PlanOptions opts_;
  bool linear_ = true;
  bool fact_local_ = true;
  std::vector<std::vector<NodeId>> facts_of_;
  std::vector<std::vector<NodeId>> privs_of_;
  std::vector<std::vector<NodeId>> candidates_;
  std::vector<char> derivable_;
  std::vector<std::size_t> chain_;
  std::vector<std::size_t> local_;

  std::vector<char> in_s_;
  std::vector<NodeId> chosen_;
  std::vector<NodeId> trail_;
  std::vector<NodeId> open_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
  std::size_t size_ = 0;
  std::size_t exploits_ = 0;
  std::size_t privileges_ = 0;

  std::size_t best_ = kInf;
  std::uint64_t count_ = 0;
  std::uint64_t exploit_sum_ = 0;
  std::uint64_t privilege_sum_ = 0;
  std::vector<AttackPlan> plans_;
};

}  // namespace detail

// All shortest attack plans, sorted by node set. Throws InfeasibleError when
// the goal cannot be obtained.
inline std::vector<AttackPlan> shortest_plans(const AttackGraph& g, PlanOptions opts = {}) {
  opts.collect = true;
  detail::ShortestPlanSearch search(g, opts);
  search.run();
  if (search.count() == 0) throw InfeasibleError("no attack plan reaches the goal");
  auto plans = std::move(search.plans());
  std::sort(plans.begin(), plans.end());
  return plans;
}

inline PlanMetrics shortest_plan_metrics(const AttackGraph& g, const PlanOptions& opts = {}) {
  detail::ShortestPlanSearch search(g, opts);
  search.run();
  if (search.count() == 0) throw InfeasibleError("no attack plan reaches the goal");
  const auto cnt = static_cast<double>(search.count());
  return {search.best(), search.count(), static_cast<double>(search.exploit_sum()) / cnt,
          static_cast<double>(search.privilege_sum()) / cnt};
}

// Metrics of an explicit list of minimal plans (all of the same size).
inline PlanMetrics metrics_of(const std::vector<AttackPlan>& plans) {
  if (plans.empty()) throw InfeasibleError("no attack plan reaches the goal");
  std::uint64_t exp = 0;
  std::uint64_t prv = 0;
  for (const auto& p : plans) {
    exp += p.exploits;
    prv += p.privileges;
  }
  const auto cnt = static_cast<double>(plans.size());
  return {plans.front().nodes.size(), plans.size(), static_cast<double>(exp) / cnt, static_cast<double>(prv) / cnt};
}

// Reference enumeration: tests every node subset containing the goal, by
// increasing size, against the plan conditions and well-foundedness, and
// returns all valid subsets of the smallest size found. Empty when no plan
// exists. Refuses graphs larger than `max_nodes`.
inline std::vector<AttackPlan> brute_force_plans(const AttackGraph& g, std::size_t max_nodes = 22) {
  const std::size_t n = g.size();
  if (n > max_nodes || n > 63) throw ResourceError("brute force refuses graphs with " + std::to_string(n) + " nodes");
  if (n == 0 || !g.has_goal()) return {};

  using Mask = std::uint64_t;
  std::vector<Mask> need(n, 0);
  Mask facts = 0, exploits = 0, privileges = 0;
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId u : g.in(v)) need[v] |= Mask{1} << u;
    switch (g.kind(v)) {
      case NodeKind::Fact: facts |= Mask{1} << v; break;
      case NodeKind::Exploit: exploits |= Mask{1} << v; break;
      case NodeKind::Privilege: privileges |= Mask{1} << v; break;
    }
  }

  auto is_plan = [&](Mask s) {
    for (NodeId v = 0; v < n; ++v) {
      if (!(s >> v & 1)) continue;
      if (g.kind(v) == NodeKind::Exploit && (need[v] & ~s) != 0) return false;
      if (g.kind(v) == NodeKind::Privilege && (need[v] & s) == 0) return false;
    }
    Mask derived = s & facts;
    for (bool changed = true; changed;) {
      changed = false;
      for (NodeId v = 0; v < n; ++v) {
        const Mask bit = Mask{1} << v;
        if (!(s & bit) || (derived & bit)) continue;
        const bool ok = g.kind(v) == NodeKind::Exploit ? (need[v] & ~derived) == 0 : (need[v] & derived) != 0;
        if (ok) {
          derived |= bit;
          changed = true;
        }
      }
    }
    return derived == s;
  };

  const NodeId goal = g.goal();
  const Mask goal_bit = Mask{1} << goal;
  // Spread a (n-1)-bit pattern over all positions except the goal's.
  auto expand = [&](Mask m) {
    const Mask low = m & (goal_bit - 1);
    const Mask high = (m & ~(goal_bit - 1)) << 1;
    return low | high | goal_bit;
  };

  const std::size_t others = n - 1;
  for (std::size_t k = 0; k <= others; ++k) {
    std::vector<AttackPlan> found;
    auto visit = [&](Mask m) {
      const Mask s = expand(m);
      if (!is_plan(s)) return;
      AttackPlan p;
      for (NodeId v = 0; v < n; ++v)
        if (s >> v & 1) p.nodes.push_back(v);
      p.exploits = static_cast<std::size_t>(std::popcount(s & exploits));
      p.privileges = static_cast<std::size_t>(std::popcount(s & privileges));
      found.push_back(std::move(p));
    };
    if (k == 0) {
      visit(0);
    } else {
      // Gosper's hack over all k-subsets of the other n-1 positions.
      const Mask limit = Mask{1} << others;
      for (Mask m = (Mask{1} << k) - 1; m < limit;) {
        visit(m);
        const Mask c = m & (0 - m);
        const Mask r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
      }
    }
    if (!found.empty()) {
      std::sort(found.begin(), found.end());
      return found;
    }
  }
  return {};
}

}  // namespace agraph
