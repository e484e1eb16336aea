#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agraph/error.hpp"
#include "agraph/model.hpp"
#include "agraph/risk.hpp"
#include "agraph/rng.hpp"

namespace agraph {

enum class ProblemKind { Fdmr, Murd };

inline std::string_view to_string(ProblemKind p) { return p == ProblemKind::Fdmr ? "fdmr" : "murd"; }

// |R| at or below this counts as "unchanged risk".
inline constexpr double kZeroRisk = 1e-9;

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    throw ResourceError("search space size overflows 64 bits");
  return a * b;
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = checked_mul(r, n - k + i) / i;  // exact at every step
  return r;
}

inline std::uint64_t permutations(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < k; ++i) r = checked_mul(r, n - i);
  return r;
}

}  // namespace detail

// Number of full deployments: ∏_t C(|L(t)|, n(t)) · P(|D(t)|, n(t)).
inline std::uint64_t search_space_size(const std::vector<Constraint>& constraints) {
  std::uint64_t total = 1;
  for (const auto& c : constraints) {
    if (c.required_count > c.locations.size() || c.required_count > c.devices.size())
      throw InfeasibleError("constraint for '" + c.type_id + "' cannot be met");
    total = detail::checked_mul(total, detail::binomial(c.locations.size(), c.required_count));
    total = detail::checked_mul(total, detail::permutations(c.devices.size(), c.required_count));
  }
  return total;
}

// Risk of deploying a single device at a single location, for every pair
// still open in a search state. Sorted by (device, location).
struct TableEntry {
  std::string device;
  std::string location;
  std::string type;
  double value = 0.0;

  friend bool operator==(const TableEntry&, const TableEntry&) = default;
};

struct HeuristicTable {
  std::vector<TableEntry> entries;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }

  friend bool operator==(const HeuristicTable&, const HeuristicTable&) = default;
};

// Type-compatible (device, location) pairs, sorted by (device id, location id).
inline std::vector<std::pair<std::string, std::string>> compatible_pairs(const DeploymentScenario& layout) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& d : layout.devices)
    for (const auto& l : layout.locations)
      if (d.type_id == l.type_id) pairs.emplace_back(d.id, l.id);
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

inline HeuristicTable build_heuristic_table(const RiskEvaluator& eval) {
  const DeploymentScenario& layout = eval.instance().layout;
  HeuristicTable t;
  for (const auto& [device, location] : compatible_pairs(layout)) {
    Deployment single;
    single.placements[device] = location;
    t.entries.push_back({device, location, layout.device(device).type_id, eval.risk(single).value});
  }
  return t;
}

// Smallest single-placement risk left in the table; 0 when nothing is left.
inline double h_fdmr(const HeuristicTable& t) {
  if (t.empty()) return 0.0;
  double best = t.entries.front().value;
  for (const auto& e : t.entries) best = std::min(best, e.value);
  return best;
}

// Sum of the k smallest entries of each type, k being the type's unfilled
// slots. Never larger than the sum over any completion's placements.
inline double h_fdmr_strong(const HeuristicTable& t, const std::map<std::string, std::size_t>& open_slots) {
  double total = 0.0;
  for (const auto& [type, slots] : open_slots) {
    std::vector<double> values;
    for (const auto& e : t.entries)
      if (e.type == type) values.push_back(e.value);
    std::sort(values.begin(), values.end());
    for (std::size_t i = 0; i < slots && i < values.size(); ++i) total += values[i];
  }
  return total;
}

// Devices that could still be placed without pushing risk past `slack`.
// With slack 0 this counts devices having a zero-risk entry.
inline std::size_t h_murd(const HeuristicTable& t, double slack = 0.0) {
  std::size_t n = 0;
  const std::string* last = nullptr;
  bool counted = false;
  for (const auto& e : t.entries) {
    if (last == nullptr || *last != e.device) {
      last = &e.device;
      counted = false;
    }
    if (!counted && e.value <= slack + kZeroRisk) {
      ++n;
      counted = true;
    }
  }
  return n;
}

// Pair with the smallest entry; ties go to the smallest (device, location).
// Zero-risk pairs therefore come first for MURD as well.
inline const TableEntry& order_branch(const HeuristicTable& t, ProblemKind) {
  if (t.empty()) throw InputError("no undecided pair to branch on");
  const TableEntry* best = &t.entries.front();
  for (const auto& e : t.entries) {
    if (e.value < best->value ||
        (e.value == best->value && std::tie(e.device, e.location) < std::tie(best->device, best->location)))
      best = &e;
  }
  return *best;
}

enum class Ordering { Table, Random };

struct SearchOptions {
  ProblemKind problem = ProblemKind::Fdmr;
  // f = g + h with the risk-table heuristic; otherwise f = g (FDMR) or
  // g + remaining capacity (MURD).
  bool use_heuristic = true;
  // FDMR only: sum of per-slot minima instead of the single minimum.
  bool strong_heuristic = false;
  // Prune with bounds that rely on risk never decreasing as devices are added.
  // When off, FDMR degenerates to exhaustive search and MURD keeps only the
  // capacity bound.
  bool monotone_prune = true;
  // MURD goal: |R| <= 1e-9 when 0 (plain MURD), otherwise R <= risk_bound.
  double risk_bound = 0.0;
  // Branch order; defaults to Table with the heuristic and Random without.
  std::optional<Ordering> ordering;
  std::uint64_t seed = 0;
};

struct SearchResult {
  bool found = false;
  Deployment best;
  double objective = 0.0;  // risk (FDMR) or deployed devices (MURD)
  Evaluation evaluation;
  std::uint64_t expanded = 0;
  std::uint64_t generated = 0;
  std::uint64_t risk_evaluations = 0;
  double elapsed_ms = 0.0;
};

namespace detail {

// Index view of a layout used by the tree search.
struct SearchSpace {
  explicit SearchSpace(const DeploymentScenario& layout) {
    for (const auto& c : layout.constraints) {
      type_index[c.type_id] = required.size();
      type_names.push_back(c.type_id);
      required.push_back(c.required_count);
    }
    for (const auto& d : layout.devices) {
      device_index[d.id] = device_names.size();
      device_names.push_back(d.id);
      device_type.push_back(type_index.at(d.type_id));
    }
    for (const auto& l : layout.locations) {
      location_index[l.id] = location_names.size();
      location_names.push_back(l.id);
    }
    for (const auto& [d, l] : compatible_pairs(layout)) {
      pair_index[{d, l}] = pairs.size();
      pairs.push_back({device_index.at(d), location_index.at(l)});
    }
  }

  struct Pair {
    std::size_t device;
    std::size_t location;
  };

  std::map<std::string, std::size_t> type_index, device_index, location_index;
  std::map<std::pair<std::string, std::string>, std::size_t> pair_index;
  std::vector<std::string> type_names, device_names, location_names;
  std::vector<std::size_t> required, device_type;
  std::vector<Pair> pairs;
};

struct TreeNode {
  std::vector<int> placed;       // device -> location index, -1 for ⊥
  std::vector<char> forbidden;   // per pair
  std::size_t deployed = 0;
  double risk = 0.0;
  RiskScore score;
  PlanMetrics metrics;
  double f = 0.0;
};

class TreeView {
 public:
  TreeView(const SearchSpace& space, const TreeNode& node) : space_(space), node_(node) {
    occupied_.assign(space.location_names.size(), 0);
    count_.assign(space.required.size(), 0);
    for (std::size_t d = 0; d < node.placed.size(); ++d)
      if (node.placed[d] >= 0) {
        occupied_[static_cast<std::size_t>(node.placed[d])] = 1;
        ++count_[space.device_type[d]];
      }
  }

  bool deployable(std::size_t pair) const {
    const auto& p = space_.pairs[pair];
    const std::size_t t = space_.device_type[p.device];
    return node_.placed[p.device] < 0 && !occupied_[p.location] && count_[t] < space_.required[t] &&
           !node_.forbidden[pair];
  }

  std::vector<std::size_t> open_pairs() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < space_.pairs.size(); ++i)
      if (deployable(i)) out.push_back(i);
    return out;
  }

  bool full() const {
    for (std::size_t t = 0; t < count_.size(); ++t)
      if (count_[t] != space_.required[t]) return false;
    return true;
  }

  std::size_t open_slots(std::size_t t) const { return space_.required[t] - count_[t]; }

  // Every type can still reach n(t) using open pairs (bipartite matching).
  bool completable() const {
    const auto open = open_pairs();
    for (std::size_t t = 0; t < count_.size(); ++t) {
      const std::size_t need = open_slots(t);
      if (need == 0) continue;
      std::map<std::size_t, std::vector<std::size_t>> adj;  // device -> locations
      for (std::size_t i : open) {
        const auto& p = space_.pairs[i];
        if (space_.device_type[p.device] == t) adj[p.device].push_back(p.location);
      }
      std::map<std::size_t, std::size_t> match;  // location -> device
      std::size_t matched = 0;
      for (const auto& [d, _] : adj) {
        std::map<std::size_t, bool> seen;
        std::function<bool(std::size_t)> augment = [&](std::size_t dev) {
          for (std::size_t l : adj[dev]) {
            if (seen[l]) continue;
            seen[l] = true;
            auto it = match.find(l);
            if (it == match.end() || augment(it->second)) {
              match[l] = dev;
              return true;
            }
          }
          return false;
        };
        if (augment(d) && ++matched >= need) break;
      }
      if (matched < need) return false;
    }
    return true;
  }

  // Upper bound on devices a completion could still add.
  std::size_t capacity() const {
    std::size_t total = 0;
    const auto open = open_pairs();
    for (std::size_t t = 0; t < count_.size(); ++t) {
      std::vector<char> dev(space_.device_names.size(), 0), loc(space_.location_names.size(), 0);
      std::size_t nd = 0, nl = 0;
      for (std::size_t i : open) {
        const auto& p = space_.pairs[i];
        if (space_.device_type[p.device] != t) continue;
        if (!dev[p.device]) dev[p.device] = 1, ++nd;
        if (!loc[p.location]) loc[p.location] = 1, ++nl;
      }
      total += std::min({open_slots(t), nd, nl});
    }
    return total;
  }

 private:
  const SearchSpace& space_;
  const TreeNode& node_;
  std::vector<char> occupied_;
  std::vector<std::size_t> count_;
};

inline Deployment to_deployment(const SearchSpace& space, const TreeNode& node) {
  Deployment d;
  for (std::size_t i = 0; i < node.placed.size(); ++i)
    if (node.placed[i] >= 0)
      d.placements[space.device_names[i]] = space.location_names[static_cast<std::size_t>(node.placed[i])];
  return d;
}

}  // namespace detail

// Depth-first branch and bound over the binary deploy / do-not-deploy tree.
//
// FDMR minimises R over full deployments; f = R(partial) + h, and a child is
// kept while f <= alpha. MURD maximises the deployed count among deployments
// with R <= risk_bound; f = count + h, and a child is kept while f > alpha.
// The incumbent changes only on strict improvement. The right (do not deploy)
// child inherits its parent's risk.
inline SearchResult dfbnb(const RiskEvaluator& eval, const SearchOptions& opts) {
  using detail::TreeNode;
  using detail::TreeView;
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t evals_before = eval.evaluations();
  const DeploymentScenario& layout = eval.instance().layout;
  check_feasible(layout);

  const detail::SearchSpace space(layout);
  const bool fdmr = opts.problem == ProblemKind::Fdmr;
  const Ordering ordering = opts.ordering.value_or(opts.use_heuristic ? Ordering::Table : Ordering::Random);
  const bool need_table = opts.use_heuristic || ordering == Ordering::Table;
  constexpr double kTieSlack = 1e-12;

  std::vector<double> single(space.pairs.size(), 0.0);
  if (need_table) {
    const HeuristicTable full_table = build_heuristic_table(eval);
    for (const auto& e : full_table.entries) single[space.pair_index.at({e.device, e.location})] = e.value;
  }
  auto remaining_table = [&](const std::vector<std::size_t>& open) {
    HeuristicTable t;
    t.entries.reserve(open.size());
    for (std::size_t i : open) {
      const auto& p = space.pairs[i];
      t.entries.push_back({space.device_names[p.device], space.location_names[p.location],
                           space.type_names[space.device_type[p.device]], single[i]});
    }
    return t;
  };

  SearchResult result;
  SplitMix64 rng(opts.seed);

  // The same placements recur under different forbidden sets; score each once.
  std::map<std::vector<int>, Evaluation> scored;
  auto evaluate = [&](const TreeNode& node) {
    auto it = scored.find(node.placed);
    if (it == scored.end()) it = scored.emplace(node.placed, eval.evaluate(detail::to_deployment(space, node))).first;
    return it->second;
  };

  auto f_value = [&](const TreeNode& node) {
    const TreeView view(space, node);
    if (fdmr) {
      if (!opts.use_heuristic || !opts.monotone_prune) return node.risk;
      const HeuristicTable t = remaining_table(view.open_pairs());
      if (!opts.strong_heuristic) return node.risk + h_fdmr(t);
      std::map<std::string, std::size_t> slots;
      for (std::size_t ty = 0; ty < space.required.size(); ++ty)
        if (view.open_slots(ty) > 0) slots[space.type_names[ty]] = view.open_slots(ty);
      return node.risk + h_fdmr_strong(t, slots);
    }
    std::size_t h = view.capacity();
    if (opts.use_heuristic && opts.monotone_prune)
      h = std::min(h, h_murd(remaining_table(view.open_pairs()), opts.risk_bound - node.risk));
    return static_cast<double>(node.deployed + h);
  };

  // FDMR: alpha is the best risk so far (+inf). MURD: the best count (root counts).
  double alpha = fdmr ? std::numeric_limits<double>::infinity() : 0.0;
  auto admits = [&](const TreeNode& node) {
    if (fdmr) return !opts.monotone_prune || node.f <= alpha + kTieSlack;
    return node.f > alpha;
  };

  // Plain MURD keeps the risk unchanged; a positive bound admits R <= bound.
  auto within_bound = [&](double r) {
    return opts.risk_bound > 0.0 ? r <= opts.risk_bound + kZeroRisk : std::abs(r) <= kZeroRisk;
  };

  TreeNode root;
  root.placed.assign(space.device_names.size(), -1);
  root.forbidden.assign(space.pairs.size(), 0);
  root.metrics = eval.baseline().metrics;
  if (fdmr && !TreeView(space, root).completable()) throw InfeasibleError("no full deployment satisfies the constraints");
  if (!fdmr && within_bound(0.0)) {
    result.found = true;
    result.best = Deployment{};
    result.objective = 0.0;
    result.evaluation = {root.metrics, RiskScore{}};
  }
  root.f = f_value(root);

  std::vector<TreeNode> stack;
  stack.push_back(std::move(root));
  while (!stack.empty()) {
    TreeNode node = std::move(stack.back());
    stack.pop_back();
    if (!admits(node)) continue;
    const TreeView view(space, node);
    const auto open = view.open_pairs();
    if (open.empty()) continue;
    ++result.expanded;

    std::size_t pair;
    if (ordering == Ordering::Table) {
      const HeuristicTable t = remaining_table(open);
      const TableEntry& e = order_branch(t, opts.problem);
      pair = space.pair_index.at({e.device, e.location});
    } else {
      pair = open[static_cast<std::size_t>(rng.uniform_below(open.size()))];
    }
    const auto& p = space.pairs[pair];

    TreeNode right = node;
    right.forbidden[pair] = 1;

    TreeNode left = std::move(node);
    left.placed[p.device] = static_cast<int>(p.location);
    ++left.deployed;
    const Evaluation ev = evaluate(left);
    left.risk = ev.risk.value;
    left.score = ev.risk;
    left.metrics = ev.metrics;
    result.generated += 2;

    const TreeView left_view(space, left);
    bool left_alive = true;
    if (fdmr) {
      if (left_view.full()) {
        if (!result.found || left.risk < result.objective) {
          result.found = true;
          result.best = detail::to_deployment(space, left);
          result.objective = left.risk;
          result.evaluation = ev;
          alpha = left.risk;
        }
        left_alive = false;  // no open pairs below a full deployment
      } else {
        left_alive = left_view.completable();
      }
    } else {
      const bool within = within_bound(left.risk);
      if (within && static_cast<double>(left.deployed) > alpha) {
        result.found = true;
        result.best = detail::to_deployment(space, left);
        result.objective = static_cast<double>(left.deployed);
        result.evaluation = ev;
        alpha = result.objective;
      }
      if (left.risk > opts.risk_bound + kZeroRisk && opts.monotone_prune) left_alive = false;
    }
    const bool right_alive = !fdmr || TreeView(space, right).completable();

    if (right_alive) {
      right.f = f_value(right);
      if (admits(right)) stack.push_back(std::move(right));
    }
    if (left_alive) {
      left.f = f_value(left);
      if (admits(left)) stack.push_back(std::move(left));
    }
  }

  if (!result.found) throw InfeasibleError("search found no goal state");
  result.risk_evaluations = eval.evaluations() - evals_before;
  result.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// Full deployments reached by walking the whole binary tree (first open pair
// first, completability guard on, no bounds). Equals search_space_size.
inline std::uint64_t count_full_leaves(const DeploymentScenario& layout) {
  check_feasible(layout);
  const detail::SearchSpace space(layout);
  detail::TreeNode root;
  root.placed.assign(space.device_names.size(), -1);
  root.forbidden.assign(space.pairs.size(), 0);
  if (!detail::TreeView(space, root).completable()) return 0;

  std::uint64_t leaves = 0;
  std::vector<detail::TreeNode> stack{root};
  while (!stack.empty()) {
    detail::TreeNode node = std::move(stack.back());
    stack.pop_back();
    const detail::TreeView view(space, node);
    if (view.full()) {
      ++leaves;
      continue;
    }
    const std::size_t pair = view.open_pairs().front();
    detail::TreeNode right = node;
    right.forbidden[pair] = 1;
    node.placed[space.pairs[pair].device] = static_cast<int>(space.pairs[pair].location);
    if (detail::TreeView(space, right).completable()) stack.push_back(std::move(right));
    if (detail::TreeView(space, node).completable()) stack.push_back(std::move(node));
  }
  return leaves;
}

}  // namespace agraph
