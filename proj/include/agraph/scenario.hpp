#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "agraph/error.hpp"
#include "agraph/model.hpp"
#include "agraph/risk.hpp"
#include "agraph/rng.hpp"

namespace agraph {

inline constexpr const char* kBluetooth = "bluetooth";
inline constexpr const char* kZigbee = "zigbee";
inline constexpr const char* kWired = "tcp";

struct TypeTemplate {
  std::string type;
  std::size_t locations = 0;
  std::size_t required = 0;
  std::size_t devices = 0;
};

inline std::vector<TypeTemplate> default_inventory() {
  return {{"detector", 4, 3, 4}, {"camera", 2, 1, 2}, {"refrigerator", 2, 2, 3}};
}

struct GeneratorConfig {
  std::uint64_t seed = 0;
  std::size_t host_count = 24;  // including the internet and goal hosts

  double host_bt = 0.75;
  double host_zb = 0.20;
  double dev_bt = 0.40;
  double dev_zb = 0.80;
  double zigbee_short = 0.60;     // else Medium
  double bluetooth_medium = 0.60;  // else Long
  double host_in_range = 0.30;     // chance a host enters a location's Long set

  double dmz_fraction = 0.35;
  std::size_t cross_edges = 3;
  std::size_t max_base_vulns = 2;  // wired vulnerabilities per host: 1..max
  std::size_t max_src_vulns = 2;   // vulnerabilities per supported SRC protocol: 1..max

  std::vector<TypeTemplate> inventory = default_inventory();
};

namespace detail {

inline void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError(std::string(name) + " must lie in [0, 1]");
}

inline void check_config(const GeneratorConfig& cfg) {
  if (cfg.host_count < 2) throw InputError("host_count must be at least 2 (internet and goal)");
  check_probability(cfg.host_bt, "host_bt");
  check_probability(cfg.host_zb, "host_zb");
  check_probability(cfg.dev_bt, "dev_bt");
  check_probability(cfg.dev_zb, "dev_zb");
  check_probability(cfg.zigbee_short, "zigbee_short");
  check_probability(cfg.bluetooth_medium, "bluetooth_medium");
  check_probability(cfg.host_in_range, "host_in_range");
  check_probability(cfg.dmz_fraction, "dmz_fraction");
  if (cfg.max_base_vulns == 0 || cfg.max_src_vulns == 0) throw InputError("vulnerability counts must be positive");
  for (const auto& t : cfg.inventory) {
    if (t.type.empty()) throw InputError("inventory type needs a name");
    if (t.required > t.locations || t.required > t.devices)
      throw InputError("inventory for '" + t.type + "' requires more than it provides");
  }
}

inline std::string padded(std::size_t k, std::size_t width) {
  std::string s = std::to_string(k);
  if (s.size() < width) s.insert(0, width - s.size(), '0');
  return s;
}

// Wired vulnerabilities (hosts only), then per SRC protocol in name order.
inline std::vector<VulnRef> draw_vulnerabilities(const std::string& owner, bool wired,
                                                 const std::set<std::string>& src, const GeneratorConfig& cfg,
                                                 SplitMix64& rng) {
  std::vector<VulnRef> out;
  if (wired) {
    const auto n = 1 + rng.uniform_below(cfg.max_base_vulns);
    for (std::uint64_t k = 1; k <= n; ++k) out.push_back({"basevuln-" + owner + "-" + std::to_string(k), kWired});
  }
  for (const auto& p : src) {
    const auto n = 1 + rng.uniform_below(cfg.max_src_vulns);
    for (std::uint64_t k = 1; k <= n; ++k) {
      std::string id = "simvuln-" + owner + "-" + p;
      if (k > 1) id += "-" + std::to_string(k);
      out.push_back({id, p});
    }
  }
  return out;
}

inline std::set<std::string> draw_protocols(double bt, double zb, SplitMix64& rng) {
  std::set<std::string> s;
  if (rng.bernoulli(bt)) s.insert(kBluetooth);
  if (rng.bernoulli(zb)) s.insert(kZigbee);
  return s;
}

}  // namespace detail

// Synthesizes a two-VLAN organisational network and the IoT inventory.
//
// Hosts: "internet" (attacker, no SRC), "goal", and h01..hNN. The regular
// hosts are shuffled; the first ceil(dmz_fraction * N) form the DMZ, which the
// internet reaches over tcp. Each VLAN is a full tcp mesh; the goal sits in
// the internal VLAN, and `cross_edges` DMZ/internal pairs (not touching the
// goal when avoidable) are linked both ways. SRC support, range classes and
// vulnerabilities are independent draws; each stage uses its own derived
// stream so changing one stage leaves the others intact.
inline Instance generate(const GeneratorConfig& cfg) {
  detail::check_config(cfg);
  Instance inst;
  NetworkModel& net = inst.network;
  DeploymentScenario& layout = inst.layout;

  const std::size_t regular = cfg.host_count - 2;
  const std::size_t width = std::max<std::size_t>(2, std::to_string(regular).size());

  SplitMix64 src_rng = SplitMix64::derived(cfg.seed, 1);
  net.hosts.push_back({"internet", {}, {}, true, false});
  std::vector<std::string> names;
  for (std::size_t k = 1; k <= regular; ++k) names.push_back("h" + detail::padded(k, width));
  for (const auto& id : names) net.hosts.push_back({id, detail::draw_protocols(cfg.host_bt, cfg.host_zb, src_rng), {}, false, false});
  net.hosts.push_back({"goal", detail::draw_protocols(cfg.host_bt, cfg.host_zb, src_rng), {}, false, true});

  SplitMix64 topo = SplitMix64::derived(cfg.seed, 2);
  std::vector<std::string> shuffled = names;
  topo.shuffle(shuffled);
  std::size_t dmz_size = static_cast<std::size_t>(std::ceil(cfg.dmz_fraction * static_cast<double>(regular)));
  dmz_size = std::clamp<std::size_t>(dmz_size, regular == 0 ? 0 : 1, regular);
  std::vector<std::string> dmz(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(dmz_size));
  std::vector<std::string> internal(shuffled.begin() + static_cast<std::ptrdiff_t>(dmz_size), shuffled.end());
  std::sort(dmz.begin(), dmz.end());
  std::sort(internal.begin(), internal.end());
  if (dmz.empty()) dmz.push_back("goal");  // two-host network: internet -> goal
  else internal.push_back("goal");

  auto link = [&](const std::string& a, const std::string& b) { net.base_connectivity.insert({a, b, kWired}); };
  for (const auto& h : dmz) link("internet", h);
  for (const auto* vlan : {&dmz, &internal})
    for (const auto& a : *vlan)
      for (const auto& b : *vlan)
        if (a != b) link(a, b);
  if (!internal.empty()) {
    std::vector<std::pair<std::string, std::string>> candidates;
    for (const auto& a : dmz)
      for (const auto& b : internal)
        if (b != "goal") candidates.emplace_back(a, b);
    if (candidates.empty())
      for (const auto& a : dmz) candidates.emplace_back(a, "goal");
    const std::size_t k = std::min(std::max<std::size_t>(cfg.cross_edges, 1), candidates.size());
    topo.partial_shuffle(candidates, k);
    for (std::size_t i = 0; i < k; ++i) {
      link(candidates[i].first, candidates[i].second);
      link(candidates[i].second, candidates[i].first);
    }
  }

  SplitMix64 vuln_rng = SplitMix64::derived(cfg.seed, 3);
  for (auto& h : net.hosts)
    if (!h.is_internet) h.vulnerabilities = detail::draw_vulnerabilities(h.id, true, h.src_protocols, cfg, vuln_rng);

  SplitMix64 dev_rng = SplitMix64::derived(cfg.seed, 4);
  SplitMix64 loc_rng = SplitMix64::derived(cfg.seed, 5);
  for (const auto& t : cfg.inventory) {
    layout.types.push_back({t.type});
    Constraint c{t.type, {}, t.required, {}};
    for (std::size_t k = 1; k <= t.devices; ++k) {
      IoTDevice d;
      d.id = t.type + "-" + std::to_string(k);
      d.type_id = t.type;
      d.src_protocols = detail::draw_protocols(cfg.dev_bt, cfg.dev_zb, dev_rng);
      if (d.src_protocols.contains(kBluetooth))
        d.range_class[kBluetooth] = dev_rng.bernoulli(cfg.bluetooth_medium) ? RangeClass::Medium : RangeClass::Long;
      if (d.src_protocols.contains(kZigbee))
        d.range_class[kZigbee] = dev_rng.bernoulli(cfg.zigbee_short) ? RangeClass::Short : RangeClass::Medium;
      d.vulnerabilities = detail::draw_vulnerabilities(d.id, false, d.src_protocols, cfg, dev_rng);
      c.devices.push_back(d.id);
      layout.devices.push_back(std::move(d));
    }
    for (std::size_t k = 1; k <= t.locations; ++k) {
      Location l;
      l.id = "loc-" + t.type + "-" + std::to_string(k);
      l.type_id = t.type;
      for (const char* p : {kBluetooth, kZigbee}) {
        RangeSets sets;
        for (const auto& h : net.hosts) {
          if (!h.src_protocols.contains(p) || !loc_rng.bernoulli(cfg.host_in_range)) continue;
          sets[2].insert(h.id);
          // zigbee hosts land in Short or Medium, bluetooth hosts in Medium or Long only.
          if (std::string_view(p) == kZigbee) {
            sets[1].insert(h.id);
            if (loc_rng.bernoulli(cfg.zigbee_short)) sets[0].insert(h.id);
          } else if (loc_rng.bernoulli(cfg.bluetooth_medium)) {
            sets[1].insert(h.id);
          }
        }
        l.range_map[p] = std::move(sets);
      }
      c.locations.push_back(l.id);
      layout.locations.push_back(std::move(l));
    }
    layout.constraints.push_back(std::move(c));
  }

  validate(inst);
  return inst;
}

// Uniform over full deployments: per type, a uniform n(t)-subset of L(t)
// (sorted) paired with a uniform ordered n(t)-selection of D(t).
inline Deployment random_full_deployment(const DeploymentScenario& layout, SplitMix64& rng) {
  check_feasible(layout);
  Deployment d;
  for (const auto& c : layout.constraints) {
    std::vector<std::string> locs = c.locations;
    std::vector<std::string> devs = c.devices;
    std::sort(locs.begin(), locs.end());
    std::sort(devs.begin(), devs.end());
    rng.partial_shuffle(locs, c.required_count);
    rng.partial_shuffle(devs, c.required_count);
    std::sort(locs.begin(), locs.begin() + static_cast<std::ptrdiff_t>(c.required_count));
    for (std::size_t i = 0; i < c.required_count; ++i) d.placements[devs[i]] = locs[i];
  }
  return d;
}

inline Deployment random_full_deployment(const DeploymentScenario& layout, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return random_full_deployment(layout, rng);
}

struct RandomBaseline {
  double mean = 0.0;
  std::vector<double> values;  // one per trial
};

// Mean risk of `trials` random full deployments; trial i uses stream i.
inline RandomBaseline random_baseline_fdmr(const RiskEvaluator& eval, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw InputError("trials must be positive");
  RandomBaseline out;
  for (std::size_t i = 0; i < trials; ++i) {
    SplitMix64 rng = SplitMix64::derived(seed, i);
    out.values.push_back(eval.risk(random_full_deployment(eval.instance().layout, rng)).value);
  }
  double sum = 0.0;
  for (double v : out.values) sum += v;
  out.mean = sum / static_cast<double>(trials);
  return out;
}

// Mean risk after k random additions, k = 0..Σn(t). Each repeat draws a
// random full deployment and adds its devices in random order.
inline std::vector<double> random_incremental_murd(const RiskEvaluator& eval, std::size_t repeats,
                                                   std::uint64_t seed) {
  if (repeats == 0) throw InputError("repeats must be positive");
  const DeploymentScenario& layout = eval.instance().layout;
  const std::size_t total = layout.total_required();
  std::vector<double> sums(total + 1, 0.0);
  for (std::size_t r = 0; r < repeats; ++r) {
    SplitMix64 rng = SplitMix64::derived(seed, r);
    const Deployment full = random_full_deployment(layout, rng);
    std::vector<std::pair<std::string, std::string>> order(full.placements.begin(), full.placements.end());
    rng.shuffle(order);
    Deployment prefix;
    sums[0] += eval.risk(prefix).value;
    for (std::size_t k = 0; k < order.size(); ++k) {
      prefix.placements.insert(order[k]);
      sums[k + 1] += eval.risk(prefix).value;
    }
  }
  for (double& s : sums) s /= static_cast<double>(repeats);
  return sums;
}

// Redraws the vulnerabilities of ceil(fraction * |hosts ∪ devices|) elements
// chosen uniformly without replacement. The internet host carries no
// vulnerabilities and is not a candidate. fraction = 0 selects nothing.
inline Instance perturb(const Instance& inst, double fraction, std::uint64_t seed, const GeneratorConfig& cfg = {}) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw InputError("fraction must lie in [0, 1]");
  std::vector<std::string> pool;
  for (const auto& h : inst.network.hosts)
    if (!h.is_internet) pool.push_back(h.id);
  for (const auto& d : inst.layout.devices) pool.push_back(d.id);
  std::sort(pool.begin(), pool.end());

  const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(pool.size()) - 1e-9));
  SplitMix64 rng(seed);
  rng.partial_shuffle(pool, k);
  std::vector<std::string> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(std::min(k, pool.size())));
  std::sort(chosen.begin(), chosen.end());

  Instance out = inst;
  for (const auto& id : chosen) {
    for (auto& h : out.network.hosts)
      if (h.id == id) h.vulnerabilities = detail::draw_vulnerabilities(h.id, true, h.src_protocols, cfg, rng);
    for (auto& d : out.layout.devices)
      if (d.id == id) d.vulnerabilities = detail::draw_vulnerabilities(d.id, false, d.src_protocols, cfg, rng);
  }
  validate(out);
  return out;
}

}  // namespace agraph
