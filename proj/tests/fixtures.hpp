#pragma once

#include <string>
#include <vector>

#include "agraph/model.hpp"

namespace agraph::testing {

// internet -> h1 -> h2 -> goal over tcp; h1 and goal also speak bluetooth.
inline NetworkModel chain_network() {
  NetworkModel net;
  net.hosts.push_back({"internet", {}, {}, true, false});
  net.hosts.push_back({"h1", {"bluetooth"}, {{"v-h1", "tcp"}, {"bt-h1", "bluetooth"}}, false, false});
  net.hosts.push_back({"h2", {}, {{"v-h2", "tcp"}}, false, false});
  net.hosts.push_back({"goal", {"bluetooth"}, {{"v-goal", "tcp"}, {"bt-goal", "bluetooth"}}, false, true});
  net.base_connectivity = {{"internet", "h1", "tcp"}, {"h1", "h2", "tcp"}, {"h2", "goal", "tcp"}};
  return net;
}

inline RangeSets ranges(HostSet s, HostSet m, HostSet l) { return {std::move(s), std::move(m), std::move(l)}; }

// One type "tv": 4 devices, 3 locations, 2 required; C(3,2) * P(4,2) = 36.
// No location reaches any host, so every deployment scores 0.
inline Instance tv_instance() {
  Instance inst;
  inst.network = chain_network();
  auto& layout = inst.layout;
  layout.types = {{"tv"}};
  Constraint c{"tv", {}, 2, {}};
  for (int k = 1; k <= 4; ++k) {
    IoTDevice d{"tv-" + std::to_string(k), "tv", {"bluetooth"}, {{"bluetooth", RangeClass::Medium}}, {}};
    d.vulnerabilities.push_back({"bt-" + d.id, "bluetooth"});
    c.devices.push_back(d.id);
    layout.devices.push_back(d);
  }
  for (int k = 1; k <= 3; ++k) {
    Location l{"tv-loc-" + std::to_string(k), "tv", {{"bluetooth", ranges({}, {}, {})}}};
    c.locations.push_back(l.id);
    layout.locations.push_back(l);
  }
  layout.constraints = {c};
  return inst;
}

// Two types. cam-1 at loc-a sees h1 and goal over bluetooth, which opens
// internet -> h1 -> cam-1 -> goal next to the wired path of the same length:
// one more shortest plan, R = 1. Every other placement scores 0.
inline Instance two_type_instance() {
  Instance inst;
  inst.network = chain_network();
  auto& layout = inst.layout;
  layout.types = {{"cam"}, {"fridge"}};
  layout.devices = {
      {"cam-1", "cam", {"bluetooth"}, {{"bluetooth", RangeClass::Medium}}, {{"bt-cam-1", "bluetooth"}}},
      {"cam-2", "cam", {"bluetooth"}, {{"bluetooth", RangeClass::Short}}, {{"bt-cam-2", "bluetooth"}}},
      {"fridge-1", "fridge", {"zigbee"}, {{"zigbee", RangeClass::Short}}, {{"zb-fridge-1", "zigbee"}}},
  };
  layout.locations = {
      {"loc-a", "cam", {{"bluetooth", ranges({}, {"goal", "h1"}, {"goal", "h1"})}}},
      {"loc-b", "cam", {{"bluetooth", ranges({}, {}, {"h1"})}}},
      {"loc-f", "fridge", {{"zigbee", ranges({}, {}, {})}}},
  };
  layout.constraints = {{"cam", {"loc-a", "loc-b"}, 1, {"cam-1", "cam-2"}}, {"fridge", {"loc-f"}, 1, {"fridge-1"}}};
  return inst;
}

}  // namespace agraph::testing
