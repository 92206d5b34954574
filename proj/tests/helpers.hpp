// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Small topologies and oracles shared by the unit tests.

#pragma once

#include <deque>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "obsgprm/topology.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return OBSGPRM_DATA_DIR; }

inline obsgprm::Topology make_topology(
    std::size_t n, const std::vector<std::pair<int, int>>& fibers, double km = 100.0,
    int data_channels = 4) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("n" + std::to_string(i));
  std::vector<obsgprm::Link> links;
  for (auto [a, b] : fibers) {
    links.push_back({static_cast<obsgprm::NodeId>(a), static_cast<obsgprm::NodeId>(b), km, 1,
                     data_channels, 1e9});
    links.push_back({static_cast<obsgprm::NodeId>(b), static_cast<obsgprm::NodeId>(a), km, 1,
                     data_channels, 1e9});
  }
  return obsgprm::Topology(names, links);
}

inline obsgprm::Topology triangle() { return make_topology(3, {{0, 1}, {1, 2}, {0, 2}}); }

inline obsgprm::Topology nsfnet() { return obsgprm::load_topology(data_dir() / "nsfnet.topo"); }

// Plain BFS from one source over the directed link list.
inline std::vector<int> bfs_oracle(const obsgprm::Topology& t, obsgprm::NodeId src) {
  std::vector<int> dist(t.node_count(), -1);
  std::deque<obsgprm::NodeId> q{src};
  dist[src] = 0;
  while (!q.empty()) {
    auto u = q.front();
    q.pop_front();
    for (const auto& l : t.links()) {
      if (l.src == u && dist[l.dst] < 0) {
        dist[l.dst] = dist[u] + 1;
        q.push_back(l.dst);
      }
    }
  }
  return dist;
}

}  // namespace testing
