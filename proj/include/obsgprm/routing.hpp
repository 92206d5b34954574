// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "obsgprm/evidence.hpp"
#include "obsgprm/success_table.hpp"
#include "obsgprm/topology.hpp"

namespace obsgprm {

struct RouteEntry {
  NodeId next_hop = 0;
  double cost = 0.0;  // 1 - SP

  bool operator==(const RouteEntry&) const = default;
};

// gamma * delta * eta * theta
std::uint64_t permutation_count(const StateCounts& s);

// Fast per-node lookup compiled from a SuccessTable snapshot. Each evidence
// permutation maps to its candidate next hops sorted by ascending cost, ties
// by smaller id. Rows are materialized on first touch from the snapshot, which
// is indistinguishable from compiling all of them at build time.
class RoutingTable {
 public:
  RoutingTable(SuccessTable snapshot, std::vector<NodeId> candidates, StateCounts states,
               double built_at);

  NodeId owner() const { return snapshot_.owner(); }
  double built_at() const { return built_at_; }
  const StateCounts& states() const { return states_; }

  std::span<const RouteEntry> row(const EvidenceVector& e) const;

  // First entry of the row whose next hop is not excluded.
  std::optional<NodeId> lookup(const EvidenceVector& e, std::span<const NodeId> excluded) const;

  // Forces every permutation of the state space; returns the entry total
  // (sum of beta_i over all permutations).
  std::uint64_t materialize_all() const;
  std::size_t materialized_rows() const { return rows_.size(); }

  // Text rows `o b nb d | next_hop cost | ...` for the materialized rows.
  void dump(std::ostream& out) const;

 private:
  SuccessTable snapshot_;
  std::vector<NodeId> candidates_;
  StateCounts states_;
  double built_at_;
  mutable std::unordered_map<std::uint32_t, std::vector<RouteEntry>> rows_;
};

RoutingTable build_table(const SuccessTable& st, std::vector<NodeId> neighbors,
                         const StateCounts& states, double now);

std::optional<NodeId> lookup(const RoutingTable& rt, const EvidenceVector& e,
                             std::span<const NodeId> excluded);

// Minimum-hop next hops for every (from, dest) pair, ties by smaller id.
class ShortestPathRouter {
 public:
  explicit ShortestPathRouter(const Topology& t);

  NodeId next_hop(NodeId from, NodeId dest) const;
  const HopTable& hops() const { return hops_; }

 private:
  std::size_t n_;
  HopTable hops_;
  std::vector<NodeId> next_;
};

NodeId shortest_path_next_hop(const Topology& t, NodeId from, NodeId dest);

}  // namespace obsgprm
