// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "obsgprm/routing.hpp"

#include <algorithm>
#include <ostream>

#include "obsgprm/error.hpp"

namespace obsgprm {

std::uint64_t permutation_count(const StateCounts& s) {
  if (s.offset < 1 || s.blr < 1 || s.hops < 1 || s.dest < 1) {
    throw ValidationError("every evidence variable needs at least one state");
  }
  return static_cast<std::uint64_t>(s.offset) * static_cast<std::uint64_t>(s.blr) *
         static_cast<std::uint64_t>(s.hops) * static_cast<std::uint64_t>(s.dest);
}

RoutingTable::RoutingTable(SuccessTable snapshot, std::vector<NodeId> candidates,
                           StateCounts states, double built_at)
    : snapshot_(std::move(snapshot)),
      candidates_(std::move(candidates)),
      states_(states),
      built_at_(built_at) {
  if (candidates_.empty()) throw ValidationError("routing table needs at least one neighbor");
  std::sort(candidates_.begin(), candidates_.end());
  candidates_.erase(std::unique(candidates_.begin(), candidates_.end()), candidates_.end());
}

std::span<const RouteEntry> RoutingTable::row(const EvidenceVector& e) const {
  auto [it, inserted] = rows_.try_emplace(e.key());
  if (inserted) {
    auto& entries = it->second;
    entries.reserve(candidates_.size());
    for (NodeId k : candidates_) entries.push_back({k, 1.0 - snapshot_.sp(k, e)});
    std::stable_sort(entries.begin(), entries.end(),
                     [](const RouteEntry& a, const RouteEntry& b) { return a.cost < b.cost; });
  }
  return it->second;
}

std::optional<NodeId> RoutingTable::lookup(const EvidenceVector& e,
                                           std::span<const NodeId> excluded) const {
  for (const RouteEntry& entry : row(e)) {
    if (std::find(excluded.begin(), excluded.end(), entry.next_hop) == excluded.end()) {
      return entry.next_hop;
    }
  }
  return std::nullopt;
}

std::uint64_t RoutingTable::materialize_all() const {
  std::uint64_t total = 0;
  EvidenceVector e;
  for (int o = 0; o < states_.offset; ++o) {
    for (int b = 0; b < states_.blr; ++b) {
      for (int nb = 0; nb < states_.hops; ++nb) {
        for (int d = 0; d < states_.dest; ++d) {
          e.offset = static_cast<std::uint8_t>(o);
          e.blr = static_cast<BlrClass>(b);
          e.hops = static_cast<std::uint8_t>(nb);
          e.dest = static_cast<NodeId>(d);
          total += row(e).size();
        }
      }
    }
  }
  return total;
}

void RoutingTable::dump(std::ostream& out) const {
  std::vector<std::uint32_t> keys;
  keys.reserve(rows_.size());
  for (auto& [key, _] : rows_) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  for (auto key : keys) {
    auto e = EvidenceVector::from_key(key);
    out << int(e.offset) << " " << int(e.blr) << " " << int(e.hops) << " " << e.dest;
    for (const RouteEntry& entry : rows_.at(key)) {
      out << " | " << entry.next_hop << " " << entry.cost;
    }
    out << "\n";
  }
}

RoutingTable build_table(const SuccessTable& st, std::vector<NodeId> neighbors,
                         const StateCounts& states, double now) {
  return RoutingTable(st, std::move(neighbors), states, now);
}

std::optional<NodeId> lookup(const RoutingTable& rt, const EvidenceVector& e,
                             std::span<const NodeId> excluded) {
  return rt.lookup(e, excluded);
}

ShortestPathRouter::ShortestPathRouter(const Topology& t)
    : n_(t.node_count()), hops_(t), next_(n_ * n_, 0) {
  for (std::size_t from = 0; from < n_; ++from) {
    for (std::size_t dest = 0; dest < n_; ++dest) {
      if (from == dest) continue;
      int want = hops_(static_cast<NodeId>(from), static_cast<NodeId>(dest)) - 1;
      // Neighbors are ascending, so the first match is the id tie-break.
      for (NodeId k : t.neighbors(static_cast<NodeId>(from))) {
        if (hops_(k, static_cast<NodeId>(dest)) == want) {
          next_[from * n_ + dest] = k;
          break;
        }
      }
    }
  }
}

NodeId ShortestPathRouter::next_hop(NodeId from, NodeId dest) const {
  if (from == dest) throw ValidationError("next hop requested for from == dest");
  return next_[static_cast<std::size_t>(from) * n_ + dest];
}

NodeId shortest_path_next_hop(const Topology& t, NodeId from, NodeId dest) {
  return ShortestPathRouter(t).next_hop(from, dest);
}

}  // namespace obsgprm
