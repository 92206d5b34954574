// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace obsgprm {

using NodeId = std::uint16_t;
using LinkIndex = std::uint32_t;

inline constexpr double kDefaultSignalSpeed = 2.0e8;  // m/s in fiber

struct Link {
  NodeId src = 0;
  NodeId dst = 0;
  double length_km = 0.0;
  int control_channels = 1;
  int data_channels = 1;
  double channel_rate_bps = 1.0e9;

  bool operator==(const Link&) const = default;
};

// Directed graph of OBS nodes. Each fiber is modeled as two directed links.
// Immutable once constructed; the constructor enforces every invariant
// (dense ids, declared endpoints, reverse links, connectivity).
class Topology {
 public:
  Topology(std::vector<std::string> node_names, std::vector<Link> links,
           double signal_speed = kDefaultSignalSpeed);

  std::size_t node_count() const { return names_.size(); }
  std::size_t link_count() const { return links_.size(); }
  const std::string& name(NodeId n) const { return names_.at(n); }
  const std::vector<Link>& links() const { return links_; }
  const Link& link(LinkIndex i) const { return links_.at(i); }
  double signal_speed() const { return signal_speed_; }

  // Neighbors reachable over an outgoing link, ascending by id.
  std::span<const NodeId> neighbors(NodeId n) const { return neighbors_.at(n); }
  std::optional<LinkIndex> find_link(NodeId src, NodeId dst) const;
  LinkIndex link_between(NodeId src, NodeId dst) const;
  bool is_neighbor(NodeId n, NodeId k) const { return find_link(n, k).has_value(); }

  // Sum of data_channels * channel_rate over the outgoing links of n.
  double egress_capacity_bps(NodeId n) const;
  int total_data_channels() const;

  bool operator==(const Topology& other) const {
    return names_ == other.names_ && links_ == other.links_ &&
           signal_speed_ == other.signal_speed_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Link> links_;
  double signal_speed_;
  std::vector<std::vector<NodeId>> neighbors_;
  std::vector<std::int64_t> link_matrix_;  // src * N + dst -> link index or -1
};

// Text format, one directive per line, '#' starts a comment:
//   node <id> <name>
//   link <src> <dst> <km> <ctrl_ch> <data_ch> <bps>
//   signal_speed <m/s>            (optional)
Topology parse_topology(std::istream& in);
Topology load_topology(const std::filesystem::path& path);
void write_topology(std::ostream& out, const Topology& t);

// Minimum hop counts for every ordered pair, row-major N x N.
class HopTable {
 public:
  explicit HopTable(const Topology& t);

  int operator()(NodeId from, NodeId to) const { return hops_[from * n_ + to]; }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  std::vector<int> hops_;
};

inline HopTable all_pairs_hop_counts(const Topology& t) { return HopTable(t); }

double propagation_delay(const Link& l, double signal_speed = kDefaultSignalSpeed);

}  // namespace obsgprm
