// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "obsgprm/topology.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "obsgprm/error.hpp"

namespace obsgprm {

namespace {

std::string where(int line_no) { return "line " + std::to_string(line_no) + ": "; }

}  // namespace

Topology::Topology(std::vector<std::string> node_names, std::vector<Link> links,
                   double signal_speed)
    : names_(std::move(node_names)), links_(std::move(links)), signal_speed_(signal_speed) {
  const std::size_t n = names_.size();
  if (n == 0) throw ValidationError("topology has no nodes");
  if (n > std::numeric_limits<NodeId>::max()) throw ValidationError("too many nodes");
  if (!(signal_speed_ > 0)) throw ValidationError("signal_speed must be > 0");

  link_matrix_.assign(n * n, -1);
  neighbors_.resize(n);
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const Link& l = links_[i];
    const std::string id = "link " + std::to_string(l.src) + "->" + std::to_string(l.dst);
    if (l.src >= n || l.dst >= n) throw ValidationError(id + " references an undeclared node");
    if (l.src == l.dst) throw ValidationError(id + " is a self loop");
    if (!(l.length_km > 0)) throw ValidationError(id + " must have positive length");
    if (l.control_channels < 1) throw ValidationError(id + " needs >= 1 control channel");
    if (l.data_channels < 1) throw ValidationError(id + " needs >= 1 data channel");
    if (!(l.channel_rate_bps > 0)) throw ValidationError(id + " needs a positive channel rate");
    auto& slot = link_matrix_[l.src * n + l.dst];
    if (slot >= 0) throw ValidationError(id + " is declared twice");
    slot = static_cast<std::int64_t>(i);
    neighbors_[l.src].push_back(l.dst);
  }
  for (const Link& l : links_) {
    if (link_matrix_[l.dst * n + l.src] < 0) {
      throw ValidationError("link " + std::to_string(l.src) + "->" + std::to_string(l.dst) +
                            " has no reverse link");
    }
  }
  for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());

  std::vector<bool> seen(n, false);
  std::deque<NodeId> frontier{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    NodeId u = frontier.front();
    frontier.pop_front();
    for (NodeId v : neighbors_[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        frontier.push_back(v);
      }
    }
  }
  if (reached != n) throw ValidationError("topology is not connected");
}

std::optional<LinkIndex> Topology::find_link(NodeId src, NodeId dst) const {
  const std::size_t n = names_.size();
  if (src >= n || dst >= n) return std::nullopt;
  auto idx = link_matrix_[src * n + dst];
  if (idx < 0) return std::nullopt;
  return static_cast<LinkIndex>(idx);
}

LinkIndex Topology::link_between(NodeId src, NodeId dst) const {
  auto idx = find_link(src, dst);
  if (!idx) {
    throw ValidationError("no link " + std::to_string(src) + "->" + std::to_string(dst));
  }
  return *idx;
}

double Topology::egress_capacity_bps(NodeId n) const {
  double cap = 0.0;
  for (NodeId k : neighbors(n)) {
    const Link& l = links_[link_between(n, k)];
    cap += l.data_channels * l.channel_rate_bps;
  }
  return cap;
}

int Topology::total_data_channels() const {
  int total = 0;
  for (const Link& l : links_) total += l.data_channels;
  return total;
}

Topology parse_topology(std::istream& in) {
  std::map<long, std::string> nodes;
  std::vector<Link> links;
  double speed = kDefaultSignalSpeed;

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream line(raw);
    std::string directive;
    if (!(line >> directive)) continue;

    if (directive == "node") {
      long id = 0;
      std::string name;
      if (!(line >> id >> name)) throw ParseError(where(line_no) + "expected: node <id> <name>");
      if (id < 0) throw ParseError(where(line_no) + "node id must be non-negative");
      if (!nodes.emplace(id, name).second) {
        throw ParseError(where(line_no) + "duplicate node " + std::to_string(id));
      }
    } else if (directive == "link") {
      long src = 0, dst = 0;
      Link l;
      if (!(line >> src >> dst >> l.length_km >> l.control_channels >> l.data_channels >>
            l.channel_rate_bps)) {
        throw ParseError(where(line_no) +
                         "expected: link <src> <dst> <km> <ctrl_ch> <data_ch> <bps>");
      }
      if (!nodes.contains(src) || !nodes.contains(dst)) {
        throw ValidationError(where(line_no) + "link " + std::to_string(src) + "->" +
                              std::to_string(dst) + " references an undeclared node");
      }
      l.src = static_cast<NodeId>(src);
      l.dst = static_cast<NodeId>(dst);
      links.push_back(l);
    } else if (directive == "signal_speed") {
      if (!(line >> speed)) throw ParseError(where(line_no) + "expected: signal_speed <m/s>");
    } else {
      throw ParseError(where(line_no) + "unknown directive '" + directive + "'");
    }
    std::string extra;
    if (line >> extra) throw ParseError(where(line_no) + "trailing token '" + extra + "'");
  }

  std::vector<std::string> names;
  names.reserve(nodes.size());
  long expected = 0;
  for (auto& [id, name] : nodes) {
    if (id != expected) throw ValidationError("node ids must be dense 0..N-1");
    names.push_back(name);
    ++expected;
  }
  return Topology(std::move(names), std::move(links), speed);
}

Topology load_topology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open topology file " + path.string());
  return parse_topology(in);
}

void write_topology(std::ostream& out, const Topology& t) {
  auto old_precision = out.precision(17);
  out << "signal_speed " << t.signal_speed() << "\n";
  for (std::size_t n = 0; n < t.node_count(); ++n) {
    out << "node " << n << " " << t.name(static_cast<NodeId>(n)) << "\n";
  }
  for (const Link& l : t.links()) {
    out << "link " << l.src << " " << l.dst << " " << l.length_km << " " << l.control_channels
        << " " << l.data_channels << " " << l.channel_rate_bps << "\n";
  }
  out.precision(old_precision);
}

HopTable::HopTable(const Topology& t) : n_(t.node_count()), hops_(n_ * n_, -1) {
  for (std::size_t s = 0; s < n_; ++s) {
    int* row = &hops_[s * n_];
    row[s] = 0;
    std::deque<NodeId> frontier{static_cast<NodeId>(s)};
    while (!frontier.empty()) {
      NodeId u = frontier.front();
      frontier.pop_front();
      for (NodeId v : t.neighbors(u)) {
        if (row[v] < 0) {
          row[v] = row[u] + 1;
          frontier.push_back(v);
        }
      }
    }
  }
}

double propagation_delay(const Link& l, double signal_speed) {
  return l.length_km * 1000.0 / signal_speed;
}

}  // namespace obsgprm
