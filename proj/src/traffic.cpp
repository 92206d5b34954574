// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "obsgprm/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "obsgprm/error.hpp"

namespace obsgprm {

TrafficMatrix::TrafficMatrix(std::size_t nodes)
    : n_(nodes), weights_(nodes * nodes, 0.0), xi_(nodes * nodes, 0) {}

void TrafficMatrix::set_weight(NodeId src, NodeId dst, double w) {
  if (src >= n_ || dst >= n_) throw ValidationError("matrix entry references unknown node");
  if (src == dst) {
    if (w != 0.0) throw ValidationError("self traffic is not allowed");
    return;
  }
  if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("matrix weights must be >= 0");
  weights_[src * n_ + dst] = w;
  xi_[src * n_ + dst] = w > 0.0 ? std::max(1, xi_[src * n_ + dst]) : 0;
}

void TrafficMatrix::set_connections_per_pair(int xi) {
  if (xi < 1) throw ValidationError("connections per pair must be >= 1");
  for (std::size_t i = 0; i < weights_.size(); ++i) xi_[i] = weights_[i] > 0.0 ? xi : 0;
}

void TrafficMatrix::set_connections(NodeId src, NodeId dst, int xi) {
  if (src >= n_ || dst >= n_) throw ValidationError("matrix entry references unknown node");
  if (xi < 0) throw ValidationError("connection count must be >= 0");
  if (src == dst && xi != 0) throw ValidationError("self traffic is not allowed");
  xi_[src * n_ + dst] = xi;
}

void TrafficMatrix::validate() const {
  bool any = false;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] < 0.0) throw ValidationError("matrix weights must be >= 0");
    if (weights_[i] > 0.0 && xi_[i] > 0) any = true;
  }
  if (!any) throw ValidationError("traffic matrix has no positive weight");
}

TrafficMatrix TrafficMatrix::uniform(std::size_t nodes) {
  TrafficMatrix m(nodes);
  for (std::size_t s = 0; s < nodes; ++s) {
    for (std::size_t d = 0; d < nodes; ++d) {
      if (s != d) m.set_weight(static_cast<NodeId>(s), static_cast<NodeId>(d), 1.0);
    }
  }
  return m;
}

TrafficMatrix parse_matrix(std::istream& in, std::size_t nodes) {
  TrafficMatrix m(nodes);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream line(raw);
    long src = 0, dst = 0;
    double w = 0.0;
    if (!(line >> src)) continue;
    if (!(line >> dst >> w)) {
      throw ParseError("line " + std::to_string(line_no) + ": expected `src dst weight`");
    }
    if (src < 0 || dst < 0 || static_cast<std::size_t>(src) >= nodes ||
        static_cast<std::size_t>(dst) >= nodes) {
      throw ValidationError("line " + std::to_string(line_no) + ": unknown node");
    }
    m.set_weight(static_cast<NodeId>(src), static_cast<NodeId>(dst), w);
  }
  return m;
}

TrafficMatrix load_matrix(const std::filesystem::path& path, std::size_t nodes) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file " + path.string());
  return parse_matrix(in, nodes);
}

std::vector<double> node_capacities(const Topology& t) {
  std::vector<double> mu(t.node_count());
  for (std::size_t n = 0; n < mu.size(); ++n) {
    mu[n] = t.egress_capacity_bps(static_cast<NodeId>(n));
  }
  return mu;
}

ArrivalStream::ArrivalStream(const ConnectionSpec& c)
    : lambda_(c.lambda), mean_bits_(c.mean_burst_bits), rng_(c.seed) {
  if (!(lambda_ > 0.0)) throw ValidationError("connection lambda must be > 0");
  if (!(mean_bits_ > 0.0)) throw ValidationError("mean burst size must be > 0");
}

double ArrivalStream::unit_open() {
  // 53 random mantissa bits mapped onto (0, 1]; avoids log(0).
  return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
}

Arrival ArrivalStream::next() {
  Arrival a;
  a.interarrival_s = -std::log(unit_open()) / lambda_;
  a.size_bits = std::max(1.0, -std::log(unit_open()) * mean_bits_);
  return a;
}

std::uint64_t connection_seed(std::uint64_t master, NodeId src, NodeId dst, int k) {
  auto mix = [](std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  };
  std::uint64_t h = mix(master);
  h = mix(h ^ src);
  h = mix(h ^ (static_cast<std::uint64_t>(dst) << 16));
  return mix(h ^ (static_cast<std::uint64_t>(k) << 32));
}

double offered_load(std::span<const ConnectionSpec> connections,
                    std::span<const double> capacity_bps) {
  double load = 0.0;
  for (const auto& c : connections) {
    if (c.src >= capacity_bps.size() || !(capacity_bps[c.src] > 0.0)) {
      throw ValidationError("capacity of node " + std::to_string(c.src) + " must be > 0");
    }
    load += c.lambda * c.mean_burst_bits / capacity_bps[c.src];
  }
  return load;
}

std::vector<ConnectionSpec> scale_to_load(const TrafficMatrix& m, const LoadSpec& target,
                                          double mean_burst_bits, std::uint64_t master_seed) {
  m.validate();
  if (!(target.target_load > 0.0)) throw ValidationError("target load must be > 0");
  if (!(mean_burst_bits > 0.0)) throw ValidationError("mean burst size must be > 0");
  if (target.capacity_bps.size() != m.size()) {
    throw ValidationError("capacity vector does not match matrix size");
  }

  std::vector<ConnectionSpec> out;
  for (std::size_t s = 0; s < m.size(); ++s) {
    for (std::size_t d = 0; d < m.size(); ++d) {
      auto src = static_cast<NodeId>(s);
      auto dst = static_cast<NodeId>(d);
      int xi = m.connections(src, dst);
      double w = m.weight(src, dst);
      if (xi == 0 || w <= 0.0) continue;
      for (int k = 0; k < xi; ++k) {
        ConnectionSpec c;
        c.src = src;
        c.dst = dst;
        c.index = k;
        c.lambda = w / xi;
        c.mean_burst_bits = mean_burst_bits;
        c.seed = connection_seed(master_seed, src, dst, k);
        out.push_back(c);
      }
    }
  }
  double raw = offered_load(out, target.capacity_bps);
  double scale = target.target_load / raw;
  for (auto& c : out) c.lambda *= scale;
  return out;
}

}  // namespace obsgprm
