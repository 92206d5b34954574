// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "obsgprm/topology.hpp"

namespace obsgprm {

inline constexpr double kDefaultMeanBurstBits = 400e3 * 8;  // 400 KB

// Relative demand between node pairs and the number of connections that
// carry it. Missing pairs have weight 0; the diagonal is always 0.
class TrafficMatrix {
 public:
  explicit TrafficMatrix(std::size_t nodes);

  std::size_t size() const { return n_; }
  double weight(NodeId src, NodeId dst) const { return weights_.at(src * n_ + dst); }
  int connections(NodeId src, NodeId dst) const { return xi_.at(src * n_ + dst); }

  void set_weight(NodeId src, NodeId dst, double w);
  // Sets xi for every pair with positive weight (zero-weight pairs keep 0).
  void set_connections_per_pair(int xi);
  void set_connections(NodeId src, NodeId dst, int xi);

  // Throws ValidationError on negative weights or an all-zero matrix.
  void validate() const;

  static TrafficMatrix uniform(std::size_t nodes);

 private:
  std::size_t n_;
  std::vector<double> weights_;
  std::vector<int> xi_;
};

// Lines `src dst weight`, '#' comments. Every id must be < nodes.
TrafficMatrix parse_matrix(std::istream& in, std::size_t nodes);
TrafficMatrix load_matrix(const std::filesystem::path& path, std::size_t nodes);

struct ConnectionSpec {
  NodeId src = 0;
  NodeId dst = 0;
  int index = 0;  // k-th connection between src and dst
  double lambda = 1.0;  // bursts per second
  double mean_burst_bits = kDefaultMeanBurstBits;
  std::uint64_t seed = 0;
};

struct LoadSpec {
  double target_load = 0.1;
  std::vector<double> capacity_bps;  // mu_i per node
};

// Egress data capacity per node, the mu_i used in the load formula.
std::vector<double> node_capacities(const Topology& t);

struct Arrival {
  double interarrival_s = 0.0;
  double size_bits = 0.0;
};

// Poisson arrivals and exponentially distributed sizes for one connection,
// reproducible from the connection seed alone.
class ArrivalStream {
 public:
  explicit ArrivalStream(const ConnectionSpec& c);

  Arrival next();

 private:
  double unit_open();  // uniform on (0, 1]

  double lambda_;
  double mean_bits_;
  std::mt19937_64 rng_;
};

inline Arrival next_arrival(ArrivalStream& stream) { return stream.next(); }

// Seed of the stream for connection (src, dst, k); depends on nothing else,
// so adding connections never perturbs existing streams.
std::uint64_t connection_seed(std::uint64_t master, NodeId src, NodeId dst, int k);

// Sum over connections of lambda * L / mu_src.
double offered_load(std::span<const ConnectionSpec> connections,
                    std::span<const double> capacity_bps);

// Lambdas proportional to matrix weight (split evenly across a pair's
// connections), scaled so that offered_load hits target.target_load.
std::vector<ConnectionSpec> scale_to_load(const TrafficMatrix& m, const LoadSpec& target,
                                          double mean_burst_bits, std::uint64_t master_seed);

}  // namespace obsgprm
