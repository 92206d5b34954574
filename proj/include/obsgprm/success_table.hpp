// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "obsgprm/evidence.hpp"
#include "obsgprm/topology.hpp"

namespace obsgprm {

// State of a two-state decision node DNH_k.
enum class Outcome : std::uint8_t { Success = 0, Failure = 1 };

struct UpdateParams {
  double alpha = 0.9;
  double initial_sp = 0.5;
  // Estimate never-observed (k, e) pairs from the per-neighbor naive-Bayes
  // product when the table has no warm-start prior for them.
  bool naive_bayes_fallback = true;

  void validate() const;
};

// Per-node store of P(DNH_k = Success | o, b, nb, d) for every neighbor k,
// plus the per-outcome evidence counts behind the naive-Bayes estimator.
class SuccessTable {
 public:
  SuccessTable(NodeId owner, std::vector<NodeId> neighbors, std::size_t node_count,
               UpdateParams params = {});

  NodeId owner() const { return owner_; }
  std::span<const NodeId> neighbors() const { return neighbors_; }
  std::size_t node_count() const { return node_count_; }
  const UpdateParams& params() const { return params_; }

  // Installs SP(k, e) = 1 / (1 + extra hops via k) as the value of every
  // unobserved pair, so that the minimum-hop neighbors start preferred.
  void warm_start(const HopTable& hops);
  bool warm() const { return !warm_prior_.empty(); }

  // Stored SP if (k, e) has been updated, otherwise the fallback estimate:
  // warm prior, else naive-Bayes posterior once k has outcomes, else initial_sp.
  double sp(NodeId k, const EvidenceVector& e) const;
  std::optional<double> stored(NodeId k, const EvidenceVector& e) const;

  // SP' = alpha * SP + (1 - alpha) * A, A = 1 on Success and 0 on Failure.
  double update(NodeId k, const EvidenceVector& e, Outcome outcome);

  // Replaces the stored value without touching the outcome counts.
  void set(NodeId k, const EvidenceVector& e, double sp);

  // argmax over phi of P(phi) P(o|phi) P(b|phi) P(nb|phi) P(d|phi) with
  // add-one smoothing on every factor; ties resolve to Success.
  std::pair<Outcome, double> naive_bayes_map(NodeId k, const EvidenceVector& e) const;
  // The same product normalized over both outcomes.
  double naive_bayes_posterior(NodeId k, const EvidenceVector& e) const;

  std::uint64_t observations(NodeId k) const;
  std::size_t stored_entries() const { return entries_.size(); }

  // Flat text dump, one `k o b nb d sp` line per stored entry, sorted.
  void dump(std::ostream& out) const;
  void restore(std::istream& in);

 private:
  struct Counts {
    std::array<std::uint64_t, 2> outcomes{};
    std::array<std::array<std::uint64_t, kOffsetStates>, 2> offset{};
    std::array<std::array<std::uint64_t, kBlrStates>, 2> blr{};
    std::array<std::array<std::uint64_t, kHopStates>, 2> hops{};
    std::array<std::vector<std::uint64_t>, 2> dest;
  };

  std::size_t index_of(NodeId k) const;
  static std::uint64_t entry_key(std::size_t idx, const EvidenceVector& e) {
    return (static_cast<std::uint64_t>(idx) << 32) | e.key();
  }
  double fallback(std::size_t idx, const EvidenceVector& e) const;
  std::array<double, 2> naive_bayes_scores(std::size_t idx, const EvidenceVector& e) const;
  void check_evidence(const EvidenceVector& e) const;

  NodeId owner_;
  std::vector<NodeId> neighbors_;
  std::vector<std::int32_t> slot_;  // node id -> neighbor index or -1
  std::size_t node_count_;
  UpdateParams params_;
  std::unordered_map<std::uint64_t, double> entries_;
  std::vector<Counts> counts_;
  std::vector<double> warm_prior_;  // neighbor index * N + dest
};

}  // namespace obsgprm
