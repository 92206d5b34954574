// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <string_view>

#include "obsgprm/topology.hpp"

namespace obsgprm {

enum class BlrClass : std::uint8_t { Low = 0, Medium = 1, High = 2 };

std::string_view to_string(BlrClass b);

inline constexpr int kOffsetStates = 16;  // offset classes 0..15
inline constexpr int kBlrStates = 3;
inline constexpr int kHopStates = 16;  // hop-count classes 0..15

// The four observed variables conditioning every decision node:
// offset class, local BLR class, hop-count class and destination.
struct EvidenceVector {
  std::uint8_t offset = 0;
  BlrClass blr = BlrClass::Low;
  std::uint8_t hops = 0;
  NodeId dest = 0;

  auto operator<=>(const EvidenceVector&) const = default;

  // Dense packing, unique for every valid vector.
  std::uint32_t key() const {
    return static_cast<std::uint32_t>(offset) | (static_cast<std::uint32_t>(blr) << 4) |
           (static_cast<std::uint32_t>(hops) << 6) | (static_cast<std::uint32_t>(dest) << 10);
  }
  static EvidenceVector from_key(std::uint32_t key) {
    return {static_cast<std::uint8_t>(key & 0xF), static_cast<BlrClass>((key >> 4) & 0x3),
            static_cast<std::uint8_t>((key >> 6) & 0xF), static_cast<NodeId>(key >> 10)};
  }
};

// Number of states of each evidence variable (gamma, delta, eta, theta).
struct StateCounts {
  int offset = kOffsetStates;
  int blr = kBlrStates;
  int hops = kHopStates;
  int dest = 1;
};

bool is_valid(const EvidenceVector& e, const StateCounts& s);

struct BlrClassifier {
  double low_threshold = 0.01;
  double high_threshold = 0.05;
  double window_s = 0.1;

  // Throws ValidationError unless 0 < low < high < 1 and window > 0.
  void validate() const;
};

// Half-open bands: [0, low) Low, [low, high) Medium, [high, 1] High.
BlrClass classify_blr(const BlrClassifier& c, double observed_blr);

// Builds the evidence a node observes for a header bound to `dest`.
// The offset class counts how many more per-hop processing delays the
// remaining offset can absorb; both counting classes clamp to 15.
EvidenceVector extract_evidence(NodeId node, NodeId dest, double remaining_offset_s,
                                double local_blr, const HopTable& hops, const BlrClassifier& c,
                                double per_hop_processing_s);

int offset_class(double remaining_offset_s, double per_hop_processing_s);

}  // namespace obsgprm
