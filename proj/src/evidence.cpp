// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "obsgprm/evidence.hpp"

#include <algorithm>
#include <cmath>

#include "obsgprm/error.hpp"

namespace obsgprm {

std::string_view to_string(BlrClass b) {
  switch (b) {
    case BlrClass::Low: return "low";
    case BlrClass::Medium: return "medium";
    case BlrClass::High: return "high";
  }
  return "?";
}

bool is_valid(const EvidenceVector& e, const StateCounts& s) {
  return e.offset < s.offset && static_cast<int>(e.blr) < s.blr && e.hops < s.hops &&
         e.dest < s.dest;
}

void BlrClassifier::validate() const {
  if (!(low_threshold > 0.0 && low_threshold < high_threshold && high_threshold < 1.0)) {
    throw ValidationError("blr thresholds must satisfy 0 < low < high < 1");
  }
  if (!(window_s > 0.0)) throw ValidationError("blr window must be > 0");
}

BlrClass classify_blr(const BlrClassifier& c, double observed_blr) {
  if (observed_blr < c.low_threshold) return BlrClass::Low;
  if (observed_blr < c.high_threshold) return BlrClass::Medium;
  return BlrClass::High;
}

int offset_class(double remaining_offset_s, double per_hop_processing_s) {
  if (!(remaining_offset_s > 0.0)) return 0;
  // Offsets are sums and differences of per-hop multiples; absorb rounding
  // so that 3 * p / p lands in class 3 rather than 2.
  double units = remaining_offset_s / per_hop_processing_s;
  double cls = std::floor(units + 1e-9 * std::max(1.0, units));
  return static_cast<int>(std::min<double>(kOffsetStates - 1, cls));
}

EvidenceVector extract_evidence(NodeId node, NodeId dest, double remaining_offset_s,
                                double local_blr, const HopTable& hops, const BlrClassifier& c,
                                double per_hop_processing_s) {
  EvidenceVector e;
  e.offset = static_cast<std::uint8_t>(offset_class(remaining_offset_s, per_hop_processing_s));
  e.blr = classify_blr(c, local_blr);
  e.hops = static_cast<std::uint8_t>(std::min(kHopStates - 1, hops(node, dest)));
  e.dest = dest;
  return e;
}

}  // namespace obsgprm
