// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "obsgprm/topology.hpp"

namespace obsgprm {

enum class ReserveResult { Reserved, Conflict };

// Reserved half-open intervals [start, end) per (link, wavelength). Intervals
// on one channel never overlap; the only way in is try_reserve.
class ChannelSchedule {
 public:
  explicit ChannelSchedule(const Topology& t);
  // Single-link schedule with `wavelengths` channels, handy for tests.
  ChannelSchedule(std::size_t links, int wavelengths);

  ReserveResult try_reserve(LinkIndex link, int wavelength, double start, double duration);
  bool is_free(LinkIndex link, int wavelength, double start, double duration) const;
  // Lowest wavelength index free for the whole interval.
  std::optional<int> first_fit(LinkIndex link, double start, double duration) const;
  // Removes the reservation that starts exactly at `start`; false if absent.
  bool release(LinkIndex link, int wavelength, double start);
  // Forgets every interval that ended at or before `t`.
  void prune(double t);

  int wavelengths(LinkIndex link) const { return static_cast<int>(channels_.at(link).size()); }
  std::vector<std::pair<double, double>> intervals(LinkIndex link, int wavelength) const;
  std::size_t reservation_count() const;

 private:
  using Channel = std::map<double, double>;  // start -> end
  Channel& channel(LinkIndex link, int wavelength);
  const Channel& channel(LinkIndex link, int wavelength) const;

  std::vector<std::vector<Channel>> channels_;
};

}  // namespace obsgprm
