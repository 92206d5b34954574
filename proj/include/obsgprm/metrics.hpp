// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "obsgprm/topology.hpp"

namespace obsgprm {

enum class DropCause : std::uint8_t { Contention = 0, Offset = 1, NoRoute = 2, Ingress = 3 };
inline constexpr std::size_t kDropCauses = 4;
std::string_view to_string(DropCause c);

struct RunCounters {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::array<std::uint64_t, kDropCauses> dropped_by_cause{};
  double delay_sum_s = 0.0;
  // Occupancy per data channel, indexed by channel_offset(link) + wavelength.
  std::vector<double> busy_s;

  std::uint64_t dropped() const;
  std::uint64_t dropped(DropCause c) const { return dropped_by_cause[static_cast<int>(c)]; }
  double busy_total_s() const;
};

// Sent and dropped counts per fixed-width bucket of burst creation time.
class TimeSeries {
 public:
  explicit TimeSeries(double bucket_width_s);

  double bucket_width() const { return width_; }
  std::size_t size() const { return sent_.size(); }
  std::uint64_t sent(std::size_t bucket) const { return sent_.at(bucket); }
  std::uint64_t dropped(std::size_t bucket) const { return dropped_.at(bucket); }

  void add_sent(double t);
  void add_dropped(double created_at);
  // Dropped / sent over the `window` buckets ending at `bucket`; 0 if none sent.
  double rolling_blr(std::size_t bucket, std::size_t window) const;

  std::uint64_t total_sent() const;
  std::uint64_t total_dropped() const;

 private:
  std::size_t bucket_of(double t);

  double width_;
  std::vector<std::uint64_t> sent_;
  std::vector<std::uint64_t> dropped_;
};

double blr(const RunCounters& c);
double mean_e2e_delay(const RunCounters& c);
// Busy time over (elapsed * total data channels).
double utilization(const RunCounters& c, const Topology& t, double elapsed_s);

struct GainReport {
  std::vector<double> per_point;
  double sum = 0.0;
  double mean = 0.0;
};

// Sum over points of (baseline - candidate) / baseline.
GainReport blr_gain(std::span<const double> sp_blrs, std::span<const double> gprm_blrs);
// Sum over points of (candidate - baseline) / baseline.
GainReport u_gain(std::span<const double> sp_us, std::span<const double> gprm_us);

}  // namespace obsgprm
