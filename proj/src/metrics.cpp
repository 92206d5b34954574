// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "obsgprm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "obsgprm/error.hpp"

namespace obsgprm {

std::string_view to_string(DropCause c) {
  switch (c) {
    case DropCause::Contention: return "contention";
    case DropCause::Offset: return "offset";
    case DropCause::NoRoute: return "noroute";
    case DropCause::Ingress: return "ingress";
  }
  return "?";
}

std::uint64_t RunCounters::dropped() const {
  return std::accumulate(dropped_by_cause.begin(), dropped_by_cause.end(), std::uint64_t{0});
}

double RunCounters::busy_total_s() const {
  return std::accumulate(busy_s.begin(), busy_s.end(), 0.0);
}

TimeSeries::TimeSeries(double bucket_width_s) : width_(bucket_width_s) {
  if (!(width_ > 0.0)) throw ValidationError("bucket width must be > 0");
}

std::size_t TimeSeries::bucket_of(double t) {
  auto b = static_cast<std::size_t>(std::max(0.0, std::floor(t / width_)));
  if (b >= sent_.size()) {
    sent_.resize(b + 1, 0);
    dropped_.resize(b + 1, 0);
  }
  return b;
}

void TimeSeries::add_sent(double t) { ++sent_[bucket_of(t)]; }
void TimeSeries::add_dropped(double created_at) { ++dropped_[bucket_of(created_at)]; }

double TimeSeries::rolling_blr(std::size_t bucket, std::size_t window) const {
  std::uint64_t s = 0, d = 0;
  std::size_t first = bucket + 1 >= window ? bucket + 1 - window : 0;
  for (std::size_t b = first; b <= bucket && b < sent_.size(); ++b) {
    s += sent_[b];
    d += dropped_[b];
  }
  return s == 0 ? 0.0 : static_cast<double>(d) / static_cast<double>(s);
}

std::uint64_t TimeSeries::total_sent() const {
  return std::accumulate(sent_.begin(), sent_.end(), std::uint64_t{0});
}

std::uint64_t TimeSeries::total_dropped() const {
  return std::accumulate(dropped_.begin(), dropped_.end(), std::uint64_t{0});
}

double blr(const RunCounters& c) {
  if (c.sent == 0) throw UndefinedMetricError("BLR undefined: no bursts sent");
  return static_cast<double>(c.dropped()) / static_cast<double>(c.sent);
}

double mean_e2e_delay(const RunCounters& c) {
  if (c.delivered == 0) throw UndefinedMetricError("delay undefined: no bursts delivered");
  return c.delay_sum_s / static_cast<double>(c.delivered);
}

double utilization(const RunCounters& c, const Topology& t, double elapsed_s) {
  if (!(elapsed_s > 0.0)) throw ValidationError("elapsed time must be > 0");
  double u = c.busy_total_s() / (elapsed_s * t.total_data_channels());
  return std::clamp(u, 0.0, 1.0);
}

namespace {

GainReport gain(std::span<const double> baseline, std::span<const double> candidate,
                double sign) {
  if (baseline.size() != candidate.size()) {
    throw ValidationError("gain inputs differ in length");
  }
  GainReport r;
  for (std::size_t i = 0; i < baseline.size(); ++i) {
    if (!(baseline[i] > 0.0)) {
      throw UndefinedMetricError("gain undefined: baseline point " + std::to_string(i) +
                                 " is zero");
    }
    r.per_point.push_back(sign * (baseline[i] - candidate[i]) / baseline[i]);
  }
  r.sum = std::accumulate(r.per_point.begin(), r.per_point.end(), 0.0);
  r.mean = r.per_point.empty() ? 0.0 : r.sum / static_cast<double>(r.per_point.size());
  return r;
}

}  // namespace

GainReport blr_gain(std::span<const double> sp_blrs, std::span<const double> gprm_blrs) {
  return gain(sp_blrs, gprm_blrs, 1.0);
}

GainReport u_gain(std::span<const double> sp_us, std::span<const double> gprm_us) {
  return gain(sp_us, gprm_us, -1.0);
}

}  // namespace obsgprm
