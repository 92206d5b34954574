// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "obsgprm/schedule.hpp"

#include <string>

#include "obsgprm/error.hpp"

namespace obsgprm {

namespace {

bool overlaps_any(const std::map<double, double>& ch, double start, double end) {
  auto next = ch.lower_bound(start);
  if (next != ch.end() && next->first < end) return true;
  if (next != ch.begin()) {
    auto prev = std::prev(next);
    if (prev->second > start) return true;
  }
  return false;
}

}  // namespace

ChannelSchedule::ChannelSchedule(const Topology& t) {
  channels_.reserve(t.link_count());
  for (const Link& l : t.links()) channels_.emplace_back(l.data_channels);
}

ChannelSchedule::ChannelSchedule(std::size_t links, int wavelengths)
    : channels_(links, std::vector<Channel>(wavelengths)) {}

ChannelSchedule::Channel& ChannelSchedule::channel(LinkIndex link, int wavelength) {
  auto& link_channels = channels_.at(link);
  if (wavelength < 0 || static_cast<std::size_t>(wavelength) >= link_channels.size()) {
    throw ValidationError("wavelength " + std::to_string(wavelength) + " out of range");
  }
  return link_channels[wavelength];
}

const ChannelSchedule::Channel& ChannelSchedule::channel(LinkIndex link, int wavelength) const {
  return const_cast<ChannelSchedule*>(this)->channel(link, wavelength);
}

ReserveResult ChannelSchedule::try_reserve(LinkIndex link, int wavelength, double start,
                                           double duration) {
  if (!(duration > 0.0)) throw ValidationError("reservation duration must be > 0");
  Channel& ch = channel(link, wavelength);
  const double end = start + duration;
  if (overlaps_any(ch, start, end)) return ReserveResult::Conflict;
  ch.emplace_hint(ch.lower_bound(start), start, end);
  return ReserveResult::Reserved;
}

bool ChannelSchedule::is_free(LinkIndex link, int wavelength, double start,
                              double duration) const {
  return !overlaps_any(channel(link, wavelength), start, start + duration);
}

std::optional<int> ChannelSchedule::first_fit(LinkIndex link, double start,
                                              double duration) const {
  const auto& link_channels = channels_.at(link);
  for (std::size_t w = 0; w < link_channels.size(); ++w) {
    if (!overlaps_any(link_channels[w], start, start + duration)) return static_cast<int>(w);
  }
  return std::nullopt;
}

bool ChannelSchedule::release(LinkIndex link, int wavelength, double start) {
  return channel(link, wavelength).erase(start) > 0;
}

void ChannelSchedule::prune(double t) {
  for (auto& link_channels : channels_) {
    for (auto& ch : link_channels) {
      // Intervals are disjoint and sorted, so ends are sorted too.
      auto it = ch.begin();
      while (it != ch.end() && it->second <= t) it = ch.erase(it);
    }
  }
}

std::vector<std::pair<double, double>> ChannelSchedule::intervals(LinkIndex link,
                                                                  int wavelength) const {
  const Channel& ch = channel(link, wavelength);
  return {ch.begin(), ch.end()};
}

std::size_t ChannelSchedule::reservation_count() const {
  std::size_t total = 0;
  for (auto& link_channels : channels_) {
    for (auto& ch : link_channels) total += ch.size();
  }
  return total;
}

}  // namespace obsgprm
