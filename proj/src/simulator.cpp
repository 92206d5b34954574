// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "obsgprm/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "obsgprm/error.hpp"

namespace obsgprm {

namespace {

constexpr double kTimeEps = 1e-12;
constexpr double kPruneInterval = 0.05;
constexpr double kForever = std::numeric_limits<double>::infinity();

}  // namespace

std::string_view to_string(Policy p) {
  return p == Policy::Gprm ? "gprm" : "sp";
}

std::string_view to_string(InitialMode m) {
  return m == InitialMode::Warm ? "warm" : "cold";
}

std::string_view to_string(UtilMode m) {
  return m == UtilMode::Delivered ? "delivered" : "all";
}

void SimConfig::validate() const {
  if (!(duration_s > 0.0)) throw ValidationError("duration must be > 0");
  if (!(warmup_s >= 0.0 && warmup_s < duration_s)) {
    throw ValidationError("warmup must be < duration");
  }
  if (!(per_hop_processing_s > 0.0)) throw ValidationError("per_hop_processing must be > 0");
  if (!(offset_guard_s >= 0.0)) throw ValidationError("offset guard must be >= 0");
  if (!(refresh_period_s > 0.0)) throw ValidationError("refresh period must be > 0");
  if (!(bucket_width_s > 0.0)) throw ValidationError("bucket width must be > 0");
  update.validate();
  blr.validate();
}

std::optional<double> MetricsReport::steady_blr() const {
  if (steady.sent == 0) return std::nullopt;
  return blr(steady);
}

std::optional<double> MetricsReport::steady_delay() const {
  if (steady.delivered == 0) return std::nullopt;
  return mean_e2e_delay(steady);
}

double MetricsReport::steady_utilization(const Topology& t) const {
  return utilization(steady, t, steady_elapsed_s);
}

Simulator::Simulator(const Topology& topology, std::vector<ConnectionSpec> connections,
                     SimConfig config)
    : topology_(topology),
      connections_(std::move(connections)),
      config_(config),
      hops_(topology),
      sp_router_(topology),
      schedule_(topology) {
  config_.validate();
  states_.dest = static_cast<int>(topology_.node_count());

  link_delay_.reserve(topology_.link_count());
  channel_offset_.reserve(topology_.link_count());
  std::size_t offset = 0;
  for (const Link& l : topology_.links()) {
    link_delay_.push_back(propagation_delay(l, topology_.signal_speed()));
    channel_offset_.push_back(offset);
    offset += static_cast<std::size_t>(l.data_channels);
  }

  streams_.reserve(connections_.size());
  for (const auto& c : connections_) {
    if (c.src >= topology_.node_count() || c.dst >= topology_.node_count() || c.src == c.dst) {
      throw ValidationError("connection " + std::to_string(c.src) + "->" +
                            std::to_string(c.dst) + " is invalid");
    }
    streams_.emplace_back(c);
  }

  if (config_.policy == Policy::Gprm) {
    agents_.reserve(topology_.node_count());
    for (std::size_t n = 0; n < topology_.node_count(); ++n) {
      auto nb = topology_.neighbors(static_cast<NodeId>(n));
      SuccessTable table(static_cast<NodeId>(n), {nb.begin(), nb.end()},
                         topology_.node_count(), config_.update);
      if (config_.initial == InitialMode::Warm) table.warm_start(hops_);
      agents_.push_back(Agent{std::move(table), std::nullopt, {}, {}});
    }
  }
}

Simulator::~Simulator() = default;

const SuccessTable& Simulator::success_table(NodeId n) const {
  if (agents_.empty()) throw ValidationError("success tables exist only for GPRM runs");
  return agents_.at(n).table;
}

void Simulator::restore_success_table(NodeId n, std::istream& in) {
  if (agents_.empty()) throw ValidationError("success tables exist only for GPRM runs");
  agents_.at(n).table.restore(in);
}

std::string_view Simulator::kind_name(EventKind k) {
  switch (k) {
    case EventKind::BurstArrival: return "burst_arrival";
    case EventKind::BhpArrive: return "bhp_arrive";
    case EventKind::BurstArrive: return "burst_arrive";
    case EventKind::NotificationArrive: return "notification";
    case EventKind::TableRefresh: return "table_refresh";
    case EventKind::StatsTick: return "stats_tick";
  }
  return "?";
}

void Simulator::schedule(double time, EventKind kind, NodeId node, std::uint32_t aux,
                         std::uint64_t burst) {
  queue_.push(Event{time, next_seq_++, kind, node, aux, burst});
}

void Simulator::trace(const Event& e, std::string_view detail) const {
  if (trace_ == nullptr) return;
  *trace_ << std::fixed << std::setprecision(9) << e.time << " " << kind_name(e.kind) << " "
          << e.node << " " << e.burst << " " << detail << "\n";
}

MetricsReport Simulator::run() {
  if (ran_) throw ValidationError("a Simulator runs once");
  ran_ = true;

  report_ = MetricsReport{};
  report_.policy = config_.policy;
  report_.learning = TimeSeries(config_.bucket_width_s);
  const std::size_t channels = static_cast<std::size_t>(topology_.total_data_channels());
  report_.total.busy_s.assign(channels, 0.0);
  report_.steady.busy_s.assign(channels, 0.0);
  report_.steady_elapsed_s = config_.duration_s - config_.warmup_s;

  pending_size_.assign(connections_.size(), 0.0);
  for (std::size_t i = 0; i < connections_.size(); ++i) {
    Arrival a = streams_[i].next();
    pending_size_[i] = a.size_bits;
    if (a.interarrival_s < config_.duration_s) {
      schedule(a.interarrival_s, EventKind::BurstArrival, connections_[i].src,
               static_cast<std::uint32_t>(i), 0);
    }
  }
  if (config_.policy == Policy::Gprm) {
    on_table_refresh(Event{0.0, 0, EventKind::TableRefresh, 0, 0, 0});
  }
  schedule(kPruneInterval, EventKind::StatsTick, 0, 0, 0);

  while (!queue_.empty()) {
    Event e = queue_.top();
    queue_.pop();
    ++report_.events_processed;
    switch (e.kind) {
      case EventKind::BurstArrival: on_burst_arrival(e); break;
      case EventKind::BhpArrive: on_bhp_arrive(e); break;
      case EventKind::BurstArrive: on_burst_arrive(e); break;
      case EventKind::NotificationArrive: on_notification(e); break;
      case EventKind::TableRefresh: on_table_refresh(e); break;
      case EventKind::StatsTick: on_stats_tick(e); break;
    }
  }

  const RunCounters& t = report_.total;
  report_.in_flight_after_drain = t.sent - t.delivered - t.dropped();
  report_.unretired_records = bursts_.size();
  return report_;
}

std::optional<NodeId> Simulator::choose_next(NodeId node, Burst& b, double now,
                                             EvidenceVector& evidence) {
  evidence = EvidenceVector{};
  evidence.dest = b.dest;
  if (config_.policy == Policy::ShortestPath) return sp_router_.next_hop(node, b.dest);

  evidence = extract_evidence(node, b.dest, b.remaining_offset, local_blr(node, now), hops_,
                              config_.blr, config_.per_hop_processing_s);
  std::vector<NodeId> visited;
  visited.reserve(b.path.size() + 1);
  for (const Hop& h : b.path) visited.push_back(h.node);
  visited.push_back(node);
  return agents_[node].routes->lookup(evidence, visited);
}

bool Simulator::offset_sufficient(double remaining_after, NodeId next, NodeId dest) const {
  // The destination only receives, so it needs no configuration time.
  double required = next == dest ? 0.0 : config_.per_hop_processing_s;
  return remaining_after + kTimeEps >= required;
}

void Simulator::forward_header(Burst& b, NodeId node, NodeId next, double now) {
  b.remaining_offset -= config_.per_hop_processing_s;
  LinkIndex link = topology_.link_between(node, next);
  schedule(now + config_.per_hop_processing_s + link_delay_[link], EventKind::BhpArrive, next, 0,
           b.id);
}

void Simulator::on_burst_arrival(const Event& arrival) {
  const std::size_t ci = arrival.aux;
  const ConnectionSpec& conn = connections_[ci];
  const double now = arrival.time;

  Burst b;
  b.id = next_burst_++;
  Event e = arrival;  // traced under the new burst's id
  e.burst = b.id;
  b.source = conn.src;
  b.dest = conn.dst;
  b.size_bits = pending_size_[ci];
  b.created_at = now;

  Arrival a = streams_[ci].next();
  pending_size_[ci] = a.size_bits;
  if (now + a.interarrival_s < config_.duration_s) {
    schedule(now + a.interarrival_s, EventKind::BurstArrival, conn.src,
             static_cast<std::uint32_t>(ci), 0);
  }

  ++report_.total.sent;
  if (now >= config_.warmup_s) ++report_.steady.sent;
  report_.learning.add_sent(now);

  auto [it, _] = bursts_.emplace(b.id, std::move(b));
  Burst& burst = it->second;
  if (observer_.on_created) observer_.on_created(make_record(burst));

  const double offset =
      hops_(burst.source, burst.dest) * config_.per_hop_processing_s + config_.offset_guard_s;
  burst.remaining_offset = offset;
  if (!agents_.empty()) agents_[burst.source].attempts.push_back(now);

  EvidenceVector ev;
  auto next = choose_next(burst.source, burst, now, ev);
  if (!next) {
    trace(e, "drop noroute");
    drop(burst, burst.source, DropCause::NoRoute, now, false);
    return;
  }
  const LinkIndex link = topology_.link_between(burst.source, *next);
  const double start = now + offset;
  const double duration = burst.size_bits / topology_.link(link).channel_rate_bps;
  burst.path.push_back(Hop{burst.source, *next, ev, link, start, start + duration, now, false,
                           false, 0.0});

  if (!offset_sufficient(offset - config_.per_hop_processing_s, *next, burst.dest)) {
    trace(e, "drop offset");
    drop(burst, burst.source, DropCause::Offset, now, true);
    return;
  }
  auto wl = schedule_.first_fit(link, start, duration);
  if (!wl) {
    trace(e, "drop ingress");
    drop(burst, burst.source, DropCause::Ingress, now, true);
    return;
  }
  burst.wavelength = *wl;
  schedule_.try_reserve(link, *wl, start, duration);
  burst.path.back().reserved = true;
  if (trace_) {
    trace(e, "dest=" + std::to_string(burst.dest) + " next=" + std::to_string(*next) +
                 " wl=" + std::to_string(*wl));
  }
  forward_header(burst, burst.source, *next, now);
  schedule(start, EventKind::BurstArrive, burst.source, 0, burst.id);
}

void Simulator::on_bhp_arrive(const Event& e) {
  Burst& b = bursts_.at(e.burst);
  const NodeId node = e.node;
  const double now = e.time;

  if (node == b.dest) {
    b.header_done = true;
    b.terminal_node = node;
    b.notification = NotificationType::Ack;
    trace(e, "ack");
    const Hop& last = b.path.back();
    LinkIndex back = topology_.link_between(node, last.node);
    schedule(now + config_.per_hop_processing_s + link_delay_[back],
             EventKind::NotificationArrive, last.node,
             static_cast<std::uint32_t>(b.path.size() - 1), b.id);
    return;
  }

  if (!agents_.empty()) agents_[node].attempts.push_back(now);
  const double remaining = b.remaining_offset;
  EvidenceVector ev;
  auto next = choose_next(node, b, now, ev);
  if (!next) {
    trace(e, "drop noroute");
    drop(b, node, DropCause::NoRoute, now, false);
    return;
  }
  const LinkIndex link = topology_.link_between(node, *next);
  const double start = now + remaining;
  const double duration = b.size_bits / topology_.link(link).channel_rate_bps;
  b.path.push_back(Hop{node, *next, ev, link, start, start + duration, now, false, false, 0.0});

  if (!offset_sufficient(remaining - config_.per_hop_processing_s, *next, b.dest)) {
    trace(e, "drop offset");
    drop(b, node, DropCause::Offset, now, true);
    return;
  }
  if (schedule_.try_reserve(link, b.wavelength, start, duration) == ReserveResult::Conflict) {
    trace(e, "drop contention");
    drop(b, node, DropCause::Contention, now, true);
    return;
  }
  b.path.back().reserved = true;
  if (trace_) trace(e, "next=" + std::to_string(*next) + " wl=" + std::to_string(b.wavelength));
  forward_header(b, node, *next, now);
}

void Simulator::on_burst_arrive(const Event& e) {
  Burst& b = bursts_.at(e.burst);
  const NodeId node = e.node;

  auto hop = std::find_if(b.path.begin(), b.path.end(),
                          [node](const Hop& h) { return h.node == node; });
  const bool header_seen = hop != b.path.end() || (b.header_done && b.terminal_node == node);
  if (!header_seen) {
    ++report_.causality_violations;
  } else if (hop != b.path.end() && node != b.source &&
             e.time + kTimeEps < hop->header_at + config_.per_hop_processing_s) {
    ++report_.causality_violations;
  }

  if (node == b.dest) {
    const Hop& last = b.path.back();
    b.delivered = true;
    b.delivered_at = e.time + (last.end - last.start);
    account_delivery(b);
    b.burst_done = true;
    trace(e, "delivered");
    maybe_retire(b.id);
    return;
  }
  if (hop != b.path.end() && hop->reserved && !hop->released) {
    trace(e, "pass");
    schedule(hop->start + link_delay_[hop->link], EventKind::BurstArrive, hop->next, 0, b.id);
    return;
  }
  trace(e, "discard");
  b.burst_done = true;
  maybe_retire(b.id);
}

void Simulator::account_delivery(Burst& b) {
  const double delay = b.delivered_at - b.created_at;
  ++report_.total.delivered;
  report_.total.delay_sum_s += delay;
  if (b.created_at >= config_.warmup_s) {
    ++report_.steady.delivered;
    report_.steady.delay_sum_s += delay;
  }
}

void Simulator::drop(Burst& b, NodeId at, DropCause cause, double now, bool has_hop) {
  b.drop_cause = cause;
  b.terminal_node = at;
  b.header_done = true;
  b.notification = NotificationType::Nack;

  const auto c = static_cast<std::size_t>(cause);
  ++report_.total.dropped_by_cause[c];
  if (b.created_at >= config_.warmup_s) ++report_.steady.dropped_by_cause[c];
  report_.learning.add_dropped(b.created_at);
  if (!agents_.empty()) agents_[at].failures.push_back(now);

  const bool transmitted = std::any_of(b.path.begin(), b.path.end(),
                                       [](const Hop& h) { return h.reserved; });
  if (!transmitted) b.burst_done = true;

  if (has_hop) {
    apply_notification(b, b.path.size() - 1, now, true);
  } else if (!b.path.empty()) {
    const Hop& last = b.path.back();
    LinkIndex back = topology_.link_between(at, last.node);
    schedule(now + config_.per_hop_processing_s + link_delay_[back],
             EventKind::NotificationArrive, last.node,
             static_cast<std::uint32_t>(b.path.size() - 1), b.id);
  } else {
    b.notification_done = true;
    maybe_retire(b.id);
  }
}

void Simulator::apply_notification(Burst& b, std::size_t position, double now, bool local) {
  Hop& h = b.path[position];
  const bool ack = b.notification == NotificationType::Ack;
  if (!agents_.empty()) {
    Agent& agent = agents_[h.node];
    agent.table.update(h.next, h.evidence, ack ? Outcome::Success : Outcome::Failure);
    if (!ack && !local) agent.failures.push_back(now);
  }
  if (!ack && config_.release_on_nack && h.reserved && !h.released) {
    schedule_.release(h.link, b.wavelength, h.start);
    h.released = true;
    h.released_at = now;
  }

  if (position > 0) {
    const NodeId prev = b.path[position - 1].node;
    LinkIndex back = topology_.link_between(h.node, prev);
    schedule(now + config_.per_hop_processing_s + link_delay_[back],
             EventKind::NotificationArrive, prev, static_cast<std::uint32_t>(position - 1), b.id);
  } else {
    b.notification_done = true;
    maybe_retire(b.id);
  }
}

void Simulator::on_notification(const Event& e) {
  Burst& b = bursts_.at(e.burst);
  trace(e, b.notification == NotificationType::Ack ? "ack" : "nack");
  apply_notification(b, e.aux, e.time, false);
}

void Simulator::on_table_refresh(const Event& e) {
  for (std::size_t n = 0; n < agents_.size(); ++n) {
    auto nb = topology_.neighbors(static_cast<NodeId>(n));
    agents_[n].routes.emplace(
        build_table(agents_[n].table, {nb.begin(), nb.end()}, states_, e.time));
  }
  if (e.time + config_.refresh_period_s < config_.duration_s) {
    schedule(e.time + config_.refresh_period_s, EventKind::TableRefresh, 0, 0, 0);
  }
}

void Simulator::on_stats_tick(const Event& e) {
  schedule_.prune(e.time);
  for (LinkIndex l = 0; l < topology_.link_count(); ++l) {
    for (int w = 0; w < schedule_.wavelengths(l); ++w) {
      auto iv = schedule_.intervals(l, w);
      for (std::size_t i = 1; i < iv.size(); ++i) {
        if (iv[i].first < iv[i - 1].second) ++report_.schedule_overlaps;
      }
    }
  }
  if (e.time + kPruneInterval < config_.duration_s) {
    schedule(e.time + kPruneInterval, EventKind::StatsTick, 0, 0, 0);
  }
}

double Simulator::local_blr(NodeId node, double now) {
  Agent& a = agents_[node];
  prune_window(a, now);
  if (a.attempts.empty()) return 0.0;
  return std::min(1.0, static_cast<double>(a.failures.size()) /
                           static_cast<double>(a.attempts.size()));
}

void Simulator::prune_window(Agent& a, double now) const {
  const double horizon = now - config_.blr.window_s;
  while (!a.attempts.empty() && a.attempts.front() < horizon) a.attempts.pop_front();
  while (!a.failures.empty() && a.failures.front() < horizon) a.failures.pop_front();
}

void Simulator::record_occupancy(RunCounters& c, LinkIndex link, int wavelength, double start,
                                 double end, double window_start, double window_end) const {
  double lo = std::max(start, window_start);
  double hi = std::min(end, window_end);
  if (hi > lo) c.busy_s[channel_offset_[link] + static_cast<std::size_t>(wavelength)] += hi - lo;
}

void Simulator::maybe_retire(std::uint64_t id) {
  auto it = bursts_.find(id);
  if (it == bursts_.end()) return;
  Burst& b = it->second;
  if (!(b.header_done && b.burst_done && b.notification_done)) return;

  if (b.delivered || config_.util_mode == UtilMode::All) {
    for (const Hop& h : b.path) {
      if (!h.reserved) continue;
      double end = h.released ? std::min(h.end, h.released_at) : h.end;
      record_occupancy(report_.total, h.link, b.wavelength, h.start, end, 0.0, kForever);
      record_occupancy(report_.steady, h.link, b.wavelength, h.start, end, config_.warmup_s,
                       config_.duration_s);
    }
  }
  if (observer_.on_finished) observer_.on_finished(make_record(b));
  bursts_.erase(it);
}

BurstRecord Simulator::make_record(const Burst& b) const {
  BurstRecord r;
  r.id = b.id;
  r.source = b.source;
  r.dest = b.dest;
  r.size_bits = b.size_bits;
  r.created_at = b.created_at;
  r.wavelength = b.wavelength;
  r.delivered = b.delivered;
  r.drop_cause = b.drop_cause;
  r.delivered_at = b.delivered_at;
  r.path.reserve(b.path.size());
  for (const Hop& h : b.path) r.path.push_back(h.node);
  return r;
}

}  // namespace obsgprm
