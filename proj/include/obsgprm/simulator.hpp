// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <queue>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "obsgprm/evidence.hpp"
#include "obsgprm/metrics.hpp"
#include "obsgprm/routing.hpp"
#include "obsgprm/schedule.hpp"
#include "obsgprm/success_table.hpp"
#include "obsgprm/topology.hpp"
#include "obsgprm/traffic.hpp"

namespace obsgprm {

enum class Policy { ShortestPath, Gprm };
enum class InitialMode { Warm, Cold };
enum class UtilMode { Delivered, All };

std::string_view to_string(Policy p);
std::string_view to_string(InitialMode m);
std::string_view to_string(UtilMode m);

struct SimConfig {
  Policy policy = Policy::Gprm;
  double duration_s = 10.0;  // bursts are generated in [0, duration)
  double warmup_s = 1.0;
  double per_hop_processing_s = 1e-4;
  double offset_guard_s = 0.0;

  UpdateParams update;
  InitialMode initial = InitialMode::Warm;
  double refresh_period_s = 0.1;
  BlrClassifier blr;

  double bucket_width_s = 0.01;
  UtilMode util_mode = UtilMode::Delivered;
  bool release_on_nack = true;

  void validate() const;
};

// Outcome of one burst, handed to an observer when both the burst and its
// notification have finished.
struct BurstRecord {
  std::uint64_t id = 0;
  NodeId source = 0;
  NodeId dest = 0;
  double size_bits = 0.0;
  double created_at = 0.0;
  int wavelength = -1;
  bool delivered = false;
  std::optional<DropCause> drop_cause;
  double delivered_at = 0.0;
  std::vector<NodeId> path;  // nodes that forwarded the header, in order
};

struct SimObserver {
  std::function<void(const BurstRecord&)> on_created;
  std::function<void(const BurstRecord&)> on_finished;
};

struct MetricsReport {
  Policy policy = Policy::Gprm;
  RunCounters total;   // every burst of the run
  RunCounters steady;  // bursts created after warm-up; occupancy inside the window
  TimeSeries learning{0.01};
  double steady_elapsed_s = 0.0;

  std::uint64_t events_processed = 0;
  std::uint64_t in_flight_after_drain = 0;  // sent - delivered - dropped
  std::uint64_t unretired_records = 0;
  std::uint64_t causality_violations = 0;
  std::uint64_t schedule_overlaps = 0;

  std::optional<double> steady_blr() const;
  std::optional<double> steady_delay() const;
  double steady_utilization(const Topology& t) const;
};

// One simulation run: JET signaling over a shared event queue, with either
// static minimum-hop forwarding or per-node learned routing tables fed by
// ACK/NACK notifications. Single-threaded; identical inputs give identical
// event sequences.
class Simulator {
 public:
  Simulator(const Topology& topology, std::vector<ConnectionSpec> connections, SimConfig config);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  void set_trace(std::ostream* trace) { trace_ = trace; }
  void set_observer(SimObserver observer) { observer_ = std::move(observer); }

  // Processes events until the queue drains after generation stops.
  MetricsReport run();

  // Learned state, available for GPRM runs after run().
  const SuccessTable& success_table(NodeId n) const;
  void restore_success_table(NodeId n, std::istream& in);

 private:
  enum class EventKind : std::uint8_t {
    BurstArrival,
    BhpArrive,
    BurstArrive,
    NotificationArrive,
    TableRefresh,
    StatsTick
  };
  struct Event {
    double time;
    std::uint64_t seq;
    EventKind kind;
    NodeId node;
    std::uint32_t aux;  // connection index or path position
    std::uint64_t burst;
  };
  struct EventLater {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  struct Hop {
    NodeId node;
    NodeId next;
    EvidenceVector evidence;
    LinkIndex link;
    double start;
    double end;
    double header_at;  // when the header reached `node`
    bool reserved;
    bool released;
    double released_at;
  };
  enum class NotificationType : std::uint8_t { Ack, Nack };
  struct Burst {
    std::uint64_t id;
    NodeId source;
    NodeId dest;
    double size_bits;
    double created_at;
    int wavelength = -1;
    double remaining_offset = 0.0;
    std::vector<Hop> path;
    std::optional<DropCause> drop_cause;
    NodeId terminal_node = 0;  // where the header stopped
    bool header_done = false;
    bool burst_done = false;
    bool notification_done = false;
    bool delivered = false;
    double delivered_at = 0.0;
    NotificationType notification = NotificationType::Ack;
  };

  struct Agent {
    SuccessTable table;
    std::optional<RoutingTable> routes;
    std::deque<double> attempts;
    std::deque<double> failures;
  };

  static std::string_view kind_name(EventKind k);
  void schedule(double time, EventKind kind, NodeId node, std::uint32_t aux, std::uint64_t burst);
  void trace(const Event& e, std::string_view detail) const;

  void on_burst_arrival(const Event& e);
  void on_bhp_arrive(const Event& e);
  void on_burst_arrive(const Event& e);
  void on_notification(const Event& e);
  void on_table_refresh(const Event& e);
  void on_stats_tick(const Event& e);

  // Routing decision at `node`; records the evidence used.
  std::optional<NodeId> choose_next(NodeId node, Burst& b, double now, EvidenceVector& evidence);
  bool offset_sufficient(double remaining_after, NodeId next, NodeId dest) const;
  void forward_header(Burst& b, NodeId node, NodeId next, double now);
  void drop(Burst& b, NodeId at, DropCause cause, double now, bool has_hop);
  void apply_notification(Burst& b, std::size_t position, double now, bool local);
  void account_delivery(Burst& b);
  void maybe_retire(std::uint64_t id);
  double local_blr(NodeId node, double now);
  void prune_window(Agent& a, double now) const;
  void record_occupancy(RunCounters& c, LinkIndex link, int wavelength, double start, double end,
                        double window_start, double window_end) const;
  BurstRecord make_record(const Burst& b) const;

  const Topology& topology_;
  std::vector<ConnectionSpec> connections_;
  SimConfig config_;
  HopTable hops_;
  ShortestPathRouter sp_router_;
  StateCounts states_;
  std::vector<double> link_delay_;
  std::vector<std::size_t> channel_offset_;

  std::vector<ArrivalStream> streams_;
  std::vector<double> pending_size_;
  ChannelSchedule schedule_;
  std::vector<Agent> agents_;
  std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_burst_ = 0;
  std::unordered_map<std::uint64_t, Burst> bursts_;

  MetricsReport report_;
  std::ostream* trace_ = nullptr;
  SimObserver observer_;
  bool ran_ = false;
};

}  // namespace obsgprm
