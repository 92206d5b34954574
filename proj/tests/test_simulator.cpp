// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "obsgprm/error.hpp"
#include "obsgprm/simulator.hpp"

using namespace obsgprm;

namespace {

struct Captured {
  MetricsReport report;
  std::vector<BurstRecord> created;
  std::vector<BurstRecord> finished;
  std::string trace;
};

Captured simulate(const Topology& t, std::vector<ConnectionSpec> conns, const SimConfig& cfg,
                  bool with_trace = false) {
  Captured out;
  Simulator sim(t, std::move(conns), cfg);
  std::ostringstream trace;
  if (with_trace) sim.set_trace(&trace);
  sim.set_observer({[&](const BurstRecord& r) { out.created.push_back(r); },
                    [&](const BurstRecord& r) { out.finished.push_back(r); }});
  out.report = sim.run();
  out.trace = trace.str();
  return out;
}

ConnectionSpec conn(NodeId s, NodeId d, double lambda, std::uint64_t seed,
                    double bits = kDefaultMeanBurstBits) {
  return {s, d, 0, lambda, bits, seed};
}

// 0 -100km- 1 -100km- 2 -200km- 3 : 2 ms of propagation end to end
Topology line4() {
  std::vector<Link> links;
  auto add = [&](NodeId a, NodeId b, double km) {
    links.push_back({a, b, km, 1, 4, 1e9});
    links.push_back({b, a, km, 1, 4, 1e9});
  };
  add(0, 1, 100);
  add(1, 2, 100);
  add(2, 3, 200);
  return Topology({"a", "b", "c", "d"}, links);
}

double erlang_b(int channels, double erlangs) {
  double b = 1.0;
  for (int k = 1; k <= channels; ++k) b = erlangs * b / (k + erlangs * b);
  return b;
}

void check_invariants(const Captured& c) {
  const MetricsReport& r = c.report;
  CHECK(r.total.sent == r.total.delivered + r.total.dropped());
  CHECK(r.in_flight_after_drain == 0);
  CHECK(r.unretired_records == 0);
  CHECK(r.causality_violations == 0);
  CHECK(r.schedule_overlaps == 0);
  CHECK(c.created.size() == r.total.sent);
  CHECK(c.finished.size() == r.total.sent);
  CHECK(r.learning.total_sent() == r.total.sent);
  CHECK(r.learning.total_dropped() == r.total.dropped());
  std::uint64_t by_cause = 0;
  for (auto n : r.steady.dropped_by_cause) by_cause += n;
  CHECK(by_cause == r.steady.dropped());
  for (const auto& rec : c.finished) {
    std::set<NodeId> seen(rec.path.begin(), rec.path.end());
    REQUIRE(seen.size() == rec.path.size());  // loop freedom
    REQUIRE(rec.delivered != rec.drop_cause.has_value());
    if (rec.delivered) REQUIRE(rec.wavelength >= 0);
  }
}

// Every wavelength a burst was given along its path, read back from the trace.
std::map<std::uint64_t, std::set<int>> wavelengths_from_trace(const std::string& trace) {
  std::map<std::uint64_t, std::set<int>> out;
  std::istringstream in(trace);
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.find("wl=");
    if (pos == std::string::npos) continue;
    std::istringstream fields(line);
    std::string time, kind;
    NodeId node = 0;
    std::uint64_t id = 0;
    fields >> time >> kind >> node >> id;
    out[id].insert(std::stoi(line.substr(pos + 3)));
  }
  return out;
}

}  // namespace

TEST_CASE("zero traffic") {
  Topology t = testing::triangle();
  SimConfig cfg;
  cfg.policy = Policy::Gprm;
  auto c = simulate(t, {}, cfg);
  CHECK_FALSE(c.report.steady_blr().has_value());
  CHECK_FALSE(c.report.steady_delay().has_value());
  CHECK(c.report.steady_utilization(t) == 0.0);
  CHECK_THROWS_AS(blr(c.report.steady), UndefinedMetricError);
}

TEST_CASE("delay is offset plus propagation plus transmission") {
  Topology t = line4();
  for (Policy p : {Policy::ShortestPath, Policy::Gprm}) {
    SimConfig cfg;
    cfg.policy = p;
    cfg.duration_s = 20.0;
    auto c = simulate(t, {conn(0, 3, 1.0, 5)}, cfg, true);
    check_invariants(c);
    REQUIRE(c.report.total.delivered > 5);
    REQUIRE(c.report.total.dropped() == 0);
    CHECK(c.finished.front().wavelength == 0);  // idle network, first fit
    for (const auto& r : c.finished) {
      CHECK(r.delivered_at - r.created_at ==
            doctest::Approx(0.3e-3 + 2e-3 + r.size_bits / 1e9).epsilon(1e-9));
      CHECK(r.path == std::vector<NodeId>{0, 1, 2});
    }
    // the data burst leaves the source exactly one initial offset after creation
    std::istringstream in(c.trace);
    std::string line;
    std::getline(in, line);
    double t0 = std::stod(line);
    while (std::getline(in, line)) {
      if (line.find("burst_arrive 0 0 ") != std::string::npos) {
        CHECK(std::stod(line) == doctest::Approx(t0 + 0.3e-3).epsilon(1e-9));
        break;
      }
    }
  }
}

TEST_CASE("tiny geometry leaves transmission plus offset") {
  std::vector<Link> links{{0, 1, 1e-6, 1, 4, 1e9}, {1, 0, 1e-6, 1, 4, 1e9}};
  Topology t({"a", "b"}, links);
  SimConfig cfg;
  cfg.policy = Policy::ShortestPath;
  cfg.per_hop_processing_s = 1e-9;
  cfg.duration_s = 5.0;
  auto c = simulate(t, {conn(0, 1, 2.0, 8)}, cfg);
  REQUIRE(c.report.total.delivered > 0);
  for (const auto& r : c.finished) {
    CHECK(r.delivered_at - r.created_at == doctest::Approx(r.size_bits / 1e9).epsilon(1e-6));
  }
}

TEST_CASE("ingress drop when every channel is busy") {
  Topology t = testing::make_topology(2, {{0, 1}});
  SimConfig cfg;
  cfg.policy = Policy::ShortestPath;
  cfg.duration_s = 2.0;
  cfg.warmup_s = 0.0;
  // bursts lasting ~1000 s: the first four take every channel
  auto c = simulate(t, {conn(0, 1, 20.0, 3, 1e12)}, cfg);
  check_invariants(c);
  CHECK(c.report.total.delivered == 4);
  CHECK(c.report.total.dropped(DropCause::Ingress) == c.report.total.sent - 4);
  std::set<int> used;
  for (const auto& r : c.finished)
    if (r.delivered) used.insert(r.wavelength);
  CHECK(used == std::set<int>{0, 1, 2, 3});
}

TEST_CASE("contention at a core node drops there and notifies upstream") {
  // 0 and 3 both send to 2 through 1; both start on wavelength 0
  Topology t = testing::make_topology(4, {{0, 1}, {1, 2}, {3, 1}});
  SimConfig cfg;
  cfg.policy = Policy::ShortestPath;
  cfg.duration_s = 20.0;
  auto c = simulate(t, {conn(0, 2, 60.0, 1), conn(3, 2, 60.0, 2)}, cfg, true);
  check_invariants(c);
  REQUIRE(c.report.total.dropped(DropCause::Contention) > 0);
  int nacks = 0;
  for (const auto& r : c.finished) {
    if (r.drop_cause == DropCause::Contention) {
      CHECK(r.path.back() == 1);
      CHECK(r.path.size() == 2);
    }
  }
  std::istringstream in(c.trace);
  std::string line;
  while (std::getline(in, line))
    if (line.find(" nack") != std::string::npos) ++nacks;
  CHECK(nacks > 0);
}

TEST_CASE("notifications update every forwarding node") {
  Topology t = line4();
  SimConfig cfg;
  cfg.policy = Policy::Gprm;
  cfg.duration_s = 10.0;
  Simulator sim(t, {conn(0, 3, 5.0, 9)}, cfg);
  MetricsReport r = sim.run();
  REQUIRE(r.total.dropped() == 0);
  CHECK(sim.success_table(0).observations(1) == r.total.sent);
  CHECK(sim.success_table(1).observations(2) == r.total.sent);
  CHECK(sim.success_table(2).observations(3) == r.total.sent);
  CHECK(sim.success_table(1).observations(0) == 0);
  CHECK(sim.success_table(3).observations(2) == 0);
}

TEST_CASE("a drop two hops in penalizes the upstream choices") {
  // 0-1-2-3 with cross traffic 4->2->3 contending on link 2->3
  Topology t = testing::make_topology(5, {{0, 1}, {1, 2}, {2, 3}, {4, 2}});
  SimConfig cfg;
  cfg.policy = Policy::Gprm;
  cfg.duration_s = 20.0;
  Simulator sim(t, {conn(0, 3, 60.0, 4), conn(4, 3, 60.0, 6)}, cfg);
  std::uint64_t dropped_at_2 = 0, from_0 = 0;
  sim.set_observer({nullptr, [&](const BurstRecord& r) {
                      if (r.source == 0) ++from_0;
                      if (r.source == 0 && r.drop_cause && r.path.size() == 3) ++dropped_at_2;
                    }});
  MetricsReport rep = sim.run();
  REQUIRE(dropped_at_2 > 0);
  CHECK(sim.success_table(0).observations(1) == from_0);
  std::ostringstream dump0, dump1;
  sim.success_table(0).dump(dump0);
  sim.success_table(1).dump(dump1);
  // warm prior for the only useful neighbor is 1.0; failures pull it below
  auto below_one = [](const std::string& s) {
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream f(line);
      double k, o, b, nb, d, sp;
      f >> k >> o >> b >> nb >> d >> sp;
      if (sp < 1.0) return true;
    }
    return false;
  };
  CHECK(below_one(dump0.str()));
  CHECK(below_one(dump1.str()));
  CHECK(rep.causality_violations == 0);
}

TEST_CASE("header with no unvisited candidate is dropped") {
  // star around 1; cold tables send the first header from 1 to the leaf 2
  Topology t = testing::make_topology(4, {{0, 1}, {1, 2}, {1, 3}});
  SimConfig cfg;
  cfg.policy = Policy::Gprm;
  cfg.initial = InitialMode::Cold;
  cfg.offset_guard_s = 1e-3;
  cfg.duration_s = 5.0;
  auto c = simulate(t, {conn(0, 3, 20.0, 2)}, cfg);
  check_invariants(c);
  REQUIRE_FALSE(c.finished.empty());
  std::sort(c.finished.begin(), c.finished.end(),
            [](const BurstRecord& a, const BurstRecord& b) { return a.id < b.id; });
  const auto& first = c.finished.front();
  CHECK(first.drop_cause == DropCause::NoRoute);
  CHECK(first.path == std::vector<NodeId>{0, 1});  // 2 never forwarded
  CHECK(c.report.total.delivered > 0);  // learned to go 1 -> 3
}

TEST_CASE("insufficient offset drops before the burst overtakes its header") {
  Topology t = testing::make_topology(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  SimConfig cfg;
  cfg.policy = Policy::Gprm;
  cfg.initial = InitialMode::Cold;  // ties send 0 toward 1, a 3-hop detour to 3
  cfg.duration_s = 2.0;
  cfg.warmup_s = 0.0;
  auto c = simulate(t, {conn(0, 3, 20.0, 2)}, cfg);
  check_invariants(c);
  CHECK(c.report.total.dropped(DropCause::Offset) > 0);
  for (const auto& r : c.finished)
    if (r.drop_cause == DropCause::Offset) CHECK(r.path.size() == 1);
}

TEST_CASE("random NSFnet runs keep every invariant") {
  Topology t = testing::nsfnet();
  TrafficMatrix m = TrafficMatrix::uniform(t.node_count());
  auto mu = node_capacities(t);
  auto conns = scale_to_load(m, {0.6, mu}, kDefaultMeanBurstBits, 17);
  double rate = 0.0;
  for (const auto& c : conns) rate += c.lambda;
  for (Policy p : {Policy::ShortestPath, Policy::Gprm}) {
    SimConfig cfg;
    cfg.policy = p;
    cfg.offset_guard_s = 2e-4;
    cfg.duration_s = 1.0e4 / rate;
    cfg.warmup_s = 0.1;
    auto c = simulate(t, conns, cfg, true);
    CHECK(c.report.total.sent >= 9000);
    check_invariants(c);
    for (auto& [id, wls] : wavelengths_from_trace(c.trace)) REQUIRE(wls.size() == 1);
    double u = c.report.steady_utilization(t);
    CHECK(u >= 0.0);
    CHECK(u <= 1.0);

    SimConfig all = cfg;
    all.util_mode = UtilMode::All;
    auto ca = simulate(t, conns, all);
    CHECK(ca.report.steady_utilization(t) >= u);
    CHECK(ca.report.total.sent == c.report.total.sent);
  }
}

TEST_CASE("replay is bit-identical") {
  Topology t = testing::nsfnet();
  auto conns = scale_to_load(load_matrix(testing::data_dir() / "us_ref.matrix", 14),
                             {0.5, node_capacities(t)}, kDefaultMeanBurstBits, 3);
  SimConfig cfg;
  cfg.policy = Policy::Gprm;
  cfg.duration_s = 1.0;
  cfg.warmup_s = 0.1;
  auto a = simulate(t, conns, cfg, true);
  auto b = simulate(t, conns, cfg, true);
  CHECK(a.trace == b.trace);
  CHECK(a.trace.size() > 1000);
  CHECK(a.report.steady_blr() == b.report.steady_blr());
  CHECK(a.report.steady_delay() == b.report.steady_delay());
  CHECK(a.report.steady_utilization(t) == b.report.steady_utilization(t));

  auto other = scale_to_load(load_matrix(testing::data_dir() / "us_ref.matrix", 14),
                             {0.5, node_capacities(t)}, kDefaultMeanBurstBits, 4);
  CHECK(simulate(t, other, cfg, true).trace != a.trace);
}

TEST_CASE("both policies see the same workload") {
  Topology t = testing::nsfnet();
  auto conns = scale_to_load(TrafficMatrix::uniform(14), {0.4, node_capacities(t)},
                             kDefaultMeanBurstBits, 12);
  SimConfig cfg;
  cfg.duration_s = 1.0;
  cfg.warmup_s = 0.1;
  cfg.policy = Policy::ShortestPath;
  auto sp = simulate(t, conns, cfg);
  cfg.policy = Policy::Gprm;
  auto gp = simulate(t, conns, cfg);
  REQUIRE(sp.created.size() == gp.created.size());
  for (std::size_t i = 0; i < sp.created.size(); ++i) {
    const auto& a = sp.created[i];
    const auto& b = gp.created[i];
    REQUIRE(std::tie(a.created_at, a.source, a.dest, a.size_bits) ==
            std::tie(b.created_at, b.source, b.dest, b.size_bits));
  }
}

TEST_CASE("single link matches Erlang B") {
  Topology t = testing::make_topology(2, {{0, 1}});
  for (double erlangs : {1.0, 2.0, 3.0}) {
    const double lambda = erlangs / (kDefaultMeanBurstBits / 1e9);
    SimConfig cfg;
    cfg.policy = Policy::ShortestPath;
    cfg.warmup_s = 1.0;
    cfg.duration_s = cfg.warmup_s + 2.0e5 / lambda;
    Simulator sim(t, {conn(0, 1, lambda, 100 + static_cast<std::uint64_t>(erlangs))}, cfg);
    MetricsReport r = sim.run();
    CHECK(r.steady.sent >= 195000);
    CHECK(r.schedule_overlaps == 0);
    CHECK(std::abs(*r.steady_blr() - erlang_b(4, erlangs)) <= 0.005);
  }
  CHECK(erlang_b(4, 2.0) == doctest::Approx(0.0952381).epsilon(1e-6));
}

TEST_CASE("misuse is rejected") {
  Topology t = testing::triangle();
  SimConfig cfg;
  CHECK_THROWS_AS(Simulator(t, {conn(0, 0, 1.0, 1)}, cfg), ValidationError);
  CHECK_THROWS_AS(Simulator(t, {conn(0, 5, 1.0, 1)}, cfg), ValidationError);
  SimConfig bad = cfg;
  bad.warmup_s = bad.duration_s;
  CHECK_THROWS_WITH_AS(Simulator(t, {}, bad), "warmup must be < duration", ValidationError);

  Simulator once(t, {}, cfg);
  once.run();
  CHECK_THROWS_AS(once.run(), ValidationError);

  cfg.policy = Policy::ShortestPath;
  Simulator sp(t, {}, cfg);
  CHECK_THROWS_AS(sp.success_table(0), ValidationError);
}

TEST_CASE("restored tables steer the first decision") {
  // square 0-1-2-3-0; both ways from 0 to 2 take two hops
  Topology t = testing::make_topology(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  SimConfig cfg;
  cfg.policy = Policy::Gprm;
  cfg.duration_s = 1.0;
  cfg.warmup_s = 0.0;
  Simulator sim(t, {conn(0, 2, 5.0, 1)}, cfg);
  std::ostringstream rows;
  for (int b = 0; b < 3; ++b) rows << "1 2 " << b << " 2 2 0\n";  // via 1: never works
  std::istringstream in(rows.str());
  sim.restore_success_table(0, in);
  std::vector<BurstRecord> done;
  sim.set_observer({nullptr, [&](const BurstRecord& r) { done.push_back(r); }});
  sim.run();
  REQUIRE_FALSE(done.empty());
  for (const auto& r : done) CHECK(r.path.at(1) == 3);
}
