// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "obsgprm/error.hpp"
#include "obsgprm/topology.hpp"

using namespace obsgprm;

namespace {

const char* kTriangle = R"(# three nodes
node 0 a
node 1 b
node 2 c
link 0 1 100 1 4 1e9
link 1 0 100 1 4 1e9
link 1 2 100 1 4 1e9
link 2 1 100 1 4 1e9
link 0 2 100 1 4 1e9
link 2 0 100 1 4 1e9
)";

}  // namespace

TEST_CASE("triangle file parses") {
  std::istringstream in(kTriangle);
  Topology t = parse_topology(in);
  CHECK(t.node_count() == 3);
  CHECK(t.link_count() == 6);
  CHECK(t.name(2) == "c");
  CHECK(t.egress_capacity_bps(0) == doctest::Approx(8e9));
  CHECK(t.total_data_channels() == 24);
  auto nb = t.neighbors(1);
  REQUIRE(nb.size() == 2);
  CHECK(nb[0] == 0);
  CHECK(nb[1] == 2);
}

TEST_CASE("shipped nsfnet") {
  Topology t = testing::nsfnet();
  CHECK(t.node_count() == 14);
  CHECK(t.link_count() == 42);
  for (const auto& l : t.links()) {
    CHECK(l.data_channels == 4);
    CHECK(l.control_channels == 2);
    CHECK(l.channel_rate_bps == 1e9);
  }
}

TEST_CASE("bad topology input") {
  SUBCASE("undeclared node") {
    std::istringstream in("node 0 a\nnode 1 b\nlink 0 99 10 1 1 1e9\nlink 99 0 10 1 1 1e9\n");
    CHECK_THROWS_AS(parse_topology(in), ValidationError);
  }
  SUBCASE("missing reverse link") {
    std::istringstream in("node 0 a\nnode 1 b\nlink 0 1 10 1 1 1e9\n");
    CHECK_THROWS_AS(parse_topology(in), ValidationError);
  }
  SUBCASE("disconnected") {
    std::istringstream in(
        "node 0 a\nnode 1 b\nnode 2 c\nlink 0 1 10 1 1 1e9\nlink 1 0 10 1 1 1e9\n");
    CHECK_THROWS_AS(parse_topology(in), ValidationError);
  }
  SUBCASE("sparse ids") {
    std::istringstream in("node 0 a\nnode 2 b\nlink 0 2 10 1 1 1e9\nlink 2 0 10 1 1 1e9\n");
    CHECK_THROWS_AS(parse_topology(in), ValidationError);
  }
  SUBCASE("trailing garbage") {
    std::istringstream in("node 0 a extra\n");
    CHECK_THROWS_AS(parse_topology(in), ParseError);
  }
  SUBCASE("unknown directive") {
    std::istringstream in("nodes 0 a\n");
    CHECK_THROWS_AS(parse_topology(in), ParseError);
  }
  SUBCASE("zero length") {
    std::istringstream in("node 0 a\nnode 1 b\nlink 0 1 0 1 1 1e9\nlink 1 0 0 1 1 1e9\n");
    CHECK_THROWS_AS(parse_topology(in), ValidationError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_topology("/nonexistent/x.topo"), ParseError);
  }
}

TEST_CASE("hop counts") {
  Topology tri = testing::triangle();
  HopTable h(tri);
  CHECK(h(0, 1) == 1);
  CHECK(h(0, 0) == 0);

  Topology t = testing::nsfnet();
  HopTable hops = all_pairs_hop_counts(t);
  const auto n = static_cast<NodeId>(t.node_count());
  for (NodeId i = 0; i < n; ++i) {
    auto oracle = testing::bfs_oracle(t, i);
    for (NodeId j = 0; j < n; ++j) CHECK(hops(i, j) == oracle[j]);
  }
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = 0; j < n; ++j)
      for (NodeId k = 0; k < n; ++k) CHECK(hops(i, j) <= hops(i, k) + hops(k, j));
}

TEST_CASE("propagation delay") {
  Link l{0, 1, 200.0, 1, 1, 1e9};
  CHECK(propagation_delay(l) == doctest::Approx(1e-3));
  l.length_km = 0.2;
  CHECK(propagation_delay(l) == doctest::Approx(1e-6));
  l.length_km = 1000.0;
  CHECK(propagation_delay(l) == doctest::Approx(5e-3));
  CHECK(propagation_delay(l, 1e8) == doctest::Approx(1e-2));
}

TEST_CASE("topology round trip") {
  for (const Topology& t : {testing::triangle(), testing::nsfnet()}) {
    std::stringstream buf;
    write_topology(buf, t);
    Topology back = parse_topology(buf);
    CHECK(back == t);
  }
}
