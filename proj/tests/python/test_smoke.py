# Copyright 2026 The obs-gprm-sim Authors
# SPDX-License-Identifier: Apache-2.0

import math
from collections import deque
from pathlib import Path

import pytest

import obsgprm as og

DATA = Path(__file__).resolve().parents[2] / "data"


@pytest.fixture(scope="module")
def nsfnet():
    return og.load_topology(str(DATA / "nsfnet.topo"))


def test_topology_and_hops(nsfnet):
    assert nsfnet.node_count == 14
    assert nsfnet.link_count == 42
    hops = nsfnet.hop_counts()
    for src in range(14):
        dist = {src: 0}
        q = deque([src])
        while q:
            u = q.popleft()
            for v in nsfnet.neighbors(u):
                if v not in dist:
                    dist[v] = dist[u] + 1
                    q.append(v)
        assert [dist[d] for d in range(14)] == hops[src]
    nxt = nsfnet.shortest_path_next_hop(0, 13)
    assert hops[nxt][13] == hops[0][13] - 1


def test_bad_topology_raises():
    with pytest.raises(og.ValidationError):
        og.parse_topology("node 0 a\nnode 1 b\nlink 0 99 10 1 1 1e9\n")


def test_success_table_arithmetic():
    e = og.EvidenceVector(3, og.BlrClass.LOW, 2, 2)
    t = og.SuccessTable(0, [1, 2], 3)
    assert t.sp(1, e) == 0.5
    assert t.update(1, e, og.Outcome.SUCCESS) == pytest.approx(0.55)
    assert t.update(2, e, og.Outcome.FAILURE) == pytest.approx(0.45)
    with pytest.raises(og.UnknownNeighborError):
        t.sp(0, e)
    outcome, score = t.naive_bayes_map(1, e)
    assert outcome == og.Outcome.SUCCESS and score > 0
    back = og.SuccessTable(0, [1, 2], 3)
    back.restore(t.dump())
    assert back.sp(1, e) == t.sp(1, e)


def test_routing_rows():
    assert og.permutation_count(16, 3, 16, 14) == 10752
    t = og.SuccessTable(0, [3, 7], 8)
    e = og.EvidenceVector(2, og.BlrClass.LOW, 2, 5)
    t.set(3, e, 0.8)
    t.set(7, e, 0.6)
    rt = og.build_table(t, [3, 7], [16, 3, 16, 8])
    row = rt.row(e)
    assert [k for k, _ in row] == [3, 7]
    assert row[0][1] == pytest.approx(0.2)
    assert rt.lookup(e, [3]) == 7
    assert rt.lookup(e, [3, 7]) is None
    small = og.build_table(og.SuccessTable(0, [1, 2], 5), [1, 2], [2, 3, 4, 5])
    assert small.materialize_all() == 240


def test_load_scaling_and_gains(nsfnet):
    matrix = og.load_matrix(str(DATA / "us_ref.matrix"), 14)
    mu = og.node_capacities(nsfnet)
    conns = og.scale_to_load(matrix, 0.3, mu, seed=2)
    assert math.isclose(og.offered_load(conns, mu), 0.3, rel_tol=1e-9)
    one = og.ConnectionSpec(0, 1, 10.0, 3.2e6)
    assert og.offered_load([one], [4e9, 4e9]) == pytest.approx(0.008)
    assert og.blr_gain([0.1, 0.2], [0.05, 0.1])["sum"] == pytest.approx(1.0)
    assert og.u_gain([0.5], [0.6])["sum"] == pytest.approx(0.2)
    assert og.classify_blr(0.01) == og.BlrClass.MEDIUM


def test_simulate_conserves_bursts(nsfnet):
    conns = og.scale_to_load(og.TrafficMatrix.uniform(14), 0.4, og.node_capacities(nsfnet), seed=3)
    for policy in (og.Policy.SHORTEST_PATH, og.Policy.GPRM):
        r = og.simulate(nsfnet, conns, policy, duration_s=1.0, warmup_s=0.1)
        total = r["total"]
        assert total["sent"] == total["delivered"] + total["dropped"]
        assert r["in_flight_after_drain"] == 0
        assert r["causality_violations"] == 0
        assert 0.0 <= r["utilization"] <= 1.0
        again = og.simulate(nsfnet, conns, policy, duration_s=1.0, warmup_s=0.1)
        assert again["blr"] == r["blr"]


def test_scenario_experiment(tmp_path):
    s = og.load_scenario(str(DATA / "nsfnet_sweep.scn"))
    assert s.validate() == []
    s.set("loads", "0.3")
    s.set("seeds", "1")
    s.set("duration_s", "0.5")
    s.set("warmup_s", "0.1")
    out = og.run_experiment(s, str(tmp_path))
    assert len(out["rows"]) == 2
    assert len(out["gains"]) == 1
    assert (tmp_path / "results.csv").exists()
    s.set("alpha", "1.2")
    assert any("alpha out of [0,1]" in e for e in s.validate())
    with pytest.raises(og.ParseError):
        s.set("colour", "blue")
