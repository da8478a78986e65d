"""End-to-end checks of the python bindings against a tiny cluster."""

import json

import pytest

import helio

CLUSTER = json.dumps(
    {
        "model": {"name": "tiny", "num_layers": 4, "param_gb": 4},
        "coordinator": {"id": "coord"},
        "nodes": [
            {"id": "a", "vram_gb": 9, "peak_layer_tokens_per_s": 1200},
            {"id": "b", "vram_gb": 9, "peak_layer_tokens_per_s": 800},
        ],
        "links": [
            {"src": "coord", "dst": "a", "bandwidth_mbps": 1000, "latency_ms": 1},
            {"src": "coord", "dst": "b", "bandwidth_mbps": 1000, "latency_ms": 1},
            {"src": "a", "dst": "coord", "bandwidth_mbps": 1000, "latency_ms": 1},
            {"src": "b", "dst": "coord", "bandwidth_mbps": 1000, "latency_ms": 1},
            {"src": "a", "dst": "b", "bandwidth_mbps": 1000, "latency_ms": 1},
        ],
    }
)


def test_cluster_round_trip():
    c = helio.Cluster.from_json(CLUSTER)
    assert c.num_layers == 4
    assert c.coordinator == "coord"
    assert c.node_ids == ["a", "b"]
    again = helio.Cluster.from_json(c.to_json())
    assert again.to_json() == c.to_json()


def test_bad_cluster_raises_value_error():
    with pytest.raises(ValueError):
        helio.Cluster.from_json("{}")


def test_plan_and_bounds():
    c = helio.Cluster.from_json(CLUSTER)
    p = helio.plan(c, method="milp", gap=0.0)
    assert p.optimal
    # Both nodes hold the whole model: 1200/4 + 800/4 tokens/s.
    assert p.objective == pytest.approx(500.0, rel=1e-6)
    assert p.objective <= helio.throughput_upper_bound(c) + 1e-6
    placement = p.placement
    assert set(placement) == {"a", "b"}
    covered = set()
    for start, end in placement.values():
        covered.update(range(start, end))
    assert covered == {0, 1, 2, 3}


def test_plan_json_round_trip(tmp_path):
    c = helio.Cluster.from_json(CLUSTER)
    p = helio.plan(c, method="milp")
    path = tmp_path / "plan.json"
    p.save(str(path))
    q = helio.Plan.load(str(path))
    assert q.to_json() == p.to_json()
    assert q.objective == pytest.approx(p.objective)


def test_heuristic_methods_are_dominated():
    c = helio.Cluster.from_json(CLUSTER)
    best = helio.plan(c, method="milp", gap=0.0).objective
    for method in ("swarm", "petals"):
        p = helio.plan(c, method=method)
        assert p.method == method
        assert p.objective <= best + 1e-6


def test_max_flow_matches_manual_placement():
    c = helio.Cluster.from_json(CLUSTER)
    value = helio.max_flow_value(c, {"a": (0, 4), "b": (0, 4)})
    assert value == pytest.approx(500.0, rel=1e-9)
    chained = helio.max_flow_value(c, {"a": (0, 2), "b": (2, 4)})
    assert chained == pytest.approx(400.0, rel=1e-9)  # b's T_2 binds the chain


def test_trace_generation_is_deterministic():
    t1 = helio.generate_trace(50, rate=2.0, mode="online", seed=9)
    t2 = helio.generate_trace(50, rate=2.0, mode="online", seed=9)
    assert t1 == t2
    assert all(arrival >= 0 for arrival, _, _ in t1)


def test_simulate_round_trip():
    c = helio.Cluster.from_json(CLUSTER)
    p = helio.plan(c, method="milp")
    trace = helio.generate_trace(
        200, rate=1.0, mode="online", seed=3, mean_input=100, mean_output=30
    )
    m1 = helio.simulate(c, p, trace, mode="online", scheduler="iwrr", seed=5, horizon_s=60)
    m2 = helio.simulate(c, p, trace, mode="online", scheduler="iwrr", seed=5, horizon_s=60)
    assert m1 == m2
    assert m1["requests_completed_total"] <= m1["requests_arrived"]
    assert m1["throughput_tps"] <= p.objective + 1e-6
    assert m1["window_s"] == pytest.approx(40.0)
