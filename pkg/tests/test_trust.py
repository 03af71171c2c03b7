"""Reliability-value laws, class assignment, ledger behaviour, social scores."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from std2d.trust import (
    ReliabilityClass,
    RelationshipKind,
    SocialEdge,
    SocialGraph,
    TrustLedger,
    TrustProfile,
    classify,
    compute_nrv,
    compute_srf,
    sample_srf,
)


# -- reliability value ---------------------------------------------------------


def test_nrv_piecewise_cases():
    assert compute_nrv(TrustProfile("a", srf=0.7, mdc=0)) == 0.7
    assert compute_nrv(TrustProfile("a", srf=0.2, mdc=3)) == 3
    assert compute_nrv(TrustProfile("a", srf=1.0, mdc=0)) == 1.0


def test_profile_validation():
    with pytest.raises(ValueError):
        TrustProfile("a", srf=1.2)
    with pytest.raises(ValueError):
        TrustProfile("a", srf=0.5, mdc=-1)


# -- classification -------------------------------------------------------------


def test_classify_examples():
    assert classify(nrv=3, mdc=3) is ReliabilityClass.BANNED
    assert classify(nrv=0.9, mdc=0) is ReliabilityClass.HIGH
    assert classify(nrv=0.0, mdc=0) is ReliabilityClass.LOW


def test_classify_boundaries():
    assert classify(2 / 3, 0) is ReliabilityClass.HIGH
    assert classify(1 / 3, 0) is ReliabilityClass.MEDIUM
    assert classify(1 / 3 - 1e-9, 0) is ReliabilityClass.LOW
    assert classify(1.0, 1) is ReliabilityClass.BANNED  # one incident bans


@settings(max_examples=500, deadline=None)
@given(
    srf=st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    mdc=st.integers(min_value=0, max_value=50),
)
def test_classify_total_partition(srf, mdc):
    profile = TrustProfile("x", srf=srf, mdc=mdc)
    cls = classify(profile.nrv, profile.mdc)
    assert cls in ReliabilityClass
    if mdc >= 1:
        assert cls is ReliabilityClass.BANNED
    else:
        assert cls is not ReliabilityClass.BANNED


def test_custom_thresholds():
    assert classify(0.5, 0, thresholds=(0.2, 0.9)) is ReliabilityClass.MEDIUM
    assert classify(0.95, 0, thresholds=(0.2, 0.9)) is ReliabilityClass.HIGH


# -- ledger -----------------------------------------------------------------------


def test_record_malicious_increments_and_bans():
    ledger = TrustLedger()
    ledger.add("dev1", srf=0.9)
    assert ledger.classify_device("dev1") is ReliabilityClass.HIGH
    ledger.record_malicious("dev1")
    assert ledger.get("dev1").mdc == 1
    assert ledger.get("dev1").nrv == 1
    assert ledger.classify_device("dev1") is ReliabilityClass.BANNED
    ledger.record_malicious("dev1")
    assert ledger.get("dev1").mdc == 2
    assert ledger.get("dev1").nrv == 2


def test_ban_is_monotone():
    ledger = TrustLedger()
    ledger.add("dev1", srf=1.0)
    ledger.record_malicious("dev1")
    for _ in range(5):
        assert ledger.classify_device("dev1") is ReliabilityClass.BANNED
        ledger.record_malicious("dev1")


def test_nrv_law_holds_after_every_mutation():
    ledger = TrustLedger()
    rng = random.Random(4)
    for i in range(40):
        ledger.add(f"d{i}", srf=rng.random())
    for _ in range(200):
        device = f"d{rng.randrange(40)}"
        ledger.record_malicious(device)
        for profile in ledger.profiles.values():
            expected = profile.srf if profile.mdc == 0 else float(profile.mdc)
            assert profile.nrv == expected


def test_unknown_device_rejected():
    ledger = TrustLedger()
    with pytest.raises(KeyError):
        ledger.record_malicious("ghost")
    with pytest.raises(KeyError):
        ledger.get("ghost")


def test_snapshot_is_isolated():
    ledger = TrustLedger()
    ledger.add("dev1", srf=0.5)
    snap = ledger.snapshot()
    ledger.record_malicious("dev1")
    assert snap["dev1"].mdc == 0
    assert ledger.get("dev1").mdc == 1


# -- social graph ------------------------------------------------------------------


def test_srf_examples():
    graph = SocialGraph()
    graph.add_node("lonely")
    graph.add_edge(SocialEdge("a", "b", RelationshipKind.POR, 0.8))
    graph.add_edge(SocialEdge("c", "a", RelationshipKind.OOR, 0.4))
    assert compute_srf("lonely", graph) == 0.0
    assert compute_srf("b", graph) == pytest.approx(0.8)
    assert compute_srf("a", graph) == pytest.approx((0.8 + 0.4) / 2)


def test_srf_kind_coefficients():
    graph = SocialGraph()
    graph.add_edge(SocialEdge("a", "b", RelationshipKind.POR, 1.0))
    graph.add_edge(SocialEdge("a", "c", RelationshipKind.SOR, 1.0))
    coeffs = {RelationshipKind.POR: 0.5, RelationshipKind.SOR: 1.0}
    assert compute_srf("a", graph, coeffs) == pytest.approx(0.75)


def test_srf_unknown_device():
    with pytest.raises(KeyError):
        compute_srf("nope", SocialGraph())


def test_graph_edge_validation():
    with pytest.raises(ValueError):
        SocialEdge("a", "a", RelationshipKind.POR, 0.5)
    with pytest.raises(ValueError):
        SocialEdge("a", "b", RelationshipKind.POR, 1.5)


def test_graph_from_csv(tmp_path):
    path = tmp_path / "edges.csv"
    path.write_text(
        "# node_a, node_b, kind, weight\n"
        "dev1, dev2, por, 0.8\n"
        "dev1, dev3, sor, 0.4\n"
    )
    graph = SocialGraph.from_csv(path)
    assert graph.nodes == {"dev1", "dev2", "dev3"}
    assert compute_srf("dev1", graph) == pytest.approx(0.6)


# -- sampled scores ------------------------------------------------------------------


def test_sample_srf_ranges():
    rng = random.Random(123)
    malicious = [sample_srf(True, rng) for _ in range(10_000)]
    honest = [sample_srf(False, rng) for _ in range(10_000)]
    assert all(0.0 <= v <= 0.4 for v in malicious)
    assert all(0.0 <= v <= 1.0 for v in honest)
    assert max(honest) > 0.4  # honest draws actually use the full range


def test_sample_srf_deterministic():
    a = random.Random(9)
    b = random.Random(9)
    assert [sample_srf(False, a) for _ in range(100)] == [
        sample_srf(False, b) for _ in range(100)
    ]
