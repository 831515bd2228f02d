import json
import math

import pytest

import fedbai


def test_codec_and_theory():
    assert fedbai.bit_precision(0.25) == 2
    assert fedbai.encode(0.6, 2) == 2
    assert fedbai.decode(2, 2) == 0.625
    assert fedbai.lambert_w_minus1(-math.exp(-2)) == pytest.approx(-3.1462, abs=1e-3)
    lo, hi = fedbai.w_minus1_bounds(-0.1)
    assert lo <= fedbai.lambert_w_minus1(-0.1) <= hi


def test_instance_roundtrip():
    inst = fedbai.target_detection_instance(5.0)
    assert inst.best_arm == (0, 0)
    assert fedbai.heterogeneity_index(inst, 0, 1) == pytest.approx(5.0)
    back = fedbai.ProblemInstance.from_dict(inst.to_dict())
    assert back.to_dict() == inst.to_dict()
    assert fedbai.round_bounds(inst)["best_set"] == 0


def test_fedsel_deterministic():
    inst = fedbai.ProblemInstance.from_dict({
        "arm_sets": [[{"kind": "point_mass", "mean": 0.9}, {"kind": "point_mass", "mean": 0.3}],
                     [{"kind": "point_mass", "mean": 0.8}, {"kind": "point_mass", "mean": 0.7}]],
        "groups": {"0": [0], "1": [1]}, "delta": 0.1, "H": 20})
    a = fedbai.run_fedsel(inst, seed=3, trace_means=True)
    b = fedbai.run_fedsel(inst, seed=3, trace_means=True)
    assert a["output_arm"] == (0, 0)
    assert a["rounds"] == 967
    assert a["transcript"] == b["transcript"]
    assert a["good_event_held"]
    first = json.loads(a["transcript"].splitlines()[0])
    assert first["payload_kind"] == "LocalReport"


def test_robust_and_p2p():
    inst = fedbai.target_detection_instance(1.0).with_group_size(4)
    r = fedbai.run_robust_fedsel(inst, seed=1, f=1, adversaries=[0, 4, 8], strategy="wrong-arm")
    assert r["groups_correctly_voted"] == 3
    p = fedbai.run_p2p(inst, seed=1, f=1, adversaries=[0], strategy="silent")
    assert p["outputs"][0] is None
    assert p["all_honest_correct"]


def test_errors_are_translated():
    with pytest.raises(fedbai.FedbaiError, match="OutOfRange"):
        fedbai.target_detection_instance(20.0)
    with pytest.raises(fedbai.FedbaiError, match="NoMajority"):
        fedbai.majority_vote([1, 2, 3])
    graph = fedbai.bridged_cliques_graph()
    assert not fedbai.is_strongly_r_robust(graph, [4], 4)


def test_experiment_summary():
    csv = fedbai.run_experiment(sigmas=[1.0, 5.0], trials=2)
    lines = csv.strip().splitlines()
    assert lines[0].startswith("protocol,sigma,H")
    assert len(lines) == 3
