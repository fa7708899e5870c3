#!/usr/bin/env python3
"""Smoke tests for the _ranlab extension module.

Usage: test_smoke.py <dir-containing-_ranlab>
"""
import json
import math
import sys
import tempfile

if len(sys.argv) > 1:
    sys.path.insert(0, sys.argv[1])

import _ranlab as rl  # noqa: E402


def test_action_spaces():
    table = rl.feasible_allocations()
    assert len(table) == 16
    assert table[0] == [30, 9, 11]
    assert len(rl.build_action_space(["ran_slicing"])) == 16
    assert len(rl.build_action_space(["scheduling"])) == 27
    joint = rl.build_action_space(["scheduling", "ran_slicing"])
    assert len(joint) == 43
    assert "slicing" in joint[0] and "sched" not in joint[0]
    assert "sched" in joint[16]


def test_rewards():
    w = rl.default_weights()
    got = rl.global_reward([4.0, 20.0, 0.0], w)
    assert abs(got - (72.0440333 * 4 + 0.229357798 * 20)) < 1e-9
    assert rl.derive_weight(456, 304, "maximize") == 1.5
    assert rl.prb_ratio(30, 60) == 0.5
    assert rl.prb_ratio(5, 0) == 1.0


def test_ppo_dqn_arithmetic():
    assert rl.ppo_clip_term(1.0, 2.0, 0.2) == 2.0
    assert abs(rl.ppo_clip_term(1.5, 1.0, 0.2) - 1.2) < 1e-12
    assert abs(rl.ppo_clip_term(0.5, -1.0, 0.2) - (-0.8)) < 1e-12
    assert abs(rl.dqn_td_target(1.0, 0.95, [1.0, 2.0]) - 2.9) < 1e-12


def test_codec():
    frame = rl.encode_frame(7, True)
    assert frame[4:] == b'{"accepted":true,"action_seq":7,"type":"control_ack"}'
    decoded = rl.decode_frame(frame)
    assert decoded["status"] == "Ok"
    assert decoded["consumed"] == len(frame)
    assert rl.decode_frame(frame[:3])["status"] == "NeedMoreData"
    assert rl.decode_frame(b"\x7f\x00\x00\x00")["status"] == "FrameTooLarge"


def test_intent():
    spec = rl.parse_intent(json.dumps({
        "intent": {
            "slices": [
                {"name": "embb", "reward": "MaxAverageReward",
                 "reward_KPIs": ["dl_brate"]},
            ],
            "actions": ["ran_slicing"],
            "global_reward_type": "NestedSumWeightedReward",
            "global_reward_weights": [1.0],
        }
    }))
    assert spec["slices"][0]["name"] == "embb"
    assert spec["actions"] == ["ran_slicing"]


def test_simulator():
    rows = rl.simulate_windows(seed=5, profile_id=2, windows=4, window_ms=250)
    assert len(rows) == 12
    slices = {r["slice"] for r in rows}
    assert slices == {"embb", "mmtc", "urllc"}
    again = rl.simulate_windows(seed=5, profile_id=2, windows=4, window_ms=250)
    assert rows == again  # deterministic per seed
    assert rl.median([1.0, 2.0, 3.0, 4.0]) == 2.5


def test_baseline_run():
    scenario = {"duration_s": 2.0, "seed": 9, "timer_set": "set1",
                "traffic_profile": 1}
    with tempfile.TemporaryDirectory() as tmp:
        a = rl.run_baseline(json.dumps(scenario), tmp + "/a")
        b = rl.run_baseline(json.dumps(scenario), tmp + "/b")
    assert a["digest"] == b["digest"]
    assert math.isfinite(a["medians"]["embb/dl_brate"])


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    main()
