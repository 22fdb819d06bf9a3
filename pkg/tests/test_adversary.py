from math import comb

import numpy as np
import pytest

from icnoise.adversary import (Burst, FingerprintTargeted, IidFlip, MitmBlind, NoAdversary, SilenceSpoofer,
                               SyncTargeted, flip_patterns, parse_adversary, pattern_count)
from icnoise.channel import Engine, Listen, Send
from icnoise.harness import RunSpec, run_one
from icnoise.params import SchemeConfig, preset


@pytest.fixture(scope="module")
def cfg():
    return SchemeConfig.build(4096)


def long_send(n):
    def a():
        yield Send([0] * n)

    def b():
        yield Listen(n)
    return a(), b()


@pytest.mark.parametrize("make", [
    lambda r: IidFlip(0.05, r, budget=7),
    lambda r: Burst(10, 500, budget=7),
    lambda r: MitmBlind(r, budget=7),
])
def test_budgets_cap_the_ledger(make):
    a, b = long_send(5000)
    res = Engine(a, b, make(np.random.default_rng(0)), 10000).run()
    assert res.ledger.flips == 7


def test_silence_spoofer_budget():
    def quiet():
        yield Listen(300)
    res = Engine(quiet(), quiet(), SilenceSpoofer(50), 1000).run()
    assert res.ledger.flips == 50 and res.ledger.silence_charges == 50


def test_iid_rate_roughly_right():
    a, b = long_send(20000)
    res = Engine(a, b, IidFlip(0.01, np.random.default_rng(1)), 30000).run()
    assert 140 < res.ledger.flips < 260


def test_sync_targets_follow_round_schedule(cfg):
    adv = SyncTargeted(cfg, 5)
    assert adv.targets == [0, 1024, 2048, 3072, 3584]


def test_fp_targets(cfg):
    adv = FingerprintTargeted(cfg, cfg.alg1.mMax + 3)
    F = cfg.F
    assert adv.targets[0] == 1024 - F
    it = cfg.iteration(1)
    base = cfg.iteration_start(1) + (it.c + 1) * it.Fj
    assert adv.targets[-3:] == [base, base + 8, base + 16]


def test_pattern_enumeration():
    assert pattern_count(256, 2) == 256 + comb(256, 2) == 32896
    assert len(list(flip_patterns(6, 2))) == pattern_count(6, 2)


def test_parse_adversary(cfg):
    r = np.random.default_rng(0)
    assert isinstance(parse_adversary("none", cfg, r), NoAdversary)
    adv = parse_adversary("iid:0.1,5", cfg, r)
    assert isinstance(adv, IidFlip) and adv.budget == 5 and adv.rate == 0.1
    assert isinstance(parse_adversary("blind:3", cfg, r), MitmBlind)
    with pytest.raises(ValueError):
        parse_adversary("mitm", cfg, r)
    with pytest.raises(ValueError):
        parse_adversary("bogus", cfg, r)


def test_mitm_needs_public_channel():
    with pytest.raises(ValueError):
        run_one(RunSpec(preset("tiny"), adversary="mitm"), 0)


def test_mitm_public_steers_bob():
    m = run_one(RunSpec(preset("tiny"), adversary="mitm", public=True, max_steps=20 * 512), 0)
    assert m.notes["bob_output_is_alt"]
    assert not m.success_bob
