import json
import math

import pytest

from icnoise.harness import (RunMetrics, RunSpec, exhaustive_oracle, fit_overhead, metrics_line, run_one,
                             shape_term, summarize)
from icnoise.params import SchemeConfig, preset


@pytest.fixture(scope="module")
def tiny():
    return preset("tiny")


def test_noise_free_run(tiny):
    m = run_one(RunSpec(tiny, check_lemmas=True), 0)
    assert m.success and not m.violations and not m.any_bad_event
    assert m.T == 0 and m.iteration_alice == 0
    assert m.L_prime <= 12 * tiny.L
    assert m.rate == pytest.approx(tiny.L / m.L_prime)


def test_runs_are_deterministic(tiny):
    a = run_one(RunSpec(tiny, adversary="iid:0.01"), 3).as_dict()
    b = run_one(RunSpec(tiny, adversary="iid:0.01"), 3).as_dict()
    assert a == b


def test_silent_failure_definition():
    base = dict(seed=0, L=1, F=1, beta=1, adversary="x", T=0, steps=1, steps_alice=1, steps_bob=1,
                success_alice=True, success_bob=False, iteration_alice=0, iteration_bob=0,
                bad_events={"hash_collision": False}, timeout=False, gave_up=False, flips_by_iteration={},
                silence_charges=0, illegal_actions=0)
    assert RunMetrics(**base).silent_failure
    assert not RunMetrics(**{**base, "bad_events": {"hash_collision": True}}).silent_failure
    assert not RunMetrics(**{**base, "timeout": True}).silent_failure
    assert not RunMetrics(**{**base, "success_bob": True}).silent_failure


def test_shape_term_and_fit():
    assert shape_term(1024, 0) == pytest.approx(math.sqrt(1024 * 10))
    pts = [(1024, 0, 1024 + 2 * shape_term(1024, 0)), (1024, 10, 1024 + 3 * shape_term(1024, 10))]
    assert fit_overhead(pts) == pytest.approx(3.0)
    assert fit_overhead([]) == 0.0


def test_summary_and_metrics_line(tiny):
    runs = [run_one(RunSpec(tiny), s) for s in range(3)]
    s = summarize(runs)
    assert s["runs"] == 3 and s["successes"] == 3 and s["silent_failures"] == 0
    rec = json.loads(metrics_line(runs[0]))
    assert rec["success"] and rec["L_prime"] == runs[0].L_prime


def test_oracle_small_window(tiny):
    rep = exhaustive_oracle(RunSpec(tiny), window=12, max_flips=1)
    assert rep.patterns == 13
    assert rep.ok and rep.correct + rep.flagged + rep.timeouts == 13


def test_oracle_refuses_huge_enumeration(tiny):
    with pytest.raises(ValueError):
        exhaustive_oracle(RunSpec(tiny), window=4096, max_flips=3)


def test_lemma_checks_clean_under_iid():
    cfg = SchemeConfig.build(1024)
    for s in range(3):
        m = run_one(RunSpec(cfg, adversary="iid:0.01", check_lemmas=True), s)
        assert not m.violations
        assert not m.silent_failure
