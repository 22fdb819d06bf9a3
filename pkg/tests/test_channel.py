import io
import json

import pytest
from hypothesis import given, settings, strategies as st

from icnoise.adversary import Adversary, FlipPattern, NoAdversary
from icnoise.channel import (BOTH_SENDING, BOTH_SILENT, FLIP, ONE_SENDING, SET0, SET1, AdversaryView, Engine,
                             Listen, PublicView, Send, replay_trace)


def sender(bits):
    def gen():
        yield Send(list(bits))
        return "sent"
    return gen()


def listener(n, out):
    def gen():
        got = yield Listen(n)
        out.extend(got)
        return got
    return gen()


def silent_pair(n):
    a, b = [], []
    return listener(n, a), listener(n, b), a, b


class Script(Adversary):
    """Per-step action table keyed by absolute step."""

    def __init__(self, table):
        super().__init__()
        self.table = table
        self.views = []

    def decide_span(self, view):
        self.views.append(view)
        return [(s - view.step, c) for s, c in self.table.items() if view.step <= s < view.step + view.length]


def test_one_sender_flip_costs_one():
    got = []
    adv = Script({1: FLIP, 3: FLIP})
    res = Engine(sender([1, 1, 1, 1]), listener(4, got), adv, 100).run()
    assert got == [1, 0, 1, 0]
    assert res.ledger.flips == 2 and res.ledger.flip_steps == [1, 3]
    assert res.outputs[0] == "sent" and not res.timeout


def test_silence_first_bit_free_then_changes_cost():
    # silent steps deliver 0,0,1,1,1: the free first bit plus one paid change
    a, b, ra, rb = silent_pair(5)
    adv = Script({0: SET0, 2: SET1, 3: SET1})
    res = Engine(a, b, adv, 100).run()
    assert ra == rb == [0, 0, 1, 1, 1]
    assert res.ledger.flips == 1 and res.ledger.silence_charges == 1


def test_silence_default_is_zero_and_first_bit_settable_free():
    a, b, ra, _ = silent_pair(3)
    assert Engine(a, b, NoAdversary(), 10).run().ledger.flips == 0 and ra == [0, 0, 0]
    a, b, ra, _ = silent_pair(3)
    res = Engine(a, b, Script({0: SET1}), 10).run()
    assert ra == [1, 1, 1] and res.ledger.flips == 0


def test_illegal_actions_are_dropped():
    got = []
    res = Engine(sender([0, 0]), listener(2, got), Script({0: SET1}), 10).run()
    assert got == [0, 0] and res.ledger.flips == 0 and res.ledger.illegal_actions == 1
    a, b, ra, _ = silent_pair(2)
    res = Engine(a, b, Script({0: FLIP}), 10).run()
    assert ra == [0, 0] and res.ledger.illegal_actions == 1


def test_collision_delivers_nothing_chargeable():
    res = Engine(sender([1, 0, 1]), sender([0, 1, 1]), Script({1: FLIP}), 10).run()
    assert res.ledger.flips == 0 and res.ledger.illegal_actions == 1


def test_silence_run_resets_after_activity():
    # silent, then a send, then silent again: the second silent run has its own free bit
    def alice():
        yield Listen(2)
        yield Send([1])
        yield Listen(2)

    got = []

    def bob():
        got.extend((yield Listen(5)))
    adv = Script({0: SET1, 3: SET0, 4: SET1})
    res = Engine(alice(), bob(), adv, 20).run()
    assert got == [1, 1, 1, 0, 1]
    assert res.ledger.flips == 1  # only step 4


def test_bit_blind_view_has_no_bits():
    got = []
    adv = Script({})
    Engine(sender([1, 0, 1]), listener(3, got), adv, 10).run()
    v = adv.views[0]
    assert type(v) is AdversaryView
    assert set(v.__dataclass_fields__) == {"step", "length", "activity", "fresh_silence"}


def test_public_view_exposes_wire_bits():
    got = []
    adv = Script({})
    Engine(sender([1, 0, 1]), listener(3, got), adv, 10, public=True).run()
    v = adv.views[0]
    assert isinstance(v, PublicView) and v.alice_bits == [1, 0, 1] and v.bob_bits is None


@settings(max_examples=40)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=40), st.integers(0, 2 ** 16))
def test_privacy_views_independent_of_content(bits, seed):
    """A spy sees the same views whatever bits Alice sends."""
    views = []
    for payload in (bits, [1 - b for b in bits]):
        spy = Script({})
        Engine(sender(payload), listener(len(bits), []), spy, 100).run()
        views.append([(v.step, v.length, v.activity, v.fresh_silence) for v in spy.views])
    assert views[0] == views[1]


def test_timeout_and_activity_tags():
    got = []
    res = Engine(sender([1] * 10), listener(10, got), NoAdversary(), 4).run()
    assert res.timeout and res.steps == 4


def test_trace_replay_roundtrip():
    buf = io.StringIO()

    def alice():
        yield Send([1, 0, 1, 1])
        yield Listen(4)

    def bob():
        yield Listen(4)
        yield Listen(4)
    adv = Script({1: FLIP, 5: SET1, 6: SET0})
    res = Engine(alice(), bob(), adv, 50, trace=buf).run()
    lines = buf.getvalue().splitlines()
    recs = [json.loads(x) for x in lines]
    assert recs[0]["activity"] == ONE_SENDING and recs[4]["activity"] == BOTH_SILENT
    rep = replay_trace(lines)
    assert rep["ok"]
    assert res.ledger.flips == 3


def test_replay_detects_tampering():
    buf = io.StringIO()
    Engine(sender([1, 1]), listener(2, []), Script({0: FLIP}), 10, trace=buf).run()
    lines = buf.getvalue().splitlines()
    rec = json.loads(lines[0])
    rec["charged"] = 0
    lines[0] = json.dumps(rec)
    assert not replay_trace(lines)["ok"]


def test_flip_pattern_actions():
    a, b, ra, _ = silent_pair(4)
    res = Engine(a, b, FlipPattern([0, 2]), 10).run()
    assert ra == [1, 1, 0, 0] and res.ledger.flips == 1


def test_labeler_groups_flips():
    got = []
    res = Engine(sender([0] * 6), listener(6, got), Script({0: FLIP, 4: FLIP}), 20,
                 labeler=lambda s: s // 3).run()
    assert res.ledger.flips_by_iteration == {0: 1, 1: 1}


def test_max_steps_validation():
    with pytest.raises(ValueError):
        Engine(sender([1]), listener(1, []), NoAdversary(), 0)


def test_both_sending_tag():
    adv = Script({})
    Engine(sender([1]), sender([0]), adv, 5).run()
    assert adv.views[0].activity == BOTH_SENDING
