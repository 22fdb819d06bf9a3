"""Adversary strategies.

An adversary answers :meth:`Adversary.decide_span` with a sparse list of
``(offset, action)`` pairs for a span of steps in which neither party changes
intent (see :mod:`icnoise.channel`).  Strategies that only need per-step
decisions can override :meth:`Adversary.decide` instead.

All strategies except :class:`MitmPublic` work from the bit-blind view.
They may use the public algorithm and parameters (``SchemeConfig``) but
never party randomness.  Budgets are debited per requested charge, which
can only overcount what the ledger charges.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .channel import (BOTH_SENDING, BOTH_SILENT, FLIP, ONE_SENDING, PASS, SET0, SET1, Listen,
                      PublicView, Send)
from .params import SchemeConfig


class Adversary:
    needs_public = False

    def __init__(self, budget: int | None = None):
        self.budget = budget
        self.spent = 0

    def take(self, n: int = 1) -> int:
        """Reserve up to ``n`` charges from the budget; returns how many were granted."""
        if self.budget is None:
            self.spent += n
            return n
        got = max(0, min(n, self.budget - self.spent))
        self.spent += got
        return got

    @property
    def exhausted(self) -> bool:
        return self.budget is not None and self.spent >= self.budget

    def decide(self, view) -> int:
        return PASS

    def decide_span(self, view) -> list:
        out = []
        for off in range(view.length):
            v = type(view)(**{**_fields(view), "step": view.step + off, "length": 1,
                               "fresh_silence": view.fresh_silence and off == 0})
            if isinstance(view, PublicView):
                v.alice_bits = view.alice_bits[off:off + 1] if view.alice_bits else None
                v.bob_bits = view.bob_bits[off:off + 1] if view.bob_bits else None
            code = self.decide(v)
            if code != PASS:
                out.append((off, code))
        return out


def _fields(view) -> dict:
    return {name: getattr(view, name) for name in view.__dataclass_fields__}


class NoAdversary(Adversary):
    def decide_span(self, view):
        return []


class IidFlip(Adversary):
    """Flip every active step (and toggle every continuing silent step) with probability ``rate``."""

    def __init__(self, rate: float, rng: np.random.Generator, budget: int | None = None):
        super().__init__(budget)
        self.rate = rate
        self.rng = rng

    def decide_span(self, view):
        if self.rate <= 0 or view.activity == BOTH_SENDING or self.exhausted:
            return []
        hits = np.flatnonzero(self.rng.random(view.length) < self.rate)
        if view.activity == BOTH_SILENT and view.fresh_silence:
            hits = hits[hits > 0]
        return [(int(o), FLIP) for o in hits[: self.take(len(hits))]]


class Burst(Adversary):
    """Corrupt every chargeable step in ``[start, start + length)``."""

    def __init__(self, start: int, length: int, budget: int | None = None):
        super().__init__(budget)
        self.start, self.length = start, length

    def decide_span(self, view):
        if view.activity == BOTH_SENDING:
            return []
        lo = max(self.start, view.step)
        hi = min(self.start + self.length, view.step + view.length)
        offs = [s - view.step for s in range(lo, hi)]
        if view.activity == BOTH_SILENT and view.fresh_silence:
            offs = [o for o in offs if o > 0]
        return [(o, FLIP) for o in offs[: self.take(len(offs))]]


class _Scheduled(Adversary):
    """Flips at precomputed channel steps; the schedule is built from public parameters."""

    def __init__(self, budget: int):
        super().__init__(budget)
        self.targets: list[int] = []
        self._i = 0

    def decide_span(self, view):
        out = []
        end = view.step + view.length
        t = self.targets
        while self._i < len(t) and t[self._i] < view.step:
            self._i += 1
        j = self._i
        while j < len(t) and t[j] < end:
            off = t[j] - view.step
            if view.activity != BOTH_SENDING and not (view.activity == BOTH_SILENT and view.fresh_silence and off == 0):
                if self.take() == 0:
                    break
                out.append((off, FLIP))
            j += 1
        self._i = j
        return out


def _alg1_round_starts(cfg: SchemeConfig, rounds: int):
    """(start, size) of Alice's first ``rounds`` rounds when every one of them fails."""
    a = cfg.alg1
    s, m = 0, 0
    out = []
    while len(out) < rounds and m < a.mMax and s < cfg.iteration0_len:
        r = a.round_size(m)
        out.append((s, r))
        s += r
        m += 1
    return out


class SyncTargeted(_Scheduled):
    """Flip the first bit of Alice's sync message in each of the first ``budget`` rounds."""

    def __init__(self, cfg: SchemeConfig, budget: int):
        super().__init__(budget)
        self.targets = [s for s, _ in _alg1_round_starts(cfg, budget)]


class FingerprintTargeted(_Scheduled):
    """Spoil Bob's fingerprint every round until the budget runs out.

    Adaptive rounds: flip the first bit of the fingerprint slot.  Iteration
    ``j``: flip one bit in each of ``radius + 1`` distinct Reed-Solomon
    symbols, the cheapest corruption the decoder cannot undo; a final
    partial attempt spends whatever budget is left.
    """

    def __init__(self, cfg: SchemeConfig, budget: int):
        super().__init__(budget)
        F = cfg.F
        targets = [s + r - F for s, r in _alg1_round_starts(cfg, cfg.alg1.mMax)][:budget]
        left = budget - len(targets)
        j = 1
        while left > 0 and j <= cfg.max_iterations:
            it = cfg.iteration(j)
            base = cfg.iteration_start(j)
            per = it.fp_codec.ecc.radius + 1
            slot = (it.c + 1) * it.Fj
            for i in range(it.Nj):
                n = min(per, left)
                s0 = base + i * it.round_len + slot
                targets.extend(s0 + 8 * q for q in range(n))
                left -= n
                if left <= 0:
                    break
            j += 1
        self.targets = targets


class SilenceSpoofer(Adversary):
    """Fill silent spans with an alternating pattern so silence never looks like silence."""

    def decide_span(self, view):
        if view.activity != BOTH_SILENT or self.exhausted:
            return []
        out = []
        first = 0
        if view.fresh_silence:
            out.append((0, SET1))
            first = 1
        n = self.take(view.length - first)
        out.extend((o, FLIP) for o in range(first, first + n))
        return out


class FlipPattern(Adversary):
    """Act at exactly the given steps: flip, set the free silent bit to 1, or toggle silence."""

    def __init__(self, steps):
        super().__init__(None)
        self.steps = sorted(set(steps))

    def decide_span(self, view):
        out = []
        for s in self.steps:
            if view.step <= s < view.step + view.length:
                off = s - view.step
                if view.activity == BOTH_SENDING:
                    continue
                if view.activity == BOTH_SILENT and view.fresh_silence and off == 0:
                    out.append((off, SET1))
                else:
                    out.append((off, FLIP))
        return out


def flip_patterns(window: int, max_flips: int):
    """All step sets of size 1..max_flips inside ``[0, window)``."""
    for k in range(1, max_flips + 1):
        yield from combinations(range(window), k)


def pattern_count(window: int, max_flips: int) -> int:
    from math import comb
    return sum(comb(window, k) for k in range(1, max_flips + 1))


class MitmBlind(Adversary):
    """Bit-blind impersonation attempt: random flips on active steps, random silent bits."""

    def __init__(self, rng: np.random.Generator, budget: int | None = None):
        super().__init__(budget)
        self.rng = rng

    def decide_span(self, view):
        if view.activity == BOTH_SENDING or self.exhausted:
            return []
        coin = self.rng.integers(0, 2, view.length)
        out = []
        if view.activity == BOTH_SILENT and view.fresh_silence:
            out.append((0, SET0 + int(coin[0])))
            coin[0] = 0
        hits = np.flatnonzero(coin)
        out.extend((int(o), FLIP) for o in hits[: self.take(len(hits))])
        return out


class MitmPublic(Adversary):
    """Man in the middle on a public channel.

    Runs a fake Alice on a protocol whose Alice input differs, in lockstep
    with the real channel, and rewrites every bit Bob hears so that it
    matches what the fake Alice would have sent (silence where she is
    silent).  The fake Alice hears Bob's real transmissions.
    """

    needs_public = True

    def __init__(self, fake_alice):
        super().__init__(None)
        self.fake = fake_alice
        self._gen = fake_alice.run()
        self._op = None
        self._pos = 0
        self._rx = None
        self._done = False
        self._advance(None)

    def _advance(self, value):
        try:
            op = self._gen.send(value)
            while len(op) == 0:
                op = self._gen.send([] if isinstance(op, Listen) else None)
        except StopIteration:
            self._done = True
            self._op = None
            return
        self._op, self._pos = op, 0
        self._rx = [] if isinstance(op, Listen) else None

    def _fake_step(self, heard: int):
        """Advance the fake Alice one step; return her bit or None when she is silent."""
        if self._done:
            return None
        op = self._op
        if isinstance(op, Send):
            bit = op.bits[self._pos]
        else:
            bit = None
            self._rx.append(heard)
        self._pos += 1
        if self._pos >= len(op):
            self._advance(self._rx)
        return bit

    def decide_span(self, view: PublicView):
        out = []
        cur = view.silent_bit
        for off in range(view.length):
            bob_bit = view.bob_bits[off] if view.bob_sending else None
            heard = bob_bit if bob_bit is not None else (cur if cur is not None else 0)
            want = self._fake_step(heard)
            if view.activity == ONE_SENDING and view.alice_sending and not view.bob_sending:
                target = 0 if want is None else want
                if view.alice_bits[off] != target:
                    out.append((off, FLIP))
                cur = None
            elif view.activity == BOTH_SILENT:
                target = 0 if want is None else want
                fresh = view.fresh_silence and off == 0
                if fresh or cur != target:
                    out.append((off, SET0 + target))
                cur = target
            else:
                cur = None
        return out


def parse_adversary(text: str, cfg: SchemeConfig, rng: np.random.Generator, *, public: bool = False,
                    fake_alice_factory=None) -> Adversary:
    """Build a strategy from CLI syntax: ``none``, ``iid:RATE``, ``burst:S,N``, ``sync:B``,
    ``fp:B``, ``silence:B``, ``blind:B`` or ``mitm``."""
    kind, _, arg = text.partition(":")
    if kind == "none":
        return NoAdversary()
    if kind == "iid":
        rate, _, budget = arg.partition(",")
        return IidFlip(float(rate), rng, int(budget) if budget else None)
    if kind == "burst":
        s, n = arg.split(",")
        return Burst(int(s), int(n))
    if kind == "sync":
        return SyncTargeted(cfg, int(arg))
    if kind == "fp":
        return FingerprintTargeted(cfg, int(arg))
    if kind == "silence":
        return SilenceSpoofer(int(arg))
    if kind == "blind":
        return MitmBlind(rng, int(arg) if arg else None)
    if kind == "mitm":
        if not public:
            raise ValueError("the mitm strategy needs --public-channel")
        if fake_alice_factory is None:
            raise ValueError("mitm needs a fake Alice")
        return MitmPublic(fake_alice_factory())
    raise ValueError(f"unknown adversary {text!r}")
