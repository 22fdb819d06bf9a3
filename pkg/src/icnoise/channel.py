"""Lockstep synchronous binary channel with adversarial flips and silence.

Parties are generator-based state machines.  A machine yields

* ``Send(bits)``  to put ``len(bits)`` bits on the wire, one per step,
* ``Listen(n)``   to listen for ``n`` steps; the generator is resumed with the
  list of received bits,

and returns its output when it terminates, after which it is silent forever.

Per-step rules:

* exactly one sender: the listener gets ``bit ^ flip``; each flip costs 1;
* nobody sends (silence): the first step of a silent run delivers a bit the
  adversary chooses for free (0 by default); every later change of the
  silent bit costs 1;
* both send: nothing is delivered and nothing can be charged.

The engine advances in spans where neither party changes its intent, so the
adversary is asked once per span and answers with a sparse list of
``(offset, action)`` pairs.  Actions that are illegal for the step type are
dropped, counted, and logged, never charged.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable

log = logging.getLogger(__name__)

PASS, FLIP, SET0, SET1 = 0, 1, 2, 3
ACTION_NAMES = {PASS: "pass", FLIP: "flip", SET0: "set0", SET1: "set1"}

BOTH_SILENT, ONE_SENDING, BOTH_SENDING = "silent", "one", "both"


class Send:
    __slots__ = ("bits",)

    def __init__(self, bits):
        self.bits = bits

    def __len__(self):
        return len(self.bits)

    def __repr__(self):
        return f"Send({len(self.bits)} bits)"


class Listen:
    __slots__ = ("n",)

    def __init__(self, n: int):
        self.n = n

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"Listen({self.n})"


@dataclass(slots=True)
class AdversaryView:
    """What a bit-blind adversary learns about a span of steps."""

    step: int
    length: int
    activity: str
    fresh_silence: bool


@dataclass(slots=True)
class PublicView(AdversaryView):
    """Span view on a public channel: intents and wire bits are visible."""

    alice_sending: bool = False
    bob_sending: bool = False
    alice_bits: list | None = None
    bob_bits: list | None = None
    silent_bit: int | None = None


@dataclass
class CostLedger:
    steps: int = 0
    flips: int = 0
    silence_charges: int = 0
    flips_by_iteration: dict = field(default_factory=dict)
    flip_steps: list = field(default_factory=list)
    illegal_actions: int = 0

    def charge(self, step: int, iteration: int, silent: bool):
        self.flips += 1
        if silent:
            self.silence_charges += 1
        self.flips_by_iteration[iteration] = self.flips_by_iteration.get(iteration, 0) + 1
        self.flip_steps.append(step)

    def as_dict(self) -> dict:
        return {
            "steps": self.steps, "flips": self.flips, "silence_charges": self.silence_charges,
            "flips_by_iteration": {str(k): v for k, v in sorted(self.flips_by_iteration.items())},
            "illegal_actions": self.illegal_actions,
        }


@dataclass
class RunResult:
    outputs: list
    ledger: CostLedger
    terminated_at: list
    timeout: bool
    steps: int


class Engine:
    """Run two party machines against an adversary until both stop or ``max_steps``."""

    def __init__(self, alice, bob, adversary, max_steps: int, *, public: bool = False,
                 labeler: Callable[[int], int] | None = None, trace=None,
                 observer: Callable[["Engine"], None] | None = None):
        if max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        self.parties = [alice, bob]
        self.adversary = adversary
        self.max_steps = max_steps
        self.public = public
        self.labeler = labeler or (lambda s: 0)
        self.trace = trace
        self.observer = observer
        self.ledger = CostLedger()
        self.step = 0
        self.silent_bit = None  # None: previous step was not silent
        self.outputs = [None, None]
        self.done = [False, False]
        self.terminated_at = [None, None]
        self._gens = [p.run() if hasattr(p, "run") else p for p in self.parties]
        self._op = [None, None]
        self._pos = [0, 0]
        self._rx = [[], []]

    # -- party plumbing -------------------------------------------------
    def _resume(self, who: int, value):
        try:
            op = self._gens[who].send(value)
            while len(op) == 0:
                op = self._gens[who].send([] if isinstance(op, Listen) else None)
        except StopIteration as stop:
            self.done[who] = True
            self.outputs[who] = stop.value
            self.terminated_at[who] = self.step
            self._op[who] = None
            return
        self._op[who] = op
        self._pos[who] = 0
        self._rx[who] = [] if isinstance(op, Listen) else None

    def _remaining(self, who: int) -> int | None:
        op = self._op[who]
        return None if op is None else len(op) - self._pos[who]

    # -- adversary plumbing ---------------------------------------------
    def _actions(self, view) -> list:
        acts = self.adversary.decide_span(view)
        if not acts:
            return []
        out = []
        for off, code in acts:
            if code == PASS:
                continue
            if not 0 <= off < view.length:
                self._illegal(view.step + off, code, "offset outside span")
                continue
            out.append((off, code))
        out.sort()
        return out

    def _illegal(self, step, code, why):
        self.ledger.illegal_actions += 1
        if self.ledger.illegal_actions <= 20:
            log.debug("illegal adversary action %s at step %d: %s", ACTION_NAMES.get(code, code), step, why)

    # -- main loop ------------------------------------------------------
    def run(self) -> RunResult:
        for who in (0, 1):
            self._resume(who, None)
        if self.observer:
            self.observer(self)
        led = self.ledger
        while not (self.done[0] and self.done[1]) and self.step < self.max_steps:
            ra, rb = self._remaining(0), self._remaining(1)
            n = self.max_steps - self.step
            if ra is not None and ra < n:
                n = ra
            if rb is not None and rb < n:
                n = rb
            sa = isinstance(self._op[0], Send)
            sb = isinstance(self._op[1], Send)
            step0 = self.step
            if sa and sb:
                view = self._view(step0, n, BOTH_SENDING, False)
                for off, code in self._actions(view):
                    self._illegal(step0 + off, code, "collision step")
                self.silent_bit = None
                if self.trace is not None:
                    self._trace_span(step0, n, BOTH_SENDING, [], None, None)
            elif sa or sb:
                snd = 0 if sa else 1
                lis = 1 - snd
                bits = self._op[snd].bits[self._pos[snd]: self._pos[snd] + n]
                view = self._view(step0, n, ONE_SENDING, False)
                acts = self._actions(view)
                rx = bits
                charged = []
                if acts:
                    rx = list(bits)
                    for off, code in acts:
                        if code != FLIP:
                            self._illegal(step0 + off, code, "set on an active step")
                            continue
                        rx[off] ^= 1
                        led.charge(step0 + off, self.labeler(step0 + off), False)
                        charged.append(off)
                if self._rx[lis] is not None:
                    self._rx[lis].extend(rx)
                self.silent_bit = None
                if self.trace is not None:
                    self._trace_span(step0, n, ONE_SENDING, charged, snd, (bits, rx))
            else:
                fresh = self.silent_bit is None
                view = self._view(step0, n, BOTH_SILENT, fresh)
                acts = self._actions(view)
                cur = 0 if fresh else self.silent_bit
                rx = []
                charged = []
                ai = 0
                for off in range(n) if acts else ():
                    while ai < len(acts) and acts[ai][0] == off:
                        code = acts[ai][1]
                        ai += 1
                        if fresh and off == 0:
                            if code == FLIP:
                                self._illegal(step0, code, "flip on the free first silent step")
                            else:
                                cur = code - SET0
                            continue
                        want = cur ^ 1 if code == FLIP else code - SET0
                        if want != cur:
                            cur = want
                            led.charge(step0 + off, self.labeler(step0 + off), True)
                            charged.append(off)
                    rx.append(cur)
                if not acts:
                    rx = [cur] * n
                self.silent_bit = cur
                for who in (0, 1):
                    if self._rx[who] is not None:
                        self._rx[who].extend(rx)
                if self.trace is not None:
                    self._trace_span(step0, n, BOTH_SILENT, charged, None, (None, rx))
            self.step += n
            for who in (0, 1):
                if self._op[who] is not None:
                    self._pos[who] += n
            for who in (0, 1):
                op = self._op[who]
                if op is not None and self._pos[who] >= len(op):
                    self._resume(who, self._rx[who])
            if self.observer:
                self.observer(self)
        led.steps = self.step
        timeout = not (self.done[0] and self.done[1])
        if self.trace is not None:
            self.trace.write(json.dumps({"summary": led.as_dict(), "timeout": timeout}) + "\n")
        return RunResult(list(self.outputs), led, list(self.terminated_at), timeout, self.step)

    def _view(self, step, n, activity, fresh):
        if not self.public:
            return AdversaryView(step, n, activity, fresh)
        bits = []
        for who in (0, 1):
            op = self._op[who]
            bits.append(op.bits[self._pos[who]: self._pos[who] + n] if isinstance(op, Send) else None)
        return PublicView(step, n, activity, fresh,
                          isinstance(self._op[0], Send), isinstance(self._op[1], Send),
                          bits[0], bits[1], self.silent_bit)

    def _trace_span(self, step0, n, activity, charged, sender, bits):
        charged = set(charged)
        for off in range(n):
            rec = {"step": step0 + off, "activity": activity}
            if sender is not None:
                rec["sender"] = "ab"[sender]
                rec["sent"] = int(bits[0][off])
            if bits is not None:
                rec["rx"] = int(bits[1][off])
            rec["charged"] = int(off in charged)
            self.trace.write(json.dumps(rec) + "\n")


def replay_trace(lines: Iterable[str]) -> dict:
    """Recompute charges from a per-step trace and compare with its summary."""
    flips = silence = steps = 0
    prev_silent = None
    recorded = None
    mismatched = []
    for line in lines:
        rec = json.loads(line)
        if "summary" in rec:
            recorded = rec["summary"]
            continue
        steps += 1
        act = rec["activity"]
        cost = 0
        if act == ONE_SENDING:
            cost = int(rec["sent"] != rec["rx"])
            prev_silent = None
        elif act == BOTH_SILENT:
            if prev_silent is not None and rec["rx"] != prev_silent:
                cost = 1
                silence += 1
            prev_silent = rec["rx"]
        else:
            prev_silent = None
        if cost != rec["charged"]:
            mismatched.append(rec["step"])
        flips += cost
    ok = recorded is not None and recorded["flips"] == flips and \
        recorded["silence_charges"] == silence and recorded["steps"] == steps and not mismatched
    return {"ok": ok, "flips": flips, "silence_charges": silence, "steps": steps,
            "recorded": recorded, "mismatched_steps": mismatched[:20]}
