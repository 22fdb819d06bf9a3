"""Driver for the unknown-noise scheme and round classification.

Iteration 0 is the adaptive-round scheme, hard-stopped at global step
``12L``; a party whose loop ran out of error budget before then transmits
random bits until that step.  Iterations ``j = 1, 2, ...`` follow with the
growing parameter schedule until the party terminates or ``max_iterations``
is exhausted (reported as a give-up, never as an output).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bounded import BoundedAlice, BoundedBob
from .iteration import IterationAlice, IterationBob
from .machine import Deadline, RoundRecord
from .params import SchemeConfig
from .protocol import ALICE, PaddedProtocol, ProtocolSpec


class _SchemeDriver:
    config: SchemeConfig

    def run(self):
        cfg = self.config
        self.deadline = cfg.iteration0_len
        try:
            out = yield from self.alg1()
            if self.terminated:
                return out
            yield from self.send_random(cfg.iteration0_len - self.step)
        except Deadline:
            pass
        self.deadline = None
        if self.in_round:
            self.end_round("cut")
        if self.role == ALICE:
            self.T.truncate(self.star)
        for j in range(1, cfg.max_iterations + 1):
            out = yield from self.iteration_j(cfg.iteration(j))
            if self.terminated:
                return out
        self.gave_up = True
        return None


class SchemeAlice(_SchemeDriver, BoundedAlice, IterationAlice):
    def __init__(self, config: SchemeConfig, proto: PaddedProtocol, rng: np.random.Generator):
        BoundedAlice.__init__(self, config.alg1, proto, rng)
        self.config = config


class SchemeBob(_SchemeDriver, BoundedBob, IterationBob):
    def __init__(self, config: SchemeConfig, proto: PaddedProtocol, rng: np.random.Generator):
        BoundedBob.__init__(self, config.alg1, proto, rng)
        self.config = config


def padded_protocol(spec: ProtocolSpec, config: SchemeConfig, padding_seed: int) -> PaddedProtocol:
    a = config.alg1
    return PaddedProtocol(spec, a.Lpad, padding_seed, a.max_transcript)


# -- round classification ----------------------------------------------

PROGRESSIVE, CORRUPTED, WASTED = "progressive", "corrupted", "wasted"


@dataclass
class PhaseStats:
    phase: int
    rounds: int = 0
    wasted: int = 0
    corrupted: int = 0
    progressive: int = 0
    delta: int | None = None  # m_a - m_b when the phase ended


@dataclass
class Classification:
    labels: list = field(default_factory=list)
    phases: dict = field(default_factory=dict)


def _flips_in(flip_steps: list, start: int, end: int) -> int:
    import bisect
    return bisect.bisect_left(flip_steps, end) - bisect.bisect_left(flip_steps, start)


def classify_rounds(alice_rounds: list[RoundRecord], flip_steps: list,
                    bob_m_at: dict | None = None, R0: int | None = None) -> Classification:
    """Label Alice's adaptive rounds and collect per-phase statistics.

    A round is *progressive* if her verified transcript grew (or she
    terminated), *corrupted* if the ledger charged a flip inside it, and
    *wasted* otherwise.  Phase ``p`` holds the rounds of size ``R0 / 2^p``.
    ``bob_m_at`` maps a step to Bob's error count then, for the phase-end
    difference.
    """
    out = Classification()
    rounds = [r for r in alice_rounds if r.iteration == 0 and r.end >= 0]
    if not rounds:
        return out
    R0 = R0 or max(r.size for r in rounds)
    for r in rounds:
        if r.star_after > r.star_before or r.outcome == "terminate":
            lab = PROGRESSIVE
        elif _flips_in(flip_steps, r.start, r.end):
            lab = CORRUPTED
        else:
            lab = WASTED
        out.labels.append(lab)
        phase = (R0 // r.size).bit_length() - 1
        st = out.phases.setdefault(phase, PhaseStats(phase))
        st.rounds += 1
        setattr(st, lab, getattr(st, lab) + 1)
        if bob_m_at is not None and r.end in bob_m_at:
            st.delta = r.m_after - bob_m_at[r.end]
    return out
