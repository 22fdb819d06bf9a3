"""Shared plumbing for party state machines.

A party is a generator (see :mod:`icnoise.channel`).  ``Party`` keeps the
tentative transcript ``T`` and the length ``star`` of its verified prefix,
so the verified transcript is always ``T[:star]``.  Channel operations go
through :meth:`Party.send` / :meth:`Party.listen`, which track the party's
own step counter and enforce an optional hard deadline: an operation that
would cross it is clipped and :class:`Deadline` is raised at the deadline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bitcodec import HashFamily, digest
from .bitcodec.gf import random_element
from .channel import Listen, Send
from .protocol import ALICE, PaddedProtocol, Transcript


class Deadline(Exception):
    pass


@dataclass
class RoundRecord:
    iteration: int
    start: int
    end: int = -1
    size: int = 0
    m_before: int = 0
    m_after: int = 0
    star_before: int = 0
    star_after: int = 0
    outcome: str = ""


@dataclass
class SentRecord:
    start: int
    payload: bytes
    snapshot: bytes | None = None


class Party:
    def __init__(self, role: int, proto: PaddedProtocol, rng: np.random.Generator):
        self.role = role
        self.proto = proto
        self.rng = rng
        self.step = 0
        self.deadline: int | None = None
        self.T = Transcript()
        self.star = 0
        self.m = 0
        self.r = 0
        self.iteration = 0
        self.terminated = False
        self.gave_up = False
        self.in_round = False
        self.rounds: list[RoundRecord] | None = None  # set by the harness to record rounds
        self.hook = None  # harness callback: hook(party, event, **info)
        self.last_sent: dict[str, SentRecord] = {}

    @property
    def name(self) -> str:
        return "alice" if self.role == ALICE else "bob"

    @property
    def L(self) -> int:
        return self.proto.L

    # -- channel operations ---------------------------------------------
    def send(self, bits):
        n = len(bits)
        if self.deadline is not None and self.step + n > self.deadline:
            cut = self.deadline - self.step
            if cut > 0:
                yield Send(list(bits[:cut]))
            self.step = self.deadline
            raise Deadline
        yield Send(bits)
        self.step += n

    def listen(self, n: int):
        if self.deadline is not None and self.step + n > self.deadline:
            cut = self.deadline - self.step
            if cut > 0:
                yield Listen(cut)
            self.step = self.deadline
            raise Deadline
        got = yield Listen(n)
        self.step += n
        return got

    def send_random(self, n: int):
        if n > 0:
            yield from self.send(self.rng.integers(0, 2, n, dtype=np.uint8).tolist())

    def send_message(self, kind: str, word, payload, snapshot: bytes | None = None):
        """Send a codeword, remembering its payload for the harness's bad-event checks."""
        if self.hook is not None:
            self.last_sent[kind] = SentRecord(self.step, bytes(np.asarray(payload, np.uint8)), snapshot)
        yield from self.send(word.tolist() if isinstance(word, np.ndarray) else list(word))

    def emit(self, event: str, **info):
        if self.hook is not None:
            self.hook(self, event, **info)

    # -- transcript helpers ---------------------------------------------
    def fingerprint_bits(self, family: HashFamily, nbits: int | None = None) -> np.ndarray:
        """seed || digest of ``T[:nbits]`` as a bit array of width 2k."""
        k = family.k
        seed = random_element(self.rng, k)
        t = self.T.to_array(nbits)
        if t.size > family.max_bits:
            d = random_element(self.rng, k)  # over-long transcript: fingerprint can never match
        else:
            d = digest(family, seed, t)
        v = (seed << k) | d
        return np.array([(v >> (2 * k - 1 - i)) & 1 for i in range(2 * k)], dtype=np.uint8)

    def fingerprint_matches(self, family: HashFamily, payload) -> bool:
        k = family.k
        v = 0
        for b in payload:
            v = (v << 1) | int(b)
        seed, d = v >> k, v & ((1 << k) - 1)
        t = self.T.to_array()
        return t.size <= family.max_bits and digest(family, seed, t) == d

    def simulate(self, steps: int, rho: int = 1):
        """Run protocol positions for ``steps`` channel steps, each bit sent ``rho`` times.

        Sent bits are appended as computed; received groups are
        majority-decoded (ties to 0) and appended unconditionally.  Steps
        left over after ``steps // rho`` positions are filled with zeros by
        whoever owns the next position and ignored by the listener.
        """
        nbits = steps // rho
        proto, T, role = self.proto, self.T, self.role
        done = 0
        while done < nbits:
            i = len(T.bits)
            owner = proto.direction(i)
            run = 1
            while done + run < nbits and proto.direction(i + run) == owner:
                run += 1
            if owner == role:
                out = []
                for _ in range(run):
                    b = proto.bit(role, T)
                    T.append(b)
                    out.extend([b] * rho if rho > 1 else (b,))
                yield from self.send(out)
            else:
                got = yield from self.listen(run * rho)
                if rho == 1:
                    for b in got:
                        T.append(b)
                else:
                    for g in range(run):
                        T.append(1 if 2 * sum(got[g * rho:(g + 1) * rho]) > rho else 0)
            done += run
        left = steps - nbits * rho
        if left:
            if proto.direction(len(T.bits)) == role:
                yield from self.send([0] * left)
            else:
                yield from self.listen(left)

    def output(self):
        """Verified transcript cut to L bits, or None when it is too short."""
        if self.star < self.L:
            return None
        return self.T.to_array(self.L)

    # -- round bookkeeping ----------------------------------------------
    def begin_round(self, size: int):
        self.in_round = True
        if self.rounds is not None:
            self.rounds.append(RoundRecord(self.iteration, self.step, size=size, m_before=self.m,
                                           star_before=self.star))

    def end_round(self, outcome: str):
        self.in_round = False
        if self.rounds is not None:
            rec = self.rounds[-1]
            rec.end, rec.m_after, rec.star_after, rec.outcome = self.step, self.m, self.star, outcome
        self.emit("round_end", outcome=outcome)


def is_pow4(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0 and (x.bit_length() - 1) % 2 == 0
