"""Adaptive-round scheme for a bounded number of flips.

Each round Alice sends an F-bit sync message ``(m, log2 r, |verified|)``,
both parties run ``r - 2F`` protocol steps, and Bob answers with an F-bit
fingerprint of his tentative transcript.  Alice commits when the fingerprint
matches; otherwise both rewind, the error counter grows, and the round size
halves whenever ``1 + m`` reaches a power of four.  Bob leaves when the sync
slot arrives with all bits equal, which no codeword can produce.
"""

from __future__ import annotations

import numpy as np

from .bitcodec import bits_to_int, int_to_bits
from .machine import Party, is_pow4
from .params import Alg1Params
from .protocol import ALICE, BOB, PaddedProtocol


def pack_sync(p: Alg1Params, m: int, r: int, ts_len: int) -> np.ndarray:
    wm, wr, wt = p.sync_widths
    return np.concatenate([int_to_bits(m, wm), int_to_bits(r.bit_length() - 1, wr), int_to_bits(ts_len, wt)])


def unpack_sync(p: Alg1Params, bits) -> tuple[int, int, int]:
    wm, wr, wt = p.sync_widths
    return (bits_to_int(bits[:wm]), 1 << bits_to_int(bits[wm:wm + wr]),
            bits_to_int(bits[wm + wr:wm + wr + wt]))


class BoundedAlice(Party):
    def __init__(self, params: Alg1Params, proto: PaddedProtocol, rng: np.random.Generator):
        super().__init__(ALICE, proto, rng)
        self.alg1p = params

    def alg1(self):
        """Generator; returns the output on termination, None once m reaches mMax."""
        P = self.alg1p
        F = P.F
        self.m, self.r = 0, P.R0
        while True:
            self.begin_round(self.r)
            payload = pack_sync(P, self.m, self.r, self.star)
            yield from self.send_message("sync", P.sync_codec.encode(payload, self.rng), payload)
            yield from self.simulate(self.r - 2 * F)
            start = self.step
            w = np.array((yield from self.listen(F)), dtype=np.uint8)
            outcome = "reject"
            if P.fp_codec.is_codeword(w):
                fp = P.fp_codec.decode(w)
                self.emit("accept", kind="fp", start=start, payload=fp)
                if self.star >= self.L:
                    self.terminated = True
                    self.end_round("terminate")
                    return self.output()
                if self.fingerprint_matches(P.hash_family, fp):
                    self.emit("fp_match", start=start)
                    self.star = len(self.T)
                    self.end_round("success")
                    continue
                outcome = "mismatch"
            self.T.truncate(self.star)
            self.m += 1
            if is_pow4(1 + self.m):
                self.r //= 2
            self.end_round(outcome)
            if self.m >= P.mMax:
                return None

    def run(self):
        return (yield from self.alg1())


class BoundedBob(Party):
    def __init__(self, params: Alg1Params, proto: PaddedProtocol, rng: np.random.Generator):
        super().__init__(BOB, proto, rng)
        self.alg1p = params

    def _read_sync(self, w):
        P = self.alg1p
        if not P.sync_codec.is_codeword(w):
            return None
        payload = P.sync_codec.decode(w)
        m, r, ell = unpack_sync(P, payload)
        # only a forged codeword could carry these; treat it as noise
        if r < 2 * P.F or r > P.R0 or m >= P.mMax:
            return None
        return payload, m, r, ell

    def alg1(self):
        P = self.alg1p
        F = P.F
        self.m, self.r = 0, P.R0
        while True:
            self.begin_round(self.r)
            start = self.step
            w = np.array((yield from self.listen(F)), dtype=np.uint8)
            if w.min() == w.max():
                self.emit("silence", start=start, length=F)
                self.terminated = True
                self.end_round("terminate")
                return self.output()
            sync = self._read_sync(w)
            if sync is not None:
                payload, m, r, ell = sync
                self.emit("accept", kind="sync", start=start, payload=payload)
                self.r, self.m = r, m
                if self.rounds is not None:
                    self.rounds[-1].size = r
                if ell > self.star:
                    self.star = len(self.T)
                else:
                    self.T.truncate(self.star)
                yield from self.simulate(self.r - 2 * F)
                fp = self.fingerprint_bits(P.hash_family)
                snap = bytes(self.T.bits) if self.hook is not None else None
                yield from self.send_message("fp", P.fp_codec.encode(fp, self.rng), fp, snap)
                self.end_round("sync")
            else:
                yield from self.send_random(self.r - F)
                self.m += 1
                if is_pow4(1 + self.m):
                    self.r //= 2
                self.end_round("reject")
            if self.m >= P.mMax:
                return None

    def run(self):
        return (yield from self.alg1())


def bounded_parties(params: Alg1Params, proto: PaddedProtocol, rng_a, rng_b):
    return BoundedAlice(params, proto, rng_a), BoundedBob(params, proto, rng_b)


__all__ = ["BoundedAlice", "BoundedBob", "bounded_parties", "pack_sync", "unpack_sync"]
