"""One iteration of the unbounded scheme with fixed round length ``(2c+1) F_j``.

Round layout (steps): Alice's ``c F_j``-bit sync, ``F_j`` steps of protocol
bits each repeated ``rho_j`` times, Bob's ``c F_j``-bit fingerprint.  Both
messages are AMD-encoded then Reed-Solomon wrapped.  Once Bob's verified
transcript reaches ``L`` he skips the sync slot and checks the protocol slot
for silence, leaving when it shows fewer than ``F_j / 3`` alternations.
"""

from __future__ import annotations

import numpy as np

from .bitcodec import NotACodeword, bits_to_int, count_alternations, int_to_bits
from .machine import Party
from .params import IterationParams


class IterationAlice(Party):
    def iteration_j(self, it: IterationParams):
        """Generator; returns the output on termination, None when the iteration ends."""
        self.iteration = it.j
        Fj, L = it.Fj, self.L
        for _ in range(it.Nj):
            self.begin_round(it.round_len)
            ts = int_to_bits(self.star, it.ts_width)
            yield from self.send_message("sync", it.sync_codec.encode(ts, self.rng), ts)
            if self.star < L:
                yield from self.simulate(Fj, it.rho)
            else:
                yield from self.send_random(Fj)
            start = self.step
            w = np.array((yield from self.listen(it.c * Fj)), dtype=np.uint8)
            try:
                fp = it.fp_codec.decode(w)
            except NotACodeword:
                self.T.truncate(self.star)
                self.end_round("reject")
                continue
            self.emit("accept", kind="fp", start=start, payload=fp)
            if self.star >= L:
                self.terminated = True
                self.end_round("terminate")
                return self.output()
            if self.fingerprint_matches(it.hash_family, fp):
                self.emit("fp_match", start=start)
                self.star = len(self.T)
                self.end_round("success")
            else:
                self.T.truncate(self.star)
                self.end_round("mismatch")
        return None


class IterationBob(Party):
    def iteration_j(self, it: IterationParams):
        self.iteration = it.j
        Fj, c, L = it.Fj, it.c, self.L
        for _ in range(it.Nj):
            self.begin_round(it.round_len)
            if self.star >= L:
                yield from self.listen(c * Fj)
                start = self.step
                w = yield from self.listen(Fj)
                if 3 * count_alternations(w) < Fj:
                    self.emit("silence", start=start, length=Fj)
                    self.terminated = True
                    self.end_round("terminate")
                    return self.output()
                fp = self.fingerprint_bits(it.hash_family, self.star)
                snap = bytes(self.T.bits[: self.star]) if self.hook is not None else None
                yield from self.send_message("fp", it.fp_codec.encode(fp, self.rng), fp, snap)
                self.end_round("idle")
                continue
            start = self.step
            w = np.array((yield from self.listen(c * Fj)), dtype=np.uint8)
            try:
                ts = it.sync_codec.decode(w)
            except NotACodeword:
                yield from self.send_random((c + 1) * Fj)
                self.end_round("reject")
                continue
            self.emit("accept", kind="sync", start=start, payload=ts)
            if bits_to_int(ts) > self.star:
                self.star = len(self.T)
            else:
                self.T.truncate(self.star)
            yield from self.simulate(Fj, it.rho)
            fp = self.fingerprint_bits(it.hash_family)
            snap = bytes(self.T.bits) if self.hook is not None else None
            yield from self.send_message("fp", it.fp_codec.encode(fp, self.rng), fp, snap)
            self.end_round("sync")
        return None
