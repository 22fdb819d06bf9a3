"""Protocols being simulated: direction schedule, next-bit rule, padding.

A protocol of length ``L`` fixes, for every position ``i``, which party
sends (a function of ``i`` only) and how the sender computes its bit from
its private key and the history so far.  Three families are built in:

``constant``
    alternating direction, every bit 0.
``echo``
    alternating direction; Alice sends a keyed pseudorandom bit at even
    positions and Bob repeats it at the following odd position.
``prf``
    direction drawn from a public keyed PRF (position 0 is always Alice),
    each bit a PRF of the sender's key and a rolling hash of the whole
    history, so a single wrong history bit scrambles everything after it.

``PaddedProtocol`` extends a protocol past ``L`` with bits that Alice
derives from a private padding seed, so rewinds reproduce them exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

ALICE, BOB = 0, 1
ROLE_NAMES = ("alice", "bob")
FAMILIES = ("constant", "echo", "prf")

_M64 = (1 << 64) - 1
_STEP_BIT = (0x9E3779B97F4A7C15, 0xD1B54A32D192ED03)


def mix64(x: int) -> int:
    """splitmix64 finaliser."""
    x = (x + 0x9E3779B97F4A7C15) & _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


def chain_step(h: int, b: int) -> int:
    return mix64(h ^ _STEP_BIT[b])


def prf_bit(key: int, x: int) -> int:
    return mix64(key ^ mix64(x)) & 1


class Incomplete(ValueError):
    """Asked for a prefix longer than the transcript."""


class Transcript:
    """Mutable bit sequence with a rolling history hash per prefix.

    ``chain[i]`` summarises the first ``i`` bits, which makes history
    dependent bit computation and truncation O(1) per bit.
    """

    __slots__ = ("bits", "chain")

    def __init__(self, bits=()):
        self.bits = bytearray()
        self.chain = [0]
        for b in bits:
            self.append(int(b))

    def __len__(self):
        return len(self.bits)

    def __eq__(self, other):
        if isinstance(other, Transcript):
            return self.bits == other.bits
        return NotImplemented

    def __repr__(self):
        s = "".join(map(str, self.bits[:32]))
        return f"Transcript(len={len(self)}, bits={s}{'...' if len(self) > 32 else ''})"

    def append(self, b: int):
        self.bits.append(b)
        self.chain.append(chain_step(self.chain[-1], b))

    def truncate(self, n: int):
        del self.bits[n:]
        del self.chain[n + 1:]

    def copy(self) -> "Transcript":
        t = Transcript()
        t.bits = bytearray(self.bits)
        t.chain = list(self.chain)
        return t

    def to_array(self, n: int | None = None) -> np.ndarray:
        b = self.bits if n is None else self.bits[:n]
        return np.frombuffer(bytes(b), dtype=np.uint8).copy()

    def prefix(self, n: int) -> "Transcript":
        return prefix(self, n)


def prefix(t, n: int):
    """First ``n`` bits of ``t``; ``Incomplete`` when ``t`` is shorter."""
    if n > len(t):
        raise Incomplete(f"transcript has {len(t)} bits, asked for {n}")
    if isinstance(t, Transcript):
        out = t.copy()
        out.truncate(n)
        return out
    return t[:n]


def is_prefix(a, b) -> bool:
    a = a.bits if isinstance(a, Transcript) else bytes(bytearray(int(x) for x in a))
    b = b.bits if isinstance(b, Transcript) else bytes(bytearray(int(x) for x in b))
    return len(a) <= len(b) and b[: len(a)] == a


def _derive_keys(seed: int) -> tuple[int, int, int]:
    ss = np.random.SeedSequence(seed)
    words = ss.generate_state(6, dtype=np.uint32)
    k = [int(words[2 * i]) << 32 | int(words[2 * i + 1]) for i in range(3)]
    return k[0], k[1], k[2]


@dataclass(frozen=True)
class ProtocolSpec:
    L: int
    family: str = "prf"
    seed: int = 0
    alice_seed: int | None = None  # rekeys Alice only
    _keys: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown protocol family {self.family!r}")
        if self.L < 1:
            raise ValueError("L must be positive")
        dkey, akey, bkey = _derive_keys(self.seed)
        if self.alice_seed is not None:
            akey = _derive_keys(self.alice_seed)[1]
        object.__setattr__(self, "_keys", (dkey, akey, bkey))

    def rekey_alice(self, alice_seed: int) -> "ProtocolSpec":
        """Same direction schedule and Bob key, different Alice key."""
        return replace(self, alice_seed=alice_seed)

    def direction(self, i: int) -> int:
        if self.family == "prf":
            return ALICE if i == 0 else prf_bit(self._keys[0], i)
        return i & 1

    def _bit(self, role: int, i: int, hist_hash: int, last_bit: int) -> int:
        if self.family == "constant":
            return 0
        if self.family == "echo":
            return last_bit if role == BOB else prf_bit(self._keys[1], i)
        return prf_bit(self._keys[1 + role], hist_hash)

    def next_bit(self, role: int, history) -> int | None:
        """Bit ``role`` sends at position ``len(history)``, or None if it is the other party's turn.

        Stateless: recomputes the history hash from scratch.
        """
        i = len(history)
        if self.direction(i) != role:
            return None
        h = 0
        for b in history:
            h = chain_step(h, int(b))
        return self._bit(role, i, h, int(history[-1]) if i else 0)


def reference_transcript(spec: ProtocolSpec) -> np.ndarray:
    """Noise-free run of ``spec``; the ground truth for every experiment."""
    t = Transcript()
    for i in range(spec.L):
        role = spec.direction(i)
        t.append(spec._bit(role, i, t.chain[-1], t.bits[-1] if i else 0))
    return t.to_array()


@dataclass(frozen=True)
class PaddedProtocol:
    """``base`` followed by Alice-sent pseudorandom padding up to ``limit`` positions."""

    base: ProtocolSpec
    Lpad: int
    padding_seed: int
    limit: int
    _dirs: bytes = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        L = self.base.L
        dirs = bytes(self.base.direction(i) if i < L else ALICE for i in range(self.limit))
        object.__setattr__(self, "_dirs", dirs)

    @property
    def L(self) -> int:
        return self.base.L

    def direction(self, i: int) -> int:
        if i < self.limit:
            return self._dirs[i]
        return self.base.direction(i) if i < self.base.L else ALICE

    def bit(self, role: int, t: Transcript) -> int | None:
        """Fast path of :meth:`next_bit` on an incremental transcript."""
        i = len(t.bits)
        if self.direction(i) != role:
            return None
        if i >= self.base.L:
            return prf_bit(self.padding_seed, i)
        return self.base._bit(role, i, t.chain[-1], t.bits[-1] if i else 0)

    def next_bit(self, role: int, history) -> int | None:
        i = len(history)
        if i >= self.base.L:
            return prf_bit(self.padding_seed, i) if role == ALICE else None
        return self.base.next_bit(role, history)
