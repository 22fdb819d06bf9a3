"""Systematic algebraic manipulation detection code.

Codeword layout (all fields k bits, MSB first)::

    m_1 .. m_d | x | x^(d+2) + sum_i m_i x^i

with ``d`` even, payload zero-padded into ``d`` field elements and the tag
input ``x`` uniform over GF(2^k) minus {0, all-ones}.  Excluding those two
values means no codeword is constant, and any fixed nonzero additive offset
survives verification with probability at most ``(d+1)/(2^k - 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .bits import as_bits, from_chunks, to_chunks
from .gf import GF2k, random_element


class ShapeError(ValueError):
    pass


class NotACodeword(ValueError):
    pass


@dataclass(frozen=True)
class AmdShape:
    k: int
    payload_bits: int

    @property
    def d(self) -> int:
        n = max(2, -(-self.payload_bits // self.k))
        return n + (n & 1)

    @property
    def width(self) -> int:
        return (self.d + 2) * self.k

    @property
    def delta(self) -> float:
        return (self.d + 1) / (2 ** self.k - 2)

    @cached_property
    def field(self) -> GF2k:
        return GF2k(self.k)

    @classmethod
    def for_delta(cls, payload_bits: int, delta: float, k_min: int = 3) -> "AmdShape":
        k = k_min
        while cls(k, payload_bits).delta > delta:
            k += 1
        return cls(k, payload_bits)

    def tag(self, elems: list[int], x: int) -> int:
        f = self.field
        # Horner for sum_{i=1..d} m_i x^i, then add x^(d+2)
        acc = 0
        for m in reversed(elems):
            acc = f.mul(acc ^ m, x)
        return acc ^ f.pow(x, self.d + 2)


def amd_encode(m, shape: AmdShape, rng: np.random.Generator) -> np.ndarray:
    m = as_bits(m)
    if m.size != shape.payload_bits:
        raise ShapeError(f"payload has {m.size} bits, shape expects {shape.payload_bits}")
    padded = np.zeros(shape.d * shape.k, dtype=np.uint8)
    padded[: m.size] = m
    elems = to_chunks(padded, shape.k)
    x = random_element(rng, shape.k, exclude=(0, shape.field.mask))
    return np.concatenate([padded, from_chunks([x, shape.tag(elems, x)], shape.k)])


def _split(w, shape: AmdShape):
    w = as_bits(w)
    if w.size != shape.width:
        raise ShapeError(f"word has {w.size} bits, shape width is {shape.width}")
    vals = to_chunks(w, shape.k)
    return w, vals[: shape.d], vals[shape.d], vals[shape.d + 1]


def is_codeword(w, shape: AmdShape) -> bool:
    w, elems, x, tag = _split(w, shape)
    if x == 0 or x == shape.field.mask:
        return False
    if w[shape.payload_bits: shape.d * shape.k].any():
        return False
    return shape.tag(elems, x) == tag


def amd_decode(w, shape: AmdShape) -> np.ndarray:
    if not is_codeword(w, shape):
        raise NotACodeword("AMD verification failed")
    return as_bits(w)[: shape.payload_bits].copy()
