"""Seeded polynomial-evaluation fingerprints over GF(2^k).

A transcript of ``n`` bits is cut into ``c = ceil(n/k)`` chunks and hashed as

    H_s(t) = c_1 s^(c+e) + ... + c_c s^(e+1) + n_1 s^e + ... + n_e s

i.e. Horner evaluation of ``(acc ^ chunk) * s`` over the chunks followed by
the bit length ``n`` written as ``e`` further k-bit chunks (``e`` is fixed
per family).  Two distinct transcripts give a nonzero difference polynomial
of degree at most ``c_max + e``, so a uniform seed collides with
probability at most ``(c_max + e) / 2^k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import ceil, log2

import numpy as np

from .bits import int_to_bits, bits_to_int, to_chunks
from .gf import GF2k, random_element


class TranscriptTooLong(ValueError):
    pass


@dataclass(frozen=True)
class HashFamily:
    k: int
    max_bits: int

    @cached_property
    def field(self) -> GF2k:
        return GF2k(self.k)

    @property
    def max_chunks(self) -> int:
        return -(-self.max_bits // self.k)

    @property
    def length_chunks(self) -> int:
        return max(1, -(-self.max_bits.bit_length() // self.k))

    @property
    def collision_bound(self) -> float:
        return (self.max_chunks + self.length_chunks) / 2 ** self.k

    def length_terms(self, n: int) -> list[int]:
        e, k = self.length_chunks, self.k
        return [(n >> (k * (e - 1 - i))) & ((1 << k) - 1) for i in range(e)]

    @property
    def payload_bits(self) -> int:
        return 2 * self.k

    @classmethod
    def for_target(cls, p: float, max_bits: int) -> "HashFamily":
        """Smallest field width whose collision bound is at most ``p``."""
        if not 0 < p < 1:
            raise ValueError("p must lie in (0, 1)")
        k = max(2, ceil(log2(1 / p)))
        while True:
            fam = cls(k, max_bits)
            if fam.collision_bound <= p:
                return fam
            k += 1


@dataclass(frozen=True)
class Fingerprint:
    seed: int
    digest: int
    k: int
    target_p: float = field(default=0.0, compare=False)

    def to_bits(self) -> np.ndarray:
        return np.concatenate([int_to_bits(self.seed, self.k), int_to_bits(self.digest, self.k)])

    @classmethod
    def from_bits(cls, bits, k: int) -> "Fingerprint":
        return cls(bits_to_int(bits[:k]), bits_to_int(bits[k: 2 * k]), k)


def digest(family: HashFamily, seed: int, bits) -> int:
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size > family.max_bits:
        raise TranscriptTooLong(f"{bits.size} bits > family limit {family.max_bits}")
    chunks = to_chunks(bits, family.k)
    chunks.extend(family.length_terms(bits.size))
    if len(chunks) > 24:
        mul_s = family.field.scaler(seed)
    else:
        f = family.field
        mul_s = lambda x: f.mul(x, seed)  # noqa: E731
    acc = 0
    for c in chunks:
        acc = mul_s(acc ^ c)
    return acc


def hash_fingerprint(bits, family: HashFamily, rng: np.random.Generator) -> Fingerprint:
    seed = random_element(rng, family.k)
    return Fingerprint(seed, digest(family, seed, bits), family.k, family.collision_bound)


def matches_fp(fp: Fingerprint, bits, family: HashFamily) -> bool:
    try:
        return digest(family, fp.seed, bits) == fp.digest
    except TranscriptTooLong:
        return False


def digest_many(family: HashFamily, chunk_matrix: np.ndarray, nbits: int, seeds: np.ndarray) -> np.ndarray:
    """Vectorised digests: row ``i`` of ``chunk_matrix`` hashed under ``seeds[i]``.

    Every row must come from an ``nbits``-long transcript.
    """
    f = family.field
    seeds = np.asarray(seeds, dtype=np.uint64)
    acc = np.zeros(seeds.shape, dtype=np.uint64)
    cols = [chunk_matrix[:, j] for j in range(chunk_matrix.shape[1])]
    cols.extend(np.full(seeds.shape, v, dtype=np.uint64) for v in family.length_terms(nbits))
    for c in cols:
        acc = f.mul_vec(acc ^ np.asarray(c, dtype=np.uint64), seeds)
    return acc
