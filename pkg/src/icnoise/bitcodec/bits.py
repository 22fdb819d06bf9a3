"""Bit-string helpers.

A bit string is a 1-D ``numpy.uint8`` array of zeros and ones.  The wire
format for hex text is ``<nbits>:<hex>`` with bits packed MSB first.
"""

from __future__ import annotations

import numpy as np


def as_bits(x) -> np.ndarray:
    a = np.asarray(x, dtype=np.uint8).reshape(-1)
    if a.size and a.max() > 1:
        raise ValueError("bit strings hold only 0 and 1")
    return a


def int_to_bits(v: int, width: int) -> np.ndarray:
    if v < 0 or v >> width:
        raise ValueError(f"{v} does not fit in {width} bits")
    return np.array([(v >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)


def bits_to_int(bits) -> int:
    v = 0
    for b in bits:
        v = (v << 1) | int(b)
    return v


def to_chunks(bits, k: int) -> list[int]:
    """Split into k-bit ints, MSB first; the last chunk is zero padded."""
    bits = np.asarray(bits, dtype=np.uint8)
    n = -(-bits.size // k)
    if n == 0:
        return []
    if k > 64:
        v = int.from_bytes(np.packbits(np.concatenate([bits, np.zeros(n * k - bits.size, np.uint8)])).tobytes(), "big")
        v >>= (-(n * k)) % 8
        m = (1 << k) - 1
        return [(v >> (k * (n - 1 - i))) & m for i in range(n)]
    padded = np.zeros(n * k, dtype=np.uint64)
    padded[: bits.size] = bits
    w = np.left_shift(np.uint64(1), np.arange(k - 1, -1, -1, dtype=np.uint64))
    return [int(v) for v in (padded.reshape(n, k) * w).sum(axis=1, dtype=np.uint64)]


def from_chunks(values, k: int) -> np.ndarray:
    if not len(values):
        return np.zeros(0, dtype=np.uint8)
    if k > 64:
        return np.concatenate([int_to_bits(int(x), k) for x in values])
    v = np.asarray(values, dtype=np.uint64)[:, None]
    sh = np.arange(k - 1, -1, -1, dtype=np.uint64)
    return ((v >> sh) & np.uint64(1)).astype(np.uint8).reshape(-1)


def to_hex(bits) -> str:
    bits = as_bits(bits)
    return f"{bits.size}:{np.packbits(bits).tobytes().hex()}"


def from_hex(text: str) -> np.ndarray:
    n, _, h = text.strip().partition(":")
    n = int(n)
    raw = np.frombuffer(bytes.fromhex(h), dtype=np.uint8)
    bits = np.unpackbits(raw)
    if bits.size < n:
        raise ValueError(f"hex payload shorter than declared {n} bits")
    return bits[:n].copy()


def flip(bits, positions) -> np.ndarray:
    out = as_bits(bits).copy()
    for p in positions:
        out[p] ^= 1
    return out
