"""Fixed-width message codecs built from AMD and Reed-Solomon codes.

``PaddedAmd`` carries an AMD codeword zero-padded to a fixed wire width
(used for the adaptive-round scheme, where all messages are ``F`` bits).
``RobustCodec`` additionally wraps the codeword in a Reed-Solomon code over
GF(2^8) with ``3d + 2`` symbols for ``d`` data symbols, then zero-pads to the
wire width.  Padding bits are ignored on decode, so the decoder stays a
linear, syndrome-determined map of the received word.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .amd import AmdShape, NotACodeword, amd_decode, amd_encode, is_codeword
from .bits import as_bits, from_chunks, to_chunks
from .reedsolomon import DecodeFailure, RSCode


@dataclass(frozen=True)
class EccCode:
    """Reed-Solomon wrapper mapping ``data_bits`` to exactly ``wire_bits``."""

    data_bits: int
    wire_bits: int

    def __post_init__(self):
        if self.code_bits > self.wire_bits:
            raise ValueError(
                f"RS encoding of {self.data_bits} bits needs {self.code_bits} > {self.wire_bits} wire bits")

    @property
    def data_len(self) -> int:
        return -(-self.data_bits // 8)

    @property
    def code_len(self) -> int:
        return 3 * self.data_len + 2

    @property
    def code_bits(self) -> int:
        return 8 * self.code_len

    @property
    def radius(self) -> int:
        """Correctable symbol errors."""
        return self.rs.radius

    @cached_property
    def rs(self) -> RSCode:
        return RSCode(self.code_len, self.data_len, 8)

    def encode(self, m) -> np.ndarray:
        m = as_bits(m)
        if m.size != self.data_bits:
            raise ValueError(f"ECC input has {m.size} bits, expected {self.data_bits}")
        sym = self.rs.encode(to_chunks(m, 8))
        out = np.zeros(self.wire_bits, dtype=np.uint8)
        out[: self.code_bits] = from_chunks(sym, 8)
        return out

    def decode(self, w) -> np.ndarray:
        w = as_bits(w)
        if w.size != self.wire_bits:
            raise ValueError(f"ECC word has {w.size} bits, expected {self.wire_bits}")
        data = self.rs.decode(to_chunks(w[: self.code_bits], 8))
        return from_chunks(data, 8)[: self.data_bits]


@dataclass(frozen=True)
class PaddedAmd:
    shape: AmdShape
    wire_bits: int

    def __post_init__(self):
        if self.shape.width > self.wire_bits:
            raise ValueError(f"AMD width {self.shape.width} exceeds wire width {self.wire_bits}")

    def encode(self, m, rng: np.random.Generator) -> np.ndarray:
        out = np.zeros(self.wire_bits, dtype=np.uint8)
        out[: self.shape.width] = amd_encode(m, self.shape, rng)
        return out

    def decode(self, w) -> np.ndarray:
        """Payload of a valid word; raises ``NotACodeword`` otherwise."""
        w = as_bits(w)
        if w[self.shape.width:].any():
            raise NotACodeword("nonzero padding")
        return amd_decode(w[: self.shape.width], self.shape)

    def is_codeword(self, w) -> bool:
        w = as_bits(w)
        return not w[self.shape.width:].any() and is_codeword(w[: self.shape.width], self.shape)


@dataclass(frozen=True)
class RobustCodec:
    shape: AmdShape
    wire_bits: int

    @cached_property
    def ecc(self) -> EccCode:
        return EccCode(self.shape.width, self.wire_bits)

    def encode(self, m, rng: np.random.Generator) -> np.ndarray:
        return self.ecc.encode(amd_encode(m, self.shape, rng))

    def decode(self, w) -> np.ndarray:
        try:
            inner = self.ecc.decode(w)
        except DecodeFailure as exc:
            raise NotACodeword(str(exc)) from exc
        return amd_decode(inner, self.shape)


def encode_robust(m, codec: RobustCodec, rng: np.random.Generator) -> np.ndarray:
    return codec.encode(m, rng)


def decode_robust(w, codec: RobustCodec) -> np.ndarray:
    return codec.decode(w)


def majority_decode(w, rho: int | None = None) -> int:
    """Majority bit of ``w``; an exact tie decodes to 0."""
    n = len(w) if rho is None else rho
    if len(w) != n:
        raise ValueError(f"expected {n} bits, got {len(w)}")
    return 1 if 2 * int(sum(w)) > n else 0


def count_alternations(w) -> int:
    w = np.asarray(w, dtype=np.int8)
    if w.size < 2:
        return 0
    return int(np.count_nonzero(w[1:] != w[:-1]))
