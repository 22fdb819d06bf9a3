"""Bit-level coding primitives: fingerprints, AMD codes and Reed-Solomon."""

from .amd import AmdShape, NotACodeword, ShapeError, amd_decode, amd_encode, is_codeword
from .bits import as_bits, bits_to_int, flip, from_chunks, from_hex, int_to_bits, to_chunks, to_hex
from .fingerprint import (Fingerprint, HashFamily, TranscriptTooLong, digest, digest_many,
                          hash_fingerprint, matches_fp)
from .gf import GF2k, default_poly, is_irreducible, is_primitive, poly_table
from .reedsolomon import DecodeFailure, RSCode
from .robust import (EccCode, PaddedAmd, RobustCodec, count_alternations, decode_robust,
                     encode_robust, majority_decode)

__all__ = [
    "AmdShape", "NotACodeword", "ShapeError", "amd_decode", "amd_encode", "is_codeword",
    "as_bits", "bits_to_int", "flip", "from_chunks", "from_hex", "int_to_bits", "to_chunks", "to_hex",
    "Fingerprint", "HashFamily", "TranscriptTooLong", "digest", "digest_many",
    "hash_fingerprint", "matches_fp",
    "GF2k", "default_poly", "is_irreducible", "is_primitive", "poly_table",
    "DecodeFailure", "RSCode",
    "EccCode", "PaddedAmd", "RobustCodec", "count_alternations", "decode_robust",
    "encode_robust", "majority_decode",
]
