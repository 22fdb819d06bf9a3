"""Field arithmetic, fingerprints, AMD codes and Reed-Solomon, checked against brute-force oracles."""

from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import clmul_mod, clpow_mod
from icnoise.bitcodec import (AmdShape, DecodeFailure, EccCode, GF2k, HashFamily, NotACodeword, PaddedAmd,
                              RobustCodec, RSCode, ShapeError, amd_decode, amd_encode, as_bits, bits_to_int,
                              count_alternations, default_poly, digest, digest_many, from_chunks, from_hex,
                              hash_fingerprint, int_to_bits, is_codeword, is_irreducible, is_primitive,
                              majority_decode, matches_fp, poly_table, to_chunks, to_hex)
from icnoise.bitcodec.gf import random_element

bitstrings = st.lists(st.integers(0, 1), max_size=300).map(lambda v: np.array(v, dtype=np.uint8))


# -- bits ---------------------------------------------------------------

@given(bitstrings, st.sampled_from([1, 3, 8, 13, 32, 64, 65, 100]))
def test_chunks_roundtrip(bits, k):
    chunks = to_chunks(bits, k)
    assert len(chunks) == -(-bits.size // k)
    assert all(0 <= c < 2 ** k for c in chunks)
    back = from_chunks(chunks, k)
    assert np.array_equal(back[: bits.size], bits)
    assert not back[bits.size:].any()


@given(bitstrings)
def test_hex_roundtrip(bits):
    assert np.array_equal(from_hex(to_hex(bits)), bits)


def test_int_bits_msb_first():
    assert int_to_bits(6, 4).tolist() == [0, 1, 1, 0]
    assert bits_to_int([1, 0, 1]) == 5
    with pytest.raises(ValueError):
        int_to_bits(16, 4)
    with pytest.raises(ValueError):
        as_bits([0, 2])


# -- field --------------------------------------------------------------

def test_poly_table_small_widths():
    # x^2+x+1, x^3+x+1, x^4+x+1, x^8+x^4+x^3+x^2+1: the smallest primitive polynomials
    assert default_poly(2) == 0b111
    assert default_poly(3) == 0b1011
    assert default_poly(4) == 0b10011
    assert default_poly(8) == 0x11D
    for k, h in poly_table(range(2, 40)):
        assert is_irreducible(int(h, 16))
        assert int(h, 16).bit_length() == k + 1


def test_primitive_vs_irreducible():
    assert is_irreducible(0x11B) and not is_primitive(0x11B)  # AES polynomial has order 51
    assert not is_irreducible(0b101)  # (x+1)^2


@pytest.mark.parametrize("k", [4, 8, 16, 24, 32, 61, 64, 100, 128])
def test_mul_matches_schoolbook(k):
    f = GF2k(k)
    r = np.random.default_rng(k)
    for _ in range(200):
        a, b = random_element(r, k), random_element(r, k)
        assert f.mul(a, b) == clmul_mod(a, b, f.poly, k)
        s = f.scaler(a)
        assert s(b) == f.mul(a, b)


@pytest.mark.parametrize("k", [5, 8, 20, 33, 64])
def test_inverse_and_vector_mul(k):
    f = GF2k(k)
    r = np.random.default_rng(1)
    a = np.array([random_element(r, k, exclude=(0,)) for _ in range(64)], dtype=np.uint64)
    b = np.array([random_element(r, k) for _ in range(64)], dtype=np.uint64)
    prod_ = f.mul_vec(a, b)
    for x, y, z in zip(a.tolist(), b.tolist(), prod_.tolist()):
        assert z == f.mul(x, y)
        assert f.mul(x, f.inv(x)) == 1


@given(st.integers(0, 2 ** 13 - 1), st.integers(0, 2 ** 13 - 1), st.integers(0, 2 ** 13 - 1))
def test_field_distributes(a, b, c):
    f = GF2k(13)
    assert f.mul(a, b ^ c) == f.mul(a, b) ^ f.mul(a, c)
    assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))


def test_random_element_respects_exclusion():
    r = np.random.default_rng(0)
    seen = {random_element(r, 2, exclude=(0, 3)) for _ in range(200)}
    assert seen == {1, 2}


# -- fingerprint --------------------------------------------------------

def oracle_digest(k, poly, seed, bits, length_chunks):
    """Sum of c_i s^(deg) written out term by term."""
    chunks = to_chunks(bits, k)
    n = len(bits)
    lens = [(n >> (k * (length_chunks - 1 - i))) & ((1 << k) - 1) for i in range(length_chunks)]
    terms = chunks + lens
    acc = 0
    for i, c in enumerate(terms):
        acc ^= clmul_mod(c, clpow_mod(seed, len(terms) - i, poly, k), poly, k)
    return acc


@settings(max_examples=60)
@given(bitstrings, st.sampled_from([4, 8, 16, 32]), st.integers(0, 2 ** 32 - 1))
def test_digest_matches_oracle(bits, k, seed):
    fam = HashFamily(k, 300)
    seed &= fam.field.mask
    assert digest(fam, seed, bits) == oracle_digest(k, fam.field.poly, seed, bits, fam.length_chunks)


def test_empty_string_hashes_to_zero():
    fam = HashFamily(16, 100)
    assert digest(fam, 12345, np.zeros(0, np.uint8)) == 0


def test_length_is_part_of_the_hash():
    # trailing zeros change only the length terms
    fam = HashFamily(8, 64)
    a = np.array([1, 0, 1], np.uint8)
    b = np.array([1, 0, 1, 0], np.uint8)
    diffs = sum(digest(fam, s, a) != digest(fam, s, b) for s in range(1, 256))
    assert diffs >= 255 - fam.max_chunks - fam.length_chunks


def test_fingerprint_self_match_and_single_flip(rng):
    fam = HashFamily.for_target(2 ** -20, 4096)
    assert fam.collision_bound <= 2 ** -20
    t = rng.integers(0, 2, 4096).astype(np.uint8)
    fp = hash_fingerprint(t, fam, rng)
    assert matches_fp(fp, t, fam)
    for pos in rng.choice(4096, 20, replace=False):
        t2 = t.copy()
        t2[pos] ^= 1
        assert not matches_fp(fp, t2, fam)
    assert not matches_fp(fp, np.zeros(4097, np.uint8), fam)  # over the family limit


def test_collision_count_within_bound_exhaustive():
    """Every seed of GF(2^6) against a fixed pair: collisions equal the root count of the difference."""
    fam = HashFamily(6, 30)
    r = np.random.default_rng(3)
    for _ in range(20):
        a = r.integers(0, 2, 30).astype(np.uint8)
        b = r.integers(0, 2, int(r.integers(0, 31))).astype(np.uint8)
        if a.size == b.size and np.array_equal(a, b):
            continue
        coll = sum(digest(fam, s, a) == digest(fam, s, b) for s in range(64))
        assert coll / 64 <= fam.collision_bound


def test_digest_many_matches_scalar(rng):
    fam = HashFamily(24, 200)
    rows = rng.integers(0, 2, (30, 200)).astype(np.uint8)
    seeds = np.array([random_element(rng, 24) for _ in range(30)], dtype=np.uint64)
    mat = np.array([to_chunks(r, 24) for r in rows], dtype=np.uint64)
    got = digest_many(fam, mat, 200, seeds)
    for row, s, g in zip(rows, seeds.tolist(), got.tolist()):
        assert g == digest(fam, s, row)


# -- AMD ----------------------------------------------------------------

@settings(max_examples=50)
@given(st.sampled_from([(8, 16), (8, 32), (16, 40), (32, 64), (64, 100), (100, 150)]), st.integers(0, 2 ** 31))
def test_amd_roundtrip(shape_args, seed):
    shape = AmdShape(*shape_args)
    r = np.random.default_rng(seed)
    m = r.integers(0, 2, shape.payload_bits).astype(np.uint8)
    w = amd_encode(m, shape, r)
    assert w.size == shape.width == (shape.d + 2) * shape.k
    assert shape.d % 2 == 0
    assert is_codeword(w, shape)
    assert np.array_equal(amd_decode(w, shape), m)
    assert not (w == w[0]).all()


def test_amd_rejects_constant_words():
    for k, n in [(4, 8), (8, 16), (16, 64)]:
        shape = AmdShape(k, n)
        for b in (0, 1):
            assert not is_codeword(np.full(shape.width, b, np.uint8), shape)


def test_amd_no_all_equal_codeword_exhaustive():
    """GF(2^3), payload 6 bits: enumerate every message and x, none is constant."""
    shape = AmdShape(3, 6)
    for mv in range(64):
        m = int_to_bits(mv, 6)
        elems = to_chunks(np.concatenate([m, np.zeros(shape.d * 3 - 6, np.uint8)]), 3)
        for x in range(1, 7):
            w = np.concatenate([m, np.zeros(shape.d * 3 - 6, np.uint8), from_chunks([x, shape.tag(elems, x)], 3)])
            assert is_codeword(w, shape)
            assert not (w == w[0]).all()


def test_amd_tamper_probability_exact():
    """For fixed (m, e) the fraction of x that survive is at most delta; computed over all x."""
    shape = AmdShape(5, 10)
    r = np.random.default_rng(9)
    pad = shape.d * shape.k - shape.payload_bits
    for _ in range(40):
        m = r.integers(0, 2, 10).astype(np.uint8)
        e = r.integers(0, 2, shape.width).astype(np.uint8)
        e[10: 10 + pad] = 0
        if not e.any():
            continue
        elems = to_chunks(np.concatenate([m, np.zeros(pad, np.uint8)]), shape.k)
        survive = 0
        xs = [x for x in range(2 ** shape.k) if x not in (0, shape.field.mask)]
        for x in xs:
            w = np.concatenate([m, np.zeros(pad, np.uint8), from_chunks([x, shape.tag(elems, x)], shape.k)])
            survive += is_codeword(w ^ e, shape)
        assert survive / len(xs) <= shape.delta + 1e-12


def test_amd_shape_errors(rng):
    shape = AmdShape(8, 16)
    with pytest.raises(ShapeError):
        amd_encode(np.zeros(15, np.uint8), shape, rng)
    with pytest.raises(ShapeError):
        is_codeword(np.zeros(shape.width + 1, np.uint8), shape)
    with pytest.raises(NotACodeword):
        amd_decode(np.zeros(shape.width, np.uint8), shape)


def test_amd_nonzero_padding_rejected(rng):
    shape = AmdShape(8, 12)
    w = amd_encode(np.ones(12, np.uint8), shape, rng)
    w[13] ^= 1
    assert not is_codeword(w, shape)


def test_for_delta():
    s = AmdShape.for_delta(32, 2 ** -20)
    assert s.delta <= 2 ** -20
    assert AmdShape(s.k - 1, 32).delta > 2 ** -20


# -- Reed-Solomon -------------------------------------------------------

def nearest_codeword_oracle(code: RSCode, word):
    """Brute force: all codewords within the radius (there is at most one)."""
    q = 2 ** code.m
    hits = []
    for msg in product(range(q), repeat=code.k):
        c = code.encode(list(msg))
        if sum(a != b for a, b in zip(c, word)) <= code.radius:
            hits.append(list(msg))
    return hits


def test_rs_toy_against_brute_force():
    code = RSCode(6, 2, 4)
    assert code.radius == 2
    r = np.random.default_rng(4)
    for _ in range(150):
        word = [int(v) for v in r.integers(0, 16, 6)]
        hits = nearest_codeword_oracle(code, word)
        assert len(hits) <= 1
        if hits:
            assert code.decode(word) == hits[0]
        else:
            with pytest.raises(DecodeFailure):
                code.decode(word)


def test_rs_toy_all_two_symbol_errors_on_sample_messages():
    code = RSCode(6, 2, 4)
    for msg in ([0, 0], [1, 2], [15, 15], [7, 9]):
        cw = code.encode(msg)
        for pos in combinations(range(6), 2):
            for e1, e2 in product(range(1, 16), repeat=2):
                w = list(cw)
                w[pos[0]] ^= e1
                w[pos[1]] ^= e2
                assert code.decode(w) == msg


@pytest.mark.parametrize("n,k", [(20, 6), (255, 223), (50, 16)])
def test_rs_full_size_radius(n, k):
    code = RSCode(n, k)
    r = np.random.default_rng(n)
    for _ in range(20):
        msg = [int(v) for v in r.integers(0, 256, k)]
        cw = code.encode(msg)
        assert cw[:k] == msg
        w = list(cw)
        for p in r.choice(n, code.radius, replace=False):
            w[p] ^= int(r.integers(1, 256))
        assert code.decode(w) == msg


def test_rs_linearity_sample():
    code = RSCode(6, 2, 4)
    r = np.random.default_rng(5)
    for _ in range(300):
        x = code.encode([int(v) for v in r.integers(0, 16, 2)])
        eta = [int(v) for v in r.integers(0, 16, 6)]
        try:
            d_eta = code.decode(eta)
        except DecodeFailure:
            with pytest.raises(DecodeFailure):
                code.decode([a ^ b for a, b in zip(x, eta)])
            continue
        got = code.decode([a ^ b for a, b in zip(x, eta)])
        assert got == [a ^ b for a, b in zip(x[:2], d_eta)]


def test_rs_invalid_parameters():
    with pytest.raises(ValueError):
        RSCode(16, 2, 4)
    with pytest.raises(ValueError):
        RSCode(6, 2, 4).encode([1])


# -- ECC wrapper and robust codec ---------------------------------------

def test_ecc_dimensions():
    e = EccCode(128, 5 * 128)
    assert e.data_len == 16 and e.code_len == 50 and e.radius == 17
    with pytest.raises(ValueError):
        EccCode(128, 300)


def test_ecc_one_flip_in_each_of_radius_symbols(rng):
    e = EccCode(128, 640)
    m = rng.integers(0, 2, 128).astype(np.uint8)
    w = e.encode(m)
    assert w.size == 640 and not w[e.code_bits:].any()
    syms = rng.choice(e.code_len, e.radius, replace=False)
    for s in syms:
        w[8 * s + int(rng.integers(0, 8))] ^= 1
    assert np.array_equal(e.decode(w), m)


def test_robust_codec_roundtrip_and_failure(rng):
    codec = RobustCodec(AmdShape(16, 40), 5 * 64)
    m = rng.integers(0, 2, 40).astype(np.uint8)
    w = codec.encode(m, rng)
    assert np.array_equal(codec.decode(w), m)
    bad = w.copy()
    for s in range(codec.ecc.radius + 1):
        bad[8 * s] ^= 1
    try:
        out = codec.decode(bad)
    except NotACodeword:
        pass
    else:  # a miscorrection has to land on another AMD codeword, which is improbable
        pytest.fail(f"decoded {out} from a word beyond the radius")


def test_padded_amd(rng):
    p = PaddedAmd(AmdShape(8, 16), 64)
    m = rng.integers(0, 2, 16).astype(np.uint8)
    w = p.encode(m, rng)
    assert w.size == 64 and p.is_codeword(w)
    assert np.array_equal(p.decode(w), m)
    w[60] = 1
    assert not p.is_codeword(w)
    with pytest.raises(NotACodeword):
        p.decode(w)


def test_majority_and_alternations():
    assert majority_decode([1, 1, 0]) == 1
    assert majority_decode([1, 0]) == 0  # tie
    assert majority_decode([0, 0, 1], rho=3) == 0
    with pytest.raises(ValueError):
        majority_decode([1], rho=3)
    assert count_alternations([0, 1, 0, 1]) == 3
    assert count_alternations([1]) == 0
    assert count_alternations([]) == 0
    assert count_alternations([1, 1, 1]) == 0
