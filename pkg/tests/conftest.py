import numpy as np
import pytest


def clmul_mod(a: int, b: int, poly: int, k: int) -> int:
    """Schoolbook carry-less product reduced mod ``poly``; an oracle independent of GF2k."""
    r = 0
    for i in range(b.bit_length()):
        if (b >> i) & 1:
            r ^= a << i
    for i in range(r.bit_length() - 1, k - 1, -1):
        if (r >> i) & 1:
            r ^= poly << (i - k)
    return r


def clpow_mod(a: int, e: int, poly: int, k: int) -> int:
    r = 1
    for _ in range(e):
        r = clmul_mod(r, a, poly, k)
    return r


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
