"""Binary extension fields GF(2^k).

Elements are plain Python ints in ``[0, 2**k)``.  Addition is XOR.  The
reduction polynomial for each ``k`` is chosen deterministically: the
numerically smallest primitive polynomial for ``k <= 16`` (so log/exp tables
work) and the numerically smallest irreducible polynomial above that.
``poly_table()`` lists the choices.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

TABLE_LIMIT = 16
MAX_K = 128


def _pmod(a: int, f: int) -> int:
    df = f.bit_length() - 1
    while a.bit_length() - 1 >= df:
        a ^= f << (a.bit_length() - 1 - df)
    return a


def _pmulmod(a: int, b: int, f: int) -> int:
    df = f.bit_length() - 1
    top = 1 << df
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= f
    return r


def _pgcd(a: int, b: int) -> int:
    while b:
        a, b = b, _pmod(a, b)
    return a


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _ppowmod(a: int, e: int, f: int) -> int:
    r = 1
    while e:
        if e & 1:
            r = _pmulmod(r, a, f)
        a = _pmulmod(a, a, f)
        e >>= 1
    return r


def is_irreducible(f: int) -> bool:
    """Rabin's test for a polynomial over GF(2) encoded as an int."""
    k = f.bit_length() - 1
    if k < 1 or not f & 1:
        return k == 1
    x = 2
    # x^(2^k) == x (mod f)
    t = x
    for _ in range(k):
        t = _pmulmod(t, t, f)
    if t != x:
        return False
    for q in _prime_factors(k):
        t = x
        for _ in range(k // q):
            t = _pmulmod(t, t, f)
        if _pgcd(f, t ^ x) != 1:
            return False
    return True


def is_primitive(f: int) -> bool:
    k = f.bit_length() - 1
    if not is_irreducible(f):
        return False
    order = (1 << k) - 1
    return all(_ppowmod(2, order // q, f) != 1 for q in _prime_factors(order))


@lru_cache(maxsize=None)
def default_poly(k: int) -> int:
    if not 1 <= k <= MAX_K:
        raise ValueError(f"field width {k} outside 1..{MAX_K}")
    test = is_primitive if k <= TABLE_LIMIT else is_irreducible
    f = (1 << k) | 1
    while not test(f):
        f += 2
    return f


def poly_table(ks=range(2, 65)) -> list[tuple[int, str]]:
    return [(k, hex(default_poly(k))) for k in ks]


def random_element(rng: np.random.Generator, k: int, exclude=()) -> int:
    """Uniform element of GF(2^k) outside ``exclude`` (rejection sampling)."""
    nbytes = (k + 7) // 8
    while True:
        v = int.from_bytes(rng.bytes(nbytes), "big") >> (8 * nbytes - k)
        if v not in exclude:
            return v


class GF2k:
    """Arithmetic in GF(2^k) with a fixed reduction polynomial."""

    def __init__(self, k: int, poly: int | None = None):
        self.k = k
        self.poly = default_poly(k) if poly is None else poly
        self.order = 1 << k
        self.mask = self.order - 1
        self._exp = self._log = None
        if k <= TABLE_LIMIT and poly is None:
            self._build_tables()

    def __repr__(self):
        return f"GF2k(k={self.k}, poly={hex(self.poly)})"

    def _build_tables(self):
        n = self.order - 1
        exp = [0] * (2 * n + 2)
        log = [0] * self.order
        v = 1
        for i in range(n):
            exp[i] = v
            log[v] = i
            v <<= 1
            if v & self.order:
                v ^= self.poly
        for i in range(n, 2 * n + 2):
            exp[i] = exp[i - n]
        self._exp, self._log = exp, log

    def mul(self, a: int, b: int) -> int:
        if self._exp is not None:
            if a == 0 or b == 0:
                return 0
            return self._exp[self._log[a] + self._log[b]]
        return _pmulmod(a, b, self.poly)

    def pow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in GF(2^k)")
        return self.pow(a, self.order - 2)

    def scaler(self, s: int):
        """Return a fast ``x -> s*x`` function (table driven, byte at a time)."""
        if self._exp is not None:
            if s == 0:
                return lambda x: 0
            exp, log, ls = self._exp, self._log, self._log[s]
            return lambda x: exp[log[x] + ls] if x else 0
        basis = []
        v = s
        for _ in range(self.k):
            basis.append(v)
            v <<= 1
            if v & self.order:
                v ^= self.poly
        tables = []
        for byte in range((self.k + 7) // 8):
            sub = basis[8 * byte: 8 * byte + 8]
            t = [0] * (1 << len(sub))
            for b in range(1, len(t)):
                low = (b & -b).bit_length() - 1
                t[b] = t[b & (b - 1)] ^ sub[low]
            tables.append(t)
        if len(tables) == 2:
            t0, t1 = tables
            return lambda x: t0[x & 255] ^ t1[x >> 8]
        if len(tables) == 4:
            t0, t1, t2, t3 = tables
            return lambda x: t0[x & 255] ^ t1[(x >> 8) & 255] ^ t2[(x >> 16) & 255] ^ t3[x >> 24]

        def mul_s(x):
            r = 0
            for t in tables:
                r ^= t[x & 255]
                x >>= 8
            return r
        return mul_s

    def mul_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Elementwise product of two uint64 arrays of field elements (k <= 64)."""
        if self.k > 64:
            raise ValueError("vectorised products need k <= 64")
        a = np.asarray(a, dtype=np.uint64).copy()
        b = np.asarray(b, dtype=np.uint64).copy()
        a, b = np.broadcast_arrays(a, b)
        a, b = a.copy(), b.copy()
        r = np.zeros_like(a)
        mask = np.uint64(self.mask)
        red = np.uint64(self.poly & self.mask)
        top = np.uint64(self.k - 1)
        one = np.uint64(1)
        for _ in range(self.k):
            r ^= a * (b & one)
            b >>= one
            hi = (a >> top) & one
            a = ((a << one) & mask) ^ (hi * red)
        return r
