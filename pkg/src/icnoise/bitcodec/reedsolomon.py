"""Systematic Reed-Solomon codes over GF(2^m), m <= 8.

Decoding is syndrome based (Berlekamp-Massey, Chien search, Forney) and
bounded-distance: it corrects up to ``(n - k) // 2`` symbol errors and
otherwise reports failure.  Every decision depends only on the syndrome of
the received word, which makes the decoder translation invariant: for a
codeword ``x``, ``decode(x + e) == decode(x) + decode(e)`` whenever either
side succeeds, and both fail together.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .gf import GF2k


class DecodeFailure(ValueError):
    pass


class RSCode:
    def __init__(self, n: int, k: int, m: int = 8):
        if not 0 < k < n < 2 ** m:
            raise ValueError(f"invalid RS({n},{k}) over GF(2^{m})")
        self.n, self.k, self.m = n, k, m
        self.nsym = n - k
        self.gf = GF2k(m)
        self._exp, self._log = self.gf._exp, self.gf._log
        self.q1 = 2 ** m - 1
        g = [1]
        for i in range(1, self.nsym + 1):
            g = self._pmul(g, [1, self._exp[i]])
        self.gen = g

    def __repr__(self):
        return f"RSCode(n={self.n}, k={self.k}, m={self.m})"

    @property
    def radius(self) -> int:
        return self.nsym // 2

    def _mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def _inv(self, a):
        return self._exp[(self.q1 - self._log[a]) % self.q1]

    def _pmul(self, p, q):
        r = [0] * (len(p) + len(q) - 1)
        for i, a in enumerate(p):
            if a:
                for j, b in enumerate(q):
                    r[i + j] ^= self._mul(a, b)
        return r

    def _peval(self, p, x):
        y = p[0]
        for c in p[1:]:
            y = self._mul(y, x) ^ c
        return y

    def encode(self, msg) -> list[int]:
        msg = [int(v) for v in msg]
        if len(msg) != self.k:
            raise ValueError(f"message has {len(msg)} symbols, code expects {self.k}")
        rem = msg + [0] * self.nsym
        gen = self.gen
        for i in range(self.k):
            c = rem[i]
            if c:
                for j in range(1, len(gen)):
                    rem[i + j] ^= self._mul(gen[j], c)
        return msg + rem[self.k:]

    @cached_property
    def _syn_exponents(self) -> np.ndarray:
        # codeword position i carries x^(n-1-i); syndrome j evaluates at alpha^j
        pos = np.arange(self.n - 1, -1, -1)[:, None]
        js = np.arange(1, self.nsym + 1)[None, :]
        return (pos * js) % self.q1

    def syndromes(self, word) -> list[int]:
        if self.n * self.nsym <= 256:
            # small codes: Horner per syndrome beats numpy's call overhead
            out = []
            for j in range(1, self.nsym + 1):
                x = self._exp[j]
                y = 0
                for c in word:
                    y = self._mul(y, x) ^ c
                out.append(y)
            return out
        w = np.asarray(word, dtype=np.int64)
        nz = w != 0
        if not nz.any():
            return [0] * self.nsym
        logs = np.asarray(self._log)[w[nz]]
        exps = np.asarray(self._exp)[(logs[:, None] + self._syn_exponents[nz]) % self.q1]
        return [int(v) for v in np.bitwise_xor.reduce(exps, axis=0)]

    def decode(self, word) -> list[int]:
        word = [int(v) for v in word]
        if len(word) != self.n:
            raise ValueError(f"word has {len(word)} symbols, code expects {self.n}")
        syn = self.syndromes(word)
        if not any(syn):
            return word[: self.k]
        err_loc = self._berlekamp_massey(syn)
        nerr = len(err_loc) - 1
        if 2 * nerr > self.nsym:
            raise DecodeFailure("too many errors")
        positions = self._chien(err_loc)
        if len(positions) != nerr:
            raise DecodeFailure("error locator has wrong root count")
        mags = self._forney(syn, err_loc, positions)
        fixed = list(word)
        for p, e in zip(positions, mags):
            fixed[p] ^= e
        if any(self.syndromes(fixed)):
            raise DecodeFailure("correction did not clear syndromes")
        return fixed[: self.k]

    def _berlekamp_massey(self, syn):
        # polynomials here are lowest degree first
        C, B = [1], [1]
        L, mshift, b = 0, 1, 1
        for n in range(len(syn)):
            d = syn[n]
            for i in range(1, L + 1):
                if i < len(C):
                    d ^= self._mul(C[i], syn[n - i])
            if d == 0:
                mshift += 1
                continue
            coef = self._mul(d, self._inv(b))
            T = list(C)
            shifted = [0] * mshift + [self._mul(coef, v) for v in B]
            if len(shifted) > len(C):
                C = C + [0] * (len(shifted) - len(C))
            for i, v in enumerate(shifted):
                C[i] ^= v
            if 2 * L <= n:
                L, B, b, mshift = n + 1 - L, T, d, 1
            else:
                mshift += 1
        C = C[: L + 1] + [0] * max(0, L + 1 - len(C))
        return C

    def _chien(self, C):
        out = []
        for i in range(self.n):
            # position i has locator X = alpha^(n-1-i); root of C at X^-1
            e = (self.n - 1 - i) % self.q1
            xinv = self._exp[(self.q1 - e) % self.q1]
            acc, pw = 0, 1
            for c in C:
                acc ^= self._mul(c, pw)
                pw = self._mul(pw, xinv)
            if acc == 0:
                out.append(i)
        return out

    def _forney(self, syn, C, positions):
        # Omega = S(x) C(x) mod x^nsym, lowest degree first
        omega = [0] * self.nsym
        for i, s in enumerate(syn):
            for j, c in enumerate(C):
                if i + j < self.nsym:
                    omega[i + j] ^= self._mul(s, c)
        dC = [C[i] if i % 2 == 1 else 0 for i in range(1, len(C))]
        mags = []
        for p in positions:
            e = (self.n - 1 - p) % self.q1
            X = self._exp[e]
            xinv = self._exp[(self.q1 - e) % self.q1]
            num = self._peval_low(omega, xinv)
            den = self._peval_low(dC, xinv)
            if den == 0:
                raise DecodeFailure("Forney denominator vanished")
            # with first consecutive root alpha^1: e = X^(1-1) * Omega / C'
            mags.append(self._mul(num, self._inv(den)))
        return mags

    def _peval_low(self, p, x):
        acc, pw = 0, 1
        for c in p:
            acc ^= self._mul(c, pw)
            pw = self._mul(pw, x)
        return acc
