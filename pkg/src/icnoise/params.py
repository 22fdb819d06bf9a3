"""Parameter derivation for both schemes.

All widths are computed, never hand-tuned.  For the adaptive-round scheme a
field width ``k`` fixes the message width ``F`` (smallest power of two that
holds both AMD-encoded messages, which is ``4k`` in practice), the initial
round size ``R0`` and the error budget ``mMax``.  For iteration ``j`` the
field width ``k_j`` is the smallest that meets the per-iteration failure
target for both the hash and the AMD code.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from functools import cached_property
from math import ceil, exp, log, log2

from .bitcodec import AmdShape, EccCode, HashFamily, PaddedAmd, RobustCodec

C_EXPANSION = 5
ALPHA = 2 * C_EXPANSION + 1
FIELD_CHOICES = (8, 16, 32, 64)


def next_pow2(x: float) -> int:
    p = 1
    while p < x:
        p <<= 1
    return p


def clog2(x: float) -> int:
    return max(0, ceil(log2(x))) if x > 0 else 0


def is_pow2(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0


def sync_field_widths(mmax: int, R0: int, Lpad: int) -> tuple[int, int, int]:
    """Bit widths of (m, log2 r, |verified transcript|) in the sync message."""
    return (max(1, clog2(mmax + 1)), clog2(log2(R0)) + 1, clog2(Lpad + R0 + 1))


@dataclass(frozen=True)
class Alg1Params:
    L: int
    k: int
    F: int
    R0: int
    mMax: int
    Lpad: int
    reduced: bool = False  # True when k misses the 1/L^2 failure target

    @classmethod
    def build(cls, L: int, k: int | None = None, F: int | None = None) -> "Alg1Params":
        if k is None:
            k, reduced = cls.auto_k(L)
        else:
            reduced = cls._failure_bound(L, k) > 1 / L ** 2
        F_min = cls._F_for(L, k)
        if F is None:
            F = F_min
        elif F < F_min or not is_pow2(F):
            raise ValueError(f"F={F} must be a power of two >= {F_min} for k={k}")
        if L < 16 * F:
            raise ValueError(f"L={L} must be at least 16F={16 * F}")
        R0 = next_pow2(ceil((L * F) ** 0.5 - 1e-9))
        while R0 * R0 < L * F:
            R0 *= 2
        mmax = R0 * R0 // (4 * F * F) - 1
        Lpad = (1 + -(-L // R0)) * R0
        p = cls(L, k, F, R0, mmax, Lpad, reduced)
        p.validate()
        return p

    @staticmethod
    def _F_for(L: int, k: int) -> int:
        # sync width depends on F only through R0 and Lpad; iterate to a fixed point
        F = next_pow2(4 * k)
        for _ in range(8):
            R0 = next_pow2((L * F) ** 0.5)
            mmax = max(1, R0 * R0 // (4 * F * F) - 1)
            Lpad = (1 + -(-L // R0)) * R0
            width = AmdShape(k, sum(sync_field_widths(mmax, R0, Lpad))).width
            nF = next_pow2(max(4 * k, width))
            if nF == F:
                break
            F = nF
        return F

    @staticmethod
    def _failure_bound(L: int, k: int) -> float:
        F = Alg1Params._F_for(L, k)
        R0 = next_pow2((L * F) ** 0.5)
        Lpad = (1 + -(-L // R0)) * R0
        return max(HashFamily(k, Lpad + R0).collision_bound, AmdShape(k, 2 * k).delta)

    @classmethod
    def auto_k(cls, L: int) -> tuple[int, bool]:
        """Smallest field width meeting 1/L^2, else the largest that fits ``L >= 16F``."""
        fitting = [k for k in FIELD_CHOICES if L >= 16 * cls._F_for(L, k)]
        if not fitting:
            raise ValueError(f"L={L} too small for any field width (needs L >= {16 * cls._F_for(L, 8)})")
        for k in fitting:
            if cls._failure_bound(L, k) <= 1 / L ** 2:
                return k, False
        return fitting[-1], True

    def validate(self):
        if not is_pow2(self.R0):
            raise ValueError("R0 must be a power of two")
        if self.min_round < 4 * self.F:
            raise ValueError(f"minimum round {self.min_round} < 4F={4 * self.F}")
        if self.sync_shape.width > self.F or self.fp_shape.width > self.F:
            raise ValueError("message shapes do not fit in F bits")

    @property
    def max_block(self) -> int:
        return self.R0

    @property
    def max_transcript(self) -> int:
        return self.Lpad + self.R0

    @property
    def min_round(self) -> int:
        # smallest round size reached while 0 <= m < mMax
        return self.round_size(self.mMax - 1)

    def round_size(self, m: int) -> int:
        e = 0
        while 4 ** (e + 1) <= 1 + m:
            e += 1
        return self.R0 >> e

    @cached_property
    def sync_widths(self) -> tuple[int, int, int]:
        return sync_field_widths(self.mMax, self.R0, self.Lpad)

    @cached_property
    def sync_shape(self) -> AmdShape:
        return AmdShape(self.k, sum(self.sync_widths))

    @cached_property
    def hash_family(self) -> HashFamily:
        return HashFamily(self.k, self.max_transcript)

    @cached_property
    def fp_shape(self) -> AmdShape:
        return AmdShape(self.k, self.hash_family.payload_bits)

    @cached_property
    def sync_codec(self) -> PaddedAmd:
        return PaddedAmd(self.sync_shape, self.F)

    @cached_property
    def fp_codec(self) -> PaddedAmd:
        return PaddedAmd(self.fp_shape, self.F)

    @property
    def failure_bound(self) -> float:
        return max(self.hash_family.collision_bound, self.sync_shape.delta, self.fp_shape.delta)

    def summary(self) -> dict:
        d = asdict(self)
        d.update(min_round=self.min_round, sync_widths=list(self.sync_widths),
                 failure_bound=self.failure_bound, poly_k=hex(self.hash_family.field.poly))
        return d


@dataclass(frozen=True)
class IterationParams:
    j: int
    L: int
    F: int
    beta: int
    Lpad: int
    R0: int
    c: int = C_EXPANSION

    @property
    def alpha(self) -> int:
        return 2 * self.c + 1

    @property
    def Fj(self) -> int:
        return self.F + 2 * self.beta * self.j

    @property
    def rho(self) -> int:
        return min(2 ** (self.j - 1) * -(-self.Fj // self.F), self.Fj)

    @property
    def N1(self) -> int:
        return -(-8 * self.L // self.F)

    @property
    def Nj(self) -> int:
        return 2 ** (self.j - 1) * self.N1

    @property
    def bits_per_round(self) -> int:
        return self.Fj // self.rho

    @property
    def leftover(self) -> int:
        return self.Fj - self.bits_per_round * self.rho

    @property
    def round_len(self) -> int:
        return self.alpha * self.Fj

    @property
    def length(self) -> int:
        return self.Nj * self.round_len

    @property
    def p(self) -> float:
        return 2.0 ** (-2 * self.j) / self.L ** 2

    @property
    def max_transcript(self) -> int:
        return self.Lpad + max(self.R0, self.Fj)

    @cached_property
    def k(self) -> int:
        """Smallest field width meeting ``p`` for both the hash and the AMD code."""
        k = max(2, ceil(log2(1 / self.p)))
        while not (HashFamily(k, self.max_transcript).collision_bound <= self.p
                   and AmdShape(k, max(2 * k, self.ts_width)).delta <= self.p):
            k += 1
        return k

    @property
    def ts_width(self) -> int:
        return clog2(self.Lpad + self.R0 + 1)

    @cached_property
    def hash_family(self) -> HashFamily:
        return HashFamily(self.k, self.max_transcript)

    @cached_property
    def sync_codec(self) -> RobustCodec:
        return RobustCodec(AmdShape(self.k, self.ts_width), self.c * self.Fj)

    @cached_property
    def fp_codec(self) -> RobustCodec:
        return RobustCodec(AmdShape(self.k, self.hash_family.payload_bits), self.c * self.Fj)

    @property
    def chernoff(self) -> float:
        return exp(-self.Fj / 18)

    def problems(self) -> list[str]:
        out = []
        for name, shape in (("sync", AmdShape(self.k, self.ts_width)),
                            ("fingerprint", AmdShape(self.k, 2 * self.k))):
            if shape.width > self.Fj:
                out.append(f"{name} AMD width {shape.width} > F_j={self.Fj}")
            try:
                EccCode(shape.width, self.c * self.Fj)
            except ValueError as exc:
                out.append(str(exc))
        if self.chernoff > self.p:
            out.append(f"e^(-F_j/18)={self.chernoff:.3g} > p_j={self.p:.3g}")
        return out

    def row(self) -> dict:
        return {"j": self.j, "Fj": self.Fj, "rhoj": self.rho, "Nj": self.Nj, "pj": self.p,
                "kj": self.k, "bits_per_round": self.bits_per_round, "round_len": self.round_len,
                "ok": not self.problems()}


def min_beta(L: int, F: int, Lpad: int, R0: int, iterations: int = 20) -> int:
    """Smallest beta for which every iteration up to ``iterations`` is well formed."""
    def good(b):
        return all(not IterationParams(j, L, F, b, Lpad, R0).problems() for j in range(1, iterations + 1))
    lo, hi = 0, 1
    while not good(hi):
        hi *= 2
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if good(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class SchemeConfig:
    alg1: Alg1Params
    beta: int
    max_iterations: int = 20
    c: int = C_EXPANSION

    @classmethod
    def build(cls, L: int, k: int | None = None, F: int | None = None, beta: int | None = None,
              max_iterations: int = 20) -> "SchemeConfig":
        a = Alg1Params.build(L, k, F)
        if beta is None:
            beta = min_beta(L, a.F, a.Lpad, a.R0, max_iterations)
        return cls(a, beta, max_iterations)

    @property
    def L(self) -> int:
        return self.alg1.L

    @property
    def F(self) -> int:
        return self.alg1.F

    @property
    def N1(self) -> int:
        return -(-8 * self.L // self.F)

    @property
    def iteration0_len(self) -> int:
        return 12 * self.L

    def iteration(self, j: int) -> IterationParams:
        return _iteration(self.L, self.F, self.beta, self.alg1.Lpad, self.alg1.R0, j, self.c)

    def iteration_start(self, j: int) -> int:
        s = self.iteration0_len
        for i in range(1, j):
            s += self.iteration(i).length
        return s

    @cached_property
    def _starts(self) -> list[int]:
        return [self.iteration_start(j) for j in range(1, self.max_iterations + 2)]

    def iteration_of_step(self, step: int) -> int:
        """Iteration index a global channel step belongs to (max_iterations + 1 past the end)."""
        if step < self.iteration0_len:
            return 0
        for j, s in enumerate(self._starts[1:], start=1):
            if step < s:
                return j
        return self.max_iterations + 1

    def table(self, iterations: int | None = None) -> list[dict]:
        return [self.iteration(j).row() for j in range(1, (iterations or self.max_iterations) + 1)]


_ITER_CACHE: dict = {}


def _iteration(L, F, beta, Lpad, R0, j, c):
    key = (L, F, beta, Lpad, R0, j, c)
    it = _ITER_CACHE.get(key)
    if it is None:
        it = _ITER_CACHE[key] = IterationParams(j, L, F, beta, Lpad, R0, c)
    return it


def params_table(L: int, F: int, beta: int, iterations: int = 10) -> list[dict]:
    """Arithmetic schedule (j, F_j, rho_j, N_j, p_j) for arbitrary L, F, beta.

    Pure arithmetic: works for any F, including values the runnable
    configuration would reject.
    """
    rows = []
    for j in range(1, iterations + 1):
        Fj = F + 2 * beta * j
        rows.append({"j": j, "Fj": Fj, "rhoj": min(2 ** (j - 1) * -(-Fj // F), Fj),
                     "Nj": 2 ** (j - 1) * -(-8 * L // F), "pj": 2.0 ** (-2 * j) / L ** 2})
    return rows


PRESETS = {
    # desk-scale parameterisation for the exhaustive oracle; misses the 1/L^2 target
    "tiny": dict(L=512, k=8),
}


def preset(name: str, **overrides) -> SchemeConfig:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    kw = dict(PRESETS[name])
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return SchemeConfig.build(**kw)
