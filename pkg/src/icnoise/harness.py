"""Experiment runner, bad-event monitor and runtime invariant checks.

The harness sees everything: both parties' state, what each actually sent
and the ground-truth transcript.  It uses that to tag the three events that
can make a party output garbage (hash collision, AMD failure, false
silence) and, with ``check_lemmas``, to assert the structural invariants
of both schemes on every run.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from math import log2, sqrt

import numpy as np

from .adversary import (Adversary, FlipPattern, MitmPublic, flip_patterns, parse_adversary,
                        pattern_count)
from .channel import Engine, RunResult
from .params import SchemeConfig, is_pow2
from .protocol import ALICE, BOB, PaddedProtocol, ProtocolSpec, Transcript
from .scheme import SchemeAlice, SchemeBob, classify_rounds, padded_protocol

BAD_EVENTS = ("hash_collision", "amd_failure", "false_silence")


@dataclass
class RunMetrics:
    seed: int
    L: int
    F: int
    beta: int
    adversary: str
    T: int
    steps: int
    steps_alice: int | None
    steps_bob: int | None
    success_alice: bool
    success_bob: bool
    iteration_alice: int | None
    iteration_bob: int | None
    bad_events: dict
    timeout: bool
    gave_up: bool
    flips_by_iteration: dict
    silence_charges: int
    illegal_actions: int
    violations: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return self.success_alice and self.success_bob

    @property
    def any_bad_event(self) -> bool:
        return any(self.bad_events.values())

    @property
    def silent_failure(self) -> bool:
        """Wrong or missing output with no bad event, timeout or give-up to explain it."""
        return not self.success and not self.any_bad_event and not self.timeout and not self.gave_up

    @property
    def L_prime(self) -> int:
        """Channel steps until the later party stopped (the whole run if one never did)."""
        if self.steps_alice is None or self.steps_bob is None:
            return self.steps
        return max(self.steps_alice, self.steps_bob)

    @property
    def rate(self) -> float:
        return self.L / self.L_prime if self.L_prime else 0.0

    def as_dict(self) -> dict:
        d = asdict(self)
        d.update(success=self.success, silent_failure=self.silent_failure, rate=self.rate,
                 L_prime=self.L_prime)
        return d


@lru_cache(maxsize=64)
def padded_reference(proto: PaddedProtocol, length: int) -> bytes:
    """Noise-free transcript of the padded protocol, ``length`` bits long."""
    t = Transcript()
    for _ in range(length):
        t.append(proto.bit(proto.direction(len(t)), t))
    return bytes(t.bits)


class Monitor:
    """Tags bad events from party hooks and checks invariants after every engine span."""

    def __init__(self, cfg: SchemeConfig, alice, bob, reference: bytes, check_lemmas: bool):
        self.cfg = cfg
        self.parties = [alice, bob]
        self.ref = reference
        self.check = check_lemmas
        self.bad = {k: False for k in BAD_EVENTS}
        self.details: list = []
        self.violations: list = []
        self.engine: Engine | None = None
        self._alice_round_ended = False
        self.bob_m_at: dict = {}
        for p in (alice, bob):
            p.hook = self.hook
            p.rounds = []

    # -- bad events -----------------------------------------------------
    def _flag(self, kind, step, why):
        self.bad[kind] = True
        if len(self.details) < 50:
            self.details.append({"event": kind, "step": step, "why": why})

    def _other_present(self, who: int) -> bool:
        return not (self.engine is not None and self.engine.done[1 - who])

    def hook(self, party, event, **info):
        who = party.role
        other = self.parties[1 - who]
        if event == "accept":
            rec = other.last_sent.get(info["kind"])
            payload = bytes(np.asarray(info["payload"], np.uint8))
            if not self._other_present(who) or rec is None or rec.start != info["start"] \
                    or rec.payload != payload:
                self._flag("amd_failure", info["start"], f"{party.name} accepted a {info['kind']} nobody sent")
        elif event == "fp_match":
            rec = other.last_sent.get("fp")
            if rec is not None and rec.start == info["start"] and rec.snapshot != bytes(party.T.bits):
                self._flag("hash_collision", info["start"], "fingerprint matched a different transcript")
        elif event == "silence":
            if self._other_present(who):
                rec = other.last_sent.get("sync")
                if party.iteration == 0 and rec is not None and rec.start == info["start"]:
                    self._flag("amd_failure", info["start"], "sync message arrived with all bits equal")
                else:
                    self._flag("false_silence", info["start"], "Bob saw silence while Alice was present")
        elif event == "round_end" and who == ALICE:
            self._alice_round_ended = True

    # -- invariants -----------------------------------------------------
    def violate(self, lemma: str, step: int, detail: str):
        if len(self.violations) < 200:
            self.violations.append({"lemma": lemma, "step": step, "detail": detail})

    def observe(self, engine: Engine):
        self.engine = engine
        if not self.check:
            self._alice_round_ended = False
            return
        a, b = self.parties
        clean = not any(self.bad.values())
        if not engine.done[ALICE] and a.iteration == 0 and b.iteration == 0 and not engine.done[BOB]:
            if b.m > a.m and clean:
                self.violate("m_b <= m_a", engine.step, f"m_b={b.m} > m_a={a.m}")
        if self._alice_round_ended:
            self._alice_round_ended = False
            self.bob_m_at[engine.step] = b.m
            if clean and not engine.done[ALICE]:
                self._check_chain(engine)

    def _check_chain(self, engine):
        a, b = self.parties
        if engine.done[BOB] or (a.rounds and a.rounds[-1].outcome == "cut"):
            return
        Ta = bytes(a.T.bits)
        Tsa = Ta[: a.star]
        Tb = bytes(b.T.bits)
        Tsb = Tb[: b.star]
        if Ta != Tsa:
            self.violate("prefix chain", engine.step, "T_a differs from its verified prefix at a round boundary")
        ok = Tsa.startswith(Tsb) and Tb.startswith(Tsa)
        strict = (len(Tsb) < len(Tsa)) + (len(Tsa) < len(Tb))
        if not ok or strict > 1:
            self.violate("prefix chain", engine.step,
                         f"|Tsb|={len(Tsb)} |Tsa|={len(Tsa)} |Tb|={len(Tb)} prefix_ok={ok}")
        if not self.ref.startswith(Tsa):
            self.violate("verified prefix of reference", engine.step, f"|Tsa|={len(Tsa)}")

    def final_checks(self, result: RunResult):
        if not self.check:
            return
        a, b = self.parties
        cfg = self.cfg
        clean = not any(self.bad.values())
        ra = [r for r in a.rounds if r.end >= 0]
        rb = [r for r in b.rounds if r.end >= 0]
        for who, rounds in (("alice", ra), ("bob", rb)):
            for r in rounds:
                if r.iteration == 0 and r.outcome != "cut" and not is_pow2(r.size):
                    self.violate("round size power of two", r.start, f"{who} round size {r.size}")
        if not clean:
            return
        t_a, t_b = result.terminated_at
        if a.terminated and b.terminated and t_b < t_a:
            self.violate("Bob leaves after Alice", t_b, f"Bob at {t_b}, Alice at {t_a}")
        # Bob's adaptive rounds start with one of Alice's and are the same size or double
        a_by_start = {r.start: r for r in ra if r.iteration == 0}
        alice_gone = t_a if a.terminated else None
        # Alice's adaptive loop may stop early (error budget spent) and pad to 12L
        alice_loop_end = max((r.end for r in ra if r.iteration == 0 and r.outcome != "cut"), default=0)
        for r in rb:
            if r.iteration != 0 or r.outcome in ("cut", "terminate") or r.start >= alice_loop_end:
                continue
            ar = a_by_start.get(r.start)
            if ar is None:
                self.violate("Bob's round starts with Alice's", r.start, "no Alice round starts here")
            elif r.size not in (ar.size, 2 * ar.size):
                self.violate("r_b in {r_a, 2r_a}", r.start, f"r_b={r.size} r_a={ar.size}")
        # iteration j rounds start together
        a_starts = {r.start for r in ra if r.iteration > 0}
        for r in rb:
            if r.iteration > 0 and (alice_gone is None or r.start < alice_gone) and r.start not in a_starts:
                self.violate("iteration rounds aligned", r.start, "Bob round start without Alice's")
        # phase statistics of the adaptive rounds
        flips = result.ledger.flip_steps
        cls = classify_rounds(a.rounds, flips, self.bob_m_at, cfg.alg1.R0)
        for p, st in cls.phases.items():
            if st.wasted > (0 if p == 0 else 2 ** (p - 1)):
                self.violate("wasted rounds per phase", 0, f"phase {p}: {st.wasted} wasted")
            if st.delta is not None and st.delta > 2 ** p:
                self.violate("Delta_j <= 2^j", 0, f"phase {p}: delta {st.delta}")
        it0 = [r for r in ra if r.iteration == 0]
        if it0:
            m_end = it0[-1].m_after
            T0 = result.ledger.flips_by_iteration.get(0, 0)
            if T0 > 0 and m_end > T0 + sqrt(T0):
                self.violate("m_a <= T + sqrt(T)", it0[-1].end, f"m_a={m_end} T={T0}")
            if T0 == 0 and m_end > 0:
                self.violate("m_a <= T + sqrt(T)", it0[-1].end, f"m_a={m_end} with no flips")
        if a.terminated and b.terminated and a.iteration == 0 and b.iteration == 0:
            if max(t_a, t_b) > cfg.iteration0_len:
                self.violate("12L step bound", max(t_a, t_b), "")
        if a.terminated and b.terminated:
            if result.ledger.flips_by_iteration.get(0, 0) < -(-cfg.L // (8 * cfg.F)):
                if a.iteration != 0 or b.iteration != 0:
                    self.violate("few flips end in iteration 0", max(t_a, t_b),
                                 f"T_0={result.ledger.flips_by_iteration.get(0, 0)}")
        # uncorrupted rounds in completed, non-final iterations
        last = max(a.iteration, b.iteration)
        for j in range(1, last):
            it = cfg.iteration(j)
            clean_rounds = sum(1 for r in ra if r.iteration == j and
                               _count(flips, r.start, r.end) == 0)
            if clean_rounds > it.Nj / 4:
                self.violate("uncorrupted rounds <= N_j/4", cfg.iteration_start(j),
                             f"iteration {j}: {clean_rounds} > {it.Nj / 4}")

    def report(self) -> dict:
        return {"bad_events": dict(self.bad), "details": self.details, "violations": self.violations}


def _count(steps, start, end):
    return bisect.bisect_left(steps, end) - bisect.bisect_left(steps, start)


@dataclass
class RunSpec:
    """Everything that determines one run, apart from the seed."""

    config: SchemeConfig
    protocol: str = "prf"
    protocol_seed: int = 0
    adversary: str = "none"
    public: bool = False
    check_lemmas: bool = False
    max_steps: int | None = None


def seeds_for(seed: int):
    ss = np.random.SeedSequence(seed)
    a, b, adv, pad = ss.spawn(4)
    return (np.random.default_rng(a), np.random.default_rng(b), np.random.default_rng(adv),
            int(pad.generate_state(2, dtype=np.uint32)[0]) << 32 | int(pad.generate_state(2, dtype=np.uint32)[1]))


@dataclass
class RunContext:
    """A wired-up run that has not been started: parties, adversary, engine and monitor."""

    spec: RunSpec
    seed: int
    alice: SchemeAlice
    bob: SchemeBob
    adversary: Adversary
    engine: Engine
    monitor: Monitor
    reference: bytes


def build_run(spec: RunSpec, seed: int, *, adversary: Adversary | None = None, trace=None,
              alice_protocol: ProtocolSpec | None = None) -> RunContext:
    cfg = spec.config
    L = cfg.L
    base = ProtocolSpec(L, spec.protocol, spec.protocol_seed)
    rng_a, rng_b, rng_adv, pad_seed = seeds_for(seed)
    proto = padded_protocol(base, cfg, pad_seed)
    alice = SchemeAlice(cfg, proto, rng_a)
    bob = SchemeBob(cfg, proto, rng_b)
    if adversary is None:
        def fake():
            pc = base.rekey_alice(seed + 1_000_003) if alice_protocol is None else alice_protocol
            return SchemeAlice(cfg, padded_protocol(pc, cfg, pad_seed ^ 0x5DEECE66D),
                               np.random.default_rng(np.random.SeedSequence(seed).spawn(5)[4]))
        adversary = parse_adversary(spec.adversary, cfg, rng_adv, public=spec.public, fake_alice_factory=fake)
    if adversary.needs_public and not spec.public:
        raise ValueError("this adversary needs a public channel")
    ref = padded_reference(proto, cfg.alg1.max_transcript)
    mon = Monitor(cfg, alice, bob, ref, spec.check_lemmas)
    engine = Engine(alice, bob, adversary, spec.max_steps or 200 * L, public=spec.public,
                    labeler=cfg.iteration_of_step, trace=trace, observer=mon.observe)
    mon.engine = engine
    return RunContext(spec, seed, alice, bob, adversary, engine, mon, ref)


def finish_run(ctx: RunContext) -> RunMetrics:
    """Run the engine to completion and score the outputs against the reference."""
    cfg, spec, mon = ctx.spec.config, ctx.spec, ctx.monitor
    alice, bob, adversary = ctx.alice, ctx.bob, ctx.adversary
    L = cfg.L
    res = ctx.engine.run()
    mon.final_checks(res)
    truth = ctx.reference[:L]
    outs = res.outputs
    ok = [o is not None and bytes(o.astype(np.uint8)) == truth for o in outs]
    led = res.ledger
    notes = {"bad_event_details": mon.details}
    if isinstance(adversary, MitmPublic):
        alt = padded_reference(adversary.fake.proto, L)
        notes["bob_output_is_alt"] = outs[1] is not None and bytes(outs[1].astype(np.uint8)) == alt
    return RunMetrics(
        seed=ctx.seed, L=L, F=cfg.F, beta=cfg.beta, adversary=spec.adversary, T=led.flips,
        steps=res.steps, steps_alice=res.terminated_at[0], steps_bob=res.terminated_at[1],
        success_alice=ok[0], success_bob=ok[1],
        iteration_alice=alice.iteration if alice.terminated else None,
        iteration_bob=bob.iteration if bob.terminated else None,
        bad_events=dict(mon.bad), timeout=res.timeout, gave_up=alice.gave_up or bob.gave_up,
        flips_by_iteration=dict(led.flips_by_iteration), silence_charges=led.silence_charges,
        illegal_actions=led.illegal_actions, violations=mon.violations,
        notes=notes)


def run_one(spec: RunSpec, seed: int, *, adversary: Adversary | None = None, trace=None,
            alice_protocol: ProtocolSpec | None = None) -> RunMetrics:
    return finish_run(build_run(spec, seed, adversary=adversary, trace=trace, alice_protocol=alice_protocol))


def run_experiment(spec: RunSpec, seeds, **kw):
    for s in seeds:
        yield run_one(spec, s, **kw)


# -- exhaustive oracle ---------------------------------------------------

@dataclass
class OracleReport:
    patterns: int
    correct: int
    flagged: int
    timeouts: int
    silent_failures: list

    @property
    def ok(self) -> bool:
        return not self.silent_failures


def exhaustive_oracle(spec: RunSpec, window: int = 256, max_flips: int = 2, seed: int = 0,
                      limit: int = 10 ** 6, progress=None) -> OracleReport:
    """Run every flip pattern with at most ``max_flips`` flips in the first ``window`` steps."""
    total = pattern_count(window, max_flips) + 1
    if total > limit:
        raise ValueError(f"{total} patterns exceed the enumeration cap {limit}")
    correct = flagged = timeouts = 0
    silent = []
    patterns = [()] + list(flip_patterns(window, max_flips))
    for i, pat in enumerate(patterns):
        m = run_one(spec, seed, adversary=FlipPattern(pat))
        if m.success:
            correct += 1
        elif m.any_bad_event:
            flagged += 1
        elif m.timeout or m.gave_up:
            timeouts += 1
        else:
            silent.append(list(pat))
        if progress and i % 1000 == 0:
            progress(i, total)
    return OracleReport(len(patterns), correct, flagged, timeouts, silent)


# -- overhead fit --------------------------------------------------------

def shape_term(L: int, T: int) -> float:
    return sqrt(L * (T + 1) * log2(L)) + T


def fit_overhead(points) -> float:
    """Smallest k with (L' - L) <= k * shape_term(L, T) over all (L, T, L') points."""
    return max(((lp - L) / shape_term(L, T) for L, T, lp in points), default=0.0)


def summarize(metrics: list[RunMetrics]) -> dict:
    n = len(metrics)
    return {
        "runs": n,
        "successes": sum(m.success for m in metrics),
        "silent_failures": sum(m.silent_failure for m in metrics),
        "bad_events": {k: sum(m.bad_events[k] for m in metrics) for k in BAD_EVENTS},
        "timeouts": sum(m.timeout for m in metrics),
        "gave_up": sum(m.gave_up for m in metrics),
        "mean_T": float(np.mean([m.T for m in metrics])) if n else 0.0,
        "mean_L_prime": float(np.mean([m.L_prime for m in metrics])) if n else 0.0,
        "max_L_prime": max((m.L_prime for m in metrics), default=0),
        "violations": sum(len(m.violations) for m in metrics),
    }


def metrics_line(m: RunMetrics) -> str:
    return json.dumps(m.as_dict(), default=str)
