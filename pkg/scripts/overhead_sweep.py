"""Measure L' - L against the flip budget T and fit the overhead constant.

Usage: python scripts/overhead_sweep.py [--L 2048] [--seeds 10] [--out sweep.jsonl]
"""

from __future__ import annotations

import argparse
import json
import time
from dataclasses import asdict, dataclass, field

from icnoise.harness import RunSpec, fit_overhead, run_one, shape_term, summarize
from icnoise.params import SchemeConfig


@dataclass
class SweepConfig:
    L: int = 2048
    seeds: int = 10
    budgets: list[int] = field(default_factory=list)  # defaults to 0, L/64, L/8, L, 4L
    strategy: str = "fp"
    max_steps: int = 20_000_000
    out: str | None = None

    def resolved_budgets(self) -> list[int]:
        L = self.L
        return self.budgets or [0, L // 64, L // 8, L, 4 * L]


def sweep(cfg: SweepConfig) -> dict:
    scheme = SchemeConfig.build(cfg.L)
    points, rows = [], []
    sink = open(cfg.out, "w") if cfg.out else None
    try:
        for T in cfg.resolved_budgets():
            adv = "none" if T == 0 else f"{cfg.strategy}:{T}"
            spec = RunSpec(scheme, adversary=adv, max_steps=cfg.max_steps)
            t0 = time.time()
            runs = [run_one(spec, s) for s in range(cfg.seeds)]
            summary = summarize(runs)
            ratio = max((m.L_prime - cfg.L) / shape_term(cfg.L, m.T) for m in runs)
            row = {"budget": T, "ratio": round(ratio, 2), "seconds": round(time.time() - t0, 1), **summary}
            rows.append(row)
            print(json.dumps(row), flush=True)
            points += [(cfg.L, m.T, m.L_prime) for m in runs if m.success]
            if sink:
                for m in runs:
                    sink.write(json.dumps(m.as_dict(), default=str) + "\n")
    finally:
        if sink:
            sink.close()
    return {"config": asdict(cfg), "beta": scheme.beta, "fitted_k": fit_overhead(points), "rows": rows}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--L", type=int, default=2048)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--budgets", type=int, nargs="*", default=[])
    ap.add_argument("--strategy", default="fp", choices=["fp", "sync", "silence", "blind"])
    ap.add_argument("--max-steps", type=int, default=20_000_000)
    ap.add_argument("--out")
    a = ap.parse_args()
    res = sweep(SweepConfig(a.L, a.seeds, a.budgets, a.strategy, a.max_steps, a.out))
    print(json.dumps({"fitted_k": round(res["fitted_k"], 2), "beta": res["beta"]}))


if __name__ == "__main__":
    main()
