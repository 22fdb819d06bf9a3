"""Compare a public-channel man in the middle with a bit-blind one on a private channel.

Usage: python scripts/mitm_demo.py [--runs 20] [--blind-budget 4096]
"""

from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass

from icnoise.harness import RunSpec, run_one, summarize
from icnoise.params import preset


@dataclass
class DemoConfig:
    preset: str = "tiny"
    runs: int = 20
    blind_budget: int = 4096
    public_max_steps: int = 20 * 512


def demo(cfg: DemoConfig) -> dict:
    scheme = preset(cfg.preset)
    public = [run_one(RunSpec(scheme, adversary="mitm", public=True, max_steps=cfg.public_max_steps), s)
              for s in range(cfg.runs)]
    private = [run_one(RunSpec(scheme, adversary=f"blind:{cfg.blind_budget}"), s) for s in range(cfg.runs)]
    return {
        "config": asdict(cfg),
        "public": {"bob_output_substituted": sum(m.notes["bob_output_is_alt"] for m in public),
                   "alice_correct": sum(m.success_alice for m in public), **summarize(public)},
        "private": summarize(private),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", default="tiny")
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--blind-budget", type=int, default=4096)
    a = ap.parse_args()
    print(json.dumps(demo(DemoConfig(a.preset, a.runs, a.blind_budget)), indent=2))


if __name__ == "__main__":
    main()
