"""Command-line entry point: ``python -m icnoise`` or the ``icnoise`` script."""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from .adversary import pattern_count
from .bitcodec import AmdShape, NotACodeword, RobustCodec, from_hex, to_hex
from .channel import replay_trace
from .harness import RunSpec, exhaustive_oracle, metrics_line, run_one, summarize
from .params import PRESETS, SchemeConfig, params_table, preset
from .protocol import FAMILIES


def _config(args) -> SchemeConfig:
    if args.preset:
        return preset(args.preset, L=args.L, F=args.F, beta=args.beta)
    if args.L is None:
        raise SystemExit("--L or --preset is required")
    return SchemeConfig.build(args.L, F=args.F, beta=args.beta, max_iterations=args.max_iterations)


def _add_config_args(p):
    p.add_argument("--L", type=int)
    p.add_argument("--F", type=int, help="message width (power of two); derived when omitted")
    p.add_argument("--beta", type=int, help="fingerprint growth per iteration; minimal valid value when omitted")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--max-iterations", type=int, default=20)
    p.add_argument("--protocol", choices=FAMILIES, default="prf")
    p.add_argument("--protocol-seed", type=int, default=0)


def cmd_run(args):
    cfg = _config(args)
    if args.adversary.startswith("exhaustive"):
        _, _, arg = args.adversary.partition(":")
        w, k = (int(x) for x in arg.split(",")) if arg else (256, 2)
        return _oracle(cfg, args, w, k)
    spec = RunSpec(cfg, args.protocol, args.protocol_seed, args.adversary, args.public_channel,
                   args.assert_lemmas, args.max_steps)
    trace = open(args.trace, "w") if args.trace else None
    runs = []
    try:
        for s in range(args.seed, args.seed + args.runs):
            m = run_one(spec, s, trace=trace if s == args.seed else None)
            runs.append(m)
            print(metrics_line(m))
            if m.violations and args.trace is None:
                logging.warning("seed %d violated %d invariants; rerun with --trace to capture it", s,
                                len(m.violations))
    finally:
        if trace:
            trace.close()
    print(json.dumps({"summary": summarize(runs)}), file=sys.stderr)
    return 0 if all(not m.silent_failure and not m.violations for m in runs) else 1


def _oracle(cfg, args, window, max_flips):
    spec = RunSpec(cfg, args.protocol, args.protocol_seed, "exhaustive", max_steps=args.max_steps)
    total = pattern_count(window, max_flips) + 1
    print(f"enumerating {total} flip patterns", file=sys.stderr)
    rep = exhaustive_oracle(spec, window, max_flips, seed=args.seed,
                            progress=lambda i, n: print(f"  {i}/{n}", file=sys.stderr))
    print(json.dumps({"patterns": rep.patterns, "correct": rep.correct, "flagged": rep.flagged,
                      "timeouts": rep.timeouts, "silent_failures": rep.silent_failures[:20]}))
    return 0 if rep.ok else 1


def cmd_oracle(args):
    cfg = preset(args.preset)
    args.protocol = args.protocol or "prf"
    return _oracle(cfg, args, args.window, args.max_flips)


def cmd_replay(args):
    with open(args.trace) as fh:
        rep = replay_trace(fh)
    print(json.dumps(rep))
    return 0 if rep["ok"] else 1


def cmd_params(args):
    if args.F is not None and args.beta is not None:
        rows = params_table(args.L, args.F, args.beta, args.iterations)
        print(json.dumps({"L": args.L, "F": args.F, "beta": args.beta, "N1": -(-8 * args.L // args.F)}))
    else:
        cfg = SchemeConfig.build(args.L, F=args.F, beta=args.beta)
        print(json.dumps({"alg1": cfg.alg1.summary(), "beta": cfg.beta, "N1": cfg.N1}))
        rows = cfg.table(args.iterations)
    for r in rows:
        print(json.dumps(r))
    return 0


def cmd_codec(args):
    shape = AmdShape(args.k, args.payload_bits)
    codec = RobustCodec(shape, args.wire_bits or 5 * shape.width)
    rng = np.random.default_rng(args.seed)
    out = 0
    for line in sys.stdin:
        if not line.strip():
            continue
        bits = from_hex(line)
        if args.op == "encode":
            print(to_hex(codec.encode(bits, rng)))
        elif args.op == "decode":
            try:
                print(to_hex(codec.decode(bits)))
            except NotACodeword:
                print("NOT_A_CODEWORD")
                out = 1
        else:
            pos = rng.choice(bits.size, size=min(args.flips, bits.size), replace=False)
            bits[pos] ^= 1
            print(to_hex(bits))
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="icnoise", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="simulate runs and print one metrics record per run")
    _add_config_args(p)
    p.add_argument("--adversary", default="none",
                   help="none | iid:RATE[,BUDGET] | burst:S,N | sync:B | fp:B | silence:B | blind:B | "
                        "exhaustive:W,K | mitm")
    p.add_argument("--public-channel", action="store_true")
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--assert-lemmas", action="store_true")
    p.add_argument("--trace", help="write a per-step trace of the first run to this path")
    p.add_argument("--max-steps", type=int)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("replay", help="recompute ledger totals from a trace")
    p.add_argument("--trace", required=True)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("params", help="print the derived parameter schedule")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--F", type=int)
    p.add_argument("--beta", type=int)
    p.add_argument("--iterations", type=int, default=10)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("oracle", help="exhaustive small-flip enumeration at a preset")
    p.add_argument("--preset", default="tiny", choices=sorted(PRESETS))
    p.add_argument("--window", type=int, default=256)
    p.add_argument("--max-flips", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--protocol", choices=FAMILIES, default="prf")
    p.add_argument("--protocol-seed", type=int, default=0)
    p.add_argument("--max-steps", type=int)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("codec", help="AMD + Reed-Solomon codec over hex lines on stdin")
    p.add_argument("op", choices=("encode", "decode", "corrupt"))
    p.add_argument("--k", type=int, default=16)
    p.add_argument("--payload-bits", type=int, default=32)
    p.add_argument("--wire-bits", type=int)
    p.add_argument("--flips", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_codec)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
