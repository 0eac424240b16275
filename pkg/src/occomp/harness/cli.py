"""Command line front end.

Subcommands: run, sweep, verify, block-search, gen-source. Exit status is 0
when every applicable guarantee holds, 2 when one is violated and 1 on
runtime errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import RunConfig, parse_channel
from .runner import (EpisodeTrace, any_violation, block_search, build_components, build_source,
                     evaluate_verdicts, guarantee_params, run_episode, _child_seeds)
from .sweep import sweep

EXIT_OK, EXIT_ERROR, EXIT_VIOLATED = 0, 1, 2


def _float_list(text: str) -> list:
    return [float(v) for v in text.split(",") if v.strip()]


def _int_list(text: str) -> list:
    if ":" in text:
        lo, hi = text.split(":")
        return list(range(int(lo), int(hi)))
    return [int(v) for v in text.split(",") if v.strip()]


def add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--scheme")
    p.add_argument("--D", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--lambda0", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--channel", help="ideal | bernoulli:E | periodic:P[,PHASE] | ge:A,B[,EB,EG] | JSON")
    p.add_argument("--T", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--alphabet-size", type=int)
    p.add_argument("--out-dir")


def config_from_args(args) -> RunConfig:
    """Config file (if any) with command-line flags layered on top."""
    data = json.loads(Path(args.config).read_text()) if args.config else {}
    data = dict(data)
    data.update(data.pop("hyperparameters", None) or {})
    for name in ("scheme", "D", "eta", "lambda0", "epsilon", "T", "seed"):
        val = getattr(args, name, None)
        if val is not None:
            data[name] = val
    if getattr(args, "alphabet_size", None) is not None:
        data["alphabet_size"] = args.alphabet_size
    if getattr(args, "channel", None):
        data["channel"] = parse_channel(args.channel)
    if getattr(args, "out_dir", None):
        data["output"] = {**RunConfig().output, **data.get("output", {}), "dir": args.out_dir}
    return RunConfig.from_dict(data)


def cmd_run(args) -> int:
    cfg = config_from_args(args)
    _, summary = run_episode(cfg)
    brief = {k: summary[k] for k in ("scheme", "seed", "T", "D", "R_T", "avg_distortion", "outage_rate",
                                     "erasure_rate", "lambda_final", "Q_T", "divergences")}
    brief["verdicts"] = {k: v["status"] for k, v in summary["verdicts"].items()}
    print(json.dumps(brief, indent=2))
    return EXIT_VIOLATED if any_violation(summary) else EXIT_OK


def cmd_sweep(args) -> int:
    cfg = config_from_args(args)
    schemes = args.schemes.split(",") if args.schemes else None
    path = None
    if cfg.output.get("dir"):
        Path(cfg.output["dir"]).mkdir(parents=True, exist_ok=True)
        path = Path(cfg.output["dir"]) / "sweep.csv"
        cfg = cfg.replace(output={**cfg.output, "dir": None})
    text, rows = sweep(cfg, _float_list(args.D_grid), _int_list(args.seeds), schemes, path)
    if path is None:
        sys.stdout.write(text)
    else:
        print(f"wrote {len(rows)} rows to {path}")
    if any(r["status"] == "error" for r in rows):
        for r in rows:
            if r["status"] == "error":
                print(f"{r['scheme']} D={r['D']} seed={r['seed']}: {r['error']}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_VIOLATED if any(r["status"] == "violated" for r in rows) else EXIT_OK


def cmd_verify(args) -> int:
    cfg = config_from_args(args)
    comp = build_components(cfg)
    lam_final = args.lambda_final
    sibling = Path(str(args.trace).replace(".trace.jsonl", ".summary.json"))
    if lam_final is None and sibling.exists() and sibling != Path(args.trace):
        lam_final = json.loads(sibling.read_text())["lambda_final"]
    trace = EpisodeTrace.read_jsonl(args.trace, lam_final)
    verdicts = evaluate_verdicts(trace, guarantee_params(cfg, comp.L, comp.measure.d_max))
    print(json.dumps(verdicts, indent=2))
    return EXIT_VIOLATED if any(v["status"] == "violated" for v in verdicts.values()) else EXIT_OK


def cmd_block_search(args) -> int:
    cfg = config_from_args(args)
    result = block_search(cfg)
    print(json.dumps({"scheme": cfg.scheme, "D": cfg.D, "s_star": result["s_star"]}))
    if args.verbose:
        for s, d, r in zip(result["grid"], result["distortion"], result["rate"]):
            print(f"{s:12.6g} {d:8.4f} {r:8.4f}")
    return EXIT_OK if result["s_star"] is not None else EXIT_ERROR


def cmd_gen_source(args) -> int:
    cfg = config_from_args(args)
    sample = build_source(cfg, _child_seeds(cfg.seed)[0])
    out = Path(args.output)
    if out.suffix == ".json":
        out.write_text(json.dumps(sample.symbols.tolist()))
    else:
        out.write_bytes(sample.symbols.astype("<u2").tobytes())
    if sample.boundaries:
        print(json.dumps({"boundaries": sample.boundaries}))
    print(f"wrote {sample.symbols.size} symbols to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="occomp", description="Online conformal compression simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one episode")
    add_common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="grid over D, seeds and schemes; CSV out")
    add_common(p)
    p.add_argument("--D-grid", default="0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")
    p.add_argument("--seeds", default="0", help="comma list or LO:HI range")
    p.add_argument("--schemes", help="comma-separated scheme names")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="re-check guarantees on a trace file")
    add_common(p)
    p.add_argument("--trace", required=True)
    p.add_argument("--lambda-final", type=float, help="final parameter value (default: sibling summary file, else last recorded)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("block-search", help="offline fixed-parameter search")
    add_common(p)
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_block_search)

    p = sub.add_parser("gen-source", help="write a synthetic symbol sequence")
    add_common(p)
    p.add_argument("-o", "--output", required=True, help=".json or raw uint16 file")
    p.set_defaults(func=cmd_gen_source)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
