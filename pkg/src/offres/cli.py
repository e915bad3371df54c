"""Command-line front end: ``offres run|figure|scan|optimize-gaussian``."""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .errors import ConfigError, NoCandidate, NumericalContractViolation, OffresError
from .scenario import (
    JOB_KINDS,
    apply_overrides,
    emit_csv,
    figure,
    preset_names,
    run_to_files,
    scan_to_files,
    write_record,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4


def _range(text):
    try:
        lo, hi, n = text.split(":")
        return float(lo), float(hi), int(n)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected lo:hi:n, got {text!r}") from exc


def _read_json(path):
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def build_parser():
    p = argparse.ArgumentParser(prog="offres", description=__doc__)
    p.add_argument("--seed", type=int, help="override the noise / random-field seed")
    p.add_argument("--samples", type=int, help="override the number of output samples")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one scenario config")
    r.add_argument("config")
    r.add_argument("--out", help="output prefix (default: the config's 'output' or name)")

    f = sub.add_parser("figure", help="run a figure preset")
    f.add_argument("preset", help="one of: " + ", ".join(preset_names()))
    f.add_argument("--out", default=".", help="output directory")

    s = sub.add_parser("scan", help="run a sweep spec (kinds: " + ", ".join(JOB_KINDS) + ")")
    s.add_argument("spec")
    s.add_argument("--out", help="output prefix")

    g = sub.add_parser("optimize-gaussian", help="search Gaussian-train (A, xi) for inversion")
    g.add_argument("--delta", type=float, required=True)
    g.add_argument("--a-range", type=_range, required=True, metavar="LO:HI:N")
    g.add_argument("--xi-range", type=_range, required=True, metavar="LO:HI:N")
    g.add_argument("--m", type=int, default=0)
    g.add_argument("--pulses", type=int, help="require this pulse count")
    g.add_argument("--out", default="gaussian_search", help="output prefix")
    return p


def _dispatch(args):
    if args.command == "run":
        cfg = apply_overrides(_read_json(args.config), args.seed, args.samples)
        return run_to_files(cfg, args.out)
    if args.command == "figure":
        return figure(args.preset, args.out, seed=args.seed, samples=args.samples)
    if args.command == "scan":
        spec = _read_json(args.spec)
        if not isinstance(spec, dict):
            raise ConfigError("<root>", "spec must be a JSON object")
        return scan_to_files(spec, args.out)
    job = {"kind": "gaussian_search", "delta": args.delta, "a_range": list(args.a_range),
           "xi_range": list(args.xi_range), "m": args.m, "pulses": args.pulses}
    start = time.perf_counter()
    result = JOB_KINDS["gaussian_search"](job)
    path = emit_csv(result.columns, f"{args.out}.csv")
    write_record(path, job, result.diagnostics, time.perf_counter() - start)
    return [path]


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        paths = _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoCandidate as exc:
        print(f"no candidate: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except NumericalContractViolation as exc:
        print(f"numerical contract violated: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OffresError as exc:
        # remaining library errors stem from the chosen parameters
        print(f"config error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for p in paths:
        print(p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
