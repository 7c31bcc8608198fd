"""Command line entry point: ``gramshift {verify,gram,trigsum,scan}``."""

from __future__ import annotations

import argparse
import csv
import logging
import math
import re
import sys
import warnings

from .config import RSConfig
from .grid import Window, enumerate_nodes
from .harness import ConfigError, RunConfig, emit, run, to_csv, to_json
from .theorems import dyadic_sweep, trig_sum

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2

_PI_TERM = re.compile(r"^\s*(-?)\s*([0-9.]*)\s*\*?\s*pi\s*(?:/\s*([0-9.]+))?\s*$")


def parse_number(text: str) -> float:
    """Float, or a multiple of pi such as 'pi/4', '3pi/4', '-pi'."""
    m = _PI_TERM.match(text)
    if m:
        sign, coef, div = m.groups()
        value = (float(coef) if coef else 1.0) * math.pi / (float(div) if div else 1.0)
        return -value if sign else value
    return float(text)


def _number_list(text: str) -> list[float]:
    return [parse_number(tok) for tok in text.split(",") if tok.strip()]


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file mirroring RunConfig; flags override it")
    p.add_argument("--H", type=float, help="window length for --h-rule fixed (implies it)")
    p.add_argument("--h-rule", choices=("fixed", "delta_ln", "sixth_eps"))
    p.add_argument("--tau", type=_number_list, help="comma-separated tau grid, e.g. 0,pi/4,pi")
    p.add_argument("--offset", type=_number_list, help="comma-separated x/y offsets in (0, pi/2]")
    p.add_argument("--delta", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--lindelof", action="store_true", default=None, help="normalise residuals with delta = epsilon/2")
    p.add_argument("--claims", type=lambda s: [c.strip() for c in s.split(",") if c.strip()])
    p.add_argument("--rs-order", type=int, choices=(0, 1, 2, 3))
    p.add_argument("--threads", type=int)
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gramshift", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the configured claims over a T-ladder")
    p.add_argument("--T", type=_number_list, help="comma-separated T ladder")
    _add_run_flags(p)

    p = sub.add_parser("scan", help="verify over a geometric T-ladder")
    p.add_argument("--from", dest="t_from", type=float, default=1e6)
    p.add_argument("--to", dest="t_to", type=float, default=1e8)
    p.add_argument("--per-decade", type=int, default=1)
    _add_run_flags(p)

    p = sub.add_parser("gram", help="print shifted Gram points t_nu(tau) of a window")
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--H", type=float, required=True)
    p.add_argument("--tau", type=parse_number, default=0.0)
    p.add_argument("--parity", choices=("all", "even", "odd"), default="all")
    p.add_argument("--rs-order", type=int, choices=(0, 1, 2, 3), default=1)
    p.add_argument("--out")

    p = sub.add_parser("trigsum", help="|sum n^{it}| over a <= n < b, or the dyadic sweep")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--out")
    return parser


def _run_config(args: argparse.Namespace, ladder) -> RunConfig:
    base = RunConfig.from_json(args.config).to_dict() if args.config else {}
    if ladder is not None:
        base["T_ladder"] = ladder
    if args.H is not None:
        base["H"] = args.H
        base.setdefault("h_rule", "fixed")
    overrides = {
        "h_rule": args.h_rule,
        "tau_grid": args.tau,
        "offset_grid": args.offset,
        "delta": args.delta,
        "epsilon": args.epsilon,
        "lindelof": args.lindelof,
        "claims": args.claims,
        "threads": args.threads,
        "output": args.format,
        "out_path": args.out,
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    if args.rs_order is not None:
        rs = dict(base.get("rs") or {})
        rs["correction_order"] = args.rs_order
        base["rs"] = rs
    return RunConfig.from_dict(base)


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_verify(args, ladder) -> int:
    cfg = _run_config(args, ladder)
    out_path, cfg.out_path = cfg.out_path, None
    reports = run(cfg)
    if out_path:
        emit(reports, cfg.output, out_path)
    else:
        _write(to_csv(reports) if cfg.output == "csv" else to_json(reports), None)
    failed = sum(r.error is not None for r in reports)
    logging.getLogger("gramshift").info("%d cells, %d failed", len(reports), failed)
    return EXIT_OK


def _cmd_gram(args) -> int:
    rs = RSConfig(correction_order=args.rs_order)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        w = Window(args.T, args.H)
    from .rs import z

    nodes = enumerate_nodes(w, args.tau, args.parity, rs)
    zs = z([n.t for n in nodes], rs) if nodes else []
    lines = ["nu,tau,t,z"] + [f"{n.nu},{n.tau:.17g},{n.t:.17g},{v:.17g}" for n, v in zip(nodes, zs)]
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_trigsum(args) -> int:
    if (args.a is None) != (args.b is None):
        raise ConfigError("give both --a and --b, or neither for the dyadic sweep")
    rows = [trig_sum(args.a, args.b, args.t)] if args.a is not None else dyadic_sweep(args.t)
    lines = ["a,b,t,modulus,delta_hat"] + [f"{r.a},{r.b},{r.t:.17g},{r.modulus:.17g},{r.delta_hat:.17g}" for r in rows]
    _write("\n".join(lines) + "\n", args.out)
    if rows:
        best = max(rows, key=lambda r: r.delta_hat)
        print(f"max delta_hat = {best.delta_hat:.6f} at a={best.a}, b={best.b}", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "verify":
            return _cmd_verify(args, args.T)
        if args.command == "scan":
            if not (args.t_from > 0 and args.t_to >= args.t_from and args.per_decade >= 1):
                raise ConfigError("scan needs 0 < --from <= --to and --per-decade >= 1")
            steps = round(math.log10(args.t_to / args.t_from) * args.per_decade)
            ladder = [args.t_from * 10 ** (k / args.per_decade) for k in range(steps + 1)]
            return _cmd_verify(args, ladder)
        if args.command == "gram":
            return _cmd_gram(args)
        if args.command == "trigsum":
            return _cmd_trigsum(args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
