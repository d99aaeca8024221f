"""Command line front end.

Subcommands: analyze, verify, scan, couple, chen-stein, params. Output
tables are CSV with a commented header recording the configuration, so a
result file is self-describing.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

from . import __version__
from .coupling import params_as_jsonable, run_coupling
from .dgraphs import dcycle_report_csv, verify_clean_dcycles_strictly_balanced
from .errors import FThreshError
from .exponents import exponent_audit_csv, select_constants
from .factors import f_isolated, find_f_factor
from .graphs import format_edge_list
from .inventory import build_inventory, chen_stein_bound
from .patterns import (Pattern, derive_params, p_star, pattern_from_file,
                       pattern_preset)
from .sampling import STREAM_EDGES, graph_from_uniforms, rng_for

GRID_POINTS = 9
GRID_LO = 0.6
GRID_HI = 1.5


def _worker_count() -> int:
    raw = os.environ.get("FTHRESH_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _resolve_pattern(args) -> Pattern:
    if args.pattern_file:
        return pattern_from_file(args.pattern_file)
    if args.pattern:
        return pattern_preset(args.pattern)
    raise SystemExit("one of --pattern or --pattern-file is required")


def _constants(f: Pattern, args):
    if args.delta is not None and args.eps is not None:
        return args.delta, args.eps
    sc = select_constants(f)
    return (args.delta if args.delta is not None else sc.delta,
            args.eps if args.eps is not None else sc.eps)


def _csv_header(config: dict) -> str:
    lines = [f"# fthresh {__version__}"]
    for k in sorted(config):
        lines.append(f"# {k}={config[k]}")
    return "\n".join(lines)


def _write_out(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands -------------------------------------------------------------

def cmd_analyze(args) -> int:
    f = _resolve_pattern(args)
    print(f"edges: {format_edge_list(f.graph)}")
    print(f"vertices r = {f.r}")
    print(f"copies s = e(F) = {f.s}")
    print(f"automorphisms = {f.aut}")
    print(f"density d1 = {f.d1}")
    print(f"strictly 1-balanced: {f.strictly_1_balanced}")
    if args.n:
        delta, eps = _constants(f, args)
        params = derive_params(f, args.n, delta, eps, pi=args.pi)
        for k, v in dataclasses.asdict(params).items():
            print(f"{k} = {v}")
    return 0


def cmd_params(args) -> int:
    f = _resolve_pattern(args)
    if not args.n:
        raise SystemExit("params requires --n")
    delta, eps = _constants(f, args)
    params = derive_params(f, args.n, delta, eps, pi=args.pi)
    print(json.dumps(params_as_jsonable(params), indent=2))
    return 0


def cmd_verify(args) -> int:
    f = _resolve_pattern(args)
    max_len = args.max_len if args.max_len else min(f.s, 4)
    name = args.pattern or "pattern"
    rows = verify_clean_dcycles_strictly_balanced(f, max_len, name)
    sc = select_constants(f, max_len=max_len)
    print(f"clean d-cycle types up to length {max_len}: {len(rows)}, "
          f"all strictly balanced")
    print(f"f1max = {sc.certified_max_f1}")
    print(f"g1max = {sc.certified_max_g1}")
    print(f"delta = {sc.delta}")
    print(f"eps = {sc.eps}")
    if args.out:
        config = {"command": "verify", "pattern": name, "max_len": max_len}
        text = (_csv_header(config) + "\n" + dcycle_report_csv(rows)
                + exponent_audit_csv(f, max_len))
        _write_out(text, args.out)
    return 0


def auto_grid(f: Pattern, n: int, points: int = GRID_POINTS) -> list[float]:
    """Geometric grid of edge probabilities around the threshold constant."""
    base = p_star(f, n)
    lo, hi = GRID_LO * base, GRID_HI * base
    ratio = (hi / lo) ** (1.0 / (points - 1))
    return [lo * ratio ** i for i in range(points)]


def _scan_trial(payload) -> list[tuple]:
    f, n, us, ps, budget = payload
    out = []
    for p in ps:
        g = graph_from_uniforms(n, us, p)
        res = find_f_factor(g, f, budget=budget)
        _deg, isolated = f_isolated(g, f)
        out.append((res.status, not isolated, res.n_copies))
    return out


def run_scan(f: Pattern, n: int, ps: list[float], trials: int, seed: int,
             budget: int, workers: int = 1) -> list[dict]:
    """Factor and isolated-vertex scan reusing one uniform batch per trial
    across the whole grid, so both indicators are monotone in p per trial."""
    m = n * (n - 1) // 2
    batch = rng_for(seed, STREAM_EDGES).random((trials, m))
    payloads = [(f, n, batch[t], ps, budget) for t in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_trial, payloads, chunksize=4))
    else:
        results = [_scan_trial(pl) for pl in payloads]
    rows = []
    for i, p in enumerate(ps):
        tally = {"found": 0, "none": 0, "budget": 0, "divisibility": 0}
        no_iso = 0
        copies = 0
        for res in results:
            status, covered, n_copies = res[i]
            tally[status] += 1
            no_iso += covered
            copies += n_copies
        rows.append({"p": p, "trials": trials, **tally,
                     "frac_factor": tally["found"] / trials,
                     "frac_no_isolated": no_iso / trials,
                     "frac_budget_exhausted": tally["budget"] / trials,
                     "mean_copies": copies / trials})
    return rows


def crossing_estimate(rows: list[dict],
                      key: str = "frac_factor") -> Optional[float]:
    """p at which the given fraction crosses one half, by interpolation."""
    for a, b in zip(rows, rows[1:]):
        fa, fb = a[key], b[key]
        if fa < 0.5 <= fb:
            if fb == fa:
                return a["p"]
            t = (0.5 - fa) / (fb - fa)
            return a["p"] + t * (b["p"] - a["p"])
    return None


def cmd_scan(args) -> int:
    f = _resolve_pattern(args)
    if not args.n:
        raise SystemExit("scan requires --n")
    ps = [args.p] if args.p is not None else auto_grid(f, args.n)
    rows = run_scan(f, args.n, ps, args.trials, args.seed, args.budget,
                    workers=_worker_count())
    config = {"command": "scan", "pattern": args.pattern or "file",
              "n": args.n, "trials": args.trials, "seed": args.seed,
              "budget": args.budget, "p_star": p_star(f, args.n)}
    lines = [_csv_header(config),
             "p,trials,frac_factor,frac_no_isolated,frac_budget_exhausted,"
             "mean_copies"]
    for r in rows:
        lines.append(f"{r['p']},{r['trials']},{r['frac_factor']},"
                     f"{r['frac_no_isolated']},{r['frac_budget_exhausted']},"
                     f"{r['mean_copies']}")
    for key in ("frac_factor", "frac_no_isolated"):
        cross = crossing_estimate(rows, key)
        if cross is not None:
            lines.append(f"# crossing_half_{key}={cross}")
    _write_out("\n".join(lines) + "\n", args.out)
    return 0


def cmd_couple(args) -> int:
    f = _resolve_pattern(args)
    if not args.n:
        raise SystemExit("couple requires --n")
    delta, eps = _constants(f, args)
    params = derive_params(f, args.n, delta, eps, pi=args.pi)
    tally: dict[str, int] = {}
    violations = 0
    sink = open(args.out, "w", encoding="utf-8") if args.out else None
    try:
        for s in range(args.seed, args.seed + args.trials):
            t = run_coupling(f, args.n, params, s, mode=args.mode)
            tally[t.outcome] = tally.get(t.outcome, 0) + 1
            if t.outcome == "success" and t.containment is False:
                violations += 1
            if sink:
                sink.write(t.to_jsonl())
    finally:
        if sink:
            sink.close()
    for k in sorted(tally):
        print(f"{k}: {tally[k]}")
    print(f"containment violations: {violations}")
    return 0


def cmd_chen_stein(args) -> int:
    f = _resolve_pattern(args)
    if not args.n:
        raise SystemExit("chen-stein requires --n")
    delta, eps = _constants(f, args)
    ns = [args.n] if isinstance(args.n, int) else args.n
    config = {"command": "chen-stein", "pattern": args.pattern or "file",
              "delta": delta, "eps": eps}
    lines = [_csv_header(config),
             "n,lengths,count,pi,p,bound_H,bound_G"]
    for n in ns:
        params = derive_params(f, n, delta, eps, pi=args.pi)
        pi = params.pi
        p = args.p if args.p is not None else params.p
        classes = [frozenset({k}) for k in range(2, f.s + 1)] + [None]
        for lengths in classes:
            inv = build_inventory(f, n, lengths=lengths)
            bh, bg = chen_stein_bound(inv, pi, p)
            label = ("all" if lengths is None
                     else ";".join(map(str, sorted(lengths))))
            lines.append(f"{n},{label},{inv.total_count},{pi},{p},{bh},{bg}")
    _write_out("\n".join(lines) + "\n", args.out)
    return 0


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fthresh",
        description="Verification workbench for sharp thresholds of "
                    "template factors in random graphs.")
    parser.add_argument("--version", action="version",
                        version=f"fthresh {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, n_multi=False):
        sp.add_argument("--pattern", help="preset template name")
        sp.add_argument("--pattern-file", help="edge-list file of a template")
        if n_multi:
            sp.add_argument("--n", type=int, nargs="+", help="instance sizes")
        else:
            sp.add_argument("--n", type=int, help="instance size")
        sp.add_argument("--p", type=float, help="edge probability")
        sp.add_argument("--pi", type=float, help="copy probability")
        sp.add_argument("--delta", type=float, help="coupling slack exponent")
        sp.add_argument("--eps", type=float, help="growth-rate exponent")
        sp.add_argument("--trials", type=int, default=100)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--mode", choices=("exact", "bound"),
                        default="exact")
        sp.add_argument("--budget", type=int, default=100_000,
                        help="search expansion budget")
        sp.add_argument("--out", help="output file (default stdout)")

    sp = sub.add_parser("analyze", help="template invariants and parameters")
    common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("verify",
                        help="certify d-cycle balance and exponent signs")
    common(sp)
    sp.add_argument("--max-len", type=int, help="largest cycle length")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("scan", help="factor probability across a p-grid")
    common(sp)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("couple", help="run the stepwise coupling")
    common(sp)
    sp.set_defaults(func=cmd_couple)

    sp = sub.add_parser("chen-stein",
                        help="Poisson approximation error bounds")
    common(sp, n_multi=True)
    sp.set_defaults(func=cmd_chen_stein)

    sp = sub.add_parser("params", help="derived instance parameters")
    common(sp)
    sp.set_defaults(func=cmd_params)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FThreshError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
