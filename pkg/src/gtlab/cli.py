"""Command-line front end: single runs, worst-case cells, the verify grid,
exact minimax values, and bound evaluation. JSON goes to stdout; --out adds
a CSV copy of the verify grid. Exit codes: 0 clean, 1 violation, 2 usage.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import List, Optional

from gtlab import bounds, harness
from gtlab.analysis import transcript_json
from gtlab.core import Instance, PoolOracle, finalize
from gtlab.harness import ALGORITHMS, RUNNERS


def _parse_defectives(raw: str, n: int) -> List[int]:
    if not raw.strip():
        return []
    items = [int(tok) for tok in raw.split(",")]
    for item in items:
        if not 0 <= item < n:
            raise ValueError(f"defective index {item} outside 0..{n - 1}")
    if len(set(items)) != len(items):
        raise ValueError("duplicate defective index")
    return sorted(items)


def _cmd_run(args: argparse.Namespace) -> int:
    if (args.defectives is None) == (args.d_random is None):
        raise ValueError("give exactly one of --defectives or --d-random")
    if args.defectives is not None:
        defectives = _parse_defectives(args.defectives, args.n)
    else:
        if not 0 <= args.d_random <= args.n:
            raise ValueError("need 0 <= --d-random <= --n")
        rng = random.Random(args.seed)
        defectives = sorted(rng.sample(range(args.n), args.d_random))
    instance = Instance(args.n, frozenset(defectives))
    result = RUNNERS[args.alg](PoolOracle(instance))
    verdict = finalize(result, instance)
    payload = {
        "algorithm": result.algorithm,
        "n": args.n,
        "defectives": defectives,
        "tests_used": result.tests_used,
        "ok": verdict.ok,
        "problems": verdict.problems,
    }
    if result.plan is not None:
        payload["plan"] = {
            key: getattr(result.plan, key)
            for key in ("n1", "nR1", "alpha1", "n2", "nR2", "alpha2")
        }
    if args.emit_transcript:
        payload["transcript"] = transcript_json(result.transcript)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0 if verdict.ok else 1


def _cmd_worstcase(args: argparse.Namespace) -> int:
    cell = harness.worst_case(
        args.alg, args.n, args.d, mode=args.mode, samples=args.samples, seed=args.seed
    )
    payload = {
        "algorithm": cell.algorithm,
        "n": cell.n,
        "d": cell.d,
        "worst_tests": cell.worst_tests,
        "argmax_defectives": cell.argmax_defectives,
        "exact": cell.exact,
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    algorithms = None
    if args.algs:
        algorithms = [tok for tok in args.algs.split(",") if tok]
    checks = None
    if args.checks:
        checks = [tok for tok in args.checks.split(",") if tok]
    report = harness.verify_grid(
        args.n_max, algorithms=algorithms, checks=checks, workers=args.workers
    )
    print(harness.report_to_json(report))
    if args.out:
        harness.write_csv(report, args.out)
    return 1 if report["violations"] else 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    print(harness.minimax_m(args.n, args.d))
    return 0


def _bound_row(report: bounds.BoundReport) -> dict:
    return {
        "bound_name": report.bound_name,
        "value": report.value if report.applicable else None,
        "applicable": report.applicable,
        "direction": report.direction,
    }


def _cmd_bounds(args: argparse.Namespace) -> int:
    n, d = args.n, args.d
    rows = [
        _bound_row(bounds.info_lower_bound(n, d)),
        _bound_row(bounds.stirling_lower_bound(n, d, args.rho)),
        _bound_row(bounds.entropy_lower_bound(n, d)),
        _bound_row(bounds.dense_exact(n, d)),
        _bound_row(bounds.zd_upper(n, d)),
        _bound_row(bounds.zd_pretest_upper(n, d)),
        _bound_row(bounds.zu_upper_d(n, d)),
        _bound_row(bounds.zu_upper_n(n)),
        _bound_row(bounds.zc_upper_d(n, d)),
        _bound_row(bounds.zc_upper_d(n, d, constant=23)),
        _bound_row(bounds.zc_upper_n(n)),
        _bound_row(bounds.hwang_upper(n, d)),
        _bound_row(bounds.zd_pretest_upper_n(n)),
    ]
    payload = {
        "n": n,
        "d": d,
        "rho": args.rho,
        "bounds": rows,
        "best_lower_bound": bounds.best_lower_bound(n, d, args.rho) if d < n else None,
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gtlab",
        description="Adaptive group-testing strategies, bounds, and verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one strategy on one instance")
    p_run.add_argument("--alg", required=True, choices=ALGORITHMS)
    p_run.add_argument("--n", type=int, required=True)
    p_run.add_argument("--defectives", help="comma-separated item indices")
    p_run.add_argument(
        "--d-random", type=int, dest="d_random", help="sample this many defectives"
    )
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--emit-transcript", action="store_true")
    p_run.set_defaults(func=_cmd_run)

    p_wc = sub.add_parser("worstcase", help="maximize tests over defective sets")
    p_wc.add_argument("--alg", required=True, choices=ALGORITHMS)
    p_wc.add_argument("--n", type=int, required=True)
    p_wc.add_argument("--d", type=int, required=True)
    p_wc.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    p_wc.add_argument("--samples", type=int, default=1000)
    p_wc.add_argument("--seed", type=int, default=0)
    p_wc.set_defaults(func=_cmd_worstcase)

    p_vf = sub.add_parser("verify", help="sweep the grid and check every bound")
    p_vf.add_argument("--n-max", type=int, dest="n_max", required=True)
    p_vf.add_argument("--algs", help="comma-separated algorithm subset")
    p_vf.add_argument("--checks", help="comma-separated check families")
    p_vf.add_argument("--workers", type=int)
    p_vf.add_argument("--out", help="also write the grid as CSV here")
    p_vf.set_defaults(func=_cmd_verify)

    p_or = sub.add_parser("oracle", help="exact minimax pool count")
    p_or.add_argument("--n", type=int, required=True)
    p_or.add_argument("--d", type=int, required=True)
    p_or.set_defaults(func=_cmd_oracle)

    p_bd = sub.add_parser("bounds", help="evaluate every bound at (n, d)")
    p_bd.add_argument("--n", type=int, required=True)
    p_bd.add_argument("--d", type=int, required=True)
    p_bd.add_argument("--rho", type=float, default=0.5)
    p_bd.set_defaults(func=_cmd_bounds)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
