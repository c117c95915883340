"""Backend comparison: python3 -m gtlab.bench [--n N] [--alg ALG]."""

from __future__ import annotations

import argparse
import json
import time

from gtlab import kernels


def time_sweep(algorithm: str, n: int, backend: str) -> float:
    start = time.perf_counter()
    kernels.sweep(algorithm, n, backend=backend)
    return time.perf_counter() - start


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="gtlab.bench")
    parser.add_argument("--n", type=int, default=14)
    parser.add_argument("--alg", default="zu", choices=kernels.ALGORITHMS)
    args = parser.parse_args(argv)
    payload = {
        "algorithm": args.alg,
        "n": args.n,
        "masks": 1 << args.n,
        "default_backend": kernels.BACKEND,
        "pure_seconds": round(time_sweep(args.alg, args.n, "pure"), 3),
    }
    if kernels.BACKEND == "compiled":
        compiled = time_sweep(args.alg, args.n, "compiled")
        payload["compiled_seconds"] = round(compiled, 3)
        payload["speedup"] = round(payload["pure_seconds"] / compiled, 1)
    else:
        payload["compiled_seconds"] = None
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
