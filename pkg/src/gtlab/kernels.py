"""Counting backends for the exhaustive sweeps.

The compiled extension drives the same strategies over bitmasks without
building transcripts; the pure fallback runs the regular implementations
with recording turned off. Both answer (tests, good_mask, defective_mask)
and both are validated against ground truth inside sweep().
"""

from __future__ import annotations

from typing import List, Optional, Tuple

from gtlab.competitive import _scan_tail, drive_zc
from gtlab.core import PoolOracle, Session, instance_from_mask
from gtlab.zigzag import drive_zd, drive_zu

try:
    from gtlab import _fastpath
except ImportError:
    _fastpath = None

BACKEND = "pure" if _fastpath is None else "compiled"

ALGORITHMS = ("individual", "zd", "zu", "zc")
_ALG_IDS = {name: i for i, name in enumerate(ALGORITHMS)}


def _pure_count(algorithm: str, n: int, defective_mask: int) -> Tuple[int, int, int]:
    session = Session(PoolOracle(instance_from_mask(n, defective_mask)), record=False)
    order = list(range(n))
    if algorithm == "zd":
        drive_zd(session, order)
    elif algorithm == "zu":
        drive_zu(session, order)
    elif algorithm == "zc":
        drive_zc(session, order)
    elif algorithm == "individual":
        _scan_tail(session, order)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    return session.tests, session.good_mask, session.defective_mask


def count_run(
    algorithm: str, n: int, defective_mask: int, backend: Optional[str] = None
) -> Tuple[int, int, int]:
    backend = backend or BACKEND
    if backend == "compiled":
        if _fastpath is None:
            raise RuntimeError("compiled backend unavailable")
        return _fastpath.count_run(_ALG_IDS[algorithm], n, defective_mask)
    return _pure_count(algorithm, n, defective_mask)


def sweep(
    algorithm: str, n: int, backend: Optional[str] = None
) -> List[Tuple[int, int]]:
    """Runs every defective mask of n items; returns per-d (worst_tests,
    first mask attaining it). Raises AssertionError on any misclassification.
    """
    if algorithm not in _ALG_IDS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if not 0 <= n <= 62:
        raise ValueError("sweep handles 0 <= n <= 62")
    backend = backend or BACKEND
    if backend == "compiled":
        if _fastpath is None:
            raise RuntimeError("compiled backend unavailable")
        worst, argmax = _fastpath.sweep(_ALG_IDS[algorithm], n)
        return list(zip(worst, argmax))
    full = (1 << n) - 1
    worst = [-1] * (n + 1)
    argmax = [0] * (n + 1)
    for mask in range(full + 1):
        tests, good, bad = _pure_count(algorithm, n, mask)
        if bad != mask or good != (full & ~mask):
            raise AssertionError(
                f"{algorithm} misclassified mask {mask:#x} at n={n}"
            )
        d = mask.bit_count()
        if tests > worst[d]:
            worst[d] = tests
            argmax[d] = mask
    return list(zip(worst, argmax))
