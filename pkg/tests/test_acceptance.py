"""Acceptance gate: one test per criterion, each printing a verdict line.

Criterion 7 is expected to fail: the per-tuple budget has a reproducible
family of counterexamples (first at n=9) that the checker correctly flags.
The failure message enumerates them; everything else is green.
"""

import functools
import math
import random
import time
from collections import Counter

import pytest

from gtlab import bounds, harness, kernels
from gtlab.core import Instance, PoolOracle, finalize, instance_from_mask
from gtlab.splitting import dig

N_MAX = 16
SLACK = 1e-9


def _verdict(num: int, ok: bool, detail: str) -> bool:
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


@functools.lru_cache(maxsize=None)
def _sweep(algorithm: str, n: int):
    return kernels.sweep(algorithm, n)


def _worst_over_d(algorithm: str, n: int) -> int:
    return max(worst for worst, _ in _sweep(algorithm, n))


def test_criterion_01_exhaustive_correctness():
    start = time.perf_counter()
    runs = 0
    for algorithm in ("zd", "zu", "zc"):
        for n in range(1, N_MAX + 1):
            _sweep(algorithm, n)  # raises on any misclassification
            runs += 1 << n
    # recorded cross-section: full accounting via finalize
    for algorithm in ("zd", "zu", "zc"):
        for n in range(1, 10):
            for mask in range(1 << n):
                inst = instance_from_mask(n, mask)
                result = harness.RUNNERS[algorithm](PoolOracle(inst))
                verdict = finalize(result, inst)
                assert verdict.ok, (algorithm, n, mask, verdict.problems)
    elapsed = time.perf_counter() - start
    ok = elapsed < 120.0
    assert _verdict(
        1, ok, f"{runs} sweep runs x3 algorithms clean in {elapsed:.1f}s"
    )


def test_criterion_02_upward_linear_cap():
    bad = [
        (n, _worst_over_d("zu", n))
        for n in range(1, N_MAX + 1)
        if _worst_over_d("zu", n) > (7 * n) // 5
    ]
    assert _verdict(2, not bad, f"zu worst <= floor(1.4n) for n<=16 {bad or ''}")
    assert not bad


def test_criterion_03_upward_d_form():
    bad = []
    for n in range(1, N_MAX + 1):
        for d, (worst, _) in enumerate(_sweep("zu", n)):
            if 3 <= d <= n:
                limit = bounds.zu_upper_d(n, d).value
                if worst > limit + SLACK:
                    bad.append((n, d, worst, limit))
    assert _verdict(3, not bad, f"zu worst per (n,d>=3) under the d-form {bad or ''}")
    assert not bad


def test_criterion_04_mixed_strategy_caps():
    bad = []
    for n in range(1, N_MAX + 1):
        worst_n = _worst_over_d("zc", n)
        if worst_n > 1.4 * n + 13 + SLACK:
            bad.append(("n-form", n, worst_n))
        for d, (worst, _) in enumerate(_sweep("zc", n)):
            if d >= 1 and worst > bounds.zc_upper_d(n, d).value + SLACK:
                bad.append(("d-form", n, d, worst))
    assert _verdict(4, not bad, f"zc worst under both caps for n<=16 {bad or ''}")
    assert not bad


def test_criterion_05_competitive_regimes():
    bad = []
    for n in range(1, N_MAX + 1):
        for d, (worst, _) in enumerate(_sweep("zc", n)):
            if d >= n:
                continue
            verdict = bounds.competitive_check(n, d, worst)
            assert verdict.applicable and verdict.asserted, (n, d)
            if not verdict.ok:
                bad.append((n, d, worst, verdict.branch, verdict.limit))
    assert _verdict(5, not bad, f"all regime budgets hold exhaustively {bad or ''}")
    assert not bad


def test_criterion_06_narrowing_budget():
    start = time.perf_counter()
    for m in range(1, 65):
        budget = math.ceil(math.log2(m)) if m > 1 else 0
        attained = 0
        for pos in range(m):
            out = dig(PoolOracle(Instance(m, frozenset({pos}))), list(range(m)))
            assert out.defective_found == pos
            assert out.tests_spent <= budget, (m, pos)
            attained = max(attained, out.tests_spent)
        assert attained == budget, m
    elapsed = time.perf_counter() - start
    ok = elapsed < 1.0
    assert _verdict(6, ok, f"narrowing meets the log ceiling everywhere in {elapsed:.2f}s")


def test_criterion_07_transcript_apparatus():
    report = harness.verify_grid(14, algorithms=["zu"], checks=["bounds", "analysis"])
    violations = report["violations"]
    by_n = Counter(v["n"] for v in violations)
    shapes = Counter(
        (
            v["counterexample"]["values"].get("tuple_type"),
            v["counterexample"]["values"].get("lhs"),
            round(v["counterexample"]["values"].get("rhs", 0.0), 4),
        )
        for v in violations
        if v["check"] == "tuple-bound"
    )
    detail = (
        f"{len(violations)} violations over n<=14, by n {dict(sorted(by_n.items()))}, "
        f"shapes {dict(shapes)}"
        if violations
        else "clean"
    )
    ok = not violations
    _verdict(7, ok, detail)
    # Expected red: every violation is the same per-tuple budget overshoot,
    # seeded at n=9 by a relabeled-pair partner carrying 3 incurred tests
    # into a rank-2 scan tuple (5 tests against a 4.89 ceiling).
    assert ok, detail


def test_criterion_08_oracle_equivalence():
    start = time.perf_counter()
    for n in range(1, 8):
        assert harness.minimax_m(n, 1) == math.ceil(math.log2(n))
    assert harness.minimax_m(4, 2) == 3
    for n in range(2, 9):
        for d in range(1, n):
            if 8 * n <= 21 * d and math.comb(n, d) <= 70:
                assert harness.minimax_m(n, d) == n - 1, (n, d)
    checked = 0
    for n in range(1, 9):
        per_d = _sweep("zc", n)
        for d, (worst, _) in enumerate(per_d):
            if math.comb(n, d) <= 70:
                assert worst >= harness.minimax_m(n, d), (n, d)
                checked += 1
    elapsed = time.perf_counter() - start
    ok = elapsed < 30.0
    assert _verdict(
        8, ok, f"minimax cells exact, zc dominates on {checked} cells, {elapsed:.1f}s"
    )


def test_criterion_09_bound_sanity():
    for n in range(1, 21):
        for d in range(0, n + 1):
            states = math.comb(n, d)
            ceiling = math.log2(states) if states > 1 else 0.0
            for rep in (
                bounds.stirling_lower_bound(n, d),
                bounds.entropy_lower_bound(n, d),
            ):
                assert not rep.applicable or rep.value <= ceiling + SLACK, (n, d, rep)
    rng = random.Random(20260822)
    for _ in range(10_000):
        n1 = rng.randint(1, 10**6)
        n2 = rng.randint(1, 10**6)
        assert bounds.merge_bound_check(
            n1, rng.randint(0, n1), n2, rng.randint(0, n2)
        )
    assert _verdict(9, True, "lower bounds within information content; 10000 merges hold")


def test_criterion_10_asymptotics_out_of_scope():
    # Ratio tightness and additive-term growth need unbounded n; the grid
    # inequalities above are the only finite-scale evidence collected.
    assert _verdict(10, True, "asymptotic claims documented as out of scope")
