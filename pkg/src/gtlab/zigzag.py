"""The two rank-scheduled pool strategies.

Both walk an ordered remaining sequence, always testing the first
min(pool_size(k), remaining) items. The downward variant starts with k large
enough to cover everything and extracts a defective whenever a pool is
contaminated. The upward variant starts at k=0, grows the pool on pure
results, and resolves contaminated pools with the pair/triple individual
scans, the four-way extraction, or (after six pure results in a row) a single
whole-remaining-set test.
"""

from __future__ import annotations

from typing import List, Optional, Sequence

from gtlab.core import (
    ADDITIONAL,
    DEFECTIVE,
    DRIVER,
    GOOD,
    INCURRED,
    PURE,
    PoolOracle,
    RunResult,
    Session,
)
from gtlab.splitting import pool_size, quarter_split


def initial_rank(n: int) -> int:
    """Smallest k with 3*2^k >= 4n, so pool_size(k) >= n."""
    if n < 1:
        raise ValueError("need at least one item")
    k = 0
    while 3 * (1 << k) < 4 * n:
        k += 1
    return k


def drive_zd(session: Session, items: Sequence[int]) -> None:
    """Downward strategy: identifies every item in the given ordered set."""
    remaining = list(items)
    if not remaining:
        return
    k = initial_rank(len(remaining))
    while remaining:
        pool = remaining[: min(pool_size(k), len(remaining))]
        hit = session.query(pool, DRIVER, rank=k)
        seq = session.tests
        if not hit:
            session.identify_all(pool, GOOD, seq)
            remaining = remaining[len(pool):]
            k += 1
        else:
            quarter_split(session, pool, k, seq)
            if k > 0:
                k -= 1
            remaining = session.unresolved(remaining)


def resolve_pair(session: Session, pair: Sequence[int], driver_seq: int) -> str:
    """Individually resolves a rank-1 pool that group-tested contaminated.

    Both items are tested (2 tests) and identified. Returns "mixed" when one
    is good and one defective, "both" when both are defective. A singleton
    input is already proven defective by the group test and costs nothing.
    """
    items = list(pair)
    if len(items) > 2:
        raise ValueError("pair resolution takes at most 2 items")
    if len(items) == 1:
        session.identify(items[0], DEFECTIVE, driver_seq, True)
        return "both"
    hits = []
    for item in items:
        hit = session.query([item], INCURRED, parent=driver_seq)
        hits.append(hit)
        session.identify(item, DEFECTIVE if hit else GOOD, driver_seq, True)
    return "both" if all(hits) else "mixed"


def resolve_triple(session: Session, items: Sequence[int], driver_seq: int) -> None:
    """Individually resolves a rank-2 pool flagged by an earlier mixed pair.

    Every item is tested, with no early stop, so the pool is fully identified.
    """
    pool = list(items)
    if len(pool) > 3:
        raise ValueError("triple resolution takes at most 3 items")
    for item in pool:
        hit = session.query([item], INCURRED, parent=driver_seq)
        session.identify(item, DEFECTIVE if hit else GOOD, driver_seq, True)


def drive_zu(session: Session, items: Sequence[int]) -> None:
    """Upward strategy: identifies every item in the given ordered set.

    State: k is the current rank, pure_streak counts pure-status driver tests
    since the last contaminated-status one, and mixed_pair_flag remembers a
    mixed pair until the streak resets. After six straight pure results, if
    more items remain than the next pool would cover, one test on the entire
    remaining set either finishes the run (pure) or is simply recorded
    (contaminated) before the normal pool test proceeds.
    """
    remaining = list(items)
    k = 0
    pure_streak = 0
    mixed_pair_flag = False
    while remaining:
        if pure_streak == 6 and len(remaining) > pool_size(k):
            hit = session.query(remaining, ADDITIONAL)
            seq = session.tests
            if not hit:
                session.identify_all(remaining, GOOD, seq)
                return
        pool = remaining[: min(pool_size(k), len(remaining))]
        hit = session.query(pool, DRIVER, rank=k)
        seq = session.tests
        if not hit:
            session.identify_all(pool, GOOD, seq)
            remaining = remaining[len(pool):]
            k += 1
            pure_streak += 1
            continue
        if len(pool) == 1:
            session.identify(pool[0], DEFECTIVE, seq, True)
            k = max(k - 1, 0)
            pure_streak = 0
            mixed_pair_flag = False
        elif k == 1:
            outcome = resolve_pair(session, pool, seq)
            if outcome == "mixed":
                session.mark_status(seq, PURE)
                k = 2
                pure_streak += 1
                mixed_pair_flag = True
            else:
                k = 0
                pure_streak = 0
                mixed_pair_flag = False
        elif mixed_pair_flag and k == 2:
            resolve_triple(session, pool, seq)
            k = 1
            pure_streak = 0
            mixed_pair_flag = False
        else:
            quarter_split(session, pool, k, seq)
            k -= 1
            pure_streak = 0
            mixed_pair_flag = False
        remaining = session.unresolved(remaining)


def _wrap(algorithm: str, oracle: PoolOracle, session: Session) -> RunResult:
    return RunResult(
        algorithm=algorithm,
        tests_used=session.tests,
        transcript=session.transcript(),
        classified=session.classified(),
    )


def run_zd(oracle: PoolOracle, items: Optional[Sequence[int]] = None) -> RunResult:
    order: List[int] = list(range(oracle.instance.n)) if items is None else list(items)
    session = Session(oracle)
    drive_zd(session, order)
    return _wrap("zd", oracle, session)


def run_zu(oracle: PoolOracle, items: Optional[Sequence[int]] = None) -> RunResult:
    order: List[int] = list(range(oracle.instance.n)) if items is None else list(items)
    session = Session(oracle)
    drive_zu(session, order)
    return _wrap("zu", oracle, session)
