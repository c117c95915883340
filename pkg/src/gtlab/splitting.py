"""Pool-size schedule, binary narrowing, and four-way defective extraction.

These are the building blocks the pool strategies share. All of them work on
ordered item sequences and always test prefixes, which keeps transcripts
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

from gtlab.core import DEFECTIVE, GOOD, INCURRED, PoolOracle, Session


def pool_size(i: int) -> int:
    """Pool size at rank i: 1, 2, 3, 6, 12, 24, ... (3*2^(i-2) rounded up)."""
    if i < 0:
        raise ValueError("rank must be nonnegative")
    if i == 0:
        return 1
    if i == 1:
        return 2
    return 3 * (1 << (i - 2))


@dataclass
class SplitOutcome:
    defective_found: Optional[int]
    goods_identified: List[int]
    tests_spent: int


def binary_split(
    session: Session,
    items: Sequence[int],
    parent: Optional[int],
) -> SplitOutcome:
    """Narrows a contaminated ordered set down to one defective item.

    Repeatedly tests the first half (rounded up) of the current window: a
    contaminated half becomes the window, a pure half is identified good and
    dropped. The final single item is the defective. Items outside the final
    window that were never in a pure half stay unidentified. Spends at most
    ceil(log2 |items|) tests. The caller guarantees the input is contaminated;
    a pure input silently yields a wrong defective, which finalize catches.
    """

    work = list(items)
    if not work:
        raise ValueError("empty input")
    goods: List[int] = []
    spent = 0
    narrowed_by_query = False
    while len(work) > 1:
        half = work[: (len(work) + 1) // 2]
        hit = session.query(half, INCURRED, parent=parent)
        spent += 1
        if hit:
            work = half
            narrowed_by_query = len(half) == 1
        else:
            goods.extend(half)
            for item in half:
                session.identify(item, GOOD, parent, True)
            work = work[len(half):]
            narrowed_by_query = False
    found = work[0]
    session.identify(found, DEFECTIVE, parent, narrowed_by_query)
    return SplitOutcome(found, goods, spent)


def dig(oracle: PoolOracle, items: Sequence[int]) -> SplitOutcome:
    """Standalone binary narrowing against a bare oracle (counts only)."""
    session = Session(oracle, record=False)
    return binary_split(session, items, parent=None)


def _scan_individuals(
    session: Session, items: Sequence[int], parent: Optional[int]
) -> SplitOutcome:
    # Size 2..3: test one by one until the first defective; if every earlier
    # item tested pure the last one is inferred defective without a test.
    goods: List[int] = []
    spent = 0
    last = len(items) - 1
    for pos, item in enumerate(items):
        if pos == last:
            session.identify(item, DEFECTIVE, parent, False)
            return SplitOutcome(item, goods, spent)
        hit = session.query([item], INCURRED, parent=parent)
        spent += 1
        if hit:
            session.identify(item, DEFECTIVE, parent, True)
            return SplitOutcome(item, goods, spent)
        goods.append(item)
        session.identify(item, GOOD, parent, True)
    raise AssertionError("unreachable")


def quarter_split(
    session: Session,
    items: Sequence[int],
    k: int,
    parent: Optional[int],
) -> SplitOutcome:
    """Extracts one defective from a contaminated set of size at most pool_size(k).

    Size 1 needs no test. Sizes 2..3 scan individually with the last item
    inferred. Larger sets are cut, in order, into four consecutive runs of
    sizes 2^(k-2), 2^(k-2), 2^(k-3), 2^(k-3) (truncated to what remains);
    the runs are group-tested in order until one is contaminated, except that
    the last nonempty run is inferred contaminated without a test when all
    earlier runs tested pure. The contaminated run is then binary-narrowed.
    Items in runs after the contaminated one, and items the narrowing skipped,
    stay unidentified.
    """

    X = list(items)
    m = len(X)
    if m == 0:
        raise ValueError("empty input")
    if m > pool_size(k):
        raise ValueError("input of size %d exceeds pool_size(%d)=%d" % (m, k, pool_size(k)))
    if m == 1:
        session.identify(X[0], DEFECTIVE, parent, True)
        return SplitOutcome(X[0], [], 0)
    if m <= 3:
        return _scan_individuals(session, X, parent)
    if k <= 2:
        raise ValueError("size %d needs k >= 3, got k=%d" % (m, k))

    big = 1 << (k - 2)
    small = 1 << (k - 3)
    subsets: List[List[int]] = []
    start = 0
    for size in (big, big, small, small):
        if start >= m:
            break
        subsets.append(X[start : start + size])
        start += size

    goods: List[int] = []
    spent = 0
    for pos, subset in enumerate(subsets):
        if pos == len(subsets) - 1:
            # Every earlier run tested pure, so this one must hold the
            # defective; no group test needed.
            inner = binary_split(session, subset, parent)
            return SplitOutcome(
                inner.defective_found, goods + inner.goods_identified, spent + inner.tests_spent
            )
        hit = session.query(subset, INCURRED, parent=parent)
        spent += 1
        if hit:
            inner = binary_split(session, subset, parent)
            return SplitOutcome(
                inner.defective_found, goods + inner.goods_identified, spent + inner.tests_spent
            )
        goods.extend(subset)
        for item in subset:
            session.identify(item, GOOD, parent, True)
    raise AssertionError("unreachable")
