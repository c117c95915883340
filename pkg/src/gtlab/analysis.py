"""Structural analysis of upward-strategy transcripts.

Reconstructs phases, the four test classes, and the pure/contaminated test
pairs from a finished run, then checks the per-class and per-pair budgets.
Identification counts are attributed to top-level tests: |I(T)| is the test
plus its incurred individual/group tests, n(T) the items whose labels were
attributed to it. Shape problems raise StructureError; budget violations are
reported in the verdict so callers can collect counterexamples.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

from gtlab.core import (
    ADDITIONAL,
    CONTAMINATED,
    DEFECTIVE,
    DRIVER,
    INCURRED,
    PURE,
    RunResult,
    TestRecord,
    Transcript,
    Verdict,
)
from gtlab.splitting import pool_size

_RATE = 1.431
_SHIFT = 1.1242
_SLACK = 1e-9


def _hit(rec: TestRecord) -> bool:
    return rec.raw_outcome == CONTAMINATED


class StructureError(Exception):
    """Transcript shape contradicts the upward strategy's grammar."""


@dataclass(frozen=True)
class TestView:
    seq: int
    kind: str
    rank: Optional[int]
    status: str
    pool: Tuple[int, ...]
    incurred: int
    identified: int
    defectives: int


@dataclass(frozen=True)
class Phase:
    index: int
    tests: Tuple[int, ...]
    closed: bool


@dataclass(frozen=True)
class ZigZagTuple:
    pure_test: int
    cont_test: int
    extra: Optional[int]
    rank: int
    incurred: int
    identified: int
    defectives: int
    tuple_type: str


@dataclass(frozen=True)
class Classification:
    c1: frozenset
    c2: frozenset
    c3: frozenset
    c4: frozenset
    additional: frozenset
    tuples: Tuple[ZigZagTuple, ...]


@dataclass
class AnalysisReport:
    phases: List[Phase]
    classification: Classification
    verdict: Verdict
    failures: List[Tuple[str, Dict[str, object]]]


def _views(transcript: Transcript) -> Dict[int, TestView]:
    incurred: Dict[int, int] = defaultdict(int)
    idents: Dict[int, int] = defaultdict(int)
    defect: Dict[int, int] = defaultdict(int)
    for rec in transcript.records:
        if rec.kind == INCURRED:
            incurred[rec.parent] += 1
    for ident in transcript.identifications:
        idents[ident.attributed_to] += 1
        if ident.label == DEFECTIVE:
            defect[ident.attributed_to] += 1
    out = {}
    for rec in transcript.records:
        if rec.kind == INCURRED:
            continue
        out[rec.seq] = TestView(
            seq=rec.seq,
            kind=rec.kind,
            rank=rec.rank,
            status=rec.status,
            pool=tuple(rec.pool),
            incurred=1 + incurred[rec.seq],
            identified=idents[rec.seq],
            defectives=defect[rec.seq],
        )
    return out


def _check_phase(tests: Sequence[TestRecord], closed: bool) -> None:
    extras = [pos for pos, rec in enumerate(tests) if rec.kind == ADDITIONAL]
    if len(extras) > 1:
        raise StructureError("more than one additional test in a phase")
    for pos, rec in enumerate(tests):
        if rec.kind == ADDITIONAL:
            if pos != 6:
                raise StructureError("additional test not at phase position 7")
            head = tests[:6]
            if any(r.kind != DRIVER or r.status != PURE for r in head):
                raise StructureError("additional test not preceded by 6 pure tests")
            if closed and rec.status == PURE:
                raise StructureError("pure additional inside a closed phase")
            if not closed:
                if rec.status != PURE:
                    raise StructureError("contaminated additional in the final phase")
                if pos != len(tests) - 1:
                    raise StructureError("tests after a pure additional")
        else:
            last = closed and pos == len(tests) - 1
            if not last and rec.status != PURE:
                raise StructureError("contaminated driver does not close its phase")
            if not closed and rec.status != PURE:
                raise StructureError("contaminated driver in the final phase")


def segment_phases(transcript: Transcript) -> List[Phase]:
    tops = [r for r in transcript.records if r.kind != INCURRED]
    groups: List[List[TestRecord]] = []
    current: List[TestRecord] = []
    for rec in tops:
        current.append(rec)
        if rec.kind == DRIVER and rec.status == CONTAMINATED:
            groups.append(current)
            current = []
    phases = []
    for idx, group in enumerate(groups):
        _check_phase(group, closed=True)
        phases.append(Phase(idx + 1, tuple(r.seq for r in group), True))
    if current:
        _check_phase(current, closed=False)
        phases.append(Phase(len(phases) + 1, tuple(r.seq for r in current), False))
    return phases


def _check_scan(pool: Sequence[int], recs: Sequence[TestRecord]) -> None:
    if not recs or len(recs) > len(pool):
        raise StructureError("individual scan length mismatch")
    for i, rec in enumerate(recs):
        if list(rec.pool) != [pool[i]]:
            raise StructureError("individual scan tested an unexpected item")
    if _hit(recs[-1]):
        if any(_hit(r) for r in recs[:-1]):
            raise StructureError("scan continued past a contaminated item")
    elif len(recs) != len(pool) - 1:
        raise StructureError("all-pure scan must stop before the last item")


def _check_binary(items: Sequence[int], recs: Sequence[TestRecord]) -> None:
    work = list(items)
    pos = 0
    while len(work) > 1:
        half = work[: (len(work) + 1) // 2]
        if pos >= len(recs) or list(recs[pos].pool) != half:
            raise StructureError("halving step tested an unexpected pool")
        work = half if _hit(recs[pos]) else work[len(half):]
        pos += 1
    if pos != len(recs):
        raise StructureError("halving left unexplained incurred tests")


def _quarter_kind(pool: Sequence[int], rank: int, recs: Sequence[TestRecord]) -> int:
    """Replays the four-way extraction; returns the 1-based index of the
    first contaminated subset."""
    big, small = 1 << (rank - 2), 1 << (rank - 3)
    subsets: List[List[int]] = []
    start = 0
    for size in (big, big, small, small):
        subsets.append(list(pool[start: start + size]))
        start += size
    nonempty = [s for s in subsets if s]
    pos = 0
    for j, subset in enumerate(nonempty):
        if j == len(nonempty) - 1:
            _check_binary(subset, recs[pos:])
            return j + 1
        if pos >= len(recs) or list(recs[pos].pool) != subset:
            raise StructureError("subset group test missing from transcript")
        hit = _hit(recs[pos])
        pos += 1
        if hit:
            _check_binary(subset, recs[pos:])
            return j + 1
    raise StructureError("no contaminated subset found")


def _tuple_type(ender: TestView, recs: Sequence[TestRecord]) -> str:
    rank = ender.rank or 0
    pool = list(ender.pool)
    if len(pool) == 1:
        if recs:
            raise StructureError("single-item driver with incurred tests")
        return {1: "r1-solo", 2: "r2-solo"}.get(rank, "deep-solo")
    if rank == 1:
        if (
            len(pool) != 2
            or len(recs) != 2
            or [list(r.pool) for r in recs] != [[pool[0]], [pool[1]]]
            or not all(_hit(r) for r in recs)
        ):
            raise StructureError("rank-1 contaminated driver is not a resolved pair")
        return "r1-pair"
    if rank == 2:
        if len(recs) == len(pool) and all(
            list(r.pool) == [item] for r, item in zip(recs, pool)
        ):
            return "r2-triple"
        _check_scan(pool, recs)
        return "r2-scan"
    if len(pool) <= 3:
        _check_scan(pool, recs)
        return "deep-scan"
    return f"deep-q{_quarter_kind(pool, rank, recs)}"


def _type_floor(tuple_type: str, rank: int) -> Tuple[int, int]:
    """Minimum identifications and maximum incurred surplus for a deep
    tuple: (n(P) floor beyond the pure partner's pool, incurred cap term)."""
    if tuple_type == "deep-q1":
        return 3 * (1 << (rank - 3)) + 1, rank + 1
    if tuple_type == "deep-q2":
        return 5 * (1 << (rank - 3)) + 1, rank + 2
    if tuple_type == "deep-q3":
        return 7 * (1 << (rank - 3)) + 1, rank + 2
    if tuple_type == "deep-q4":
        return 8 * (1 << (rank - 3)) + 1, rank + 2
    return pool_size(rank - 1) + 1, rank + 2


def classify(transcript: Transcript) -> Classification:
    views = _views(transcript)
    phases = segment_phases(transcript)
    recs_by_parent: Dict[int, List[TestRecord]] = defaultdict(list)
    for rec in transcript.records:
        if rec.kind == INCURRED:
            recs_by_parent[rec.parent].append(rec)
    trailing = phases[-1] if phases and not phases[-1].closed else None
    c1: Set[int] = set(trailing.tests) if trailing else set()
    additional = frozenset(s for s, v in views.items() if v.kind == ADDITIONAL)
    c2: Set[int] = set()
    c3: Set[int] = set()
    matched: Set[int] = set()
    tuples: List[ZigZagTuple] = []
    for phase in phases:
        if not phase.closed:
            continue
        ender = views[phase.tests[-1]]
        extra = next((s for s in phase.tests if views[s].kind == ADDITIONAL), None)
        if ender.rank == 0:
            if extra is not None:
                raise StructureError("additional test in a rank-0 phase")
            c2.add(ender.seq)
            continue
        rank = ender.rank or 0
        want = pool_size(rank - 1)

        def eligible(view: TestView) -> bool:
            return (
                view.kind == DRIVER
                and view.status == PURE
                and view.rank == rank - 1
                and len(view.pool) == want
                and view.seq not in matched
                and view.seq not in c1
            )

        candidates = [s for s in phase.tests[:-1] if eligible(views[s])]
        if not candidates:
            candidates = sorted(s for s, v in views.items() if eligible(v))
        if not candidates:
            raise StructureError(
                f"no pure partner of rank {rank - 1} for test {ender.seq}"
            )
        partner = candidates[0]
        matched.add(partner)
        ttype = _tuple_type(ender, recs_by_parent.get(ender.seq, []))
        defectives = views[partner].defectives + ender.defectives
        if defectives < 1:
            raise StructureError("tuple without a defective identification")
        tuples.append(
            ZigZagTuple(
                pure_test=partner,
                cont_test=ender.seq,
                extra=extra,
                rank=rank,
                incurred=views[partner].incurred
                + ender.incurred
                + (0 if extra is None else 1),
                identified=views[partner].identified + ender.identified,
                defectives=defectives,
                tuple_type=ttype,
            )
        )
        c3.update((partner, ender.seq))
        if extra is not None:
            c3.add(extra)
    c4 = {s for s in views if s not in c1 and s not in c2 and s not in c3}
    return Classification(
        c1=frozenset(c1),
        c2=frozenset(c2),
        c3=frozenset(c3),
        c4=frozenset(c4),
        additional=additional,
        tuples=tuple(tuples),
    )


def _budget(d: int, n: int) -> float:
    return _RATE * d * (math.log2(n / d) + _SHIFT)


def verify_observations(
    classification: Classification, transcript: Transcript
) -> Tuple[Verdict, List[Tuple[str, Dict[str, object]]]]:
    views = _views(transcript)
    failures: List[Tuple[str, Dict[str, object]]] = []
    cls = classification
    in_tuples: List[int] = []
    for t in cls.tuples:
        in_tuples.extend([t.pure_test, t.cont_test])
        if t.extra is not None:
            in_tuples.append(t.extra)
    cont_additionals = len(cls.additional & cls.c3)
    expected = (len(cls.c3) - cont_additionals) / 2
    if len(cls.tuples) != expected or sorted(in_tuples) != sorted(cls.c3):
        failures.append(
            (
                "tuple-count",
                {"tuples": len(cls.tuples), "expected": expected, "c3": sorted(cls.c3)},
            )
        )
    c4_views = [views[s] for s in sorted(cls.c4)]
    if any(v.status != PURE for v in c4_views):
        failures.append(("c4-pure", {"c4": sorted(cls.c4)}))
    ranks = sorted(v.rank or 0 for v in c4_views)
    if c4_views and ranks != list(range(len(ranks))):
        failures.append(("c4-consecutive-ranks", {"ranks": ranks}))
    cont_ranks = [t.rank for t in cls.tuples]
    if c4_views and cont_ranks:
        top_c4, top_cont = max(ranks), max(cont_ranks)
        if top_c4 + 2 > top_cont:
            failures.append(
                ("c4-rank-gap", {"c4_max": top_c4, "contaminated_max": top_cont})
            )
    d_run = sum(1 for i in transcript.identifications if i.label == DEFECTIVE)
    n_phases = len(segment_phases(transcript))
    if n_phases > d_run + 1:
        failures.append(("phase-count", {"phases": n_phases, "defectives": d_run}))
    problems = [f"{name}: {vals}" for name, vals in failures]
    return Verdict(ok=not failures, problems=problems), failures


def check_class_bounds(
    classification: Classification, transcript: Transcript
) -> Tuple[Verdict, List[Tuple[str, Dict[str, object]]]]:
    views = _views(transcript)
    cls = classification
    failures: List[Tuple[str, Dict[str, object]]] = []

    lhs = sum(views[s].incurred for s in cls.c1)
    if lhs > 7:
        failures.append(("final-phase-budget", {"lhs": lhs, "rhs": 7}))

    for seq in sorted(cls.c2):
        view = views[seq]
        n_t = max(view.identified, 1)
        rhs = _RATE * (math.log2(n_t) + _SHIFT)
        if not view.incurred < rhs:
            failures.append(
                ("rank0-test-bound", {"test": seq, "lhs": view.incurred, "rhs": rhs})
            )

    for t in cls.tuples:
        rhs = _budget(t.defectives, t.identified)
        if t.incurred > rhs + _SLACK:
            failures.append(
                (
                    "tuple-bound",
                    {
                        "pure_test": t.pure_test,
                        "cont_test": t.cont_test,
                        "rank": t.rank,
                        "tuple_type": t.tuple_type,
                        "lhs": t.incurred,
                        "rhs": rhs,
                    },
                )
            )
        floor, surplus = _type_floor(t.tuple_type, t.rank) if t.rank >= 3 else (None, None)
        if floor is not None:
            pure_incurred = views[t.pure_test].incurred
            cap = pure_incurred + surplus
            if t.identified < floor or t.incurred > cap:
                failures.append(
                    (
                        "type-bound",
                        {
                            "cont_test": t.cont_test,
                            "tuple_type": t.tuple_type,
                            "identified": t.identified,
                            "floor": floor,
                            "incurred": t.incurred,
                            "cap": cap,
                        },
                    )
                )

    paired = cls.c2 | cls.c3
    if paired:
        d_pair = sum(views[s].defectives for s in paired)
        n_pair = sum(views[s].identified for s in paired)
        lhs = sum(views[s].incurred for s in paired)
        if d_pair < 1:
            failures.append(("paired-classes-bound", {"lhs": lhs, "rhs": None}))
        else:
            rhs = _budget(d_pair, max(n_pair, d_pair))
            if lhs > rhs + _SLACK:
                failures.append(("paired-classes-bound", {"lhs": lhs, "rhs": rhs}))

    d_run = sum(1 for i in transcript.identifications if i.label == DEFECTIVE)
    n_run = len(transcript.identifications)
    if d_run >= 3:
        lhs = sum(views[s].incurred for s in (cls.c2 | cls.c3 | cls.c4))
        rhs = _budget(d_run, n_run) + 16
        if lhs > rhs + _SLACK:
            failures.append(("all-classes-bound", {"lhs": lhs, "rhs": rhs}))

    total = sum(v.incurred for v in views.values())
    if total != len(transcript.records):
        failures.append(
            ("test-recomposition", {"lhs": total, "rhs": len(transcript.records)})
        )

    problems = [f"{name}: {vals}" for name, vals in failures]
    return Verdict(ok=not failures, problems=problems), failures


def upward_subtranscript(run: RunResult) -> Transcript:
    """The upward-strategy portion of a run, for analysis.

    A plain upward run is returned whole. A quarter-round run that dispatched
    to the upward strategy has its round and tail tests (which carry no rank)
    stripped. Anything else has no upward portion.
    """
    if run.algorithm == "zu":
        return run.transcript
    plan = run.plan
    dispatched_up = plan is not None and (
        (plan.alpha1 or 0) >= 3 or (plan.alpha2 or 0) >= 3
    )
    if run.algorithm != "zc" or not dispatched_up:
        raise ValueError("run has no upward-strategy portion")
    keep: Set[int] = set()
    records = []
    for rec in run.transcript.records:
        if rec.kind == INCURRED:
            if rec.parent in keep:
                records.append(rec)
                keep.add(rec.seq)
        elif rec.rank is not None or rec.kind == ADDITIONAL:
            records.append(rec)
            keep.add(rec.seq)
    idents = [
        i for i in run.transcript.identifications if i.attributed_to in keep
    ]
    return Transcript(records=records, identifications=idents)


def analyze(run: RunResult) -> AnalysisReport:
    transcript = upward_subtranscript(run)
    phases = segment_phases(transcript)
    classification = classify(transcript)
    obs_verdict, obs_failures = verify_observations(classification, transcript)
    bound_verdict, bound_failures = check_class_bounds(classification, transcript)
    failures = obs_failures + bound_failures
    verdict = Verdict(
        ok=obs_verdict.ok and bound_verdict.ok,
        problems=obs_verdict.problems + bound_verdict.problems,
    )
    return AnalysisReport(
        phases=phases,
        classification=classification,
        verdict=verdict,
        failures=failures,
    )


def transcript_json(transcript: Transcript) -> Dict[str, object]:
    return {
        "records": [
            {
                "seq": r.seq,
                "pool": list(r.pool),
                "outcome": r.raw_outcome,
                "kind": r.kind,
                "rank": r.rank,
                "parent": r.parent,
                "status": r.status,
            }
            for r in transcript.records
        ],
        "identifications": [
            {
                "item": i.item,
                "label": i.label,
                "attributed_to": i.attributed_to,
                "via_test": i.via_test,
            }
            for i in transcript.identifications
        ],
    }


def counterexample_json(
    run: RunResult, failed_check: str, values: Dict[str, object]
) -> Dict[str, object]:
    defectives = sorted(i for i, lab in run.classified.items() if lab == DEFECTIVE)
    return {
        "instance": {"n": len(run.classified), "defectives": defectives},
        "transcript": transcript_json(run.transcript),
        "failed_check": failed_check,
        "values": values,
    }
