"""Benchmark harness: sample related pairs, run strategies, emit CSV rows."""

from __future__ import annotations

import csv
import logging
import random
import time
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, TextIO

from .enumeration import NAIVE_ENUM, STRATEGIES, EnumStats, general_enum, parse_strategy
from .errors import BudgetExceeded
from .kb import HIGH, LOW, MEDIUM, KnowledgeBase, classify_connectedness, connectedness

logger = logging.getLogger(__name__)

CSV_HEADER = ("pair", "class", "strategy", "wall_ms", "paths", "merges", "explanations", "duplicates")
CONNECTEDNESS_LEN = 4
CLASSES = (LOW, MEDIUM, HIGH)
NA = "NA"


@dataclass(frozen=True)
class Pair:
    pair_id: str
    start: str
    end: str
    connectedness: int
    cls: str


@dataclass
class BenchRow:
    pair: str
    cls: str
    strategy: str
    wall_ms: float
    paths: int
    merges: int
    explanations: Optional[int]  # None when the budget ran out
    duplicates: int

    @property
    def completed(self) -> bool:
        return self.explanations is not None

    def as_csv(self) -> list[str]:
        return [
            self.pair,
            self.cls,
            self.strategy,
            f"{self.wall_ms:.1f}",
            str(self.paths),
            str(self.merges),
            NA if self.explanations is None else str(self.explanations),
            str(self.duplicates),
        ]


class DivergenceError(RuntimeError):
    """Two strategies produced different explanation sets for one pair."""


def _within_two(kb: KnowledgeBase, v: str) -> list[str]:
    near = set()
    for e, _ in kb.incident(v):
        w = e.other(v)
        near.add(w)
        for f, _ in kb.incident(w):
            near.add(f.other(w))
    near.discard(v)
    return sorted(near)


def sample_pairs(
    kb: KnowledgeBase,
    per_class: int,
    seed: int = 0,
    classes: Sequence[str] = CLASSES,
    max_len: int = CONNECTEDNESS_LEN,
    max_attempts: Optional[int] = None,
) -> list[Pair]:
    """Draw up to ``per_class`` pairs for each connectedness class.

    A pair is a random entity and a random entity within undirected distance
    two of it. Falls short with a warning when the attempt budget runs out.
    """
    rng = random.Random(seed)
    ents = sorted(v for v in kb.entities if kb.incident(v))
    want = {c: per_class for c in classes}
    found: list[Pair] = []
    seen: set[tuple[str, str]] = set()
    attempts = max_attempts if max_attempts is not None else 200 * per_class * len(classes) + 100
    while ents and per_class > 0 and any(want.values()) and attempts > 0:
        attempts -= 1
        a = rng.choice(ents)
        near = _within_two(kb, a)
        if not near:
            continue
        b = rng.choice(near)
        if (a, b) in seen:
            continue
        seen.add((a, b))
        c = connectedness(kb, a, b, max_len, limit=100_000)
        cls = classify_connectedness(c)
        if want.get(cls, 0) > 0:
            want[cls] -= 1
            found.append(Pair(f"p{len(found)}", a, b, c, cls))
    missing = {c: k for c, k in want.items() if k > 0}
    if per_class > 0 and missing:
        logger.warning("could not sample enough pairs; missing %s", missing)
    return found


def run_pair(
    kb: KnowledgeBase,
    pair: Pair,
    strategies: Iterable[str],
    n: int = 5,
    budget: Optional[float] = None,
    cap: Optional[int] = None,
) -> list[BenchRow]:
    """Run every strategy on one pair and cross-check the completed ones."""
    rows = []
    reference: Optional[tuple[str, frozenset]] = None
    for strategy in strategies:
        stats = EnumStats()
        t0 = time.perf_counter()
        deadline = None if budget is None else time.monotonic() + budget
        try:
            out = general_enum(kb, pair.start, pair.end, n, strategy, stats, cap=cap, deadline=deadline)
            count: Optional[int] = len(out)
        except BudgetExceeded:
            out, count = None, None
        wall = (time.perf_counter() - t0) * 1000
        rows.append(
            BenchRow(pair.pair_id, pair.cls, strategy, wall, stats.path_instances,
                     stats.merge_calls, count, stats.duplicates)
        )
        if out is None:
            continue
        sigs = frozenset(re.signature for re in out)
        if reference is None:
            reference = (strategy, sigs)
        elif reference[1] != sigs:
            raise DivergenceError(
                f"pair {pair.pair_id} ({pair.start}, {pair.end}): {strategy} disagrees with {reference[0]}"
            )
    return rows


def run_bench(
    kb: KnowledgeBase,
    pairs: Sequence[Pair],
    strategies: Sequence[str],
    n: int = 5,
    budget: Optional[float] = None,
    cap: Optional[int] = None,
) -> list[BenchRow]:
    for s in strategies:
        parse_strategy(s)
    rows: list[BenchRow] = []
    for pair in pairs:
        rows.extend(run_pair(kb, pair, strategies, n, budget, cap))
    return rows


def write_csv(rows: Iterable[BenchRow], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow(row.as_csv())


def default_strategies() -> list[str]:
    return [s for s in STRATEGIES if s != NAIVE_ENUM]
