"""Interestingness measures for explanations.

Every measure returns an :class:`InterestScore` oriented so that larger is
more interesting: size contributes the negated variable count and position
the negated position.
"""

from __future__ import annotations

import logging
import random
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import ConfigurationError, PatternError
from .kb import KnowledgeBase
from .pattern import ExplanationPattern, Instance, iter_matches, match_instances

logger = logging.getLogger(__name__)

SIZE = "size"
RANDOM_WALK = "random-walk"
COUNT = "count"
MONOCOUNT = "monocount"
LOCAL_DIST = "local-dist"
GLOBAL_DIST = "global-dist"
SIZE_MONOCOUNT = "size+monocount"
SIZE_LOCAL_DIST = "size+local-dist"

MEASURES = (SIZE, RANDOM_WALK, COUNT, MONOCOUNT, LOCAL_DIST, GLOBAL_DIST, SIZE_MONOCOUNT, SIZE_LOCAL_DIST)
ANTI_MONOTONE = frozenset({SIZE, MONOCOUNT, SIZE_MONOCOUNT})
DISTRIBUTIONAL = frozenset({LOCAL_DIST, GLOBAL_DIST, SIZE_LOCAL_DIST})


@dataclass(frozen=True, order=True)
class InterestScore:
    value: tuple

    def __add__(self, other: "InterestScore") -> "InterestScore":
        return InterestScore(self.value + other.value)

    def __str__(self) -> str:
        return "(" + ", ".join(_fmt(v) for v in self.value) + ")"


def _fmt(v) -> str:
    if isinstance(v, Fraction) and v.denominator != 1:
        return f"{float(v):.6g}"
    return str(int(v)) if isinstance(v, Fraction) else str(v)


@dataclass(frozen=True)
class Distribution:
    """Sorted (aggregate value, pair count) entries."""

    entries: tuple[tuple[int, int], ...]
    kind: str = "local"
    sample_size: Optional[int] = None
    seed: Optional[int] = None

    @classmethod
    def from_counter(cls, tally: Counter, kind: str = "local", **meta) -> "Distribution":
        return cls(tuple(sorted((a, c) for a, c in tally.items() if c > 0)), kind, **meta)

    def total(self) -> int:
        return sum(c for _, c in self.entries)


# --- structural --------------------------------------------------------------


def m_size(p: ExplanationPattern) -> InterestScore:
    return InterestScore((-p.size,))


def conductance(p: ExplanationPattern) -> Fraction:
    """Effective conductance between start and end with unit-resistor edges.

    Direction is ignored and parallel edges act as parallel resistors. Solved
    exactly over the rationals.
    """
    idx = p.index
    n = len(p.variables)
    lap = [[Fraction(0)] * n for _ in range(n)]
    for e in p.edges:
        a, b = idx[e.u], idx[e.v]
        lap[a][a] += 1
        lap[b][b] += 1
        lap[a][b] -= 1
        lap[b][a] -= 1
    inner = list(range(2, n))
    # interior potentials: L_II x = -L_I0 * 1 (start at 1, end at 0)
    m = len(inner)
    rows = [[lap[i][j] for j in inner] + [-lap[i][0]] for i in inner]
    for col in range(m):
        piv = next((r for r in range(col, m) if rows[r][col] != 0), None)
        if piv is None:
            raise PatternError("pattern is not connected")
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = 1 / rows[col][col]
        rows[col] = [x * inv for x in rows[col]]
        for r in range(m):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    potential = [Fraction(1), Fraction(0)] + [rows[k][m] for k in range(m)]
    return sum((potential[0] - potential[j]) * -lap[0][j] for j in range(1, n))


def m_random_walk(p: ExplanationPattern) -> InterestScore:
    return InterestScore((conductance(p),))


# --- aggregate ---------------------------------------------------------------


def count_of(instances: Sequence[Instance]) -> int:
    return len(set(instances))


def monocount_of(p: ExplanationPattern, instances: Sequence[Instance]) -> int:
    """Fewest distinct entities any interior variable takes over the instances."""
    if not instances:
        return 0
    if not p.interior:
        return 1
    return min(len({inst[k] for inst in instances}) for k in range(2, p.size))


def m_count(kb: KnowledgeBase, p, start: str, end: str, instances=None) -> InterestScore:
    if instances is None:
        instances = match_instances(kb, p, start, end)
    return InterestScore((count_of(instances),))


def m_monocount(kb: KnowledgeBase, p, start: str, end: str, instances=None) -> InterestScore:
    if instances is None:
        instances = match_instances(kb, p, start, end)
    return InterestScore((monocount_of(p, instances),))


def aggregate(p: ExplanationPattern, instances: Sequence[Instance], agg: str) -> int:
    if agg == COUNT:
        return count_of(instances)
    if agg == MONOCOUNT:
        return monocount_of(p, instances)
    raise ConfigurationError(f"unknown aggregate {agg!r}")


# --- distributional ----------------------------------------------------------


def _group_by_end(kb: KnowledgeBase, p: ExplanationPattern, start: str) -> dict[str, list[Instance]]:
    groups: dict[str, list[Instance]] = defaultdict(list)
    for inst in iter_matches(kb, p, start, None):
        groups[inst[1]].append(inst)
    return groups


def _local_tally(kb: KnowledgeBase, p: ExplanationPattern, start: str, agg: str) -> Counter:
    tally: Counter = Counter()
    for insts in _group_by_end(kb, p, start).values():
        a = aggregate(p, insts, agg)
        if a >= 1:
            tally[a] += 1
    return tally


def local_distribution(kb: KnowledgeBase, p: ExplanationPattern, start: str, agg: str = COUNT) -> Distribution:
    """Aggregate values over all end entities paired with ``start``.

    One matching pass with only the start bound; instances are grouped by the
    entity bound to the end variable. Pairs without instances are left out.
    """
    kb.check(start)
    return Distribution.from_counter(_local_tally(kb, p, start, agg), "local")


def sample_starts(kb: KnowledgeBase, sample_size: int, seed: int) -> list[str]:
    if sample_size < 1:
        raise ValueError("sample_size must be >= 1")
    ents = sorted(kb.entities)
    if sample_size > len(ents):
        logger.warning("sample size %d exceeds %d entities; using all", sample_size, len(ents))
        sample_size = len(ents)
    return random.Random(seed).sample(ents, sample_size)


def global_distribution(
    kb: KnowledgeBase,
    p: ExplanationPattern,
    agg: str = COUNT,
    sample_size: int = 100,
    seed: int = 0,
    workers: int = 1,
) -> Distribution:
    """Merge of local distributions for uniformly sampled start entities."""
    starts = sample_starts(kb, sample_size, seed)
    tally: Counter = Counter()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda s: _local_tally(kb, p, s, agg), starts))
    else:
        parts = [_local_tally(kb, p, s, agg) for s in starts]
    for part in parts:
        tally.update(part)
    return Distribution.from_counter(tally, "global", sample_size=len(starts), seed=seed)


def position(value, dist: Distribution) -> int:
    return sum(c for a, c in dist.entries if a > value)


def m_position(value, dist: Distribution) -> InterestScore:
    return InterestScore((-position(value, dist),))


def bounded_position(
    kb: KnowledgeBase,
    p: ExplanationPattern,
    starts: Iterable[str],
    value: int,
    agg: str = COUNT,
    limit: Optional[int] = None,
) -> Optional[int]:
    """Position of ``value`` among pairs rooted at ``starts``, with early exit.

    Pairs are counted as soon as their aggregate passes ``value``; once the
    count goes above ``limit`` the search stops and None is returned. Both
    aggregates only grow as instances stream in, so the exit is exact.
    """
    total = 0
    interior = range(2, p.size)
    for s in starts:
        counts: Counter = Counter()
        seen: dict[str, list[set]] = {}
        over: set[str] = set()
        for inst in iter_matches(kb, p, s, None):
            y = inst[1]
            if y in over:
                continue
            if agg == COUNT:
                counts[y] += 1
                a = counts[y]
            elif agg == MONOCOUNT:
                if not p.interior:
                    a = 1
                else:
                    slots = seen.setdefault(y, [set() for _ in interior])
                    for slot, k in zip(slots, interior):
                        slot.add(inst[k])
                    a = min(len(slot) for slot in slots)
            else:
                raise ConfigurationError(f"unknown aggregate {agg!r}")
            if a > value:
                over.add(y)
                total += 1
                if limit is not None and total > limit:
                    return None
    return total


# --- dispatch ----------------------------------------------------------------


@dataclass
class MeasureContext:
    """Parameters shared by distributional measures in one ranking run."""

    agg: str = COUNT
    sample_size: int = 100
    seed: int = 0
    workers: int = 1
    _global_cache: dict = field(default_factory=dict, repr=False)

    def global_distribution(self, kb: KnowledgeBase, p: ExplanationPattern) -> Distribution:
        key = p._canonical[0]
        if key not in self._global_cache:
            self._global_cache[key] = global_distribution(
                kb, p, self.agg, self.sample_size, self.seed, self.workers
            )
        return self._global_cache[key]


def check_measure(measure: str) -> None:
    if measure not in MEASURES:
        raise ConfigurationError(f"unknown measure {measure!r}; expected one of {', '.join(MEASURES)}")


def score(
    measure: str,
    kb: KnowledgeBase,
    p: ExplanationPattern,
    start: str,
    end: str,
    instances: Optional[Sequence[Instance]] = None,
    ctx: Optional[MeasureContext] = None,
) -> InterestScore:
    """Evaluate a measure by id, reusing ``instances`` when supplied."""
    check_measure(measure)
    ctx = ctx if ctx is not None else MeasureContext()
    if "+" in measure:
        first, second = measure.split("+")
        return score(first, kb, p, start, end, instances, ctx) + score(second, kb, p, start, end, instances, ctx)
    if measure == SIZE:
        return m_size(p)
    if measure == RANDOM_WALK:
        return m_random_walk(p)
    if instances is None:
        instances = match_instances(kb, p, start, end)
    if measure == COUNT:
        return m_count(kb, p, start, end, instances)
    if measure == MONOCOUNT:
        return m_monocount(kb, p, start, end, instances)
    a = aggregate(p, instances, ctx.agg)
    if measure == LOCAL_DIST:
        return m_position(a, local_distribution(kb, p, start, ctx.agg))
    return m_position(a, ctx.global_distribution(kb, p))


def m_combined(primary: str, secondary: str, kb, p, start, end, instances=None, ctx=None) -> InterestScore:
    return score(primary, kb, p, start, end, instances, ctx) + score(secondary, kb, p, start, end, instances, ctx)
