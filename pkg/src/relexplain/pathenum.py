"""Simple-path explanations between two entities.

Three strategies return the same explanations and differ only in the order
and amount of work:

* ``naive``: depth-first search from the start entity.
* ``basic``: breadth-first partial paths grown from both targets and joined
  at a shared node.
* ``prioritized``: the same bidirectional growth, scheduled by spreading
  degree-normalized activation from the targets.
"""

from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable

from .kb import Edge, KnowledgeBase
from .pattern import Explanation, instances_to_pattern

Path = tuple[tuple[str, ...], tuple[Edge, ...]]  # nodes, edges in traversal order


@dataclass
class PathStats:
    nodes_expanded: int = 0
    partial_paths: int = 0
    joins_tested: int = 0
    path_instances: int = 0
    max_partial_len: int = 0


def group_paths(start: str, paths: Iterable[Path]) -> list[Explanation]:
    """Group full path instances into one explanation per path pattern."""
    groups: dict = defaultdict(set)
    for _, edges in paths:
        p, inst = instances_to_pattern(start, edges)
        groups[p].add(inst)
    out = [Explanation(p, tuple(sorted(insts)), 1) for p, insts in groups.items()]
    out.sort(key=lambda x: x.canonical)
    return out


def _check(kb: KnowledgeBase, start: str, end: str, max_len: int) -> None:
    kb.check(start, end)
    if start == end:
        raise ValueError("start and end entities must differ")
    if max_len < 1:
        raise ValueError("max_len must be >= 1")


def naive_paths(kb: KnowledgeBase, start: str, end: str, max_len: int, stats: PathStats) -> list[Path]:
    found: list[Path] = []
    nodes = [start]
    edges: list[Edge] = []
    on_path = {start}

    def walk(v: str) -> None:
        stats.nodes_expanded += 1
        for e, _ in kb.incident(v):
            w = e.other(v)
            if w in on_path:
                continue
            stats.partial_paths += 1
            nodes.append(w)
            edges.append(e)
            stats.max_partial_len = max(stats.max_partial_len, len(edges))
            if w == end:
                found.append((tuple(nodes), tuple(edges)))
            elif len(edges) < max_len:
                on_path.add(w)
                walk(w)
                on_path.discard(w)
            nodes.pop()
            edges.pop()

    walk(start)
    return found


def _join(a: Path, b: Path, start_budget: int) -> Path | None:
    """Join a start-side and an end-side partial path meeting at a common tip.

    Each full path has exactly one accepted split: the start side takes
    ``min(length, start_budget)`` edges.
    """
    la, lb = len(a[1]), len(b[1])
    if lb == 0:
        if la == 0:
            return None
    elif la != start_budget:
        return None
    tip = a[0][-1]
    if set(a[0]).intersection(b[0]) != {tip}:
        return None
    nodes = a[0] + tuple(reversed(b[0][:-1]))
    edges = a[1] + tuple(reversed(b[1]))
    return nodes, edges


def _budgets(max_len: int) -> tuple[int, int]:
    return (max_len + 1) // 2, max_len // 2


def _extend(kb: KnowledgeBase, path: Path, forbidden: str | None, stats: PathStats) -> list[Path]:
    nodes, edges = path
    tip = nodes[-1]
    out = []
    for e, _ in kb.incident(tip):
        w = e.other(tip)
        if w in nodes or w == forbidden:
            continue
        out.append(((*nodes, w), (*edges, e)))
        stats.partial_paths += 1
        stats.max_partial_len = max(stats.max_partial_len, len(edges) + 1)
    return out


def basic_paths(kb: KnowledgeBase, start: str, end: str, max_len: int, stats: PathStats) -> list[Path]:
    s_budget, e_budget = _budgets(max_len)

    def grow(origin: str, budget: int, stop_at: str | None, forbidden: str | None) -> dict[str, list[Path]]:
        by_tip: dict[str, list[Path]] = defaultdict(list)
        level: list[Path] = [((origin,), ())]
        by_tip[origin].append(level[0])
        for _ in range(budget):  # shorter partial paths first
            nxt: list[Path] = []
            for path in level:
                if path[0][-1] == stop_at:
                    continue
                stats.nodes_expanded += 1
                for q in _extend(kb, path, forbidden, stats):
                    by_tip[q[0][-1]].append(q)
                    nxt.append(q)
            level = nxt
        return by_tip

    from_start = grow(start, s_budget, end, None)
    from_end = grow(end, e_budget, None, start)
    found: list[Path] = []
    for tip, halves in from_start.items():
        others = from_end.get(tip)
        if not others:
            continue
        for a in halves:
            for b in others:
                stats.joins_tested += 1
                full = _join(a, b, s_budget)
                if full is not None:
                    found.append(full)
    return found


def prioritized_paths(
    kb: KnowledgeBase, start: str, end: str, max_len: int, stats: PathStats
) -> list[Path]:
    budgets = _budgets(max_len)
    targets = (start, end)
    # side 0 grows from start, side 1 from end
    stored: list[dict[str, list[Path]]] = [defaultdict(list), defaultdict(list)]
    pending: list[dict[str, list[Path]]] = [defaultdict(list), defaultdict(list)]
    act: list[dict[str, float]] = [defaultdict(float), defaultdict(float)]
    heap: list[tuple[float, str]] = []
    found: list[Path] = []

    def push(v: str) -> None:
        if pending[0].get(v) or pending[1].get(v):
            heapq.heappush(heap, (-(act[0][v] + act[1][v]), v))

    for side, t in enumerate(targets):
        trivial: Path = ((t,), ())
        stored[side][t].append(trivial)
        if budgets[side] > 0:
            pending[side][t].append(trivial)
        deg = len(kb.incident(t))
        act[side][t] = 1.0 / deg if deg else 0.0
    push(start)
    push(end)

    def add(side: int, q: Path) -> None:
        w = q[0][-1]
        stored[side][w].append(q)
        for other in stored[1 - side].get(w, ()):
            stats.joins_tested += 1
            a, b = (q, other) if side == 0 else (other, q)
            full = _join(a, b, budgets[0])
            if full is not None:
                found.append(full)
        if len(q[1]) < budgets[side] and w != targets[1 - side]:
            pending[side][w].append(q)

    while heap:
        neg, v = heapq.heappop(heap)
        if not (pending[0].get(v) or pending[1].get(v)):
            continue
        if -neg != act[0][v] + act[1][v]:
            continue  # stale entry; a fresher one is queued
        stats.nodes_expanded += 1
        touched = set()
        for side in (0, 1):
            items = pending[side].pop(v, None)
            if not items:
                continue
            score = act[side][v]
            act[side][v] = 0.0
            forbidden = start if side == 1 else None
            for path in items:
                for q in _extend(kb, path, forbidden, stats):
                    add(side, q)
            spread_to = {e.other(v) for e, _ in kb.incident(v)}
            for w in spread_to:
                if w in targets:
                    continue
                act[side][w] += score / len(kb.incident(w))
                touched.add(w)
            touched.add(v)
        for w in touched:
            push(w)
    return found


_STRATEGIES: dict[str, Callable[..., list[Path]]] = {
    "naive": naive_paths,
    "basic": basic_paths,
    "prioritized": prioritized_paths,
}

PATH_STRATEGIES = tuple(_STRATEGIES)


def enumerate_paths(
    kb: KnowledgeBase, start: str, end: str, max_len: int, strategy: str = "prioritized",
    stats: PathStats | None = None,
) -> list[Explanation]:
    _check(kb, start, end, max_len)
    try:
        fn = _STRATEGIES[strategy]
    except KeyError:
        raise ValueError(f"unknown path strategy {strategy!r}") from None
    stats = stats if stats is not None else PathStats()
    paths = fn(kb, start, end, max_len, stats)
    stats.path_instances = len(paths)
    return group_paths(start, paths)


def path_enum_naive(kb, start, end, max_len, stats=None) -> list[Explanation]:
    return enumerate_paths(kb, start, end, max_len, "naive", stats)


def path_enum_basic(kb, start, end, max_len, stats=None) -> list[Explanation]:
    return enumerate_paths(kb, start, end, max_len, "basic", stats)


def path_enum_prioritized(kb, start, end, max_len, stats=None) -> list[Explanation]:
    return enumerate_paths(kb, start, end, max_len, "prioritized", stats)
