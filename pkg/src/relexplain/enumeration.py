"""Enumeration of minimal explanations.

Two routes produce the same set of explanations:

* :func:`naive_enum` grows arbitrary patterns one edge at a time from a seed
  holding only the start variable and keeps those that turn out minimal.
* :func:`general_enum` enumerates path explanations first and then combines
  them round by round with :func:`merge` (:func:`path_union_basic` or the
  history-pruned :func:`path_union_prune`).
"""

from __future__ import annotations

import os
import time
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Optional, Sequence

from .errors import BudgetExceeded, ConfigurationError, ResourceLimitError
from .kb import SRC, KnowledgeBase
from .pathenum import PATH_STRATEGIES, PathStats, enumerate_paths
from .pattern import (
    END,
    START,
    Explanation,
    ExplanationPattern,
    PatternEdge,
    covering_number,
    is_minimal,
)

DEFAULT_MAX_EXPLANATIONS = 100_000
UNION_STRATEGIES = ("basic", "prune")
NAIVE_ENUM = "naive-enum"
STRATEGIES = (NAIVE_ENUM,) + tuple(
    f"{p}+{u}" for p in PATH_STRATEGIES for u in UNION_STRATEGIES
)

# when set, every merge output is checked with is_minimal
ASSERT_MINIMAL = False


@dataclass
class EnumStats:
    path_instances: int = 0
    merge_calls: int = 0
    mappings: int = 0
    duplicates: int = 0
    rounds: int = 0
    explanations: int = 0
    patterns_grown: int = 0
    paths: PathStats = field(default_factory=PathStats)


def max_explanations() -> int:
    raw = os.environ.get("REX_MAX_EXPLANATIONS")
    return int(raw) if raw else DEFAULT_MAX_EXPLANATIONS


def _check_cap(count: int, cap: Optional[int]) -> None:
    cap = max_explanations() if cap is None else cap
    if count > cap:
        raise ResourceLimitError(f"more than {cap} explanations; raise REX_MAX_EXPLANATIONS to continue")


def duplicated(re: Explanation, pool: Iterable[Explanation]) -> bool:
    """True if some pool member has an isomorphic pattern."""
    return any(re.canonical == other.canonical for other in pool)


def _mappings(
    n1: int, n2: int, allowed: Optional[Sequence[Sequence[int]]] = None
) -> Iterable[tuple[Optional[int], ...]]:
    """Partial one-to-one maps from interior slots of p1 to those of p2.

    Each p1 slot takes a p2 slot (in order) or None; at least one is matched.
    ``allowed[i]`` restricts the p2 slots that slot ``i`` may take.
    """
    options = allowed if allowed is not None else [range(n2)] * n1
    choice: list[Optional[int]] = [None] * n1
    used: set[int] = set()

    def rec(i: int):
        if i == n1:
            if used:
                yield tuple(choice)
            return
        for j in options[i]:
            if j in used:
                continue
            used.add(j)
            choice[i] = j
            yield from rec(i + 1)
            used.discard(j)
        choice[i] = None
        yield from rec(i + 1)

    yield from rec(0)


def merge(
    re1: Explanation, re2: Explanation, n: int, stats: Optional[EnumStats] = None
) -> list[Explanation]:
    """Combine two explanations under every valid partial variable mapping.

    Results with more than ``n`` variables or without any instance are
    dropped. The output can contain isomorphic duplicates.
    """
    p1, p2 = re1.pattern, re2.pattern
    in1, in2 = p1.interior, p2.interior
    out: list[Explanation] = []
    if not in1 or not in2:
        return out
    # a matched pair of slots whose entity sets are disjoint can never join,
    # so such mappings are skipped without changing the output
    slots1, slots2 = re1.slot_entities, re2.slot_entities
    allowed = [[j for j in range(len(in2)) if not slots1[i].isdisjoint(slots2[j])] for i in range(len(in1))]
    if not any(allowed):
        return out
    names1 = {p1.start: START, p1.end: END}
    names1.update({v: f"v{i}" for i, v in enumerate(in1)})
    edges1 = [PatternEdge.make(names1[e.u], names1[e.v], e.label, e.directed) for e in p1.edges]
    level = re1.level + re2.level

    for mapping in _mappings(len(in1), len(in2), allowed):
        if stats is not None:
            stats.mappings += 1
        matched2 = {j: i for i, j in enumerate(mapping) if j is not None}
        unmatched2 = [j for j in range(len(in2)) if j not in matched2]
        size = len(p1.variables) + len(unmatched2)
        if size > n:
            continue

        names2 = {p2.start: START, p2.end: END}
        for j, i in matched2.items():
            names2[in2[j]] = f"v{i}"
        for k, j in enumerate(unmatched2):
            names2[in2[j]] = f"v{len(in1) + k}"
        edges = edges1 + [
            PatternEdge.make(names2[e.u], names2[e.v], e.label, e.directed) for e in p2.edges
        ]
        interior = [f"v{i}" for i in range(size - 2)]
        pattern = ExplanationPattern((START, END, *interior), tuple(sorted(set(edges))))

        # instance positions: p1 interior slot i sits at i + 2, same for p2
        key1 = [i + 2 for j, i in sorted(matched2.items())]
        key2 = [j + 2 for j in sorted(matched2)]
        extra2 = [j + 2 for j in unmatched2]
        index: dict[tuple, list] = defaultdict(list)
        for inst2 in re2.instances:
            index[tuple(inst2[k] for k in key2)].append(inst2)
        insts = set()
        for inst1 in re1.instances:
            for inst2 in index.get(tuple(inst1[k] for k in key1), ()):
                new = inst1 + tuple(inst2[k] for k in extra2)
                if len(set(new)) == len(new):
                    insts.add(new)
        if not insts:
            continue
        if ASSERT_MINIMAL:
            assert is_minimal(pattern), pattern
        out.append(Explanation(pattern, tuple(sorted(insts)), level))
    return out


@dataclass
class UnionTrace:
    """Derivation record of a union run: (parent, path, child) per merge output."""

    derivations: list[tuple[Explanation, Explanation, Explanation]] = field(default_factory=list)
    pruned: list[tuple[Explanation, tuple]] = field(default_factory=list)


ExpandFilter = Callable[[int, list[Explanation]], Sequence[int]]


def path_union(
    paths: Sequence[Explanation],
    n: int,
    prune: bool,
    stats: Optional[EnumStats] = None,
    cap: Optional[int] = None,
    expand_filter: Optional[ExpandFilter] = None,
    trace: Optional[UnionTrace] = None,
    deadline: Optional[float] = None,
) -> list[Explanation]:
    """Shared driver for the basic and the history-pruned path union.

    ``expand_filter(round, batch)`` picks which members of the batch produced
    by the previous round get expanded; the rest stay in the result and in
    the composition histories but are not merged further.
    """
    stats = stats if stats is not None else EnumStats()
    q_path: list[Explanation] = []
    seen: set[str] = set()
    for re in paths:
        if re.canonical not in seen:
            seen.add(re.canonical)
            q_path.append(re)
    result = list(q_path)
    expand = q_path
    history: list[list[tuple[int, int]]] = []
    first = True
    rnd = 0
    while expand:
        rnd += 1
        selected = range(len(expand)) if expand_filter is None else expand_filter(rnd, expand)
        new: list[Explanation] = []
        new_index: dict[str, int] = {}
        new_history: list[list[tuple[int, int]]] = []
        by_parent: dict[int, set[int]] = defaultdict(set)
        if prune and not first:
            for h in history:
                for x, j in h:
                    by_parent[x].add(j)
        for i1 in selected:
            if deadline is not None and time.monotonic() > deadline:
                raise BudgetExceeded("path union ran out of time")
            if prune and not first:
                s_path: set[int] = set()
                for x, _ in history[i1]:
                    s_path |= by_parent[x]
                candidates = sorted(s_path)
            else:
                candidates = range(len(q_path))
            for i2 in candidates:
                stats.merge_calls += 1
                for re in merge(expand[i1], q_path[i2], n, stats):
                    if trace is not None:
                        trace.derivations.append((expand[i1], q_path[i2], re))
                    c = re.canonical
                    if c in seen:
                        stats.duplicates += 1
                        continue
                    if c in new_index:
                        stats.duplicates += 1
                        new_history[new_index[c]].append((i1, i2))
                        continue
                    new_index[c] = len(new)
                    new.append(replace(re, level=rnd + 1))
                    new_history.append([(i1, i2)])
        seen.update(new_index)
        result.extend(new)
        _check_cap(len(result), cap)
        expand = new
        history = new_history
        first = False
    stats.rounds = rnd
    stats.explanations = len(result)
    return result


def path_union_basic(paths, n, stats=None, cap=None) -> list[Explanation]:
    return path_union(paths, n, False, stats, cap)


def path_union_prune(paths, n, stats=None, cap=None) -> list[Explanation]:
    return path_union(paths, n, True, stats, cap)


def _oriented(u: str, x: str, label: str, directed: bool, role: str) -> PatternEdge:
    if not directed:
        return PatternEdge.make(u, x, label, False)
    if role == SRC:
        return PatternEdge(u, x, label, True)
    return PatternEdge(x, u, label, True)


def _start_component(p: ExplanationPattern) -> set[str]:
    comp = {p.start}
    stack = [p.start]
    while stack:
        x = stack.pop()
        for _, y in p.adjacency[x]:
            if y not in comp:
                comp.add(y)
                stack.append(y)
    return comp


def naive_enum(
    kb: KnowledgeBase,
    start: str,
    end: str,
    n: int,
    stats: Optional[EnumStats] = None,
    deadline: Optional[float] = None,
    cap: Optional[int] = None,
) -> list[Explanation]:
    """Minimal explanations found by growing patterns edge by edge.

    The seed holds the start variable and an unattached end variable. Each
    step adds one edge touching the start's component, either to an existing
    variable or to a fresh one. Children are deduplicated by canonical form
    and dropped when they have no instance; non-minimal ones are kept for
    further growth but not reported. ``deadline`` is a ``time.monotonic()``
    value after which :class:`BudgetExceeded` is raised.
    """
    kb.check(start, end)
    if start == end:
        raise ValueError("start and end entities must differ")
    if n < 2:
        raise ValueError("pattern size limit must be >= 2")
    stats = stats if stats is not None else EnumStats()
    seed = ExplanationPattern((START, END), ())
    queue: list[tuple[ExplanationPattern, frozenset]] = [(seed, frozenset({(start, end)}))]
    seen = {seed._canonical[0]}
    found: list[Explanation] = []
    i = 0
    while i < len(queue):
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetExceeded("naive enumeration ran out of time")
        p, insts = queue[i]
        i += 1
        stats.patterns_grown += 1
        comp = _start_component(p)
        present = set(p.edges)
        fresh = f"v{len(p.variables) - 2}"
        can_grow = len(p.variables) < n
        children: dict[tuple[PatternEdge, bool], set] = defaultdict(set)
        for inst in insts:
            image = {ent: k for k, ent in enumerate(inst)}
            for k, u in enumerate(p.variables):
                if u not in comp:
                    continue
                for e, role in kb.incident(inst[k]):
                    w = e.other(inst[k])
                    xk = image.get(w)
                    if xk is not None:
                        pe = _oriented(u, p.variables[xk], e.label, e.directed, role)
                        if pe not in present:
                            children[pe, False].add(inst)
                    elif can_grow:
                        pe = _oriented(u, fresh, e.label, e.directed, role)
                        children[pe, True].add(inst + (w,))
        for (pe, grows), child_insts in sorted(children.items()):
            variables = p.variables + (fresh,) if grows else p.variables
            child = ExplanationPattern(variables, tuple(sorted(p.edges + (pe,))))
            c = child._canonical[0]
            if c in seen:
                stats.duplicates += 1
                continue
            seen.add(c)
            frozen = frozenset(child_insts)
            queue.append((child, frozen))
            if is_minimal(child):
                found.append(Explanation(child, tuple(sorted(frozen)), covering_number(child)))
                _check_cap(len(found), cap)
    found.sort(key=lambda re: (re.level, re.canonical))
    stats.explanations = len(found)
    return found


def parse_strategy(strategy: str) -> tuple[str, str]:
    if strategy == NAIVE_ENUM:
        return NAIVE_ENUM, ""
    path, _, union = strategy.partition("+")
    if path not in PATH_STRATEGIES or union not in UNION_STRATEGIES:
        raise ConfigurationError(
            f"unknown strategy {strategy!r}; expected one of {', '.join(STRATEGIES)}"
        )
    return path, union


def general_enum(
    kb: KnowledgeBase,
    start: str,
    end: str,
    n: int,
    strategy: str = "prioritized+prune",
    stats: Optional[EnumStats] = None,
    cap: Optional[int] = None,
    deadline: Optional[float] = None,
) -> list[Explanation]:
    """All minimal explanations with at most ``n`` variables.

    ``strategy`` is ``"<path>+<union>"`` with path in naive/basic/prioritized
    and union in basic/prune, or ``"naive-enum"`` for edge-by-edge growth.
    """
    path_kind, union_kind = parse_strategy(strategy)
    if n < 2:
        raise ValueError("pattern size limit must be >= 2")
    stats = stats if stats is not None else EnumStats()
    if path_kind == NAIVE_ENUM:
        return naive_enum(kb, start, end, n, stats, deadline=deadline, cap=cap)
    paths = enumerate_paths(kb, start, end, n - 1, path_kind, stats.paths)
    stats.path_instances = stats.paths.path_instances
    out = path_union(paths, n, union_kind == "prune", stats, cap, deadline=deadline)
    out.sort(key=lambda re: (re.level, re.canonical))
    return out
