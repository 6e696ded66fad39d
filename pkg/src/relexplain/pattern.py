"""Explanation patterns, instances and the structural checks on them.

A pattern is a small graph over variables with two distinguished
variables, ``start`` and ``end``. Its ``variables`` tuple always lists
``start`` first and ``end`` second; an instance is a tuple of entity ids
aligned with that order.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

from .errors import PatternError, PatternSizeError
from .kb import Edge, KnowledgeBase

START = "start"
END = "end"

DEFAULT_SIZE_LIMIT = 5

Instance = tuple  # entity ids aligned with ExplanationPattern.variables


class PatternEdge(NamedTuple):
    u: str
    v: str
    label: str
    directed: bool

    @classmethod
    def make(cls, u: str, v: str, label: str, directed: bool) -> "PatternEdge":
        if not directed and v < u:
            u, v = v, u
        return cls(u, v, label, directed)

    def other(self, x: str) -> str:
        return self.v if x == self.u else self.u


@dataclass(frozen=True)
class ExplanationPattern:
    variables: tuple[str, ...]
    edges: tuple[PatternEdge, ...]

    def __post_init__(self):
        if len(self.variables) < 2 or self.variables[0] == self.variables[1]:
            raise PatternError("a pattern needs distinct start and end variables")
        if len(set(self.variables)) != len(self.variables):
            raise PatternError("duplicate variable ids")
        declared = set(self.variables)
        for e in self.edges:
            if e.u not in declared or e.v not in declared:
                raise PatternError(f"edge {e} uses an undeclared variable")
            if e.u == e.v:
                raise PatternError(f"self-loop on variable {e.u!r}")

    @classmethod
    def build(
        cls,
        edges: Iterable[PatternEdge | tuple],
        interior: Sequence[str] = (),
        start: str = START,
        end: str = END,
    ) -> "ExplanationPattern":
        """Make a pattern, merging identical edges and sorting the edge list.

        Interior variables that are not listed in ``interior`` are appended
        in order of first appearance.
        """
        es = sorted({PatternEdge.make(*e) for e in edges})
        inner = list(interior)
        seen = {start, end, *inner}
        for e in es:
            for x in (e.u, e.v):
                if x not in seen:
                    seen.add(x)
                    inner.append(x)
        return cls((start, end, *inner), tuple(es))

    @property
    def start(self) -> str:
        return self.variables[0]

    @property
    def end(self) -> str:
        return self.variables[1]

    @property
    def interior(self) -> tuple[str, ...]:
        return self.variables[2:]

    @property
    def size(self) -> int:
        return len(self.variables)

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.variables)}

    @cached_property
    def adjacency(self) -> dict[str, tuple[tuple[int, str], ...]]:
        """Per variable, the (edge index, other endpoint) pairs touching it."""
        adj: dict[str, list] = {v: [] for v in self.variables}
        for i, e in enumerate(self.edges):
            adj[e.u].append((i, e.v))
            adj[e.v].append((i, e.u))
        return {v: tuple(items) for v, items in adj.items()}

    @cached_property
    def _canonical(self) -> tuple[str, dict[str, str]]:
        inner = self.interior
        best_key = None
        best_names: dict[str, str] = {}
        for perm in itertools.permutations(range(len(inner))):
            names = {self.start: "s", self.end: "e"}
            for var, k in zip(inner, perm):
                names[var] = str(k)
            key = []
            for e in self.edges:
                a, b = names[e.u], names[e.v]
                if e.directed:
                    key.append((a, b, e.label, "D"))
                else:
                    key.append((min(a, b), max(a, b), e.label, "U"))
            key.sort()
            if best_key is None or key < best_key:
                best_key, best_names = key, names
        text = json.dumps([len(self.variables), best_key], separators=(",", ":"))
        return text, best_names

    def is_path(self) -> bool:
        """True for a simple start-to-end path pattern."""
        if len(self.edges) != len(self.variables) - 1:
            return False
        degs = {v: len(a) for v, a in self.adjacency.items()}
        if degs[self.start] != 1 or degs[self.end] != 1:
            return False
        if any(degs[v] != 2 for v in self.interior):
            return False
        return is_connected(self)

    def describe(self) -> str:
        parts = []
        for e in self.edges:
            if e.directed:
                parts.append(f"{e.u} -{e.label}-> {e.v}")
            else:
                parts.append(f"{e.u} -{e.label}- {e.v}")
        return "; ".join(parts)


@dataclass(frozen=True)
class Explanation:
    """A pattern with its complete instance set for one entity pair.

    ``level`` is the number of path patterns in the smallest covering set
    (1 for path patterns).
    """

    pattern: ExplanationPattern
    instances: tuple[Instance, ...]
    level: int = 1

    @cached_property
    def canonical(self) -> str:
        return self.pattern._canonical[0]

    @cached_property
    def signature(self) -> tuple[str, frozenset]:
        """Canonical pattern plus the instance set in canonical variable order.

        Two explanations have equal signatures iff their patterns are
        isomorphic (targets fixed) and their instance sets correspond.
        """
        return self.canonical, canonical_instances(self.pattern, self.instances)

    @cached_property
    def slot_entities(self) -> tuple[frozenset[str], ...]:
        """Entities taken by each interior variable across the instances."""
        return tuple(
            frozenset(inst[k] for inst in self.instances) for k in range(2, len(self.pattern.variables))
        )

    def bindings(self) -> list[dict[str, str]]:
        return [dict(zip(self.pattern.variables, inst)) for inst in self.instances]


def canonical_instances(p: ExplanationPattern, instances: Iterable[Instance]) -> frozenset:
    names = p._canonical[1]
    order = sorted(range(len(p.variables)), key=lambda i: _name_rank(names[p.variables[i]]))
    return frozenset(tuple(inst[i] for i in order) for inst in instances)


def _name_rank(name: str) -> tuple[int, int]:
    if name == "s":
        return (0, 0)
    if name == "e":
        return (1, 0)
    return (2, int(name))


def canonical_form(p: ExplanationPattern, size_limit: int = DEFAULT_SIZE_LIMIT) -> str:
    """String identifying ``p`` up to isomorphism fixing start and end.

    Labels, directedness and orientation are preserved. Computed by trying
    every permutation of the interior variables, so the pattern must have at
    most ``size_limit`` variables.
    """
    if p.size > size_limit:
        raise PatternSizeError(f"pattern has {p.size} variables, limit is {size_limit}")
    return p._canonical[0]


def is_connected(p: ExplanationPattern) -> bool:
    seen = {p.start}
    stack = [p.start]
    while stack:
        x = stack.pop()
        for _, y in p.adjacency[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(p.variables)


def simple_paths(p: ExplanationPattern) -> Iterator[tuple[tuple[str, ...], tuple[int, ...]]]:
    """All simple undirected start-to-end paths as (variables, edge indices)."""
    nodes = [p.start]
    used: list[int] = []
    on_path = {p.start}

    def walk(x: str):
        for i, y in p.adjacency[x]:
            if y == p.end:
                yield (*nodes, y), (*used, i)
            elif y not in on_path:
                on_path.add(y)
                nodes.append(y)
                used.append(i)
                yield from walk(y)
                used.pop()
                nodes.pop()
                on_path.discard(y)

    yield from walk(p.start)


def is_essential(p: ExplanationPattern) -> bool:
    """Every variable and edge lies on some simple start-to-end path."""
    nodes: set[str] = set()
    edges: set[int] = set()
    for vs, es in simple_paths(p):
        nodes.update(vs)
        edges.update(es)
    return len(nodes) == len(p.variables) and len(edges) == len(p.edges)


def is_decomposable(p: ExplanationPattern) -> bool:
    """Edges split into two non-empty groups sharing no interior variable."""
    if len(p.edges) < 2:
        return False
    parent = list(range(len(p.edges)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for v in p.interior:
        touching = [i for i, _ in p.adjacency[v]]
        for i in touching[1:]:
            parent[find(i)] = find(touching[0])
    return len({find(i) for i in range(len(p.edges))}) > 1


def is_minimal(p: ExplanationPattern) -> bool:
    return is_essential(p) and not is_decomposable(p)


def covering_number(p: ExplanationPattern) -> Optional[int]:
    """Size of the smallest set of simple start-to-end paths covering ``p``.

    Returns None when no covering set exists (``p`` is not essential).
    """
    paths = [(frozenset(vs), frozenset(es)) for vs, es in simple_paths(p)]
    all_nodes = frozenset(p.variables)
    all_edges = frozenset(range(len(p.edges)))
    for k in range(1, len(paths) + 1):
        for combo in itertools.combinations(paths, k):
            ns = frozenset().union(*(c[0] for c in combo))
            es = frozenset().union(*(c[1] for c in combo))
            if ns == all_nodes and es == all_edges:
                return k
    return None


# --- instance matching -------------------------------------------------------


def _match_plan(p: ExplanationPattern, bound: Sequence[int]):
    """Order the unbound variables, most constrained first.

    Each step is (variable index, [(bound variable index, kind, label)]) where
    kind says how the candidate relates to the bound entity.
    """
    bound_set = set(bound)
    steps = []
    remaining = [i for i in range(len(p.variables)) if i not in bound_set]
    idx = p.index
    while remaining:
        best = None
        best_links: list = []
        for i in remaining:
            var = p.variables[i]
            links = []
            for ei, other in p.adjacency[var]:
                j = idx[other]
                if j not in bound_set:
                    continue
                e = p.edges[ei]
                if not e.directed:
                    kind = "und"
                elif e.u == var:
                    kind = "pred"  # var -> bound: candidates are predecessors
                else:
                    kind = "succ"
                links.append((j, kind, e.label))
            if best is None or len(links) > len(best_links):
                best, best_links = i, links
        steps.append((best, best_links))
        bound_set.add(best)
        remaining.remove(best)
    return steps


def _prebound_edges_hold(kb: KnowledgeBase, p: ExplanationPattern, binding: dict[str, str]) -> bool:
    for e in p.edges:
        if e.u in binding and e.v in binding:
            if not kb.has_edge(binding[e.u], binding[e.v], e.label, e.directed):
                return False
    return True


def iter_matches(
    kb: KnowledgeBase, p: ExplanationPattern, start: str, end: Optional[str] = None
) -> Iterator[Instance]:
    """Yield injective bindings of ``p`` into ``kb`` with ``start`` fixed.

    When ``end`` is None the end variable is left free and ranges over every
    entity other than the bound ones. Order is unspecified.
    """
    n = len(p.variables)
    slots: list[Optional[str]] = [None] * n
    slots[0] = start
    pre = {p.start: start}
    bound = [0]
    if end is not None:
        if end == start:
            return
        slots[1] = end
        pre[p.end] = end
        bound.append(1)
    if not _prebound_edges_hold(kb, p, pre):
        return
    plan = _match_plan(p, bound)
    used = set(pre.values())
    lookups = {"succ": kb.successors, "pred": kb.predecessors, "und": kb.undirected_neighbors}
    everything = sorted(kb.entities)

    def step(depth: int):
        if depth == len(plan):
            yield tuple(slots)
            return
        i, links = plan[depth]
        if links:
            sets = [lookups[kind](slots[j], label) for j, kind, label in links]
            sets.sort(key=len)
            cands = sets[0]
            for s in sets[1:]:
                cands = cands & s
                if not cands:
                    return
        else:
            cands = everything
        for c in cands:
            if c in used:
                continue
            slots[i] = c
            used.add(c)
            yield from step(depth + 1)
            used.discard(c)
        slots[i] = None

    yield from step(0)


def match_instances(kb: KnowledgeBase, p: ExplanationPattern, start: str, end: str) -> list[Instance]:
    """Every injective binding of ``p`` mapping start/end to the given entities.

    Returned sorted lexicographically over the variable order of ``p``.
    """
    kb.check(start, end)
    if start == end:
        raise ValueError("start and end entities must differ")
    return sorted(set(iter_matches(kb, p, start, end)))


def instance_holds(kb: KnowledgeBase, p: ExplanationPattern, inst: Instance) -> bool:
    """Re-check injectivity and every edge constraint of one binding."""
    if len(inst) != len(p.variables) or len(set(inst)) != len(inst):
        return False
    b = dict(zip(p.variables, inst))
    return all(kb.has_edge(b[e.u], b[e.v], e.label, e.directed) for e in p.edges)


# --- paths -------------------------------------------------------------------


def path_variables(length: int) -> tuple[str, ...]:
    return tuple(f"v{i}" for i in range(length - 1))


def instances_to_pattern(start: str, path: Sequence[Edge]) -> tuple[ExplanationPattern, Instance]:
    """Turn a path instance into its path pattern and binding.

    ``path`` lists the KB edges in traversal order beginning at ``start``.
    Interior entities become variables ``v0, v1, ...`` in traversal order.
    """
    if not path:
        raise PatternError("empty path")
    nodes = [start]
    for e in path:
        cur = nodes[-1]
        if cur not in (e.src, e.dst):
            raise PatternError(f"edge {e} does not continue the path at {cur!r}")
        nodes.append(e.other(cur))
    if len(set(nodes)) != len(nodes):
        raise PatternError("path revisits an entity")
    names = (START, *path_variables(len(path)), END)
    pedges = []
    for k, e in enumerate(path):
        a, b = names[k], names[k + 1]
        if e.directed and e.src != nodes[k]:
            a, b = b, a
        pedges.append(PatternEdge.make(a, b, e.label, e.directed))
    p = ExplanationPattern((START, END, *names[1:-1]), tuple(sorted(pedges)))
    inst = (nodes[0], nodes[-1], *nodes[1:-1])
    return p, inst


# --- serialization -----------------------------------------------------------


def pattern_document(
    p: ExplanationPattern, instances: Iterable[Instance] = (), max_instances: Optional[int] = None
) -> dict:
    """Plain-data document for a pattern and (some of) its instances."""
    roles = {p.start: "start", p.end: "end"}
    insts = list(instances)
    if max_instances is not None:
        insts = insts[:max_instances]
    return {
        "variables": [{"id": v, "role": roles.get(v)} for v in p.variables],
        "edges": [
            {"from": e.u, "to": e.v, "label": e.label, "directed": e.directed} for e in p.edges
        ],
        "instances": [dict(zip(p.variables, inst)) for inst in insts],
    }


def pattern_from_document(doc: dict) -> tuple[ExplanationPattern, list[Instance]]:
    start = next(v["id"] for v in doc["variables"] if v.get("role") == "start")
    end = next(v["id"] for v in doc["variables"] if v.get("role") == "end")
    inner = [v["id"] for v in doc["variables"] if v.get("role") not in ("start", "end")]
    edges = [PatternEdge.make(e["from"], e["to"], e["label"], bool(e["directed"])) for e in doc["edges"]]
    p = ExplanationPattern((start, end, *inner), tuple(sorted(set(edges))))
    insts = [tuple(b[v] for v in p.variables) for b in doc.get("instances", [])]
    return p, insts
