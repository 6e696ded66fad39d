"""Immutable edge-labeled knowledge base.

The on-disk format is UTF-8 text with one edge per line::

    src<TAB>label<TAB>dst<TAB>flag

where ``flag`` is ``D`` (directed, src -> dst) or ``U`` (undirected). Blank
lines and lines starting with ``#`` are ignored. A line whose two endpoints
coincide declares the entity without adding an edge, which is how isolated
entities are written.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from typing import Iterable, NamedTuple

from .errors import KBParseError, UnknownEntityError

logger = logging.getLogger(__name__)

SRC = "src"
DST = "dst"
UNDIRECTED = "undirected"

LOW = "low"
MEDIUM = "medium"
HIGH = "high"


class Edge(NamedTuple):
    src: str
    dst: str
    label: str
    directed: bool

    @classmethod
    def make(cls, src: str, dst: str, label: str, directed: bool) -> "Edge":
        """Build an edge, ordering undirected endpoints canonically."""
        if not directed and dst < src:
            src, dst = dst, src
        return cls(src, dst, label, directed)

    def other(self, v: str) -> str:
        return self.dst if v == self.src else self.src


class KnowledgeBase:
    """An entity graph with labeled directed and undirected edges.

    Instances are immutable after construction and safe to share between
    threads. Use :func:`load_kb` or :meth:`from_edges` to build one.
    """

    def __init__(self, edges: Iterable[Edge], entities: Iterable[str] = ()):
        unique: dict[Edge, None] = {}
        dropped = 0
        for e in edges:
            e = Edge.make(*e)
            if e.src == e.dst:
                raise ValueError(f"self-loop on {e.src!r} is not supported")
            if e in unique:
                dropped += 1
                continue
            unique[e] = None
        self.edges: tuple[Edge, ...] = tuple(sorted(unique))
        self.duplicates_dropped = dropped

        ents = set(entities)
        for e in self.edges:
            ents.add(e.src)
            ents.add(e.dst)
        self.entities: frozenset[str] = frozenset(ents)
        self.labels: frozenset[str] = frozenset(e.label for e in self.edges)

        adj: dict[str, list[tuple[Edge, str]]] = {v: [] for v in self.entities}
        out_idx: dict[tuple[str, str], set[str]] = defaultdict(set)
        in_idx: dict[tuple[str, str], set[str]] = defaultdict(set)
        und_idx: dict[tuple[str, str], set[str]] = defaultdict(set)
        for e in self.edges:
            if e.directed:
                adj[e.src].append((e, SRC))
                adj[e.dst].append((e, DST))
                out_idx[e.src, e.label].add(e.dst)
                in_idx[e.dst, e.label].add(e.src)
            else:
                adj[e.src].append((e, UNDIRECTED))
                adj[e.dst].append((e, UNDIRECTED))
                und_idx[e.src, e.label].add(e.dst)
                und_idx[e.dst, e.label].add(e.src)
        for v, items in adj.items():
            items.sort(key=lambda item: (item[0].label, item[0].other(v), item[1], item[0].directed))
        self._adj = {v: tuple(items) for v, items in adj.items()}
        self._out = {k: frozenset(s) for k, s in out_idx.items()}
        self._in = {k: frozenset(s) for k, s in in_idx.items()}
        self._und = {k: frozenset(s) for k, s in und_idx.items()}
        self._edge_set = frozenset(self.edges)

    @classmethod
    def from_edges(cls, edges: Iterable[Edge | tuple], entities: Iterable[str] = ()) -> "KnowledgeBase":
        return cls((Edge.make(*e) for e in edges), entities)

    def __repr__(self) -> str:
        return f"KnowledgeBase({len(self.entities)} entities, {len(self.edges)} edges)"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KnowledgeBase):
            return NotImplemented
        return self.entities == other.entities and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.entities, self.edges))

    def __contains__(self, v: object) -> bool:
        return v in self.entities

    def check(self, *vs: str) -> None:
        for v in vs:
            if v not in self.entities:
                raise UnknownEntityError(v)

    def incident(self, v: str) -> tuple[tuple[Edge, str], ...]:
        """Incident edges of ``v`` without the membership check."""
        return self._adj[v]

    def has_edge(self, src: str, dst: str, label: str, directed: bool) -> bool:
        return Edge.make(src, dst, label, directed) in self._edge_set

    # neighbor lookups used by the instance matcher
    def successors(self, v: str, label: str) -> frozenset[str]:
        return self._out.get((v, label), frozenset())

    def predecessors(self, v: str, label: str) -> frozenset[str]:
        return self._in.get((v, label), frozenset())

    def undirected_neighbors(self, v: str, label: str) -> frozenset[str]:
        return self._und.get((v, label), frozenset())


DECLARE_LABEL = "entity"


def parse_kb(lines: Iterable[str]) -> KnowledgeBase:
    edges = []
    declared = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise KBParseError(lineno, f"expected 4 tab-separated fields, got {len(fields)}")
        src, label, dst, flag = fields
        if not src or not label or not dst or not flag:
            raise KBParseError(lineno, "empty field")
        if flag not in ("D", "U"):
            raise KBParseError(lineno, f"unknown flag {flag!r} (expected D or U)")
        if src == dst:
            declared.append(src)
            continue
        edges.append(Edge.make(src, dst, label, flag == "D"))
    kb = KnowledgeBase(edges, declared)
    if kb.duplicates_dropped:
        logger.warning("dropped %d duplicate edge lines", kb.duplicates_dropped)
    return kb


def load_kb(path) -> KnowledgeBase:
    with open(path, encoding="utf-8") as fh:
        return parse_kb(fh)


def format_kb(kb: KnowledgeBase) -> str:
    lines = [f"{e.src}\t{e.label}\t{e.dst}\t{'D' if e.directed else 'U'}\n" for e in kb.edges]
    isolated = sorted(v for v in kb.entities if not kb.incident(v))
    lines.extend(f"{v}\t{DECLARE_LABEL}\t{v}\tU\n" for v in isolated)
    return "".join(lines)


def dump_kb(kb: KnowledgeBase, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_kb(kb))


def incident_edges(kb: KnowledgeBase, v: str) -> list[tuple[Edge, str]]:
    """Edges touching ``v`` with the role ``v`` plays on each.

    Roles are ``"src"``, ``"dst"`` or ``"undirected"``. Ordered by label and
    then by the id of the other endpoint.
    """
    kb.check(v)
    return list(kb.incident(v))


def degree(kb: KnowledgeBase, v: str) -> int:
    kb.check(v)
    return len(kb.incident(v))


def connectedness(kb: KnowledgeBase, a: str, b: str, max_len: int, limit: int | None = None) -> int:
    """Number of simple paths between ``a`` and ``b`` with at most ``max_len`` edges.

    Edge direction is ignored. Parallel edges yield distinct paths. With
    ``limit`` set, counting stops once the total exceeds it (the returned
    value is then ``limit + 1``).
    """
    kb.check(a, b)
    if a == b:
        raise ValueError("connectedness needs two distinct entities")
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    visited = {a}
    total = 0

    class _Done(Exception):
        pass

    def walk(v: str, depth: int) -> None:
        nonlocal total
        for e, _ in kb.incident(v):
            w = e.other(v)
            if w == b:
                total += 1
                if limit is not None and total > limit:
                    raise _Done
            elif depth + 1 < max_len and w not in visited:
                visited.add(w)
                walk(w, depth + 1)
                visited.discard(w)

    try:
        walk(a, 0)
    except _Done:
        pass
    return total


def classify_connectedness(c: int) -> str:
    # 30 falls in low and 100 in medium
    if c < 0:
        raise ValueError("connectedness cannot be negative")
    if c <= 30:
        return LOW
    if c <= 100:
        return MEDIUM
    return HIGH
