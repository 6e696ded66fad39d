"""Independent reference implementations used as test oracles.

Nothing here calls into the package's enumeration, matching or canonical
form code; the brute-force routines work straight from edge lists.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter, defaultdict

import networkx as nx
import numpy as np

from relexplain.kb import Edge, KnowledgeBase

# A "raw pattern" here is (variables, edges) with edges as (u, v, label, directed)
# and variables[0], variables[1] the start and end.


def norm_edge(u, v, label, directed):
    if not directed and v < u:
        u, v = v, u
    return (u, v, label, directed)


def random_kb(rng: random.Random, max_nodes=12, max_edges=25, max_labels=4, undirected_p=0.3) -> KnowledgeBase:
    n_nodes = rng.randint(3, max_nodes)
    nodes = [f"e{i}" for i in range(n_nodes)]
    labels = [f"l{i}" for i in range(rng.randint(1, max_labels))]
    und = {lab: rng.random() < undirected_p for lab in labels}
    n_edges = rng.randint(2, min(max_edges, n_nodes * (n_nodes - 1)))
    edges = set()
    for _ in range(n_edges * 3):
        if len(edges) >= n_edges:
            break
        a, b = rng.sample(nodes, 2)
        lab = rng.choice(labels)
        edges.add(Edge.make(a, b, lab, not und[lab]))
    return KnowledgeBase(edges, nodes)


def sparse_random_kb(rng: random.Random) -> KnowledgeBase:
    """Random KB within 12 nodes / 25 edges / 4 labels, density bounded.

    Dense graphs at this size have explanation sets in the hundreds of
    thousands, so edges are held to at most 1.8 per node.
    """
    n_nodes = rng.randint(3, 12)
    cap = min(25, int(1.8 * n_nodes))
    nodes = [f"e{i:02d}" for i in range(n_nodes)]
    labels = [f"l{i}" for i in range(rng.randint(1, 4))]
    und = {lab: rng.random() < 0.3 for lab in labels}
    target = rng.randint(2, cap)
    edges = set()
    for _ in range(target * 4):
        if len(edges) >= target:
            break
        a, b = rng.sample(nodes, 2)
        lab = rng.choice(labels)
        edges.add(Edge.make(a, b, lab, not und[lab]))
    return KnowledgeBase(edges, nodes)


def connected_pair(kb: KnowledgeBase, rng: random.Random):
    """A random (start, end) pair joined by some path, or None."""
    g = nx.Graph()
    g.add_nodes_from(kb.entities)
    g.add_edges_from((e.src, e.dst) for e in kb.edges)
    pairs = [
        (a, b)
        for comp in nx.connected_components(g)
        for a in sorted(comp)
        for b in sorted(comp)
        if a != b
    ]
    return rng.choice(pairs) if pairs else None


# --- paths -------------------------------------------------------------------


def nx_connectedness(kb: KnowledgeBase, a: str, b: str, max_len: int) -> int:
    g = nx.MultiGraph()
    g.add_nodes_from(kb.entities)
    for i, e in enumerate(kb.edges):
        g.add_edge(e.src, e.dst, key=i)
    return sum(1 for _ in nx.all_simple_edge_paths(g, a, b, cutoff=max_len))


def nx_path_instances(kb: KnowledgeBase, a: str, b: str, max_len: int) -> set:
    """Simple paths as tuples of KB edges in traversal order."""
    g = nx.MultiGraph()
    g.add_nodes_from(kb.entities)
    for i, e in enumerate(kb.edges):
        g.add_edge(e.src, e.dst, key=i)
    out = set()
    for path in nx.all_simple_edge_paths(g, a, b, cutoff=max_len):
        out.add(tuple(kb.edges[k] for _, _, k in path))
    return out


# --- matching ----------------------------------------------------------------


def brute_matches(kb: KnowledgeBase, variables, edges, start, end) -> set:
    """All injective bindings (tuples aligned with ``variables``)."""
    inner = variables[2:]
    others = sorted(kb.entities - {start, end})
    kb_edges = set(kb.edges)
    out = set()
    for combo in itertools.permutations(others, len(inner)):
        b = {variables[0]: start, variables[1]: end, **dict(zip(inner, combo))}
        if all(norm_edge(b[u], b[v], lab, d) in kb_edges for u, v, lab, d in edges):
            out.add(tuple(b[v] for v in variables))
    return out


# --- isomorphism -------------------------------------------------------------


def brute_isomorphic(p1, p2) -> bool:
    vars1, edges1 = p1
    vars2, edges2 = p2
    if len(vars1) != len(vars2) or len(set(edges1)) != len(set(edges2)):
        return False
    target = {norm_edge(*e) for e in edges2}
    for perm in itertools.permutations(vars2[2:]):
        m = {vars1[0]: vars2[0], vars1[1]: vars2[1], **dict(zip(vars1[2:], perm))}
        if {norm_edge(m[u], m[v], lab, d) for u, v, lab, d in edges1} == target:
            return True
    return False


def automorphisms(p) -> int:
    return sum(1 for _ in _isos(p, p))


def _isos(p1, p2):
    vars1, edges1 = p1
    vars2, edges2 = p2
    target = {norm_edge(*e) for e in edges2}
    for perm in itertools.permutations(vars2[2:]):
        m = {vars1[0]: vars2[0], vars1[1]: vars2[1], **dict(zip(vars1[2:], perm))}
        if {norm_edge(m[u], m[v], lab, d) for u, v, lab, d in edges1} == target:
            yield m


# --- structure ---------------------------------------------------------------


def _simple_paths(variables, edges):
    """Simple start-to-end paths as (node set, edge index set)."""
    s, t = variables[0], variables[1]
    inc = defaultdict(list)
    for i, (u, v, _, _) in enumerate(edges):
        inc[u].append((i, v))
        inc[v].append((i, u))
    out = []

    def walk(x, seen, used):
        for i, y in inc[x]:
            if y in seen:
                continue
            if y == t:
                out.append((frozenset(seen | {t}), frozenset(used | {i})))
            else:
                walk(y, seen | {y}, used | {i})

    walk(s, {s}, set())
    return out


def brute_minimal(variables, edges) -> bool:
    paths = _simple_paths(variables, edges)
    nodes = set().union(*(p[0] for p in paths)) if paths else set()
    used = set().union(*(p[1] for p in paths)) if paths else set()
    if nodes != set(variables) or used != set(range(len(edges))):
        return False
    targets = {variables[0], variables[1]}
    # non-decomposable: edges sharing a non-target endpoint form one group
    if len(edges) == 1:
        return True
    g = nx.Graph()
    g.add_nodes_from(range(len(edges)))
    for i, j in itertools.combinations(range(len(edges)), 2):
        ends_i = {edges[i][0], edges[i][1]} - targets
        ends_j = {edges[j][0], edges[j][1]} - targets
        if ends_i & ends_j:
            g.add_edge(i, j)
    return nx.is_connected(g)


def brute_covering_number(variables, edges):
    paths = _simple_paths(variables, edges)
    all_nodes, all_edges = set(variables), set(range(len(edges)))
    for r in range(1, len(paths) + 1):
        for combo in itertools.combinations(paths, r):
            if set().union(*(c[0] for c in combo)) == all_nodes and set().union(*(c[1] for c in combo)) == all_edges:
                return r
    return None


# --- explanations ------------------------------------------------------------


def brute_explanations(kb: KnowledgeBase, start: str, end: str, n: int) -> set:
    """Minimal explanations keyed by their instance images.

    Every instance of a pattern maps it onto an edge subset of the KB, so
    the minimal explanations are found by walking all edge subsets. The key
    of an explanation is the set of (image edge set, number of bindings)
    over its instances, which identifies pattern and instances without
    depending on variable names.
    """
    edges = list(kb.edges)
    classes: list[tuple[tuple, list]] = []  # (representative raw pattern, images)
    for r in range(1, len(edges) + 1):
        for subset in itertools.combinations(edges, r):
            nodes = {x for e in subset for x in (e.src, e.dst)}
            if start not in nodes or end not in nodes or len(nodes) > n:
                continue
            inner = sorted(nodes - {start, end})
            variables = (start, end, *inner)
            raw = tuple((e.src, e.dst, e.label, e.directed) for e in subset)
            if not brute_minimal(variables, raw):
                continue
            for rep, images in classes:
                if brute_isomorphic((variables, raw), rep):
                    images.append((frozenset(subset), (variables, raw)))
                    break
            else:
                classes.append(((variables, raw), [(frozenset(subset), (variables, raw))]))
    out = set()
    for rep, images in classes:
        aut = automorphisms(rep)
        out.add(frozenset((img, aut) for img, _ in images))
    return out


def image_key(explanation) -> frozenset:
    """The brute-force key of a package Explanation."""
    p = explanation.pattern
    images = Counter()
    for inst in explanation.instances:
        b = dict(zip(p.variables, inst))
        images[frozenset(Edge.make(b[e.u], b[e.v], e.label, e.directed) for e in p.edges)] += 1
    return frozenset(images.items())


# --- measures ----------------------------------------------------------------


def conductance_pinv(variables, edges) -> float:
    idx = {v: i for i, v in enumerate(variables)}
    n = len(variables)
    lap = np.zeros((n, n))
    for u, v, *_ in edges:
        a, b = idx[u], idx[v]
        lap[a, a] += 1
        lap[b, b] += 1
        lap[a, b] -= 1
        lap[b, a] -= 1
    chi = np.zeros(n)
    chi[0], chi[1] = 1.0, -1.0
    resistance = chi @ np.linalg.pinv(lap) @ chi
    return 1.0 / resistance


def brute_global_distribution(kb: KnowledgeBase, variables, edges) -> dict:
    """Count aggregate over every ordered entity pair, zero pairs left out."""
    tally = Counter()
    for x in sorted(kb.entities):
        for y in sorted(kb.entities):
            if x == y:
                continue
            c = len(brute_matches(kb, variables, edges, x, y))
            if c:
                tally[c] += 1
    return dict(tally)
