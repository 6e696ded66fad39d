"""Synthetic knowledge-base generator.

Every node after the first attaches to an earlier node, so the output is
connected; the remaining edges are filled in between weighted random node
pairs until the target average degree is reached. With a power-law shape,
node ``i`` gets weight ``(i + 1) ** (-1 / (exponent - 1))``, which yields a
degree tail close to that exponent.
"""

from __future__ import annotations

import bisect
import itertools
import random
from dataclasses import dataclass
from typing import Optional

from .errors import ConfigurationError
from .kb import Edge, KnowledgeBase

UNIFORM = "uniform"
POWER_LAW = "power-law"


@dataclass(frozen=True)
class GenSpec:
    nodes: int = 1000
    labels: int = 8
    undirected_fraction: float = 0.25
    avg_degree: float = 4.0
    shape: str = UNIFORM
    exponent: float = 2.5
    seed: int = 0

    def validate(self) -> None:
        if self.nodes < 1 or self.labels < 1:
            raise ConfigurationError("nodes and labels must be >= 1")
        if not 0.0 <= self.undirected_fraction <= 1.0:
            raise ConfigurationError("undirected_fraction must lie in [0, 1]")
        if self.avg_degree < 0:
            raise ConfigurationError("avg_degree must be >= 0")
        if self.shape not in (UNIFORM, POWER_LAW):
            raise ConfigurationError(f"unknown degree shape {self.shape!r}")
        if self.shape == POWER_LAW and self.exponent <= 1.0:
            raise ConfigurationError("power-law exponent must be > 1")


def _weights(spec: GenSpec) -> Optional[list[float]]:
    if spec.shape == UNIFORM:
        return None
    a = 1.0 / (spec.exponent - 1.0)
    return [(i + 1) ** -a for i in range(spec.nodes)]


def generate(spec: GenSpec) -> KnowledgeBase:
    spec.validate()
    rng = random.Random(spec.seed)
    width = len(str(max(spec.nodes - 1, 0)))
    ids = [f"n{i:0{width}d}" for i in range(spec.nodes)]
    # shuffle ids so that hubs are not simply the smallest names
    names = ids[:]
    rng.shuffle(names)
    n_und = round(spec.undirected_fraction * spec.labels)
    labels = [(f"r{j}", j >= n_und) for j in range(spec.labels)]  # (name, directed)

    weights = _weights(spec)
    cum = list(itertools.accumulate(weights)) if weights else None

    def pick(upto: int) -> int:
        if cum is None:
            return rng.randrange(upto)
        return bisect.bisect_right(cum, rng.random() * cum[upto - 1], 0, upto - 1)

    edges: dict[Edge, None] = {}

    def add(i: int, j: int) -> bool:
        label, directed = labels[rng.randrange(len(labels))]
        a, b = names[i], names[j]
        if directed and rng.random() < 0.5:
            a, b = b, a
        e = Edge.make(a, b, label, directed)
        if e in edges:
            return False
        edges[e] = None
        return True

    for i in range(1, spec.nodes):
        add(i, pick(i))
    target = max(spec.nodes - 1, round(spec.nodes * spec.avg_degree / 2))
    attempts = 0
    while len(edges) < target and attempts < 20 * target:
        attempts += 1
        i, j = pick(spec.nodes), pick(spec.nodes)
        if i != j:
            add(i, j)
    return KnowledgeBase(edges, names)
