"""Ranking explanations, with top-k pruning where the measure allows it."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .enumeration import (
    NAIVE_ENUM,
    EnumStats,
    UnionTrace,
    general_enum,
    parse_strategy,
    path_union,
)
from .errors import ConfigurationError
from .kb import KnowledgeBase
from .measures import (
    ANTI_MONOTONE,
    DISTRIBUTIONAL,
    GLOBAL_DIST,
    SIZE_LOCAL_DIST,
    InterestScore,
    MeasureContext,
    aggregate,
    bounded_position,
    check_measure,
    sample_starts,
    score,
)
from .pathenum import enumerate_paths
from .pattern import Explanation, pattern_document


@dataclass
class RankConfig:
    n: int = 5
    k: int = 10
    measure: str = SIZE_LOCAL_DIST
    strategy: str = "prioritized+prune"
    prune: bool = False
    sample_size: int = 100
    seed: int = 0
    agg: str = "count"
    workers: int = 1

    def validate(self) -> None:
        if self.n < 2:
            raise ConfigurationError("n must be >= 2")
        if self.k < 1:
            raise ConfigurationError("k must be >= 1")
        check_measure(self.measure)
        parse_strategy(self.strategy)
        if self.prune and self.measure not in ANTI_MONOTONE | DISTRIBUTIONAL:
            raise ConfigurationError(
                f"pruning is not available for measure {self.measure!r}; "
                "it needs an anti-monotonic or distributional measure"
            )

    def context(self) -> MeasureContext:
        return MeasureContext(self.agg, self.sample_size, self.seed, self.workers)


@dataclass
class RankStats:
    enumerated: int = 0
    scored: int = 0
    pruned: int = 0
    expanded: int = 0
    rounds: list[tuple[int, int, int]] = field(default_factory=list)  # (batch, expanded, pruned)
    enum: EnumStats = field(default_factory=EnumStats)


@dataclass
class RankedResult:
    entries: list[tuple[Explanation, InterestScore]]
    stats: RankStats

    def __len__(self) -> int:
        return len(self.entries)

    def key(self) -> list[tuple[tuple, InterestScore]]:
        """Comparable form: explanation signatures with their scores, in order."""
        return [(re.signature, s) for re, s in self.entries]


def order_scored(items: Sequence[tuple[Explanation, InterestScore]], k: int) -> list:
    """Best first; ties broken by canonical form ascending."""
    ranked = sorted(items, key=lambda it: it[0].canonical)
    ranked.sort(key=lambda it: it[1], reverse=True)
    return ranked[:k]


def rank_general(kb: KnowledgeBase, start: str, end: str, cfg: RankConfig) -> RankedResult:
    """Enumerate everything, score everything, keep the best ``k``."""
    cfg.validate()
    stats = RankStats()
    expls = general_enum(kb, start, end, cfg.n, cfg.strategy, stats.enum)
    ctx = cfg.context()
    scored = [(re, score(cfg.measure, kb, re.pattern, start, end, re.instances, ctx)) for re in expls]
    stats.enumerated = stats.scored = len(scored)
    return RankedResult(order_scored(scored, cfg.k), stats)


def rank_topk_antimonotone(
    kb: KnowledgeBase, start: str, end: str, cfg: RankConfig, trace: Optional[UnionTrace] = None
) -> RankedResult:
    """Top-k ranking that stops expanding explanations below the k-th best.

    Valid because merging can only lower an anti-monotonic score. Only
    strictly worse explanations are cut, so ties resolve as in
    :func:`rank_general`.
    """
    cfg.validate()
    if cfg.measure not in ANTI_MONOTONE:
        raise ConfigurationError(f"measure {cfg.measure!r} is not anti-monotonic")
    path_kind, union_kind = parse_strategy(cfg.strategy)
    if path_kind == NAIVE_ENUM:
        raise ConfigurationError("top-k pruning needs a path-union strategy")
    kb.check(start, end)
    stats = RankStats()
    ctx = cfg.context()
    best: list[InterestScore] = []  # min-heap of the k best scores so far
    scored: list[tuple[Explanation, InterestScore]] = []

    def expand_filter(rnd: int, batch: list[Explanation]) -> list[int]:
        scores = []
        for re in batch:
            s = score(cfg.measure, kb, re.pattern, start, end, re.instances, ctx)
            scores.append(s)
            scored.append((re, s))
            if len(best) < cfg.k:
                heapq.heappush(best, s)
            elif s > best[0]:
                heapq.heapreplace(best, s)
        threshold = best[0] if len(best) == cfg.k else None
        keep = []
        for i, s in enumerate(scores):
            if threshold is None or s >= threshold:
                keep.append(i)
            elif trace is not None:
                trace.pruned.append((batch[i], threshold))
        stats.rounds.append((len(batch), len(keep), len(batch) - len(keep)))
        stats.expanded += len(keep)
        stats.pruned += len(batch) - len(keep)
        return keep

    paths = enumerate_paths(kb, start, end, cfg.n - 1, path_kind, stats.enum.paths)
    stats.enum.path_instances = stats.enum.paths.path_instances
    path_union(paths, cfg.n, union_kind == "prune", stats.enum, expand_filter=expand_filter, trace=trace)
    stats.enumerated = stats.scored = len(scored)
    return RankedResult(order_scored(scored, cfg.k), stats)


def rank_topk_position(kb: KnowledgeBase, start: str, end: str, cfg: RankConfig) -> RankedResult:
    """Top-k ranking by distributional position with early-exit counting.

    Candidates are visited smallest pattern first. Counting the pairs that
    beat a candidate stops as soon as it passes the current k-th best
    position. For ``size+local-dist`` the position is only computed for
    candidates whose size ties with the current k-th best.
    """
    cfg.validate()
    if cfg.measure not in DISTRIBUTIONAL:
        raise ConfigurationError(f"measure {cfg.measure!r} is not distributional")
    stats = RankStats()
    expls = general_enum(kb, start, end, cfg.n, cfg.strategy, stats.enum)
    stats.enumerated = len(expls)
    combined = cfg.measure == SIZE_LOCAL_DIST
    if cfg.measure == GLOBAL_DIST:
        starts = sample_starts(kb, cfg.sample_size, cfg.seed)
    else:
        starts = [start]
    top: list[tuple[Explanation, InterestScore]] = []
    for re in sorted(expls, key=lambda r: (r.pattern.size, r.canonical)):
        prefix = (-re.pattern.size,) if combined else ()
        limit: Optional[int] = None
        if len(top) == cfg.k:
            kth = top[-1][1].value
            if combined:
                if prefix[0] < kth[0]:
                    stats.pruned += 1
                    continue
                if prefix[0] == kth[0]:
                    limit = -kth[1]
            else:
                limit = -kth[0]
        a = aggregate(re.pattern, re.instances, cfg.agg)
        pos = bounded_position(kb, re.pattern, starts, a, cfg.agg, limit)
        stats.scored += 1
        if pos is None:
            stats.pruned += 1
            continue
        top.append((re, InterestScore(prefix + (-pos,))))
        top = order_scored(top, cfg.k)
    return RankedResult(top, stats)


def rank(kb: KnowledgeBase, start: str, end: str, cfg: RankConfig) -> RankedResult:
    cfg.validate()
    if not cfg.prune:
        return rank_general(kb, start, end, cfg)
    if cfg.measure in ANTI_MONOTONE:
        return rank_topk_antimonotone(kb, start, end, cfg)
    return rank_topk_position(kb, start, end, cfg)


def result_document(result: RankedResult, max_instances: int = 3) -> list[dict]:
    docs = []
    for rank_no, (re, s) in enumerate(result.entries, start=1):
        doc = pattern_document(re.pattern, re.instances, max_instances)
        docs.append(
            {
                "rank": rank_no,
                "score": [str(v) for v in s.value],
                "level": re.level,
                "count": len(re.instances),
                **doc,
            }
        )
    return docs


# --- evaluation --------------------------------------------------------------

DCG_DEPTH = 10


def dcg_weights(depth: int = DCG_DEPTH) -> list[float]:
    return [1.0 / math.log2(i + 1) for i in range(1, depth + 1)]


def dcg_score(labels: Sequence[int]) -> float:
    """Rank-discounted relevance of a top-10 list, scaled to [0, 100].

    Labels are 0, 1 or 2 per rank; all-2 scores exactly 100.
    """
    labels = list(labels)
    if len(labels) != DCG_DEPTH:
        raise ValueError(f"expected {DCG_DEPTH} labels, got {len(labels)}")
    for s in labels:
        if s not in (0, 1, 2) or isinstance(s, bool):
            raise ValueError(f"relevance label out of range: {s!r}")
    w = dcg_weights()
    return 100.0 * math.fsum(wi * si for wi, si in zip(w, labels)) / (2 * math.fsum(w))


def read_labels(path) -> list[int]:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    try:
        return [int(ln) for ln in lines]
    except ValueError as exc:
        raise ValueError(f"malformed relevance label: {exc}") from None
