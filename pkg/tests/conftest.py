import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from relexplain.kb import Edge, KnowledgeBase, parse_kb  # noqa: E402
from relexplain.pattern import ExplanationPattern, PatternEdge  # noqa: E402

TG1_TEXT = (
    "A\tstarring\tM1\tD\n"
    "B\tstarring\tM1\tD\n"
    "A\tstarring\tM2\tD\n"
    "B\tstarring\tM2\tD\n"
    "A\tspouse\tB\tU\n"
    "C\tdirected\tM1\tD\n"
    "C\tdirected\tM3\tD\n"
    "B\tstarring\tM3\tD\n"
)


def pat(inner, *edges):
    """Pattern over start/end plus ``inner``; edges as (u, v, label[, directed])."""
    es = []
    for e in edges:
        u, v, label = e[:3]
        directed = e[3] if len(e) > 3 else True
        es.append(PatternEdge.make(u, v, label, directed))
    return ExplanationPattern(("start", "end", *inner), tuple(sorted(set(es))))


def spouse():
    return pat((), ("start", "end", "spouse", False))


def costar(label="starring"):
    return pat(("v0",), ("start", "v0", label), ("end", "v0", label))


def director_chain():
    # start -> v0 <- v1 -> v2 <- end
    return pat(
        ("v0", "v1", "v2"),
        ("start", "v0", "starring"),
        ("v1", "v0", "directed"),
        ("v1", "v2", "directed"),
        ("end", "v2", "starring"),
    )


@pytest.fixture
def tg1() -> KnowledgeBase:
    return parse_kb(TG1_TEXT.splitlines(keepends=True))


@pytest.fixture
def tg1_path(tmp_path) -> Path:
    p = tmp_path / "tg1.tsv"
    p.write_text(TG1_TEXT, encoding="utf-8")
    return p


def spouse_director_kb() -> KnowledgeBase:
    kate, leo, sam = "kate_winslet", "leonardo_dicaprio", "sam_mendes"
    rr, rr2 = "revolutionary_road", "revolutionary_road_ii"
    return KnowledgeBase.from_edges(
        [
            (kate, sam, "spouse", False),
            (sam, rr, "directed", True),
            (sam, rr2, "directed", True),
            (kate, rr, "starring", True),
            (leo, rr, "starring", True),
            (kate, rr2, "starring", True),
            (leo, rr2, "starring", True),
        ]
    )


def spouse_director_pattern() -> ExplanationPattern:
    # start -spouse- v1 -directed-> v2 <-starring- start, end -starring-> v2
    return pat(
        ("v1", "v2"),
        ("start", "v1", "spouse", False),
        ("v1", "v2", "directed"),
        ("start", "v2", "starring"),
        ("end", "v2", "starring"),
    )


COSTAR_BUCKETS = {1: 130, 2: 8, 3: 10, 4: 2}


def costar_buckets_kb() -> KnowledgeBase:
    """Co-star counts of ``brad_pitt`` realize the bucket table above.

    Every shared movie is dedicated to one co-star, and ``angelina_jolie``
    is one of the single-movie co-stars and also the spouse.
    """
    edges = []
    movie = 0
    costar_id = 0
    for shared, how_many in sorted(COSTAR_BUCKETS.items()):
        for _ in range(how_many):
            actor = "angelina_jolie" if costar_id == 0 else f"actor{costar_id:03d}"
            costar_id += 1
            for _ in range(shared):
                m = f"movie{movie:03d}"
                movie += 1
                edges.append(Edge.make("brad_pitt", m, "starring", True))
                edges.append(Edge.make(actor, m, "starring", True))
    edges.append(Edge.make("brad_pitt", "angelina_jolie", "spouse", False))
    return KnowledgeBase(edges)


def random_connected_pattern(rng):
    """Connected pattern over start, end and up to three interior variables."""
    n_inner = rng.randint(0, 3)
    names = ["start", "end"] + [f"v{i}" for i in range(n_inner)]
    order = names[:]
    rng.shuffle(order)
    edges = set()
    for i in range(1, len(order)):  # spanning tree first
        edges.add(PatternEdge.make(order[i], rng.choice(order[:i]), rng.choice("xy"), True))
    for _ in range(rng.randint(0, 4)):
        a, b = rng.sample(names, 2)
        edges.add(PatternEdge.make(a, b, rng.choice("xyz"), rng.random() < 0.5))
    return ExplanationPattern(tuple(names), tuple(sorted(edges)))


def with_extra_path(p, rng):
    """``p`` plus a fresh start-to-end path of length 1 to 3."""
    length = rng.randint(1, 3)
    fresh = [f"w{i}" for i in range(length - 1)]
    chain = ["start", *fresh, "end"]
    extra = {PatternEdge.make(a, b, "extra", True) for a, b in zip(chain, chain[1:])}
    return ExplanationPattern(p.variables + tuple(fresh), tuple(sorted(set(p.edges) | extra)))
