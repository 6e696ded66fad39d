"""Enumerate and rank minimal explanations of how two entities in a
knowledge graph are related."""

from .enumeration import (
    STRATEGIES,
    EnumStats,
    UnionTrace,
    duplicated,
    general_enum,
    merge,
    naive_enum,
    path_union_basic,
    path_union_prune,
)
from .errors import (
    BudgetExceeded,
    ConfigurationError,
    KBParseError,
    PatternError,
    PatternSizeError,
    RelExplainError,
    ResourceLimitError,
    UnknownEntityError,
)
from .generate import GenSpec, generate
from .kb import (
    Edge,
    KnowledgeBase,
    classify_connectedness,
    connectedness,
    degree,
    dump_kb,
    format_kb,
    incident_edges,
    load_kb,
    parse_kb,
)
from .measures import (
    MEASURES,
    Distribution,
    InterestScore,
    MeasureContext,
    conductance,
    global_distribution,
    local_distribution,
    m_combined,
    m_count,
    m_monocount,
    m_position,
    m_random_walk,
    m_size,
    score,
)
from .pathenum import enumerate_paths, path_enum_basic, path_enum_naive, path_enum_prioritized
from .pattern import (
    END,
    START,
    Explanation,
    ExplanationPattern,
    PatternEdge,
    canonical_form,
    instances_to_pattern,
    is_decomposable,
    is_essential,
    is_minimal,
    match_instances,
)
from .rank import (
    RankConfig,
    RankedResult,
    dcg_score,
    rank,
    rank_general,
    rank_topk_antimonotone,
    rank_topk_position,
)

__version__ = "0.1.0"

__all__ = [
    "STRATEGIES",
    "EnumStats",
    "UnionTrace",
    "duplicated",
    "general_enum",
    "merge",
    "naive_enum",
    "path_union_basic",
    "path_union_prune",
    "BudgetExceeded",
    "ConfigurationError",
    "KBParseError",
    "PatternError",
    "PatternSizeError",
    "RelExplainError",
    "ResourceLimitError",
    "UnknownEntityError",
    "Edge",
    "KnowledgeBase",
    "classify_connectedness",
    "connectedness",
    "degree",
    "dump_kb",
    "format_kb",
    "incident_edges",
    "load_kb",
    "parse_kb",
    "MEASURES",
    "Distribution",
    "InterestScore",
    "MeasureContext",
    "conductance",
    "global_distribution",
    "local_distribution",
    "m_combined",
    "m_count",
    "m_monocount",
    "m_position",
    "m_random_walk",
    "m_size",
    "score",
    "END",
    "START",
    "Explanation",
    "ExplanationPattern",
    "PatternEdge",
    "canonical_form",
    "instances_to_pattern",
    "is_decomposable",
    "is_essential",
    "is_minimal",
    "match_instances",
    "RankConfig",
    "RankedResult",
    "dcg_score",
    "rank",
    "rank_general",
    "rank_topk_antimonotone",
    "rank_topk_position",
    "GenSpec",
    "generate",
    "enumerate_paths",
    "path_enum_basic",
    "path_enum_naive",
    "path_enum_prioritized",
]
