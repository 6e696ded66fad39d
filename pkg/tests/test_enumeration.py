import random
import time

import pytest
from conftest import costar, director_chain, spouse_director_kb, spouse_director_pattern, pat, spouse
from hypothesis import given, settings
from hypothesis import strategies as st

import relexplain.enumeration as enumeration
from oracles import brute_covering_number, brute_explanations, connected_pair, image_key, random_kb
from relexplain.enumeration import (
    STRATEGIES,
    EnumStats,
    UnionTrace,
    duplicated,
    general_enum,
    merge,
    naive_enum,
    path_union,
    path_union_basic,
    path_union_prune,
)
from relexplain.errors import BudgetExceeded, ConfigurationError, ResourceLimitError
from relexplain.kb import KnowledgeBase
from relexplain.pathenum import path_enum_naive
from relexplain.pattern import Explanation, canonical_form, is_minimal, match_instances


def expl(kb, p, start, end, level=1):
    return Explanation(p, tuple(match_instances(kb, p, start, end)), level)


def sigs(expls):
    return {re.signature for re in expls}


def by_canonical(expls):
    return {re.canonical: re for re in expls}


class TestNaiveEnum:
    def test_tg1_contents(self, tg1):
        out = by_canonical(naive_enum(tg1, "A", "B", 5))
        assert len(out[canonical_form(spouse())].instances) == 1
        assert len(out[canonical_form(costar())].instances) == 2
        assert out[canonical_form(director_chain())].instances == (("A", "B", "M1", "C", "M3"),)

    def test_double_wedge_excluded(self, tg1):
        two = pat(
            ("v0", "v1"),
            ("start", "v0", "starring"), ("end", "v0", "starring"),
            ("start", "v1", "starring"), ("end", "v1", "starring"),
        )
        assert match_instances(tg1, two, "A", "B")  # it has instances
        assert canonical_form(two) not in by_canonical(naive_enum(tg1, "A", "B", 5))

    def test_size_two(self, tg1):
        out = naive_enum(tg1, "A", "B", 2)
        assert [re.canonical for re in out] == [canonical_form(spouse())]

    def test_deadline(self, tg1):
        with pytest.raises(BudgetExceeded):
            naive_enum(tg1, "A", "B", 5, deadline=time.monotonic() - 1)

    def test_bad_arguments(self, tg1):
        with pytest.raises(KeyError):
            naive_enum(tg1, "A", "nobody", 5)
        with pytest.raises(ValueError):
            naive_enum(tg1, "A", "A", 5)
        with pytest.raises(ValueError):
            naive_enum(tg1, "A", "B", 1)


class TestMerge:
    def test_spouse_director_merge(self):
        kb = spouse_director_kb()
        s, e = "kate_winslet", "leonardo_dicaprio"
        # co-star path and the spouse/director path share the movie variable
        p1 = pat(("v2",), ("start", "v2", "starring"), ("end", "v2", "starring"))
        p2 = pat(("v1", "v2"), ("start", "v1", "spouse", False), ("v1", "v2", "directed"), ("end", "v2", "starring"))
        out = merge(expl(kb, p1, s, e), expl(kb, p2, s, e), 5)
        merged = [re for re in out if re.canonical == canonical_form(spouse_director_pattern())]
        assert len(merged) == 1
        assert set(merged[0].instances) == set(match_instances(kb, merged[0].pattern, s, e))
        assert merged[0].level == 2

    def test_identity_merge_is_idempotent(self, tg1):
        re = expl(tg1, director_chain(), "A", "B")
        out = merge(re, re, 5)
        same = [x for x in out if x.pattern.size == 5 and x.canonical == re.canonical]
        assert same and set(same[0].instances) == set(re.instances)
        assert len(same[0].pattern.edges) == len(re.pattern.edges)

    def test_costar_with_itself(self, tg1):
        re = expl(tg1, costar(), "A", "B")
        out = merge(re, re, 5)
        wedge = [x for x in out if x.canonical == re.canonical]
        assert len(wedge) == 1 and len(wedge[0].instances) == 2

    def test_no_interior_no_mapping(self, tg1):
        assert merge(expl(tg1, spouse(), "A", "B"), expl(tg1, costar(), "A", "B"), 5) == []

    def test_size_limit(self, tg1):
        re = expl(tg1, director_chain(), "A", "B")
        assert all(x.pattern.size <= 4 for x in merge(re, re, 4))

    def test_outputs_minimal_in_assert_mode(self, tg1, monkeypatch):
        monkeypatch.setattr(enumeration, "ASSERT_MINIMAL", True)
        paths = path_enum_naive(tg1, "A", "B", 4)
        for a in paths:
            for b in paths:
                for x in merge(a, b, 5):
                    assert is_minimal(x.pattern)


class TestDuplicated:
    def test_empty_pool(self, tg1):
        assert not duplicated(expl(tg1, costar(), "A", "B"), [])

    def test_renamed_copy(self, tg1):
        q = pat(("movie",), ("start", "movie", "starring"), ("end", "movie", "starring"))
        assert duplicated(expl(tg1, costar(), "A", "B"), [expl(tg1, q, "A", "B")])

    def test_different_label(self, tg1):
        assert not duplicated(expl(tg1, costar(), "A", "B"), [expl(tg1, costar("directed"), "A", "B")])


class TestUnion:
    def test_tg1_matches_naive(self, tg1):
        paths = path_enum_naive(tg1, "A", "B", 4)
        want = sigs(naive_enum(tg1, "A", "B", 5))
        assert sigs(path_union_basic(paths, 5)) == want
        assert sigs(path_union_prune(paths, 5)) == want

    def test_empty(self):
        assert path_union_basic([], 5) == [] and path_union_prune([], 5) == []

    def test_single_direct_edge(self, tg1):
        re = expl(tg1, spouse(), "A", "B")
        assert path_union_basic([re], 5) == [re]

    def test_single_path_prune(self, tg1):
        re = expl(tg1, director_chain(), "A", "B")
        trace = UnionTrace()
        out = path_union([re], 5, True, trace=trace)
        assert sigs(out) == {re.signature}
        assert all(child.canonical == re.canonical for _, _, child in trace.derivations)

    def test_cap(self, tg1):
        with pytest.raises(ResourceLimitError):
            general_enum(tg1, "A", "B", 5, cap=2)

    def test_cap_env(self, tg1, monkeypatch):
        monkeypatch.setenv("REX_MAX_EXPLANATIONS", "2")
        with pytest.raises(ResourceLimitError):
            general_enum(tg1, "A", "B", 5)


class TestGeneralEnum:
    @pytest.mark.parametrize("strategy", STRATEGIES)
    def test_tg1_all_strategies(self, tg1, strategy):
        assert sigs(general_enum(tg1, "A", "B", 5, strategy)) == sigs(naive_enum(tg1, "A", "B", 5))

    def test_size_two(self, tg1):
        assert [re.canonical for re in general_enum(tg1, "A", "B", 2)] == [canonical_form(spouse())]

    def test_disconnected(self):
        kb = KnowledgeBase.from_edges([("a", "x", "r", True), ("b", "y", "r", True)])
        assert general_enum(kb, "a", "b", 5) == []

    def test_unknown_strategy(self, tg1):
        with pytest.raises(ConfigurationError):
            general_enum(tg1, "A", "B", 5, "fast+loose")

    def test_counters(self, tg1):
        stats = EnumStats()
        out = general_enum(tg1, "A", "B", 5, "prioritized+prune", stats)
        assert stats.path_instances == 4
        assert stats.explanations == len(out)
        assert stats.rounds >= 1 and stats.merge_calls > 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_against_brute_force_oracle(seed):
    rng = random.Random(seed)
    kb = random_kb(rng, max_nodes=7, max_edges=9, max_labels=3)
    pair = connected_pair(kb, rng)
    if pair is None:
        return
    want = brute_explanations(kb, *pair, 5)
    for strategy in ("naive-enum", "prioritized+prune", "basic+basic"):
        assert {image_key(re) for re in general_enum(kb, *pair, 5, strategy)} == want, strategy


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 100_000))
def test_soundness_levels_and_prune_counts(seed):
    rng = random.Random(seed)
    kb = random_kb(rng, max_nodes=9, max_edges=13, max_labels=3)
    pair = connected_pair(kb, rng)
    if pair is None:
        return
    basic, prune = EnumStats(), EnumStats()
    out = general_enum(kb, *pair, 5, "basic+basic", basic)
    out_p = general_enum(kb, *pair, 5, "basic+prune", prune)
    assert sigs(out) == sigs(out_p)
    assert prune.merge_calls <= basic.merge_calls
    for re in out:
        p = re.pattern
        assert is_minimal(p) and p.size <= 5 and re.instances
        assert list(re.instances) == match_instances(kb, p, *pair)
        assert re.level == brute_covering_number(p.variables, [tuple(e) for e in p.edges])
        assert (re.level == 1) == p.is_path()
