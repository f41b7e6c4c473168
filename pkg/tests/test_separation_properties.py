"""Structural properties of d-separation that the discovery phases rely on.

Each check function in helpers returns counterexample descriptions; an empty
list means the property held everywhere on that graph. The heavy exhaustive
sweep lives in the acceptance suite, this module keeps the properties named
and debuggable on small graphs.
"""
import random

import pytest
from hypothesis import given, settings

from ccdkit import DirectedGraph, brute_force_d_connected, witness_separator

from helpers import (
    LETTERS,
    SEPARATION_CHECKS,
    check_inseparable_pairs,
    check_local_separators,
    check_minimal_separator_ancestry,
    check_separator_monotonicity,
    check_witness_probe_retention,
    check_witness_separator,
    exhaustive_graphs,
    two_cycle_graph,
    graphs,
    subsets,
)


def all_three_vertex_graphs():
    return list(exhaustive_graphs(tuple(LETTERS[:3])))


@pytest.mark.parametrize(
    "check",
    SEPARATION_CHECKS,
    ids=lambda c: c.__name__,
)
def test_property_holds_on_all_three_vertex_graphs(check):
    for g in all_three_vertex_graphs():
        assert check(g) == []


def test_adjacent_pairs_cannot_be_separated_includes_cycle_mediated_adjacency():
    # B,X share child Y which is an ancestor of X through the cycle, so the
    # pair is inseparable even though no edge joins them.
    g = two_cycle_graph()
    assert g.adjacent_in_graph("B", "X")
    assert check_inseparable_pairs(g) == []


def test_witness_separator_two_cycle_pair():
    g = two_cycle_graph()
    assert check_witness_separator(g) == []
    assert witness_separator(g, "A", "B") == frozenset()


def test_witness_retains_probe_on_two_cycle():
    g = two_cycle_graph()
    assert check_witness_probe_retention(g) == []
    assert "X" in witness_separator(g, "A", "B", {"X"})
    assert "Y" in witness_separator(g, "A", "B", {"Y"})


def test_local_separator_exists_for_chain_endpoints():
    g = DirectedGraph(("A", "B", "C"), {("A", "B"), ("B", "C")})
    assert check_local_separators(g) == []
    assert check_minimal_separator_ancestry(g) == []


def test_separator_monotonicity_against_brute_force():
    rng = random.Random(20240817)
    for _ in range(60):
        n = rng.choice((4, 5))
        labels = tuple(LETTERS[:n])
        edges = {
            (a, b)
            for a in labels
            for b in labels
            if a != b and rng.random() < 0.35
        }
        g = DirectedGraph(labels, edges)
        assert check_separator_monotonicity(g, connected=brute_force_d_connected) == []


@settings(max_examples=40, deadline=None)
@given(graphs(min_vertices=2, max_vertices=5))
def test_all_properties_hold_on_random_graphs(g):
    for check in SEPARATION_CHECKS:
        assert check(g) == []


def test_subsets_enumerates_size_then_lexicographic():
    assert list(subsets(("B", "A"))) == [(), ("A",), ("B",), ("A", "B")]
