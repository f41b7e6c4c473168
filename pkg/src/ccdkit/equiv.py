"""Brute-force Markov-equivalence tooling over small vertex sets.

The separation fingerprint of a graph is the complete table of separated
(pair, conditioning set) combinations over singleton endpoints. Two
graphs on one vertex set are Markov equivalent exactly when their
fingerprints coincide, and an equivalence class is enumerated by sweeping
every directed graph on the vertex set. Everything here is exponential by
design and guarded accordingly.
"""
from __future__ import annotations

from itertools import combinations
from typing import Iterator, Sequence

from .digraph import DirectedGraph
from .dsep import d_connected

__all__ = [
    "fingerprint",
    "markov_equivalent",
    "all_graphs",
    "enumerate_equiv_class",
]

_FINGERPRINT_LIMIT = 12


def fingerprint(g: DirectedGraph) -> frozenset[tuple[str, str, frozenset[str]]]:
    """All separated (x, y, conditioning set) triples with x < y."""
    verts = g.vertices
    if len(verts) > _FINGERPRINT_LIMIT:
        raise ValueError(f"fingerprints are limited to {_FINGERPRINT_LIMIT} vertices")
    separated = set()
    for x, y in combinations(verts, 2):
        rest = [v for v in verts if v != x and v != y]
        for size in range(len(rest) + 1):
            for subset in combinations(rest, size):
                if not d_connected(g, x, y, subset):
                    separated.add((x, y, frozenset(subset)))
    return frozenset(separated)


def markov_equivalent(g1: DirectedGraph, g2: DirectedGraph) -> bool:
    """Same vertex set and identical separation fingerprints."""
    if g1.vertices != g2.vertices:
        return False
    return fingerprint(g1) == fingerprint(g2)


def all_graphs(labels: Sequence[str]) -> Iterator[DirectedGraph]:
    """Every directed graph on the given labels, in a fixed order."""
    labels = tuple(sorted(set(labels)))
    pairs = [(a, b) for a in labels for b in labels if a != b]
    for mask in range(2 ** len(pairs)):
        edges = frozenset(pairs[i] for i in range(len(pairs)) if mask >> i & 1)
        yield DirectedGraph(labels, edges)


def enumerate_equiv_class(g: DirectedGraph, max_vertices: int = 4) -> list[DirectedGraph]:
    """All graphs Markov equivalent to g, sorted by their edge lists.

    The sweep visits 2^(n(n-1)) candidates; raise ``max_vertices``
    explicitly to go past four vertices.
    """
    if len(g.vertices) > max_vertices:
        raise ValueError(
            f"class enumeration over {len(g.vertices)} vertices exceeds the "
            f"guard of {max_vertices}; raise max_vertices to force it"
        )
    target = fingerprint(g)
    members = [h for h in all_graphs(g.vertices) if fingerprint(h) == target]
    members.sort(key=lambda h: tuple(sorted(h.edges)))
    return members
