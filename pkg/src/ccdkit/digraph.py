"""Immutable directed graphs with ancestral-relation queries.

Vertices are string labels and every iteration surface in the package
follows lexicographic label order, so downstream output is reproducible.
Graphs may contain directed cycles (2-cycles included) but never
self-loops. Ancestor and descendant sets are reflexive and computed by
breadth-first fixpoint over bitmasks, so deeply cyclic graphs cannot hit
recursion limits.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

FORMAT_HEADER = "# ccd-kit format v1"

__all__ = [
    "FORMAT_HEADER",
    "DirectedGraph",
    "GraphParseError",
    "UnknownVertexError",
    "parse_graph",
    "serialize_graph",
    "random_graph",
]


class UnknownVertexError(KeyError):
    """An operation named a vertex that is not in the graph."""


class GraphParseError(ValueError):
    """A graph file could not be parsed."""


def _check_label(label: object) -> str:
    if not isinstance(label, str) or not label or label.split() != [label]:
        raise ValueError(
            f"vertex labels must be non-empty strings without whitespace: {label!r}"
        )
    if label in ("->", "<-") or label.startswith("#") or "," in label:
        raise ValueError(f"vertex label {label!r} collides with file-format syntax")
    return label


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _closure(step: Sequence[int]) -> tuple[int, ...]:
    # reflexive-transitive closure of a one-step bitmask relation
    out = []
    for i in range(len(step)):
        seen = 1 << i
        frontier = [i]
        while frontier:
            grown = 0
            for j in frontier:
                grown |= step[j]
            grown &= ~seen
            seen |= grown
            frontier = list(_bits(grown))
        out.append(seen)
    return tuple(out)


@dataclass(frozen=True)
class DirectedGraph:
    """Labelled vertices plus directed edges between distinct vertices.

    Edge endpoints are absorbed into the vertex set, so only isolated
    vertices need an explicit mention. Instances are value objects: equal
    when vertex sets and edge sets are equal.
    """

    vertices: tuple[str, ...] = ()
    edges: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self) -> None:
        verts = {_check_label(v) for v in self.vertices}
        edges: set[tuple[str, str]] = set()
        for pair in self.edges:
            a, b = pair
            _check_label(a)
            _check_label(b)
            if a == b:
                raise ValueError(f"self-loop on {a!r} is not allowed")
            verts.add(a)
            verts.add(b)
            edges.add((a, b))
        object.__setattr__(self, "vertices", tuple(sorted(verts)))
        object.__setattr__(self, "edges", frozenset(edges))

    # -- indexing and bitmask caches -------------------------------------

    @cached_property
    def _index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def _parent_masks(self) -> tuple[int, ...]:
        masks = [0] * len(self.vertices)
        idx = self._index
        for a, b in self.edges:
            masks[idx[b]] |= 1 << idx[a]
        return tuple(masks)

    @cached_property
    def _child_masks(self) -> tuple[int, ...]:
        masks = [0] * len(self.vertices)
        idx = self._index
        for a, b in self.edges:
            masks[idx[a]] |= 1 << idx[b]
        return tuple(masks)

    @cached_property
    def _descendant_masks(self) -> tuple[int, ...]:
        return _closure(self._child_masks)

    @cached_property
    def _ancestor_masks(self) -> tuple[int, ...]:
        return _closure(self._parent_masks)

    @cached_property
    def _mask_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        # int64 copies for the compiled reachability kernel
        if len(self.vertices) > 63:
            raise ValueError("bitmask kernels support at most 63 vertices")
        return (
            np.asarray(self._parent_masks, dtype=np.int64),
            np.asarray(self._child_masks, dtype=np.int64),
            np.asarray(self._descendant_masks, dtype=np.int64),
        )

    def _require(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownVertexError(label) from None

    def _labels(self, mask: int) -> frozenset[str]:
        verts = self.vertices
        return frozenset(verts[i] for i in _bits(mask))

    def _mask_of(self, labels: Iterable[str]) -> int:
        mask = 0
        for v in labels:
            mask |= 1 << self._require(v)
        return mask

    # -- relations --------------------------------------------------------

    def parents(self, x: str) -> frozenset[str]:
        """Vertices with an edge into x."""
        return self._labels(self._parent_masks[self._require(x)])

    def children(self, x: str) -> frozenset[str]:
        """Vertices with an edge out of x."""
        return self._labels(self._child_masks[self._require(x)])

    def ancestors(self, sources: Iterable[str] | str) -> frozenset[str]:
        """All vertices with a directed path into some source; reflexive."""
        if isinstance(sources, str):
            sources = (sources,)
        mask = 0
        for v in sources:
            mask |= self._ancestor_masks[self._require(v)]
        return self._labels(mask)

    def descendants(self, sources: Iterable[str] | str) -> frozenset[str]:
        """All vertices some source has a directed path into; reflexive."""
        if isinstance(sources, str):
            sources = (sources,)
        mask = 0
        for v in sources:
            mask |= self._descendant_masks[self._require(v)]
        return self._labels(mask)

    def is_ancestor(self, x: str, y: str) -> bool:
        """True when a directed path runs from x to y; every vertex reaches itself."""
        return bool(self._ancestor_masks[self._require(y)] >> self._require(x) & 1)

    def adjacent_in_graph(self, x: str, y: str) -> bool:
        """Edge either way, or a common child that is an ancestor of x or y."""
        ix, iy = self._require(x), self._require(y)
        if ix == iy:
            raise ValueError("adjacency is defined for distinct vertices")
        if (x, y) in self.edges or (y, x) in self.edges:
            return True
        common = self._child_masks[ix] & self._child_masks[iy]
        return bool(common & (self._ancestor_masks[ix] | self._ancestor_masks[iy]))

    def has_directed_cycle(self) -> bool:
        for i, cmask in enumerate(self._child_masks):
            for j in _bits(cmask):
                if self._descendant_masks[j] >> i & 1:
                    return True
        return False


def parse_graph(text: str) -> DirectedGraph:
    """Parse the line-based graph format.

    Lines are either comments starting with '#', blank, ``vertex LABEL``
    declarations, or ``A -> B`` edges. Edge endpoints declare their labels
    implicitly; duplicate edges collapse to one.
    """
    vertices: set[str] = set()
    edges: set[tuple[str, str]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) == 2 and tokens[0] == "vertex":
            vertices.add(_parse_label(tokens[1], lineno))
        elif len(tokens) == 3 and tokens[1] == "->":
            a = _parse_label(tokens[0], lineno)
            b = _parse_label(tokens[2], lineno)
            if a == b:
                raise GraphParseError(f"line {lineno}: self-loop on {a!r}")
            edges.add((a, b))
        else:
            raise GraphParseError(f"line {lineno}: cannot parse {raw!r}")
    return DirectedGraph(tuple(vertices), frozenset(edges))


def _parse_label(token: str, lineno: int) -> str:
    try:
        return _check_label(token)
    except ValueError as exc:
        raise GraphParseError(f"line {lineno}: {exc}") from None


def serialize_graph(g: DirectedGraph) -> str:
    """Render a graph in the line-based format; inverse of parse_graph."""
    lines = [FORMAT_HEADER]
    lines.extend(f"vertex {v}" for v in g.vertices)
    lines.extend(f"{a} -> {b}" for a, b in sorted(g.edges))
    return "\n".join(lines) + "\n"


def random_graph(labels: Sequence[str], edge_prob: float, rng: random.Random) -> DirectedGraph:
    """Sample each ordered pair as an edge independently; cycles allowed.

    Draw order follows the given label order, so a seeded rng reproduces
    the same graph.
    """
    labels = tuple(labels)
    edges = {
        (a, b)
        for a in labels
        for b in labels
        if a != b and rng.random() < edge_prob
    }
    return DirectedGraph(labels, frozenset(edges))
