"""Deciders for d-connection and d-separation in directed graphs.

An undirected path is active given a conditioning set z when every
conditioned vertex on it is a collider and every collider on it has a
descendant (itself included) in z; endpoints carry no condition. Two
vertex sets are d-connected given z when some active vertex-simple path
joins a member of one to a member of the other. Paths here are walks
without repeated vertices, and a 2-cycle contributes two distinct single
steps between its endpoints.

``d_connected`` is the fast engine, a reachability computation over
(vertex, arrival-direction) states. ``brute_force_d_connected`` is the
testing oracle of record: it enumerates every vertex-simple path and
applies the two activity clauses directly. The suite holds the two
implementations equal on every query it generates; neither is ever
collapsed into the other.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from . import _reach
from .digraph import DirectedGraph

__all__ = [
    "SeparationQuery",
    "d_connected",
    "d_separated",
    "brute_force_d_connected",
    "witness_separator",
    "active_backend",
]


def _as_vertex_set(value: Iterable[str] | str) -> frozenset[str]:
    if isinstance(value, str):
        return frozenset((value,))
    return frozenset(value)


@dataclass(frozen=True)
class SeparationQuery:
    """Disjoint endpoint sets x and y plus a conditioning set z."""

    x: frozenset[str]
    y: frozenset[str]
    z: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not self.x or not self.y:
            raise ValueError("both endpoint sets must be non-empty")
        if self.x & self.y or self.x & self.z or self.y & self.z:
            raise ValueError("x, y and z must be pairwise disjoint")

    @classmethod
    def of(
        cls,
        x: Iterable[str] | str,
        y: Iterable[str] | str,
        given: Iterable[str] | str = (),
    ) -> "SeparationQuery":
        return cls(_as_vertex_set(x), _as_vertex_set(y), _as_vertex_set(given))


def _masks(g: DirectedGraph, q: SeparationQuery) -> tuple[int, int, int]:
    return g._mask_of(q.x), g._mask_of(q.y), g._mask_of(q.z)


def active_backend(g: DirectedGraph) -> str:
    """Name of the reachability kernel d_connected would use for this graph."""
    return _reach.selected_backend(len(g.vertices))


def d_connected(
    g: DirectedGraph,
    x: Iterable[str] | str,
    y: Iterable[str] | str,
    given: Iterable[str] | str = (),
) -> bool:
    """True iff some x-member is d-connected to some y-member given ``given``."""
    q = SeparationQuery.of(x, y, given)
    xm, ym, zm = _masks(g, q)
    n = len(g.vertices)
    if _reach.selected_backend(n) == "numba":
        pm, cm, dm = g._mask_arrays
        kernel = _reach.numba_kernel()
        return bool(kernel(pm, cm, dm, np.int64(xm), np.int64(ym), np.int64(zm)))
    return _reach.python_reach(
        n, g._parent_masks, g._child_masks, g._descendant_masks, xm, ym, zm
    )


def d_separated(
    g: DirectedGraph,
    x: Iterable[str] | str,
    y: Iterable[str] | str,
    given: Iterable[str] | str = (),
) -> bool:
    return not d_connected(g, x, y, given)


def brute_force_d_connected(
    g: DirectedGraph,
    x: Iterable[str] | str,
    y: Iterable[str] | str,
    given: Iterable[str] | str = (),
    literal_clause_ii: bool = False,
) -> bool:
    """Literal path-enumeration decision; exponential, for small graphs only.

    ``literal_clause_ii`` switches the collider clause to demand a
    conditioned descendant of the vertex that follows the collider on the
    path, which is what a word-by-word reading of the activity clauses
    says, instead of a descendant of the collider itself. The readings
    disagree (the literal one is not even symmetric in x and y), and the
    flag exists so the disagreement stays visible; the default matches
    ``d_connected``.
    """
    q = SeparationQuery.of(x, y, given)
    _masks(g, q)  # label validation
    for start in sorted(q.x):
        for goal in sorted(q.y):
            for verts, forwards in _simple_paths(g, start, goal):
                if _path_active(g, verts, forwards, q.z, literal_clause_ii):
                    return True
    return False


def _simple_paths(
    g: DirectedGraph, start: str, goal: str
) -> Iterator[tuple[list[str], list[bool]]]:
    """Yield (vertices, forwards) for every vertex-simple undirected path.

    forwards[i] is True when step i traverses the edge vertices[i] ->
    vertices[i+1] tip-forward; both orientations are separate steps when a
    2-cycle provides both edges.
    """
    edges = g.edges
    all_verts = g.vertices
    path = [start]
    used = {start}
    forwards: list[bool] = []

    def walk(current: str) -> Iterator[tuple[list[str], list[bool]]]:
        if current == goal:
            yield list(path), list(forwards)
            return
        for nxt in all_verts:
            if nxt in used:
                continue
            for fwd in (True, False):
                edge = (current, nxt) if fwd else (nxt, current)
                if edge not in edges:
                    continue
                path.append(nxt)
                used.add(nxt)
                forwards.append(fwd)
                yield from walk(nxt)
                path.pop()
                used.remove(nxt)
                forwards.pop()

    if start != goal:
        yield from walk(start)


def _path_active(
    g: DirectedGraph,
    verts: list[str],
    forwards: list[bool],
    z: frozenset[str],
    literal_clause_ii: bool,
) -> bool:
    for k in range(1, len(verts) - 1):
        into_left = forwards[k - 1]
        into_right = not forwards[k]
        collider = into_left and into_right
        v = verts[k]
        if v in z and not collider:
            return False
        if collider:
            probe = verts[k + 1] if literal_clause_ii else v
            if not g.descendants((probe,)) & z:
                return False
    return True


def witness_separator(
    g: DirectedGraph,
    x: str,
    y: str,
    q: Iterable[str] | str = (),
) -> frozenset[str]:
    """Candidate separating set built from local structure around x.

    Take s = children(x) restricted to ancestors of {x, y} union q; the
    result is parents(s + {x}) together with s, minus descendants of
    common children of x and y, minus the endpoints. Whenever neither
    endpoint is a parent of the other and no common child is an ancestor
    of either, the result d-separates x from y; callers can check that
    antecedent with ``adjacent_in_graph``. The set is returned either way.
    """
    extra = _as_vertex_set(q)
    if x == y:
        raise ValueError("endpoints must differ")
    if x in extra or y in extra:
        raise ValueError("q must not contain an endpoint")
    s = g.children(x) & g.ancestors(frozenset((x, y)) | extra)
    pool = s | frozenset().union(*(g.parents(v) for v in s | {x}))
    banned = g.descendants(g.children(x) & g.children(y)) | {x, y}
    return pool - banned
