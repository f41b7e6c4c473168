"""Partial ancestral graphs: skeleton, endpoint marks, triple annotations.

Mark semantics on an edge between A and B: a tail at A claims A is an
ancestor of B in every graph compatible with the recorded independence
answers, an arrow at A claims it is not, and a circle claims nothing. An
underlined middle vertex claims it is an ancestor of at least one of its
flanking vertices; a dotted underline sits only on colliders and claims
the middle vertex is not a descendant of any common child of the flanking
pair. ``verify_pag_against_graph`` checks each of those claims against
one concrete graph.

Serialisation uses one line per edge, with endpoint glyphs ``o`` (circle),
``-`` (tail) and ``<``/``>`` (arrow), e.g. ``A o-> B`` or ``X --- Y``,
followed by ``underline:`` and ``dotted:`` triple lines.
"""
from __future__ import annotations

from enum import Enum
from itertools import chain, combinations
from typing import Iterable, Iterator

from .digraph import FORMAT_HEADER, DirectedGraph, UnknownVertexError, _check_label
from .dsep import d_connected

__all__ = [
    "Mark",
    "MarkConflict",
    "Pag",
    "PagParseError",
    "parse_pag",
    "serialize_pag",
    "to_dot",
    "verify_pag_against_graph",
]


class Mark(Enum):
    CIRCLE = "circle"
    TAIL = "tail"
    ARROW = "arrow"


class MarkConflict(ValueError):
    """A hardened endpoint mark was asked to change into a different one."""

    def __init__(self, at: str, other: str, existing: Mark, attempted: Mark):
        self.at = at
        self.other = other
        self.existing = existing
        self.attempted = attempted
        super().__init__(
            f"mark at {at} on edge {at}-{other} is already "
            f"{existing.value}, cannot set {attempted.value}"
        )


class PagParseError(ValueError):
    """A PAG file could not be parsed."""


class Pag:
    """Mutable PAG under exclusive ownership of one writer.

    Reads are safe to share once mutation stops; ``copy`` takes a
    snapshot. Equality is structural over vertices, edges with their
    marks, and both triple sets.
    """

    __slots__ = ("_vertices", "_edges", "_adjacent", "_underlines", "_dotted")

    def __init__(self, vertices: Iterable[str]):
        self._vertices = tuple(sorted({_check_label(v) for v in vertices}))
        self._edges: dict[tuple[str, str], list[Mark]] = {}
        self._adjacent: dict[str, set[str]] = {v: set() for v in self._vertices}
        self._underlines: set[tuple[str, str, str]] = set()
        self._dotted: set[tuple[str, str, str]] = set()

    @classmethod
    def complete(cls, vertices: Iterable[str]) -> "Pag":
        """The all-circles complete graph the search starts from."""
        pag = cls(vertices)
        for a, b in combinations(pag._vertices, 2):
            pag.add_edge(a, b)
        return pag

    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    @property
    def underlines(self) -> frozenset[tuple[str, str, str]]:
        return frozenset(self._underlines)

    @property
    def dotted_underlines(self) -> frozenset[tuple[str, str, str]]:
        return frozenset(self._dotted)

    @staticmethod
    def canonical_triple(a: str, b: str, c: str) -> tuple[str, str, str]:
        """Triples are unordered in their flanks: (a, b, c) == (c, b, a)."""
        if len({a, b, c}) != 3:
            raise ValueError("a triple needs three distinct vertices")
        return (a, b, c) if a < c else (c, b, a)

    def _key(self, x: str, y: str) -> tuple[str, str]:
        if x == y:
            raise ValueError("no edge joins a vertex to itself")
        for v in (x, y):
            if v not in self._adjacent:
                raise UnknownVertexError(v)
        return (x, y) if x < y else (y, x)

    def has_edge(self, x: str, y: str) -> bool:
        return self._key(x, y) in self._edges

    def add_edge(
        self, x: str, y: str, mark_x: Mark = Mark.CIRCLE, mark_y: Mark = Mark.CIRCLE
    ) -> None:
        key = self._key(x, y)
        if key in self._edges:
            raise ValueError(f"edge {x}-{y} is already present")
        self._edges[key] = [mark_x, mark_y] if key == (x, y) else [mark_y, mark_x]
        self._adjacent[x].add(y)
        self._adjacent[y].add(x)

    def remove_edge(self, x: str, y: str) -> None:
        key = self._key(x, y)
        if key not in self._edges:
            raise ValueError(f"edge {x}-{y} is not present")
        del self._edges[key]
        self._adjacent[x].discard(y)
        self._adjacent[y].discard(x)
        # triples are claims about their two edges; drop any that lost one
        gone = {x, y}
        for triples in (self._underlines, self._dotted):
            for t in [t for t in triples if gone <= {t[0], t[1]} or gone <= {t[1], t[2]}]:
                triples.discard(t)

    def mark_at(self, at: str, other: str) -> Mark:
        """The mark at the ``at`` end of the edge between at and other."""
        key = self._key(at, other)
        marks = self._edges.get(key)
        if marks is None:
            raise ValueError(f"edge {at}-{other} is not present")
        return marks[0] if key[0] == at else marks[1]

    def set_mark(self, at: str, other: str, mark: Mark) -> "Pag":
        """Write an endpoint mark.

        A circle may harden into a tail or an arrow; re-setting the
        current mark is a no-op; any other change raises MarkConflict.
        """
        key = self._key(at, other)
        marks = self._edges.get(key)
        if marks is None:
            raise ValueError(f"edge {at}-{other} is not present")
        slot = 0 if key[0] == at else 1
        current = marks[slot]
        if current is mark:
            return self
        if current is not Mark.CIRCLE:
            raise MarkConflict(at, other, current, mark)
        marks[slot] = mark
        return self

    def adjacent(self, x: str) -> tuple[str, ...]:
        if x not in self._adjacent:
            raise UnknownVertexError(x)
        return tuple(sorted(self._adjacent[x]))

    def edge_records(self) -> list[tuple[str, str, Mark, Mark]]:
        """Sorted (a, b, mark_at_a, mark_at_b) rows with a < b."""
        return [
            (a, b, marks[0], marks[1])
            for (a, b), marks in sorted(self._edges.items())
        ]

    def is_arrow_collider(self, a: str, b: str, c: str) -> bool:
        """Arrows at b on both the a-b and c-b edges."""
        return (
            self.has_edge(a, b)
            and self.has_edge(c, b)
            and self.mark_at(b, a) is Mark.ARROW
            and self.mark_at(b, c) is Mark.ARROW
        )

    def add_underline(self, a: str, b: str, c: str) -> None:
        triple = self.canonical_triple(a, b, c)
        if not (self.has_edge(a, b) and self.has_edge(b, c)):
            raise ValueError(f"underline {a} {b} {c} needs both edges present")
        if triple in self._dotted:
            raise ValueError(f"triple {a} {b} {c} is already dotted-underlined")
        self._underlines.add(triple)

    def add_dotted_underline(self, a: str, b: str, c: str) -> None:
        triple = self.canonical_triple(a, b, c)
        if not self.is_arrow_collider(a, b, c):
            raise ValueError(f"dotted underline {a} {b} {c} needs a collider at {b}")
        if triple in self._underlines:
            raise ValueError(f"triple {a} {b} {c} is already underlined")
        self._dotted.add(triple)

    def copy(self) -> "Pag":
        dup = Pag(self._vertices)
        dup._edges = {key: list(marks) for key, marks in self._edges.items()}
        dup._adjacent = {v: set(nb) for v, nb in self._adjacent.items()}
        dup._underlines = set(self._underlines)
        dup._dotted = set(self._dotted)
        return dup

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pag):
            return NotImplemented
        return (
            self._vertices == other._vertices
            and self._edges == other._edges
            and self._underlines == other._underlines
            and self._dotted == other._dotted
        )

    __hash__ = None  # mutable

    def __repr__(self) -> str:
        return (
            f"Pag(vertices={len(self._vertices)}, edges={len(self._edges)}, "
            f"underlines={len(self._underlines)}, dotted={len(self._dotted)})"
        )


_LEFT_GLYPH = {Mark.CIRCLE: "o", Mark.TAIL: "-", Mark.ARROW: "<"}
_RIGHT_GLYPH = {Mark.CIRCLE: "o", Mark.TAIL: "-", Mark.ARROW: ">"}
_LEFT_MARK = {v: k for k, v in _LEFT_GLYPH.items()}
_RIGHT_MARK = {v: k for k, v in _RIGHT_GLYPH.items()}


def serialize_pag(pag: Pag) -> str:
    """Render a PAG in the line-based format; inverse of parse_pag."""
    lines = [FORMAT_HEADER]
    lines.extend(f"vertex {v}" for v in pag.vertices)
    for a, b, ma, mb in pag.edge_records():
        lines.append(f"{a} {_LEFT_GLYPH[ma]}-{_RIGHT_GLYPH[mb]} {b}")
    lines.extend(f"underline: {a} {b} {c}" for a, b, c in sorted(pag.underlines))
    lines.extend(f"dotted: {a} {b} {c}" for a, b, c in sorted(pag.dotted_underlines))
    return "\n".join(lines) + "\n"


def parse_pag(text: str) -> Pag:
    vertices: set[str] = set()
    edge_rows: list[tuple[int, str, str, Mark, Mark]] = []
    triple_rows: list[tuple[int, str, str, str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) == 2 and tokens[0] == "vertex":
            vertices.add(_pag_label(tokens[1], lineno))
        elif len(tokens) == 4 and tokens[0] in ("underline:", "dotted:"):
            kind = tokens[0][:-1]
            a, b, c = (_pag_label(t, lineno) for t in tokens[1:])
            triple_rows.append((lineno, kind, a, b, c))
        elif len(tokens) == 3 and _is_glyph_pair(tokens[1]):
            a = _pag_label(tokens[0], lineno)
            b = _pag_label(tokens[2], lineno)
            if a == b:
                raise PagParseError(f"line {lineno}: self-loop on {a!r}")
            edge_rows.append(
                (lineno, a, b, _LEFT_MARK[tokens[1][0]], _RIGHT_MARK[tokens[1][2]])
            )
        else:
            raise PagParseError(f"line {lineno}: cannot parse {raw!r}")
    for _, a, b, *_ in edge_rows:
        vertices.update((a, b))
    for _, _, a, b, c in triple_rows:
        vertices.update((a, b, c))
    pag = Pag(vertices)
    for lineno, a, b, ma, mb in edge_rows:
        try:
            pag.add_edge(a, b, ma, mb)
        except ValueError as exc:
            raise PagParseError(f"line {lineno}: {exc}") from None
    for lineno, kind, a, b, c in triple_rows:
        try:
            if kind == "underline":
                pag.add_underline(a, b, c)
            else:
                pag.add_dotted_underline(a, b, c)
        except ValueError as exc:
            raise PagParseError(f"line {lineno}: {exc}") from None
    return pag


def _is_glyph_pair(token: str) -> bool:
    return (
        len(token) == 3
        and token[1] == "-"
        and token[0] in _LEFT_MARK
        and token[2] in _RIGHT_MARK
    )


def _pag_label(token: str, lineno: int) -> str:
    try:
        return _check_label(token)
    except ValueError as exc:
        raise PagParseError(f"line {lineno}: {exc}") from None


_DOT_ARROW = {Mark.TAIL: "none", Mark.ARROW: "normal", Mark.CIRCLE: "odot"}


def to_dot(pag: Pag) -> str:
    """Graphviz rendering; triple annotations travel as comments."""
    lines = ["digraph pag {", "  edge [dir=both];"]
    lines.extend(f'  "{v}";' for v in pag.vertices)
    for a, b, ma, mb in pag.edge_records():
        lines.append(
            f'  "{a}" -> "{b}" '
            f"[arrowtail={_DOT_ARROW[ma]}, arrowhead={_DOT_ARROW[mb]}];"
        )
    lines.extend(f"  // underline: {a} {b} {c}" for a, b, c in sorted(pag.underlines))
    lines.extend(
        f"  // dotted: {a} {b} {c}" for a, b, c in sorted(pag.dotted_underlines)
    )
    lines.append("}")
    return "\n".join(lines) + "\n"


def _all_subsets(items: list[str]) -> Iterator[tuple[str, ...]]:
    return chain.from_iterable(
        combinations(items, size) for size in range(len(items) + 1)
    )


def verify_pag_against_graph(
    pag: Pag, graph: DirectedGraph, check_edges: bool = True
) -> list[str]:
    """Check every claim the PAG makes against one concrete graph.

    Returns human-readable violation strings; an empty list means sound.
    Edges are claims of inseparability, so the edge check sweeps every
    conditioning subset per pair and is exponential in the vertex count;
    pass check_edges=False to skip it. Circle marks claim nothing and are
    never checked.
    """
    if tuple(pag.vertices) != tuple(graph.vertices):
        raise ValueError("the PAG and the graph must share one vertex set")
    violations: list[str] = []
    verts = graph.vertices
    if check_edges:
        for a, b in combinations(verts, 2):
            rest = [v for v in verts if v not in (a, b)]
            separable = any(
                not d_connected(graph, a, b, subset) for subset in _all_subsets(rest)
            )
            if pag.has_edge(a, b) and separable:
                violations.append(f"(i) edge {a}-{b}, but some subset separates them")
            if not pag.has_edge(a, b) and not separable:
                violations.append(f"(i) no edge {a}-{b}, but no subset separates them")
    for a, b, ma, mb in pag.edge_records():
        if ma is Mark.TAIL and not graph.is_ancestor(a, b):
            violations.append(f"(ii) tail at {a} on {a}-{b}, but {a} is not an ancestor of {b}")
        if mb is Mark.TAIL and not graph.is_ancestor(b, a):
            violations.append(f"(ii) tail at {b} on {a}-{b}, but {b} is not an ancestor of {a}")
        if ma is Mark.ARROW and graph.is_ancestor(a, b):
            violations.append(f"(iii) arrow at {a} on {a}-{b}, but {a} is an ancestor of {b}")
        if mb is Mark.ARROW and graph.is_ancestor(b, a):
            violations.append(f"(iii) arrow at {b} on {a}-{b}, but {b} is an ancestor of {a}")
    for a, b, c in sorted(pag.underlines):
        if not (graph.is_ancestor(b, a) or graph.is_ancestor(b, c)):
            violations.append(
                f"(iv) underline {a} {b} {c}, but {b} is an ancestor of neither flank"
            )
    for a, b, c in sorted(pag.dotted_underlines):
        common = graph.children(a) & graph.children(c)
        if b in graph.descendants(common):
            violations.append(
                f"(v) dotted underline {a} {b} {c}, but {b} descends from a "
                f"common child of {a} and {c}"
            )
    return violations
