"""Annular link diagrams in planar-diagram (PD) form and their resolutions.

A crossing is a quadruple (a, b, c, d) of edge ids listed counterclockwise
starting from the incoming under-strand: the under-strand runs a -> c and
the over-strand joins b and d.  The crossing is positive when the
over-strand runs d -> b and negative when it runs b -> d.

The 0-smoothing joins (a, b) and (c, d); the 1-smoothing joins (a, d) and
(b, c).  With this choice the all-zero resolution is the Kauffman A-state
and the homological grading counts 1-smoothings.

Axis data lists, for each crossing of the reference arc from the axis
basepoint with an edge, that edge and the sign of the intersection taken
with respect to the edge's orientation.  The winding number of a circle is
the signed count of those intersections along the circle, read in the
direction the circle is traversed.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import AxisThroughCrossing, InvalidDiagram, MalformedInput

#: slot pairs joined by each smoothing
SMOOTHING_PAIRS = {0: ((0, 1), (2, 3)), 1: ((0, 3), (1, 2))}

_KEYS = {"crossings", "n_edges", "axis", "free_loops", "signs", "comment"}


class UnionFind:
    def __init__(self, items: Iterable[int]):
        self.parent = {x: x for x in items}

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                ra, rb = rb, ra
            self.parent[ra] = rb


@dataclass(frozen=True)
class Circle:
    edges: Tuple[int, ...]
    winding: int
    free: bool = False

    @property
    def trivial(self) -> bool:
        return self.winding == 0


@dataclass(frozen=True)
class Resolution:
    vertex: str
    circles: Tuple[Circle, ...]

    @property
    def n_circles(self) -> int:
        return len(self.circles)

    def trivial_mask(self) -> Tuple[bool, ...]:
        return tuple(c.trivial for c in self.circles)


@dataclass(frozen=True)
class AnnularDiagram:
    crossings: Tuple[Tuple[int, int, int, int], ...]
    n_edges: int
    axis_crossings: Tuple[Tuple[int, int], ...] = ()
    free_loops: Tuple[int, ...] = ()
    orientation: Optional[Tuple[int, ...]] = None
    comment: str = field(default="", compare=False)

    def __post_init__(self):
        _validate(self)
        # force orientation inference so inconsistencies surface at construction
        self._heads

    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    @property
    def n_plus(self) -> Optional[int]:
        if self.orientation is None:
            return None
        return sum(1 for s in self.orientation if s > 0)

    @property
    def n_minus(self) -> Optional[int]:
        if self.orientation is None:
            return None
        return sum(1 for s in self.orientation if s < 0)

    @cached_property
    def _occurrences(self) -> Dict[int, List[int]]:
        occ: Dict[int, List[int]] = {e: [] for e in range(self.n_edges)}
        for c, quad in enumerate(self.crossings):
            for pos, e in enumerate(quad):
                occ[e].append(4 * c + pos)
        return occ

    @cached_property
    def _other_end(self) -> Dict[int, int]:
        out = {}
        for a, b in self._occurrences.values():
            out[a], out[b] = b, a
        return out

    @cached_property
    def _heads(self) -> Dict[int, bool]:
        """For each occurrence 4c+pos: True if the edge enters crossing c there."""
        return _orient(self)

    @cached_property
    def axis_weight(self) -> Dict[int, int]:
        w: Dict[int, int] = {}
        for e, s in self.axis_crossings:
            w[e] = w.get(e, 0) + s
        return w

    def edge_direction(self, e: int) -> Tuple[int, int]:
        """(tail occurrence, head occurrence) of edge e."""
        a, b = self._occurrences[e]
        return (b, a) if self._heads[a] else (a, b)

    def vertices(self) -> List[str]:
        n = self.n_crossings
        return [format(v, f"0{n}b") if n else "" for v in range(2 ** n)]

    def to_json(self) -> dict:
        out = {"crossings": [list(c) for c in self.crossings], "n_edges": self.n_edges,
               "axis": [list(a) for a in self.axis_crossings],
               "free_loops": list(self.free_loops)}
        if self.orientation is not None:
            out["signs"] = list(self.orientation)
        if self.comment:
            out["comment"] = self.comment
        return out


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _validate(dg: AnnularDiagram) -> None:
    counts = [0] * dg.n_edges
    for quad in dg.crossings:
        for e in quad:
            if not 0 <= e < dg.n_edges:
                raise InvalidDiagram(f"edge id {e} outside 0..{dg.n_edges - 1}")
            counts[e] += 1
    for e, k in enumerate(counts):
        if k != 2:
            raise InvalidDiagram(f"edge {e} appears {k} times, expected 2")
    for e, s in dg.axis_crossings:
        if not 0 <= e < dg.n_edges:
            raise AxisThroughCrossing(f"axis datum references nonexistent edge {e}")
        if s not in (1, -1):
            raise MalformedInput(f"axis sign must be +1 or -1, got {s}")
    if dg.orientation is not None:
        if len(dg.orientation) != len(dg.crossings):
            raise MalformedInput("signs must have one entry per crossing")
        if any(s not in (1, -1) for s in dg.orientation):
            raise MalformedInput("signs must be +1 or -1")


def _orient(dg: AnnularDiagram) -> Dict[int, bool]:
    heads: Dict[int, bool] = {}
    for c in range(dg.n_crossings):
        heads[4 * c] = True
        heads[4 * c + 2] = False
    if dg.orientation is not None:
        for c, s in enumerate(dg.orientation):
            heads[4 * c + 3] = s > 0
            heads[4 * c + 1] = s < 0
    other = dg._other_end if dg.n_edges else {}

    def assign(o: int, value: bool, stack: List[int]) -> None:
        if o in heads:
            if heads[o] != value:
                raise InvalidDiagram(f"inconsistent orientation at crossing {o // 4}")
            return
        heads[o] = value
        stack.append(o)

    def propagate(stack: List[int]) -> None:
        while stack:
            o = stack.pop()
            assign(other[o], not heads[o], stack)
            if o % 4 in (1, 3):
                assign(o ^ 2, not heads[o], stack)

    propagate(list(heads))
    for c in range(dg.n_crossings):
        if 4 * c + 3 not in heads:
            # a component made only of over-strands: orient it d -> b here
            stack: List[int] = []
            assign(4 * c + 3, True, stack)
            propagate(stack)
    for e, (a, b) in dg._occurrences.items():
        if heads[a] == heads[b]:
            raise InvalidDiagram(f"edge {e} must run from one crossing to another")
    return heads


def make_diagram(crossings: Sequence[Sequence[int]], n_edges: Optional[int] = None,
                 axis: Sequence[Sequence[int]] = (), free_loops: Sequence[int] = (),
                 signs: Optional[Sequence[int]] = None, comment: str = "") -> AnnularDiagram:
    quads = tuple(tuple(int(x) for x in q) for q in crossings)
    if n_edges is None:
        n_edges = 1 + max((e for q in quads for e in q), default=-1)
    return AnnularDiagram(quads, int(n_edges), tuple((int(e), int(s)) for e, s in axis),
                          tuple(int(w) for w in free_loops),
                          None if signs is None else tuple(int(s) for s in signs), comment)


def parse_apd(text: Union[str, bytes, dict]) -> AnnularDiagram:
    """Parse and validate an APD JSON document."""
    if isinstance(text, dict):
        doc = text
    else:
        try:
            doc = json.loads(text)
        except (ValueError, TypeError) as exc:
            raise MalformedInput(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedInput("top level must be an object")
    unknown = set(doc) - _KEYS
    if unknown:
        raise MalformedInput(f"unknown keys: {sorted(unknown)}")
    for key in ("crossings", "n_edges"):
        if key not in doc:
            raise MalformedInput(f"missing key {key!r}")
    crossings = doc["crossings"]
    if not isinstance(crossings, list) or not all(
            isinstance(q, list) and len(q) == 4 and all(_is_int(x) for x in q) for q in crossings):
        raise MalformedInput("crossings must be a list of four-integer lists")
    if not _is_int(doc["n_edges"]) or doc["n_edges"] < 0:
        raise MalformedInput("n_edges must be a nonnegative integer")
    axis = doc.get("axis", [])
    if not isinstance(axis, list) or not all(
            isinstance(a, list) and len(a) == 2 and all(_is_int(x) for x in a) for a in axis):
        raise MalformedInput("axis must be a list of [edge, sign] pairs")
    loops = doc.get("free_loops", [])
    if not isinstance(loops, list) or not all(_is_int(w) for w in loops):
        raise MalformedInput("free_loops must be a list of integers")
    signs = doc.get("signs")
    if signs is not None and (not isinstance(signs, list) or not all(_is_int(s) for s in signs)):
        raise MalformedInput("signs must be a list of integers")
    comment = doc.get("comment", "")
    if not isinstance(comment, str):
        raise MalformedInput("comment must be a string")
    return make_diagram(crossings, doc["n_edges"], axis, loops, signs, comment)


def load_apd(path) -> AnnularDiagram:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_apd(fh.read())


def _vertex_bits(dg: AnnularDiagram, vertex: Union[str, int]) -> str:
    n = dg.n_crossings
    if isinstance(vertex, int):
        if not 0 <= vertex < 2 ** n:
            raise ValueError(f"vertex {vertex} out of range")
        return format(vertex, f"0{n}b") if n else ""
    if len(vertex) != n or set(vertex) - {"0", "1"}:
        raise ValueError(f"vertex must be a {n}-character bitstring")
    return vertex


def resolve(dg: AnnularDiagram, vertex: Union[str, int],
            merge_order: Optional[Sequence[int]] = None) -> Resolution:
    """Circles of the resolution at ``vertex`` (bit j smooths crossing j).

    ``merge_order`` permutes the order in which crossings feed the
    union-find; the result does not depend on it.
    """
    v = _vertex_bits(dg, vertex)
    uf = UnionFind(range(dg.n_edges))
    partner: Dict[int, int] = {}
    for c in range(dg.n_crossings):
        for p, r in SMOOTHING_PAIRS[int(v[c])]:
            partner[4 * c + p] = 4 * c + r
            partner[4 * c + r] = 4 * c + p
    order = range(dg.n_crossings) if merge_order is None else merge_order
    for c in order:
        quad = dg.crossings[c]
        for p, r in SMOOTHING_PAIRS[int(v[c])]:
            uf.union(quad[p], quad[r])
    classes: Dict[int, List[int]] = {}
    for e in range(dg.n_edges):
        classes.setdefault(uf.find(e), []).append(e)
    circles = []
    for members in sorted(classes.values(), key=lambda m: m[0]):
        w = _winding(dg, members[0], partner)
        if w not in (-1, 0, 1):
            raise InvalidDiagram(f"circle through edges {members} has winding {w}")
        circles.append(Circle(tuple(members), w))
    for w in dg.free_loops:
        if w not in (-1, 0, 1):
            raise InvalidDiagram(f"free loop has winding {w}")
        circles.append(Circle((), w, free=True))
    return Resolution(v, tuple(circles))


def _winding(dg: AnnularDiagram, start_edge: int, partner: Dict[int, int]) -> int:
    """Signed axis count around the circle through start_edge, traversed along it."""
    weight = dg.axis_weight
    occ_edge = {o: e for e, os in dg._occurrences.items() for o in os}
    other = dg._other_end
    start, here = dg.edge_direction(start_edge)
    total = weight.get(start_edge, 0)
    while True:
        nxt = partner[here]
        if nxt == start:
            return total
        e = occ_edge[nxt]
        tail, _ = dg.edge_direction(e)
        eps = 1 if nxt == tail else -1
        total += eps * weight.get(e, 0)
        here = other[nxt]


def edge_circle_map(res: Resolution) -> Dict[int, int]:
    return {e: k for k, c in enumerate(res.circles) for e in c.edges}


def cube_edges(dg: AnnularDiagram) -> List[Tuple[str, int, str]]:
    """(source vertex, flipped crossing, target vertex) in canonical order."""
    out = []
    for v in dg.vertices():
        for c in range(dg.n_crossings):
            if v[c] == "0":
                out.append((v, c, v[:c] + "1" + v[c + 1:]))
    return out
