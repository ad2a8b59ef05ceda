"""The annular Khovanov complex over F2 and its operators.

Generators are (vertex, labeling) pairs ordered by (vertex as integer,
labels as integer).  Character j of a label string is the label of circle j
of the resolution (1 = plus, 0 = minus).

Per cube edge the Khovanov merge/split maps and the Lee correction are
computed and then split by the change in the k-grading:

* Khovanov part, k preserved   -> ``d0``
* Khovanov part, k lowered     -> ``dminus``
* Lee correction, k preserved  -> ``lee0``
* Lee correction, k raised by 2 -> ``leeplus``
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .diagram import AnnularDiagram, Resolution, cube_edges, edge_circle_map, resolve
from .errors import CapacityExceeded, GradingLeak, InvalidDiagram
from .f2 import F2Matrix

DEFAULT_BUDGET = 2 ** 20

OPERATOR_KINDS = ("d", "d0", "dminus", "lee0", "leeplus", "e", "f", "h")

#: (delta r, delta k, rule) with rule "eq" (exact) or "le" (at most)
BIDEGREES = {
    "d": (1, 0, "le"),
    "d0": (1, 0, "eq"),
    "dminus": (1, -2, "le"),
    "lee0": (1, 0, "eq"),
    "leeplus": (1, 2, "eq"),
    "e": (0, 2, "eq"),
    "f": (0, -2, "eq"),
    "h": (0, 0, "eq"),
}


@dataclass(frozen=True)
class Generator:
    vertex: str
    labels: str
    grading_r: int
    grading_q_raw: int
    grading_k: int
    grading_i: Optional[int] = None
    grading_j: Optional[int] = None

    @property
    def key(self) -> Tuple[int, int]:
        return (int(self.vertex or "0", 2), int(self.labels or "0", 2))

    def render(self, trivial: Sequence[bool]) -> str:
        parts = [("w" if t else "v") + ("+" if ch == "1" else "-")
                 for ch, t in zip(self.labels, trivial)]
        return f"{self.vertex}:{''.join(parts) or '1'}"


@dataclass
class GradedOperator:
    name: str
    matrix: F2Matrix
    bidegree: Tuple[int, int]
    rule: str = "eq"

    def bidegree_violations(self, gens: Sequence[Generator]) -> List[Tuple[int, int]]:
        dr, dk = self.bidegree
        bad = []
        for row, col in self.matrix.entries():
            a, b = gens[col], gens[row]
            ok_r = b.grading_r - a.grading_r == dr
            delta = b.grading_k - a.grading_k
            ok_k = delta == dk if self.rule == "eq" else delta <= dk
            if not (ok_r and ok_k):
                bad.append((row, col))
        return bad


def generator_slots(dg: AnnularDiagram, max_circles: int) -> int:
    return (2 ** dg.n_crossings) * max_circles


def _check_budget(dg: AnnularDiagram, budget: int, resolutions=None) -> None:
    if budget <= 0:
        raise ValueError("budget must be positive")
    if 2 ** dg.n_crossings > budget:
        raise CapacityExceeded(f"{2 ** dg.n_crossings} cube vertices exceed budget {budget}")
    if resolutions is None:
        low = generator_slots(dg, max(1, resolve(dg, 0).n_circles))
        if low > budget:
            raise CapacityExceeded(f"at least {low} generator slots exceed budget {budget}")
        return
    slots = generator_slots(dg, max((r.n_circles for r in resolutions), default=0))
    if slots > budget:
        raise CapacityExceeded(f"{slots} generator slots exceed budget {budget}")


def _pmap(fn, items, jobs):
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


class KhovanovComplex:
    """Generators and operators of CKh for one annular diagram."""

    def __init__(self, diagram: AnnularDiagram, budget: int = DEFAULT_BUDGET, jobs: int = 1):
        self.diagram = diagram
        self.budget = budget
        self.jobs = max(1, int(jobs))
        _check_budget(diagram, budget)
        verts = diagram.vertices()
        ress = _pmap(lambda v: resolve(diagram, v), verts, self.jobs)
        _check_budget(diagram, budget, ress)
        self.resolutions: Dict[str, Resolution] = dict(zip(verts, ress))
        self.generators: List[Generator] = []
        self.index: Dict[Tuple[str, int], int] = {}
        n_plus, n_minus = diagram.n_plus, diagram.n_minus
        for v in verts:
            res = self.resolutions[v]
            nc = res.n_circles
            r = v.count("1")
            for lab in range(2 ** nc):
                s = format(lab, f"0{nc}b") if nc else ""
                plus = s.count("1")
                k = sum((1 if ch == "1" else -1) for ch, c in zip(s, res.circles) if not c.trivial)
                q = plus - (nc - plus) + r
                gi = gj = None
                if n_plus is not None:
                    gi = r - n_minus
                    gj = q + n_plus - 2 * n_minus
                self.index[(v, lab)] = len(self.generators)
                self.generators.append(Generator(v, s, r, q, k, gi, gj))
        self._ops: Dict[str, GradedOperator] = {}

    @property
    def dim(self) -> int:
        return len(self.generators)

    def gradings(self) -> List[Tuple[int, int, int]]:
        return [(g.grading_r, g.grading_q_raw, g.grading_k) for g in self.generators]

    def trivial_mask(self, v: str) -> Tuple[bool, ...]:
        return self.resolutions[v].trivial_mask()

    def label(self, idx: int) -> str:
        g = self.generators[idx]
        return g.render(self.trivial_mask(g.vertex))

    def find(self, vertex: str, labels: str) -> int:
        return self.index[(vertex, int(labels or "0", 2))]

    def operator(self, name: str) -> GradedOperator:
        if name not in OPERATOR_KINDS:
            raise KeyError(name)
        if name not in self._ops:
            if name in ("e", "f", "h"):
                self._ops[name] = self._sl2(name)
            else:
                self._ops.update(assemble(self, jobs=self.jobs))
        return self._ops[name]

    def matrix(self, name: str) -> F2Matrix:
        return self.operator(name).matrix

    def replace_operator(self, name: str, matrix: F2Matrix) -> None:
        """Swap in a different matrix for one operator (negative controls)."""
        op = self.operator(name)
        self._ops[name] = GradedOperator(name, matrix, op.bidegree, op.rule)
        if name in ("d0", "dminus"):
            d = self.matrix("d0") + self.matrix("dminus")
            self._ops["d"] = GradedOperator("d", d, self._ops["d"].bidegree, "le")

    def _sl2(self, sym: str) -> GradedOperator:
        entries = []
        for idx, g in enumerate(self.generators):
            mask = self.trivial_mask(g.vertex)
            nontriv = [j for j, t in enumerate(mask) if not t]
            nc = len(mask)
            lab = int(g.labels or "0", 2)
            if sym == "h":
                if len(nontriv) % 2:
                    entries.append((idx, idx))
                continue
            for j in nontriv:
                bit = 1 << (nc - 1 - j)
                if sym == "e" and not lab & bit:
                    entries.append((self.index[(g.vertex, lab | bit)], idx))
                elif sym == "f" and lab & bit:
                    entries.append((self.index[(g.vertex, lab ^ bit)], idx))
        dr, dk, rule = BIDEGREES[sym]
        return GradedOperator(sym, F2Matrix.from_entries(self.dim, self.dim, entries), (dr, dk), rule)


def _edge_entries(cx: KhovanovComplex, edge: Tuple[str, int, str]) -> Dict[str, List[Tuple[int, int]]]:
    v, c, w = edge
    dg = cx.diagram
    rv, rw = cx.resolutions[v], cx.resolutions[w]
    mv, mw = edge_circle_map(rv), edge_circle_map(rw)
    quad = dg.crossings[c]
    A = sorted({mv[e] for e in quad})
    B = sorted({mw[e] for e in quad})
    if not ((len(A) == 2 and len(B) == 1) or (len(A) == 1 and len(B) == 2)):
        raise InvalidDiagram(f"cube edge {v}->{w} is neither a merge nor a split")
    by_min = {circ.edges[0]: k for k, circ in enumerate(rw.circles) if circ.edges}
    carry = {}
    for k, circ in enumerate(rv.circles):
        if k in A:
            continue
        if circ.free:
            # free loops sit after the edge circles in both resolutions
            carry[k] = k - rv.n_circles + rw.n_circles
        else:
            carry[k] = by_min[circ.edges[0]]
    nv, nw = rv.n_circles, rw.n_circles
    gens = cx.generators
    out: Dict[str, List[Tuple[int, int]]] = {"d0": [], "dminus": [], "lee0": [], "leeplus": []}

    def target(labels_w: Dict[int, int]) -> int:
        lab = 0
        for k, bit in labels_w.items():
            if bit:
                lab |= 1 << (nw - 1 - k)
        return cx.index[(w, lab)]

    for lab in range(2 ** nv):
        src = cx.index[(v, lab)]
        bit = {k: (lab >> (nv - 1 - k)) & 1 for k in range(nv)}
        base = {carry[k]: bit[k] for k in carry}
        kh: List[Dict[int, int]] = []
        lee: List[Dict[int, int]] = []
        if len(A) == 2:
            a1, a2 = bit[A[0]], bit[A[1]]
            b = B[0]
            if a1 and a2:
                kh.append({b: 1})
            elif a1 or a2:
                kh.append({b: 0})
            else:
                lee.append({b: 1})
        else:
            a = bit[A[0]]
            b1, b2 = B
            if a:
                kh.append({b1: 1, b2: 0})
                kh.append({b1: 0, b2: 1})
            else:
                kh.append({b1: 0, b2: 0})
                lee.append({b1: 1, b2: 1})
        k_src = gens[src].grading_k
        for part, kind in ((kh, "kh"), (lee, "lee")):
            for new in part:
                tgt = target({**base, **new})
                dk = gens[tgt].grading_k - k_src
                if kind == "kh":
                    if dk == 0:
                        out["d0"].append((tgt, src))
                    elif dk < 0:
                        out["dminus"].append((tgt, src))
                    else:
                        raise GradingLeak(f"Khovanov edge {v}->{w} raises k by {dk}")
                else:
                    if dk == 0:
                        out["lee0"].append((tgt, src))
                    elif dk == 2:
                        out["leeplus"].append((tgt, src))
                    else:
                        raise GradingLeak(f"Lee correction on {v}->{w} changes k by {dk}")
    return out


def assemble(cx: KhovanovComplex, edges: Optional[Sequence[Tuple[str, int, str]]] = None,
             jobs: int = 1) -> Dict[str, GradedOperator]:
    """Sum per-edge contributions into the cube operators d, d0, dminus, lee0, leeplus."""
    if edges is None:
        edges = cube_edges(cx.diagram)
    parts = _pmap(lambda e: _edge_entries(cx, e), list(edges), jobs)
    n = cx.dim
    ops = {}
    for name in ("d0", "dminus", "lee0", "leeplus"):
        entries = [pair for p in parts for pair in p[name]]
        dr, dk, rule = BIDEGREES[name]
        ops[name] = GradedOperator(name, F2Matrix.from_entries(n, n, entries), (dr, dk), rule)
    dr, dk, rule = BIDEGREES["d"]
    ops["d"] = GradedOperator("d", ops["d0"].matrix + ops["dminus"].matrix, (dr, dk), rule)
    return ops


ComplexLike = Union[KhovanovComplex, AnnularDiagram]


def _cx(obj: ComplexLike, budget: int = DEFAULT_BUDGET) -> KhovanovComplex:
    return obj if isinstance(obj, KhovanovComplex) else KhovanovComplex(obj, budget)


def enumerate_generators(dg: AnnularDiagram, budget: int = DEFAULT_BUDGET) -> List[Generator]:
    return list(KhovanovComplex(dg, budget).generators)


def khovanov_differential(obj: ComplexLike) -> GradedOperator:
    return _cx(obj).operator("d")


def split_by_k(obj: ComplexLike) -> Tuple[GradedOperator, GradedOperator]:
    cx = _cx(obj)
    return cx.operator("d0"), cx.operator("dminus")


def lee_correction(obj: ComplexLike) -> Tuple[GradedOperator, GradedOperator]:
    cx = _cx(obj)
    return cx.operator("lee0"), cx.operator("leeplus")


def sl2_action(obj: ComplexLike, symbol: str) -> GradedOperator:
    if symbol not in ("e", "f", "h"):
        raise ValueError("symbol must be one of e, f, h")
    return _cx(obj).operator(symbol)
