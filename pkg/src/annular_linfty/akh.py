"""CKh as an L-infinity module, its restriction to sl2wedge, and transfer to AKh."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

from .complex import DEFAULT_BUDGET, KhovanovComplex
from .diagram import AnnularDiagram
from .errors import ContractionInvalid, RelationFailure
from .f2 import F2Matrix
from .homology import ModuleContraction, contract_onto_homology, rank
from .lie import builtin_algebra, dg_contraction
from .linfty import (LInftyAlgebra, LInftyModuleOps, Morphism, RelationViolation,
                     check_module_relation, restrict_scalars, transfer_algebra,
                     transfer_module)

#: names on the sl2wedge side and their images in sl2wedge_dg
WEDGE_TO_DG = {"e": "e", "f": "f", "h": "h", "v2": "v2", "v-2": "v-2", "v0": "v0~"}


def dg_algebra() -> LInftyAlgebra:
    return LInftyAlgebra.from_lie(builtin_algebra("sl2wedge_dg"), differential="d")


def wedge_algebra() -> LInftyAlgebra:
    return LInftyAlgebra.from_lie(builtin_algebra("sl2wedge"))


@lru_cache(maxsize=None)
def _transferred(n_max: int):
    c = dg_contraction()
    big = LInftyAlgebra.from_lie(c.big, differential="d")
    return transfer_algebra(big, c.contraction, c.small.names, n_max)


def wedge_to_dg_morphism(n_max: int = 4) -> Morphism:
    """The L-infinity morphism sl2wedge -> sl2wedge_dg up to arity n_max.

    It is the transferred inclusion of H(sl2wedge_dg) restricted to the copy
    of sl2wedge spanned by e, f, h, v2, v-2, v0~.
    """
    small, I = _transferred(max(2, n_max))
    wedge = wedge_algebra()
    to_small = [small.index(WEDGE_TO_DG[n]) for n in wedge.names]
    back = {s: w for w, s in enumerate(to_small)}
    out: Morphism = {}
    for n, table in I.items():
        for args, vec in table.items():
            if all(a in back for a in args):
                key = tuple(sorted(back[a] for a in args))
                out.setdefault(n, {})[key] = vec
    return out


ComplexLike = Union[KhovanovComplex, AnnularDiagram]


def _complex(obj: ComplexLike, budget: int = DEFAULT_BUDGET, jobs: int = 1) -> KhovanovComplex:
    return obj if isinstance(obj, KhovanovComplex) else KhovanovComplex(obj, budget, jobs)


def _comm(a: F2Matrix, b: F2Matrix) -> F2Matrix:
    return a @ b + b @ a


def ckh_module(obj: ComplexLike, budget: int = DEFAULT_BUDGET) -> LInftyModuleOps:
    """Strict sl2wedge_dg-module structure on CKh with k1 = d0."""
    cx = _complex(obj, budget)
    alg = dg_algebra()
    M = cx.matrix
    v0 = _comm(M("e"), M("dminus"))
    if not v0 == _comm(M("f"), M("leeplus")):
        raise RelationFailure("[e, dminus] differs from [f, leeplus]")
    action = {
        "e": M("e"), "f": M("f"), "h": M("h"),
        "v2": M("leeplus"), "v-2": M("dminus"), "v0~": v0,
        "d": M("d0"), "D": M("lee0"), "x": _comm(M("d0"), M("lee0")),
    }
    ops = {1: {(): M("d0")}, 2: {(alg.index(n),): m for n, m in action.items()}}
    return LInftyModuleOps(alg, cx.dim, ops, cx.gradings())


def ckh_wedge_module(obj: ComplexLike, n_max: int = 4,
                     budget: int = DEFAULT_BUDGET) -> LInftyModuleOps:
    """Restriction of :func:`ckh_module` along sl2wedge -> sl2wedge_dg."""
    strict = obj if isinstance(obj, LInftyModuleOps) else ckh_module(obj, budget)
    f = wedge_to_dg_morphism(max(2, n_max - 1))
    return restrict_scalars(f, strict, wedge_algebra(), n_max)


GradingKey = Tuple[int, int, int]


@dataclass
class AkhResult:
    complex: KhovanovComplex
    n_max: int
    pivot: str
    contraction: ModuleContraction
    ops: LInftyModuleOps
    relation_report: List[RelationViolation]
    graded_dims: Dict[GradingKey, int]
    normalized_dims: Optional[Dict[GradingKey, int]] = None
    homology_basis: List[dict] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.ops.dim

    @property
    def diagram(self) -> AnnularDiagram:
        return self.complex.diagram

    def small_gradings(self) -> List[GradingKey]:
        return [tuple(self.ops.gradings[b]) for b in range(self.dim)]

    def normalized_gradings(self) -> Optional[List[GradingKey]]:
        if self.normalized_dims is None:
            return None
        gens = self.complex.generators
        return [(gens[b].grading_i, gens[b].grading_j, gens[b].grading_k)
                for b in self.contraction.small_basis]

    @property
    def k1(self) -> F2Matrix:
        return self.ops.op_or_zero(1, ())

    @property
    def k2_tables(self) -> Dict[str, F2Matrix]:
        alg = self.ops.algebra
        return {n: self.ops.op_or_zero(2, (alg.index(n),)) for n in alg.names}

    def k3(self, a: str, b: str) -> F2Matrix:
        return self.ops.by_name(a, b)

    @property
    def higher_ops(self) -> Dict[int, Dict[Tuple[str, ...], F2Matrix]]:
        alg = self.ops.algebra
        return {n: {tuple(alg.names[a] for a in args): m for args, m in sorted(t.items())}
                for n, t in sorted(self.ops.ops.items()) if n >= 3}

    def to_json(self) -> dict:
        gens = self.complex.generators
        dims = []
        norm = {}
        if self.normalized_dims is not None:
            for b in self.contraction.small_basis:
                g = gens[b]
                norm[(g.grading_r, g.grading_q_raw, g.grading_k)] = (g.grading_i, g.grading_j)
        for key, dim in sorted(self.graded_dims.items()):
            entry = {"r": key[0], "q_raw": key[1], "k": key[2], "dim": dim}
            if key in norm:
                entry["i"], entry["j"] = norm[key]
            dims.append(entry)
        return {
            "diagram": self.diagram.to_json(),
            "n_max": self.n_max,
            "pivot": self.pivot,
            "ckh_dim": self.complex.dim,
            "akh_dim": self.dim,
            "graded_dims": dims,
            "homology_basis": self.homology_basis,
            "k1_zero": self.k1.is_zero(),
            "k2_tables": {n: m.to_json() for n, m in self.k2_tables.items()},
            "higher_ops": {str(n): self.ops.table_json(n) for n in range(3, self.n_max + 1)},
            "relation_report": {"n_max": self.n_max, "passed": not self.relation_report,
                                "violations": [str(v) for v in self.relation_report]},
        }

    def to_text(self) -> str:
        lines = [f"CKh dimension {self.complex.dim}, AKh dimension {self.dim}"]
        use_norm = self.normalized_dims is not None
        dims = self.normalized_dims if use_norm else self.graded_dims
        hname, qname = ("i", "j") if use_norm else ("r", "q_raw")
        ks = sorted({k for _, _, k in dims})
        for qv in sorted({q for _, q, _ in dims}):
            lines.append(f"{qname} = {qv}")
            lines.append(f"  {hname:>4} | " + " ".join(f"k={k:<3}" for k in ks))
            for hv in sorted({h for h, q, _ in dims if q == qv}):
                cells = " ".join(f"{dims.get((hv, qv, k), 0):<5}" for k in ks)
                lines.append(f"  {hv:>4} | {cells}")
        lines.append("k2 (nonzero entries):")
        for n, m in self.k2_tables.items():
            lines.append(f"  {n}: {m.entries()}")
        for n, table in self.higher_ops.items():
            for args, m in table.items():
                lines.append(f"k{n}({', '.join(args)}): {m.entries()}")
        status = "passed" if not self.relation_report else f"{len(self.relation_report)} violations"
        lines.append(f"module relation up to n={self.n_max}: {status}")
        return "\n".join(lines)


def compute_akh(obj: ComplexLike, n_max: int = 4, budget: int = DEFAULT_BUDGET,
                pivot: str = "canonical", jobs: int = 1, check: bool = True) -> AkhResult:
    cx = _complex(obj, budget, jobs)
    wedge = ckh_wedge_module(cx, n_max)
    grad = cx.gradings()
    c = contract_onto_homology(cx.matrix("d0"), grad, pivot=pivot)
    if c.failures():
        raise ContractionInvalid("contraction onto homology failed its checks")
    ops = transfer_module(wedge, c, n_max, jobs=jobs)
    if not ops.op_or_zero(1, ()).is_zero():
        raise ContractionInvalid("transferred k1 is nonzero")
    report = check_module_relation(ops, n_max, jobs=jobs) if check else []
    dims: Dict[GradingKey, int] = {}
    norm: Optional[Dict[GradingKey, int]] = {} if cx.diagram.orientation is not None else None
    basis = []
    for pos, b in enumerate(c.small_basis):
        g = cx.generators[b]
        key = (g.grading_r, g.grading_q_raw, g.grading_k)
        dims[key] = dims.get(key, 0) + 1
        if norm is not None:
            nk = (g.grading_i, g.grading_j, g.grading_k)
            norm[nk] = norm.get(nk, 0) + 1
        basis.append({"index": pos, "r": key[0], "q_raw": key[1], "k": key[2],
                      "generator": cx.label(b),
                      "representative": [cx.label(t) for t in c.i.column(pos)]})
    return AkhResult(cx, n_max, pivot, c, ops, report, dims, norm, basis)


# ------------------------------------------------------------ comparisons

def k2_rank_profile(res: AkhResult, keys: Optional[List[GradingKey]] = None) -> Dict[Tuple[str, GradingKey], int]:
    """Rank of k2(y) restricted to each graded block of AKh, per generator y."""
    if keys is None:
        keys = res.small_gradings()
    blocks: Dict[GradingKey, List[int]] = {}
    for idx, key in enumerate(keys):
        blocks.setdefault(tuple(key), []).append(idx)
    out = {}
    for name, m in res.k2_tables.items():
        for key, cols in sorted(blocks.items()):
            rk = rank(m.submatrix(list(range(res.dim)), cols))
            if rk:
                out[(name, key)] = rk
    return out


def k3_rank_profile(res: AkhResult) -> Dict[Tuple[str, ...], int]:
    table = res.higher_ops.get(3, {})
    return {args: rank(m) for args, m in table.items()}


@dataclass
class InvarianceReport:
    dims_equal: bool
    k2_profiles_equal: bool
    grading: str
    shift: Tuple[int, int]
    dims_a: Dict[GradingKey, int]
    dims_b: Dict[GradingKey, int]
    k3_a: Dict[Tuple[str, ...], int]
    k3_b: Dict[Tuple[str, ...], int]

    @property
    def all_equal(self) -> bool:
        return self.dims_equal and self.k2_profiles_equal

    @property
    def k3_equal(self) -> bool:
        return self.k3_a == self.k3_b

    def to_json(self) -> dict:
        def dims(d):
            return [{"grading": list(k), "dim": v} for k, v in sorted(d.items())]

        def k3(d):
            return [{"args": list(a), "rank": r} for a, r in sorted(d.items())]
        return {
            "grading": self.grading, "shift": list(self.shift),
            "dims_equal": self.dims_equal, "k2_profiles_equal": self.k2_profiles_equal,
            "all_equal": self.all_equal,
            "dims_a": dims(self.dims_a), "dims_b": dims(self.dims_b),
            "k3_diagnostic": {"equal": self.k3_equal, "a": k3(self.k3_a), "b": k3(self.k3_b)},
        }


def _shifted(keys, dr: int, dq: int) -> List[GradingKey]:
    return [(k[0] + dr, k[1] + dq, k[2]) for k in keys]


def _count(keys) -> Dict[GradingKey, int]:
    out: Dict[GradingKey, int] = {}
    for k in keys:
        out[tuple(k)] = out.get(tuple(k), 0) + 1
    return out


def _align(ka: List[GradingKey], kb: List[GradingKey]) -> Tuple[int, int]:
    """Shift (dr, dq) of the first grading list that best matches the second.

    The lowest key of ``ka`` is tried against every key of ``kb`` with the
    same k; the first shift making the graded dimensions agree wins.
    """
    if not ka or not kb:
        return (0, 0)
    anchor = min(ka)
    target = _count(kb)
    for cand in sorted(set(kb)):
        if cand[2] != anchor[2]:
            continue
        s = (cand[0] - anchor[0], cand[1] - anchor[1])
        if _count(_shifted(ka, *s)) == target:
            return s
    lo = min(kb)
    return (lo[0] - anchor[0], lo[1] - anchor[1])


def invariance_report(a: Union[ComplexLike, AkhResult], b: Union[ComplexLike, AkhResult],
                      n_max: int = 4, budget: int = DEFAULT_BUDGET, pivot: str = "canonical",
                      jobs: int = 1) -> InvarianceReport:
    """Compare AKh of two diagrams through quasi-isomorphism invariants.

    Normalized (i, j, k) gradings are used when both diagrams carry crossing
    signs; otherwise raw (r, q_raw, k) gradings are aligned by a shift.
    """
    ra = a if isinstance(a, AkhResult) else compute_akh(a, n_max, budget, pivot, jobs)
    rb = b if isinstance(b, AkhResult) else compute_akh(b, n_max, budget, pivot, jobs)
    if ra.normalized_dims is not None and rb.normalized_dims is not None:
        ka, kb = ra.normalized_gradings(), rb.normalized_gradings()
        grading, shift = "normalized", (0, 0)
    else:
        ka, kb = ra.small_gradings(), rb.small_gradings()
        grading = "raw"
        shift = _align(ka, kb)
        ka = _shifted(ka, *shift)
    dims_a, dims_b = _count(ka), _count(kb)
    pa, pb = k2_rank_profile(ra, ka), k2_rank_profile(rb, kb)
    return InvarianceReport(dims_a == dims_b, pa == pb, grading, shift, dims_a, dims_b,
                            k3_rank_profile(ra), k3_rank_profile(rb))
