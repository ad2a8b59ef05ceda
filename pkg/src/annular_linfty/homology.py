"""Exact linear algebra over F2 and contractions onto homology."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .errors import ContractionInvalid, NotADifferential
from .f2 import F2Matrix

PIVOT_STRATEGIES = ("canonical", "reverse")


def _eliminate(vectors: Sequence[int]):
    """Greedy XOR basis.  Returns (pivot vector indices, kernel combos)."""
    pivots: Dict[int, Tuple[int, int]] = {}
    independent: List[int] = []
    kernel: List[int] = []
    for idx, vec in enumerate(vectors):
        combo = 1 << idx
        while vec:
            lead = vec.bit_length() - 1
            hit = pivots.get(lead)
            if hit is None:
                pivots[lead] = (vec, combo)
                independent.append(idx)
                break
            vec ^= hit[0]
            combo ^= hit[1]
        if not vec:
            kernel.append(combo)
    return independent, kernel


def _bits_to_list(v: int) -> List[int]:
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


def rank(m: F2Matrix) -> int:
    rows = m.row_bits() if m.nrows <= m.ncols else m.column_bits()
    return len(_eliminate(rows)[0])


def kernel_basis(m: F2Matrix) -> List[List[int]]:
    """Basis of {x : m x = 0}; each vector given by its support."""
    _, kernel = _eliminate(m.column_bits())
    return [_bits_to_list(v) for v in kernel]


def image_basis(m: F2Matrix) -> List[int]:
    """Column indices whose columns form a basis of the image (greedy, left to right)."""
    independent, _ = _eliminate(m.column_bits())
    return independent


def homology_dimension(d_in: F2Matrix, d_out: F2Matrix) -> int:
    """dim ker(d_out) - rank(d_in) for a two-step complex."""
    return d_out.ncols - rank(d_out) - rank(d_in)


@dataclass
class ModuleContraction:
    """Chain contraction (i, q, T) from a big complex onto a small one.

    ``differential`` is the big differential k1.  The small complex is
    assumed to carry the zero differential when built by
    :func:`contract_onto_homology`; ``small_differential`` records it.
    """

    differential: F2Matrix
    i: F2Matrix
    q: F2Matrix
    T: F2Matrix
    small_differential: Optional[F2Matrix] = None
    small_basis: List[int] = field(default_factory=list)

    def __post_init__(self):
        if self.small_differential is None:
            n = self.i.ncols
            self.small_differential = F2Matrix.zeros(n, n)

    @property
    def big_dim(self) -> int:
        return self.differential.nrows

    @property
    def small_dim(self) -> int:
        return self.i.ncols

    def side_conditions(self) -> Dict[str, bool]:
        d, i, q, T = self.differential, self.i, self.q, self.T
        ds = self.small_differential
        return {
            "q i = Id": q @ i == F2Matrix.identity(self.small_dim),
            "Id - i q = T d + d T": F2Matrix.identity(self.big_dim) + i @ q == T @ d + d @ T,
            "T T = 0": (T @ T).is_zero(),
            "T i = 0": (T @ i).is_zero(),
            "q T = 0": (q @ T).is_zero(),
            "d i = i d'": d @ i == i @ ds,
            "q d = d' q": q @ d == ds @ q,
        }

    def failures(self) -> List[str]:
        return [name for name, ok in self.side_conditions().items() if not ok]

    def verify(self) -> None:
        bad = self.failures()
        if bad:
            raise ContractionInvalid("side conditions fail: " + ", ".join(bad))


def identity_contraction(dim: int) -> ModuleContraction:
    eye = F2Matrix.identity(dim)
    return ModuleContraction(F2Matrix.zeros(dim, dim), eye, eye,
                             F2Matrix.zeros(dim, dim), small_basis=list(range(dim)))


class _Reducer:
    """Iterated cancellation of invertible entries of a differential."""

    def __init__(self, d: F2Matrix):
        n = d.nrows
        self.n = n
        self.cols: Dict[int, Set[int]] = {j: set(c) for j, c in enumerate(d.columns())}
        self.rows: Dict[int, Set[int]] = {j: set() for j in range(n)}
        for j, c in self.cols.items():
            for r in c:
                self.rows[r].add(j)
        self.alive: Set[int] = set(range(n))
        self.inc: Dict[int, Set[int]] = {j: {j} for j in range(n)}
        self.proj: Dict[int, Set[int]] = {j: {j} for j in range(n)}
        self.proj_inv: Dict[int, Set[int]] = {j: {j} for j in range(n)}
        self.htpy: Dict[int, Set[int]] = {}

    def _toggle(self, col: int, row: int) -> None:
        c = self.cols[col]
        if row in c:
            c.remove(row)
            self.rows[row].discard(col)
        else:
            c.add(row)
            self.rows[row].add(col)

    def cancel(self, src: int, tgt: int) -> None:
        """Cancel the entry d(src) -> tgt; both leave the basis."""
        rest = self.cols[src] - {src, tgt}
        hit_cols = self.rows[tgt] - {src}
        inc_src = self.inc[src]
        # homotopy and projection updates use the pre-step projection
        for v in list(self.proj_inv[tgt]):
            h = self.htpy.setdefault(v, set())
            h ^= inc_src
            if not h:
                del self.htpy[v]
            p = self.proj[v]
            p.discard(tgt)
            for b in rest:
                if b in p:
                    p.remove(b)
                    self.proj_inv[b].discard(v)
                else:
                    p.add(b)
                    self.proj_inv[b].add(v)
        for v in list(self.proj_inv[src]):
            self.proj[v].discard(src)
        for c in hit_cols:
            self.inc[c] ^= inc_src
            for r in rest | {tgt}:
                self._toggle(c, r)
        for b in (src, tgt):
            for c in list(self.rows[b]):
                self.cols[c].discard(b)
            self.rows[b].clear()
            for r in self.cols.pop(b):
                self.rows[r].discard(b)
            self.alive.discard(b)
            self.proj_inv.pop(b, None)
            self.inc.pop(b, None)

    def run(self) -> None:
        for tgt in range(self.n):
            if tgt not in self.alive:
                continue
            candidates = sorted(c for c in self.rows[tgt] if c != tgt)
            if candidates:
                self.cancel(candidates[0], tgt)

    def remaining_differential(self) -> Dict[int, Set[int]]:
        return {j: set(self.cols[j]) for j in sorted(self.alive)}


def _build(d: F2Matrix) -> ModuleContraction:
    red = _Reducer(d)
    red.run()
    n = d.nrows
    small = sorted(red.alive)
    pos = {b: k for k, b in enumerate(small)}
    resid = red.remaining_differential()
    ds = F2Matrix.from_entries(len(small), len(small),
                               [(pos[r], pos[c]) for c, rs in resid.items() for r in rs])
    i = F2Matrix.from_columns(n, [sorted(red.inc[b]) for b in small])
    q = F2Matrix.from_entries(len(small), n,
                              [(pos[b], v) for v, bs in red.proj.items() for b in bs])
    T = F2Matrix.from_entries(n, n, [(w, v) for v, ws in red.htpy.items() for w in ws])
    return ModuleContraction(d, i, q, T, small_differential=ds, small_basis=small)


def _normalize(c: ModuleContraction) -> ModuleContraction:
    n = c.big_dim
    proj = F2Matrix.identity(n) + c.i @ c.q
    T = proj @ c.T @ proj
    T = T @ c.differential @ T
    return ModuleContraction(c.differential, c.i, c.q, T,
                             small_differential=c.small_differential,
                             small_basis=list(c.small_basis))


def _permute(m: F2Matrix, row_perm: Optional[List[int]], col_perm: Optional[List[int]]) -> F2Matrix:
    """Entry (r, c) moves to (row_perm[r], col_perm[c])."""
    ents = m.entries()
    out = []
    for r, c in ents:
        out.append((row_perm[r] if row_perm else r, col_perm[c] if col_perm else c))
    return F2Matrix.from_entries(m.nrows, m.ncols, out)


def contract_onto_homology(differential: F2Matrix,
                           gradings: Optional[Sequence[tuple]] = None,
                           pivot: str = "canonical") -> ModuleContraction:
    """Contract (C, d) onto a complex with zero differential.

    ``gradings[b]`` is a tuple whose first entry is the homological degree of
    basis element b; when given, d is required to have degree +1 and the
    remaining entries to be preserved, and the output maps are checked to
    respect the grading.
    """
    d = differential
    n = d.nrows
    if d.ncols != n:
        raise ValueError("differential must be square")
    if not (d @ d).is_zero():
        raise NotADifferential("differential does not square to zero")
    if pivot not in PIVOT_STRATEGIES:
        raise ValueError(f"unknown pivot strategy {pivot!r}")
    if gradings is not None:
        _check_degree(d, gradings, 1, "differential")

    if pivot == "reverse":
        perm = list(range(n - 1, -1, -1))
        c = _build(_permute(d, perm, perm))
        small = sorted(perm[b] for b in c.small_basis)
        # re-sort the small basis to increasing original indices
        order = [perm[b] for b in c.small_basis]
        rank_of = {b: pos for pos, b in enumerate(small)}
        spos = [rank_of[b] for b in order]
        i = _permute(c.i, perm, spos)
        q = _permute(c.q, spos, perm)
        T = _permute(c.T, perm, perm)
        ds = _permute(c.small_differential, spos, spos)
        c = ModuleContraction(d, i, q, T, small_differential=ds, small_basis=small)
    else:
        c = _build(d)

    if not c.small_differential.is_zero():
        raise ContractionInvalid("residual differential after reduction")
    if c.failures():
        c = _normalize(c)
        c.verify()
    if gradings is not None:
        small_g = [gradings[b] for b in c.small_basis]
        _check_map_degree(c.i, small_g, gradings, 0, "i")
        _check_map_degree(c.q, gradings, small_g, 0, "q")
        _check_degree(c.T, gradings, -1, "T")
    return c


def _check_map_degree(m: F2Matrix, src_g, tgt_g, shift: int, name: str) -> None:
    for r, col in m.entries():
        a, b = src_g[col], tgt_g[r]
        if b[0] - a[0] != shift or tuple(a[1:]) != tuple(b[1:]):
            raise ContractionInvalid(f"{name} breaks grading at entry ({r}, {col})")


def _check_degree(m: F2Matrix, gradings, shift: int, name: str) -> None:
    _check_map_degree(m, gradings, gradings, shift, name)


def inverse(m: F2Matrix) -> F2Matrix:
    """Inverse of a square invertible matrix (Gauss-Jordan on bit rows)."""
    n = m.nrows
    if m.ncols != n:
        raise ValueError("matrix must be square")
    rows = m.row_bits()
    aug = [r | (1 << (n + i)) for i, r in enumerate(rows)]
    for col in range(n):
        bit = 1 << col
        piv = next((k for k in range(col, n) if aug[k] & bit), None)
        if piv is None:
            raise ValueError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        for k in range(n):
            if k != col and aug[k] & bit:
                aug[k] ^= aug[col]
    entries = [(i, j) for i in range(n) for j in range(n) if (aug[i] >> (n + j)) & 1]
    return F2Matrix.from_entries(n, n, entries)
