"""Finite-dimensional Lie superalgebras over F2.

Vectors in an algebra are Python integers used as bitsets: bit k is the
coefficient of basis element k.  Brackets are stored as structure
constants reduced mod 2; over F2 super-symmetry means [x, y] = [y, x].
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .f2 import F2Matrix
from .homology import ModuleContraction

BUILTIN_NAMES = ("sl2", "sl2wedge", "sl2wedge_dg", "H_sl2wedge_dg")


def bits(v: int) -> List[int]:
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


class LieSuperAlgebra:
    """Basis names with Z-degrees and a symmetric mod-2 bracket table."""

    def __init__(self, name: str, names: Sequence[str], degrees: Sequence[int],
                 brackets: Mapping[Tuple[str, str], Iterable[str]], validate: bool = True):
        if len(names) != len(degrees) or len(set(names)) != len(names):
            raise ValueError("basis names must be distinct and match degrees")
        self.name = name
        self.names: Tuple[str, ...] = tuple(names)
        self.degrees: Tuple[int, ...] = tuple(int(x) for x in degrees)
        self._index = {n: k for k, n in enumerate(self.names)}
        self.structure: Dict[Tuple[int, int], int] = {}
        for (a, b), value in brackets.items():
            vec = 0
            for c in value:
                vec ^= 1 << self._index[c]
            ia, ib = self._index[a], self._index[b]
            self.structure[(ia, ib)] = vec
            if (ib, ia) not in brackets and (self.names[ib], self.names[ia]) not in brackets:
                self.structure[(ib, ia)] = vec
        self.structure = {k: v for k, v in self.structure.items() if v}
        if validate:
            problems = self.problems()
            if problems:
                raise ValueError(f"{name}: " + "; ".join(problems[:5]))

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self._index[name]

    def parity(self, k: int) -> int:
        return self.degrees[k] % 2

    def vector(self, *names: str) -> int:
        v = 0
        for n in names:
            v ^= 1 << self._index[n]
        return v

    def names_of(self, vec: int) -> List[str]:
        return [self.names[k] for k in bits(vec)]

    def bracket_basis(self, a: int, b: int) -> int:
        return self.structure.get((a, b), 0)

    def bracket(self, u: int, v: int) -> int:
        out = 0
        for a in bits(u):
            for b in bits(v):
                out ^= self.structure.get((a, b), 0)
        return out

    def problems(self) -> List[str]:
        out = []
        for (a, b), vec in sorted(self.structure.items()):
            if self.structure.get((b, a), 0) != vec:
                out.append(f"[{self.names[a]},{self.names[b]}] not symmetric")
            for c in bits(vec):
                if self.degrees[c] != self.degrees[a] + self.degrees[b]:
                    out.append(f"[{self.names[a]},{self.names[b]}] not degree-additive")
        for t in check_super_jacobi(self):
            out.append("Jacobi fails on " + ",".join(t))
        return out

    def with_entry_flipped(self, a: str, b: str, c: str) -> "LieSuperAlgebra":
        """Copy with the coefficient of c in [a, b] = [b, a] toggled (unvalidated)."""
        table = {(self.names[x], self.names[y]): set(self.names_of(v))
                 for (x, y), v in self.structure.items()}
        for key in {(a, b), (b, a)}:
            table[key] = table.get(key, set()) ^ {c}
        return LieSuperAlgebra(self.name + "*", self.names, self.degrees,
                               {k: sorted(v) for k, v in table.items()}, validate=False)

    def adjoint(self, y: int) -> F2Matrix:
        """Matrix of [y, .] on the basis."""
        cols = [bits(self.bracket(y, 1 << k)) for k in range(self.dim)]
        return F2Matrix.from_columns(self.dim, cols)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "basis": [{"name": n, "degree": d, "parity": d % 2}
                      for n, d in zip(self.names, self.degrees)],
            "brackets": [{"args": [self.names[a], self.names[b]],
                          "value": self.names_of(v)}
                         for (a, b), v in sorted(self.structure.items()) if a <= b],
        }


def check_super_jacobi(alg: LieSuperAlgebra) -> List[Tuple[str, str, str]]:
    """Basis triples (x, y, z) with [x,[y,z]] + [y,[z,x]] + [z,[x,y]] != 0."""
    bad = []
    n = alg.dim
    for x, y, z in itertools.product(range(n), repeat=3):
        total = (alg.bracket(1 << x, alg.bracket_basis(y, z))
                 ^ alg.bracket(1 << y, alg.bracket_basis(z, x))
                 ^ alg.bracket(1 << z, alg.bracket_basis(x, y)))
        if total:
            bad.append((alg.names[x], alg.names[y], alg.names[z]))
    return bad


_SL2_BASIS = (("e", 0), ("f", 0), ("h", 0))

_TABLES = {
    "sl2": (_SL2_BASIS, {("e", "f"): ["h"]}),
    "sl2wedge": (_SL2_BASIS + (("v2", 1), ("v-2", 1), ("v0", 1)),
                 {("e", "f"): ["h"], ("e", "v-2"): ["v0"], ("f", "v2"): ["v0"]}),
    "sl2wedge_dg": (_SL2_BASIS + (("v2", 1), ("v-2", 1), ("v0~", 1),
                                  ("d", 1), ("D", 1), ("x", 2)),
                    {("e", "f"): ["h"], ("e", "v-2"): ["v0~"], ("f", "v2"): ["v0~"],
                     ("v2", "v-2"): ["x"], ("d", "D"): ["x"]}),
    "H_sl2wedge_dg": (_SL2_BASIS + (("v2", 1), ("v-2", 1), ("v0~", 1), ("d", 1)),
                      {("e", "f"): ["h"], ("e", "v-2"): ["v0~"], ("f", "v2"): ["v0~"]}),
}


def builtin_algebra(name: str) -> LieSuperAlgebra:
    """One of sl2, sl2wedge, sl2wedge_dg, H_sl2wedge_dg with mod-2 brackets.

    Integral structure constants such as [h, e] = 2e or [e, v0~] = -2 v2
    vanish after reduction and are simply absent from the tables.
    """
    if name not in _TABLES:
        raise KeyError(f"unknown algebra {name!r}; choose from {BUILTIN_NAMES}")
    basis, table = _TABLES[name]
    names = [b[0] for b in basis]
    degrees = [b[1] for b in basis]
    return LieSuperAlgebra(name, names, degrees, table)


@dataclass
class AlgebraContraction:
    """Contraction of a dg Lie superalgebra (differential [d, .]) onto its homology.

    ``contraction`` packages (i, q, K) with the
    big differential so that the generic side-condition checks apply.
    """

    big: LieSuperAlgebra
    small: LieSuperAlgebra
    differential_element: str
    contraction: ModuleContraction

    @property
    def i(self) -> F2Matrix:
        return self.contraction.i

    @property
    def q(self) -> F2Matrix:
        return self.contraction.q

    @property
    def K(self) -> F2Matrix:
        return self.contraction.T

    def side_conditions(self) -> Dict[str, bool]:
        return self.contraction.side_conditions()


def dg_contraction() -> AlgebraContraction:
    """Contraction of sl2wedge_dg onto the span of {e,f,h,v2,v-2,v0~,d}.

    i is the inclusion, q kills x and D, and K sends x to D (the sign of
    -D disappears mod 2) and everything else to 0.
    """
    big = builtin_algebra("sl2wedge_dg")
    small = builtin_algebra("H_sl2wedge_dg")
    diff = big.adjoint(big.vector("d"))
    inc = [[big.index(n)] for n in small.names]
    i = F2Matrix.from_columns(big.dim, inc)
    q = i.T
    K = F2Matrix.from_entries(big.dim, big.dim, [(big.index("D"), big.index("x"))])
    c = ModuleContraction(diff, i, q, K, small_basis=[big.index(n) for n in small.names])
    c.verify()
    return AlgebraContraction(big, small, "d", c)
