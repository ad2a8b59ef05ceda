"""Identity suites driven by the ``verify`` and ``selftest`` commands.

Each check yields a :class:`Check` record; a suite passes iff every
record passes.  Nothing here raises on a failed identity.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

from .akh import _transferred, ckh_module, ckh_wedge_module, dg_algebra
from .complex import OPERATOR_KINDS, KhovanovComplex
from .diagram import make_diagram
from .errors import AnnularError
from .f2 import F2Matrix
from .homology import ModuleContraction, contract_onto_homology, inverse, rank
from .lie import BUILTIN_NAMES, builtin_algebra, check_super_jacobi, dg_contraction
from .linfty import (LInftyAlgebra, LInftyModuleOps, check_algebra_morphism,
                     check_algebra_relation, check_module_morphism, check_module_relation,
                     extend_inclusion, grading_violations, identity_morphism, set_partitions,
                     transfer_module, unshuffles)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    count: int = 1

    def line(self) -> str:
        tail = f": {self.detail}" if self.detail else ""
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}{tail}"

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail,
                "count": self.count}


def _comm(a: F2Matrix, b: F2Matrix) -> F2Matrix:
    return a @ b + b @ a


def _guard(name: str, fn: Callable[[], List[Check]]) -> List[Check]:
    try:
        return fn()
    except AnnularError as exc:
        return [Check(name, False, f"{type(exc).__name__}: {exc}")]


# ----------------------------------------------------------- verify on CKh

def operator_action(cx: KhovanovComplex) -> Dict[str, F2Matrix]:
    """Operators on CKh assigned to the basis of sl2wedge_dg."""
    M = cx.matrix
    return {
        "e": M("e"), "f": M("f"), "h": M("h"),
        "v2": M("leeplus"), "v-2": M("dminus"), "v0~": _comm(M("e"), M("dminus")),
        "d": M("d0"), "D": M("lee0"), "x": _comm(M("d0"), M("lee0")),
    }


def square_checks(cx: KhovanovComplex) -> List[Check]:
    M = cx.matrix
    lee = M("lee0") + M("leeplus")
    out = [Check("d^2 = 0", (M("d") @ M("d")).is_zero()),
           Check("d0^2 = 0", (M("d0") @ M("d0")).is_zero()),
           Check("(d + lee)^2 = 0", ((M("d") + lee) @ (M("d") + lee)).is_zero())]
    for name in ("dminus", "lee0", "leeplus"):
        out.append(Check(f"{name}^2 = 0", (M(name) @ M(name)).is_zero()))
    return out


def bidegree_checks(cx: KhovanovComplex) -> List[Check]:
    out = []
    for name in OPERATOR_KINDS:
        op = cx.operator(name)
        bad = op.bidegree_violations(cx.generators)
        out.append(Check(f"bidegree of {name}", not bad, f"{len(bad)} entries" if bad else ""))
    return out


def bracket_checks(cx: KhovanovComplex) -> List[Check]:
    """[rho(a), rho(b)] = rho([a, b]) for all pairs of basis elements."""
    M = cx.matrix
    rho = operator_action(cx)
    alg = builtin_algebra("sl2wedge_dg")
    zero = F2Matrix.zeros(cx.dim, cx.dim)
    out = [Check("[e, dminus] = [f, leeplus]", rho["v0~"] == _comm(M("f"), M("leeplus"))),
           Check("[leeplus, dminus] = [d0, lee0]", _comm(M("leeplus"), M("dminus")) == rho["x"])]
    for a, b in itertools.combinations_with_replacement(range(alg.dim), 2):
        lhs = _comm(rho[alg.names[a]], rho[alg.names[b]])
        rhs = zero
        for c in alg.names_of(alg.bracket_basis(a, b)):
            rhs = rhs + rho[c]
        out.append(Check(f"[{alg.names[a]}, {alg.names[b]}]", lhs == rhs))
    for y in ("v2", "v-2", "d", "D"):
        out.append(Check(f"{y} acts with square zero", (rho[y] @ rho[y]).is_zero()))
    out.append(Check("v0~ acts with square x", rho["v0~"] @ rho["v0~"] == rho["x"]))
    return out


def module_checks(cx: KhovanovComplex, n_max: int, pivot: str = "canonical",
                  jobs: int = 1) -> List[Check]:
    out = []
    try:
        strict = ckh_module(cx)
    except AnnularError as exc:
        return [Check("strict sl2wedge_dg module", False, f"{type(exc).__name__}: {exc}")]
    bad = check_module_relation(strict, n_max, jobs=jobs)
    out.append(Check(f"strict sl2wedge_dg module relation (n <= {n_max})", not bad,
                     "; ".join(map(str, bad[:3]))))
    wedge = ckh_wedge_module(strict, n_max)
    bad = check_module_relation(wedge, n_max, jobs=jobs)
    out.append(Check(f"restricted sl2wedge module relation (n <= {n_max})", not bad,
                     "; ".join(map(str, bad[:3]))))
    k3 = wedge.by_name("v2", "v-2")
    out.append(Check("k3(v2, v-2) = lee0 on CKh", k3 == cx.matrix("lee0")))
    for label, mod in (("strict", strict), ("restricted", wedge)):
        g = grading_violations(mod, n_max)
        out.append(Check(f"{label} module operation degrees", not g, str(g[:3]) if g else ""))
    try:
        c = contract_onto_homology(cx.matrix("d0"), cx.gradings(), pivot=pivot)
    except AnnularError as exc:
        out.append(Check("contraction onto homology", False, f"{type(exc).__name__}: {exc}"))
        return out
    out.extend(contraction_checks(c))
    if c.failures():
        return out
    small = transfer_module(wedge, c, n_max, jobs=jobs)
    out.append(Check("transferred k1 = 0", small.op_or_zero(1, ()).is_zero()))
    bad = check_module_relation(small, n_max, jobs=jobs)
    out.append(Check(f"transferred module relation on AKh (n <= {n_max})", not bad,
                     "; ".join(map(str, bad[:3]))))
    g = grading_violations(small, n_max)
    out.append(Check("transferred operation degrees", not g, str(g[:3]) if g else ""))
    return out


def contraction_checks(c: ModuleContraction, prefix: str = "contraction: ") -> List[Check]:
    return [Check(prefix + name, ok) for name, ok in c.side_conditions().items()]


def verify_complex(cx: KhovanovComplex, n_max: int = 4, pivot: str = "canonical",
                   jobs: int = 1) -> List[Check]:
    out: List[Check] = []
    out += _guard("operator squares", lambda: square_checks(cx))
    out += _guard("operator bidegrees", lambda: bidegree_checks(cx))
    out += _guard("bracket dictionary", lambda: bracket_checks(cx))
    out += _guard("module relations", lambda: module_checks(cx, n_max, pivot, jobs))
    return out


def corrupt(cx: KhovanovComplex, name: str) -> None:
    """Toggle one entry of an operator matrix: the first nonzero one, else (0, 0)."""
    m = cx.matrix(name)
    ents = m.entries()
    r, c = ents[0] if ents else (0, 0)
    flip = F2Matrix.from_entries(m.nrows, m.ncols, [(r, c)])
    cx.replace_operator(name, m + flip)


# ---------------------------------------------------------------- selftest

def lie_checks() -> List[Check]:
    out = []
    for name in BUILTIN_NAMES:
        alg = builtin_algebra(name)
        bad = check_super_jacobi(alg)
        n = math.comb(alg.dim + 2, 3)
        out.append(Check(f"super Jacobi on {name}", not bad, str(bad[:3]) if bad else "", n))
        probs = alg.problems()
        out.append(Check(f"bracket table of {name}", not probs, "; ".join(probs[:3])))
    dgc = dg_contraction()
    out += contraction_checks(dgc.contraction, "dg contraction: ")
    big = LInftyAlgebra.from_lie(dgc.big, differential="d")
    big_bad = check_algebra_relation(big, 3)
    out.append(Check("dg algebra generalized Jacobi (n <= 3)", not big_bad))
    return out


def transfer_algebra_checks(n_max: int = 5) -> List[Check]:
    n_max = max(3, n_max)
    small, I = _transferred(n_max)
    dgc = dg_contraction()
    big = LInftyAlgebra.from_lie(dgc.big, differential="d")
    out = []
    x = small.index("v2"), small.index("v-2")
    got = I.get(2, {}).get(tuple(sorted(x)), 0)
    out.append(Check("I2(v2, v-2) = D", got == big.vector("D")))
    for n in range(3, n_max + 1):
        nz = [a for a, v in small.ops.get(n, {}).items() if v]
        cnt = math.comb(small.dim + n - 1, n)
        out.append(Check(f"transferred l{n} = 0", not nz, f"{len(nz)} nonzero" if nz else "", cnt))
    H = LInftyAlgebra.from_lie(builtin_algebra("H_sl2wedge_dg"))
    l2_same = all(small.op(2, a) == H.op(2, a)
                  for a in itertools.combinations_with_replacement(range(small.dim), 2))
    out.append(Check("transferred l2 = bracket of H_sl2wedge_dg", l2_same))
    l1_zero = all(not small.op(1, (a,)) for a in range(small.dim))
    out.append(Check("transferred l1 = 0", l1_zero))
    bad = check_algebra_morphism(I, small, big, min(n_max, 4))
    out.append(Check(f"transferred inclusion is a morphism (n <= {min(n_max, 4)})", not bad))
    return out


def combinatorics_checks(n_max: int = 8) -> List[Check]:
    out = []
    total = ok = 0
    for n in range(0, n_max + 1):
        for p in range(0, n + 1):
            total += 1
            ok += len(unshuffles(p, n - p)) == math.comb(n, p)
    out.append(Check(f"two-block unshuffle counts (n <= {n_max})", ok == total, count=total))
    total = ok = 0
    for n in range(1, min(n_max, 6) + 1):
        for sizes in itertools.product(range(n + 1), repeat=3):
            if sum(sizes) != n:
                continue
            total += 1
            expect = math.factorial(n) // math.prod(math.factorial(s) for s in sizes)
            ok += len(unshuffles(*sizes)) == expect
    out.append(Check("three-block unshuffle counts (multinomials)", ok == total, count=total))
    bell = [1, 1, 2, 5, 15, 52, 203, 877, 4140]
    ok = all(len(set_partitions(n)) == bell[n] for n in range(min(n_max, 8) + 1))
    out.append(Check("set partition counts (Bell numbers)", ok, count=min(n_max, 8) + 1))
    return out


def micro_diagrams():
    """Small diagrams (CKh dimension <= 6) used as seeds for random strict modules."""
    out = [make_diagram([], 0, [], [1]), make_diagram([], 0, [], [0]),
           make_diagram([], 0, [], [1, 1]), make_diagram([], 0, [], [1, 0])]
    shapes = ([[0, 0, 1, 1]], [[0, 1, 1, 0]])
    for q in shapes:
        for axis in ([], [[0, 1]], [[1, 1]]):
            out.append(make_diagram(q, 2, axis))
    return out


def _random_invertible(n: int, rng: random.Random) -> F2Matrix:
    while True:
        ents = [(r, c) for r in range(n) for c in range(n) if rng.random() < 0.5]
        m = F2Matrix.from_entries(n, n, ents)
        if rank(m) == n:
            return m


def random_strict_module(rng: random.Random, seeds: Optional[Sequence] = None) -> LInftyModuleOps:
    """A CKh micro module conjugated by a random change of basis."""
    seeds = seeds if seeds is not None else micro_diagrams()
    strict = ckh_module(KhovanovComplex(rng.choice(seeds)))
    P = _random_invertible(strict.dim, rng)
    Pi = inverse(P)
    ops = {n: {a: P @ m @ Pi for a, m in t.items()} for n, t in strict.ops.items()}
    return LInftyModuleOps(strict.algebra, strict.dim, ops)


def random_contraction(mod: LInftyModuleOps, rng: random.Random) -> ModuleContraction:
    """Gaussian-elimination contraction followed by a random automorphism of the small side."""
    c = contract_onto_homology(mod.op_or_zero(1, ()), pivot=rng.choice(["canonical", "reverse"]))
    if c.small_dim == 0:
        return c
    S = _random_invertible(c.small_dim, rng)
    return ModuleContraction(c.differential, c.i @ S, inverse(S) @ c.q, c.T)


def closed_form_k3(mod: LInftyModuleOps, c: ModuleContraction, a: int, b: int) -> F2Matrix:
    """q k2(a) T k2(b) i + q k2(b) T k2(a) i for a strict module."""
    ka, kb = mod.op_or_zero(2, (a,)), mod.op_or_zero(2, (b,))
    return c.q @ ka @ c.T @ kb @ c.i + c.q @ kb @ c.T @ ka @ c.i


def micro_oracle_checks(trials: int = 100, seed: int = 0, n_max: int = 4) -> List[Check]:
    rng = random.Random(seed)
    seeds = micro_diagrams()
    pairs = k3_ok = rel_ok = mor_ok = side_ok = 0
    rel_trials = min(trials, 5)
    for t in range(trials):
        mod = random_strict_module(rng, seeds)
        c = random_contraction(mod, rng)
        side_ok += not c.failures()
        small = transfer_module(mod, c, 3)
        L = mod.algebra
        good = True
        for a, b in itertools.combinations_with_replacement(range(L.dim), 2):
            pairs += 1
            good &= small.op_or_zero(3, (a, b)) == closed_form_k3(mod, c, a, b)
        k3_ok += good
        if t < rel_trials:
            big_small = transfer_module(mod, c, n_max)
            rel_ok += not check_module_relation(big_small, n_max)
            h = extend_inclusion(mod, c, n_max)
            mor_ok += not check_module_morphism(h, big_small, mod, n_max)
    return [
        Check("random contraction side conditions", side_ok == trials, f"{side_ok}/{trials}", trials),
        Check("transferred k3 matches closed form", k3_ok == trials, f"{k3_ok}/{trials} trials",
              pairs),
        Check(f"transferred module relation (n <= {n_max})", rel_ok == rel_trials,
              f"{rel_ok}/{rel_trials}", rel_trials),
        Check(f"extended inclusion is a module morphism (n <= {n_max})", mor_ok == rel_trials,
              f"{mor_ok}/{rel_trials}", rel_trials),
    ]


def selftest(n_max: int = 4, trials: int = 100, seed: int = 0) -> List[Check]:
    out: List[Check] = []
    out += _guard("lie", lie_checks)
    out += _guard("transfer algebra", lambda: transfer_algebra_checks(max(5, n_max)))
    out += _guard("combinatorics", lambda: combinatorics_checks(8))
    out += _guard("micro oracle", lambda: micro_oracle_checks(trials, seed, n_max))
    return out


def dump_tables() -> dict:
    return {name: builtin_algebra(name).to_json() for name in BUILTIN_NAMES}


__all__ = ["Check", "verify_complex", "selftest", "corrupt", "dump_tables",
           "closed_form_k3", "random_strict_module", "random_contraction", "dg_algebra"]
