"""Sign-free L-infinity algebras and modules over F2.

Operations are stored on sorted tuples of algebra basis indices and
extended multilinearly.  Over F2 every operation is symmetric in its
algebra slots, so a k_n table needs only one entry per multiset.

Conventions used throughout:

* an algebra vector is an ``int`` bitset over the algebra basis;
* ``LInftyAlgebra.ops[n][args]`` is l_n on basis elements ``args``;
* ``LInftyModuleOps.ops[n][args]`` is the matrix of k_n(args, -), where
  ``len(args) == n - 1``; missing keys mean the zero map.
"""
from __future__ import annotations

import itertools
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import ContractionInvalid
from .f2 import F2Matrix
from .homology import ModuleContraction
from .lie import LieSuperAlgebra, bits

Args = Tuple[int, ...]
VARIANTS = ("S", "S'", "Sbar")


# ---------------------------------------------------------------- unshuffles

@dataclass(frozen=True)
class Unshuffle:
    """A permutation that is increasing on each block of consecutive slots.

    ``perm[p]`` is the (0-based) input index placed in slot p.
    """

    sizes: Tuple[int, ...]
    perm: Tuple[int, ...]

    def blocks(self) -> List[Tuple[int, ...]]:
        out, start = [], 0
        for s in self.sizes:
            out.append(self.perm[start:start + s])
            start += s
        return out


@lru_cache(maxsize=None)
def _unshuffles(sizes: Tuple[int, ...], variant: str) -> Tuple[Unshuffle, ...]:
    n = sum(sizes)
    if variant != "S":
        if any(s < 1 for s in sizes) or list(sizes) != sorted(sizes):
            return ()
    out = []

    def rec(k: int, remaining: Tuple[int, ...], prefix: Tuple[int, ...], firsts: Tuple[int, ...]):
        if k == len(sizes):
            out.append(prefix)
            return
        for block in itertools.combinations(remaining, sizes[k]):
            if variant != "S" and k > 0 and sizes[k] == sizes[k - 1] and block[0] < firsts[-1]:
                continue
            rest = tuple(x for x in remaining if x not in block)
            rec(k + 1, rest, prefix + block, firsts + (block[0] if block else -1,))

    rec(0, tuple(range(n)), (), ())
    if variant == "Sbar":
        out = [p for p in out if p and p[0] == 0]
    return tuple(Unshuffle(tuple(sizes), p) for p in sorted(out))


def unshuffles(*sizes: int, variant: str = "S") -> List[Unshuffle]:
    """All (i1, ..., ir)-unshuffles, lexicographically sorted.

    ``S`` is the plain family (blocks of size 0 are allowed there and
    contribute empty blocks); ``S'`` additionally requires nondecreasing
    block sizes with equal-size neighbours ordered by their first element;
    ``Sbar`` is ``S'`` with the extra condition that slot 1 holds input 1.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    return list(_unshuffles(tuple(int(s) for s in sizes), variant))


@lru_cache(maxsize=None)
def integer_partitions(n: int) -> Tuple[Tuple[int, ...], ...]:
    """Nondecreasing tuples of positive integers summing to n."""
    out = []

    def rec(rem: int, least: int, acc: Tuple[int, ...]):
        if rem == 0:
            out.append(acc)
            return
        for part in range(least, rem + 1):
            rec(rem - part, part, acc + (part,))

    rec(n, 1, ())
    return tuple(out)


@lru_cache(maxsize=None)
def set_partitions(n: int) -> Tuple[Tuple[Tuple[int, ...], ...], ...]:
    """Unordered set partitions of range(n), via S' over all sorted size vectors."""
    out = []
    for sizes in integer_partitions(n):
        for u in _unshuffles(sizes, "S'"):
            out.append(tuple(u.blocks()))
    return tuple(out)


@lru_cache(maxsize=None)
def _splits(n: int, p: int) -> Tuple[Tuple[Tuple[int, ...], Tuple[int, ...]], ...]:
    """(chosen, rest) slot sets for the (p, n-p)-unshuffles."""
    return tuple((u.perm[:p], u.perm[p:]) for u in _unshuffles((p, n - p), "S"))


def _multiset_key(values) -> Args:
    return tuple(sorted(values))


def _expand(vectors: Sequence[int]) -> List[Args]:
    """Sorted basis tuples (with odd multiplicity) in the expansion of a tensor."""
    counts: Counter = Counter()
    for combo in itertools.product(*[bits(v) for v in vectors]):
        counts[_multiset_key(combo)] += 1
    return [t for t, c in sorted(counts.items()) if c % 2]


def _pmap(fn: Callable, items: Sequence, jobs: int) -> List:
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# -------------------------------------------------------------- the algebras

class LInftyAlgebra:
    """Graded vector space with symmetric operations l_n over F2."""

    def __init__(self, names: Sequence[str], degrees: Sequence[int],
                 ops: Optional[Dict[int, Dict[Args, int]]] = None, name: str = ""):
        self.name = name
        self.names = tuple(names)
        self.degrees = tuple(degrees)
        self._index = {n: k for k, n in enumerate(self.names)}
        self.ops: Dict[int, Dict[Args, int]] = {}
        for n, table in (ops or {}).items():
            clean = {}
            for args, vec in table.items():
                key = _multiset_key(args)
                if vec:
                    clean[key] = vec
            if clean:
                self.ops[n] = clean

    @classmethod
    def from_lie(cls, alg: LieSuperAlgebra, differential: Optional[str] = None) -> "LInftyAlgebra":
        """l1 = [d, .] when ``differential`` names d, l2 = bracket, nothing higher."""
        ops: Dict[int, Dict[Args, int]] = {2: {}}
        for (a, b), vec in alg.structure.items():
            if a <= b:
                ops[2][(a, b)] = vec
        if differential is not None:
            d = 1 << alg.index(differential)
            ops[1] = {(a,): alg.bracket(d, 1 << a) for a in range(alg.dim)}
        return cls(alg.names, alg.degrees, ops, name=alg.name)

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self._index[name]

    def vector(self, *names: str) -> int:
        v = 0
        for n in names:
            v ^= 1 << self._index[n]
        return v

    def names_of(self, vec: int) -> List[str]:
        return [self.names[k] for k in bits(vec)]

    @property
    def max_arity(self) -> int:
        return max(self.ops, default=0)

    def op(self, n: int, args: Sequence[int]) -> int:
        table = self.ops.get(n)
        if not table:
            return 0
        return table.get(_multiset_key(args), 0)

    def evaluate(self, n: int, vectors: Sequence[int]) -> int:
        if n not in self.ops:
            return 0
        out = 0
        for args in _expand(vectors):
            out ^= self.ops[n].get(args, 0)
        return out

    def restricted_to(self, names: Sequence[str]) -> "LInftyAlgebra":
        """Sub-basis with ops whose outputs are re-indexed (the span must be closed)."""
        idx = [self._index[n] for n in names]
        pos = {b: k for k, b in enumerate(idx)}
        ops: Dict[int, Dict[Args, int]] = {}
        for n, table in self.ops.items():
            for args, vec in table.items():
                if all(a in pos for a in args):
                    out = 0
                    for b in bits(vec):
                        if b not in pos:
                            raise ValueError(f"span of {names} not closed under l_{n}")
                        out ^= 1 << pos[b]
                    ops.setdefault(n, {})[tuple(pos[a] for a in args)] = out
        return LInftyAlgebra(names, [self.degrees[b] for b in idx], ops, name=self.name)

    def to_json(self) -> dict:
        return {"basis": list(self.names), "degrees": list(self.degrees),
                "ops": {str(n): [{"args": [self.names[a] for a in args],
                                  "value": self.names_of(v)}
                                 for args, v in sorted(table.items())]
                        for n, table in sorted(self.ops.items())}}


def check_algebra_relation(alg: LInftyAlgebra, n_max: int) -> List[Tuple[int, Tuple[str, ...]]]:
    """Generalized Jacobi: sum over i + j = n + 1 of l_j(l_i(x_S), x_rest) = 0."""
    bad = []
    for n in range(1, n_max + 1):
        for args in itertools.combinations_with_replacement(range(alg.dim), n):
            total = 0
            for i in range(1, n + 1):
                j = n + 1 - i
                if i not in alg.ops or j not in alg.ops:
                    continue
                for chosen, rest in _splits(n, i):
                    inner = alg.op(i, [args[s] for s in chosen])
                    if inner:
                        total ^= alg.evaluate(j, [inner] + [1 << args[t] for t in rest])
            if total:
                bad.append((n, tuple(alg.names[a] for a in args)))
    return bad


Morphism = Dict[int, Dict[Args, int]]


def morphism_value(f: Morphism, n: int, vectors: Sequence[int]) -> int:
    table = f.get(n)
    if not table:
        return 0
    out = 0
    for args in _expand(vectors):
        out ^= table.get(args, 0)
    return out


def check_algebra_morphism(f: Morphism, source: LInftyAlgebra, target: LInftyAlgebra,
                           n_max: int) -> List[Tuple[int, Tuple[str, ...]]]:
    """Sum f_j(l'_k(x_S), x_rest) + sum over set partitions of l_r(f(B1), ..., f(Br)) = 0."""
    bad = []
    for n in range(1, n_max + 1):
        for args in itertools.combinations_with_replacement(range(source.dim), n):
            total = 0
            for k in range(1, n + 1):
                j = n + 1 - k
                for chosen, rest in _splits(n, k):
                    inner = source.op(k, [args[s] for s in chosen])
                    if inner:
                        total ^= morphism_value(f, j, [inner] + [1 << args[t] for t in rest])
            for blocks in set_partitions(n):
                r = len(blocks)
                if r not in target.ops:
                    continue
                vecs = [morphism_value(f, len(b), [1 << args[s] for s in b]) for b in blocks]
                if all(vecs):
                    total ^= target.evaluate(r, vecs)
            if total:
                bad.append((n, tuple(source.names[a] for a in args)))
    return bad


# --------------------------------------------------------------- the modules

@dataclass
class LInftyModuleOps:
    """Operations k_n on a carrier of dimension ``dim`` over an L-infinity algebra.

    ``gradings`` optionally records a grading tuple per carrier basis
    element whose first entry is the homological (cohomological) degree.
    """

    algebra: LInftyAlgebra
    dim: int
    ops: Dict[int, Dict[Args, F2Matrix]] = field(default_factory=dict)
    gradings: Optional[List[tuple]] = None

    def __post_init__(self):
        clean: Dict[int, Dict[Args, F2Matrix]] = {}
        for n, table in self.ops.items():
            for args, m in table.items():
                if len(args) != n - 1:
                    raise ValueError(f"k_{n} takes {n - 1} algebra arguments")
                if m.shape != (self.dim, self.dim):
                    raise ValueError(f"k_{n}{args} has shape {m.shape}")
                if not m.is_zero():
                    clean.setdefault(n, {})[_multiset_key(args)] = m
        self.ops = clean

    @property
    def max_arity(self) -> int:
        return max(self.ops, default=0)

    def op(self, n: int, args: Sequence[int]) -> Optional[F2Matrix]:
        table = self.ops.get(n)
        if not table:
            return None
        return table.get(_multiset_key(args))

    def op_or_zero(self, n: int, args: Sequence[int]) -> F2Matrix:
        m = self.op(n, args)
        return m if m is not None else F2Matrix.zeros(self.dim, self.dim)

    def evaluate(self, n: int, vectors: Sequence[int]) -> Optional[F2Matrix]:
        table = self.ops.get(n)
        if not table:
            return None
        acc = None
        for args in _expand(vectors):
            m = table.get(args)
            if m is not None:
                acc = m if acc is None else acc + m
        return acc

    def by_name(self, *names: str) -> F2Matrix:
        return self.op_or_zero(len(names) + 1, [self.algebra.index(n) for n in names])

    def table_json(self, n: int) -> dict:
        entries = [{"args": [self.algebra.names[a] for a in args], "matrix": m.to_json()}
                   for args, m in sorted(self.ops.get(n, {}).items())]
        return {"n": n, "entries": entries}


@dataclass
class RelationViolation:
    n: int
    args: Tuple[str, ...]
    columns: List[int]

    def __str__(self) -> str:
        return f"n={self.n} args=({', '.join(self.args)}) columns={self.columns[:8]}"


def _sum(mats: Iterable[Optional[F2Matrix]], dim: int) -> F2Matrix:
    acc = None
    for m in mats:
        if m is not None:
            acc = m if acc is None else acc + m
    return acc if acc is not None else F2Matrix.zeros(dim, dim)


def _bad_columns(m: F2Matrix) -> List[int]:
    return sorted({c for _, c in m.entries()})


def check_module_relation(mod: LInftyModuleOps, n_max: int,
                          algebra: Optional[LInftyAlgebra] = None,
                          jobs: int = 1) -> List[RelationViolation]:
    """Check the sign-free module relation on every basis tuple up to arity n_max.

    At arity n with algebra arguments x_1..x_{n-1} the relation reads
      sum_{p=1}^{n-1} sum_{(p, n-1-p)} k_{n-p+1}(l_p(x_S), x_rest, m)
    + sum_{p=1}^{n}   sum_{(p-1, n-p)} k_{n-p+1}(x_rest, k_p(x_S, m)) = 0.
    """
    L = algebra or mod.algebra
    work = [(n, args) for n in range(1, n_max + 1)
            for args in itertools.combinations_with_replacement(range(L.dim), n - 1)]

    def one(item):
        n, args = item
        m = n - 1
        terms: List[Optional[F2Matrix]] = []
        for p in range(1, n):
            if p not in L.ops:
                continue
            for chosen, rest in _splits(m, p):
                inner = L.op(p, [args[s] for s in chosen])
                if inner:
                    terms.append(mod.evaluate(n - p + 1, [inner] + [1 << args[t] for t in rest]))
        for p in range(1, n + 1):
            for chosen, rest in _splits(m, p - 1):
                inner = mod.op(p, [args[s] for s in chosen])
                if inner is None:
                    continue
                outer = mod.op(n - p + 1, [args[t] for t in rest])
                if outer is not None:
                    terms.append(outer @ inner)
        total = _sum(terms, mod.dim)
        if total.is_zero():
            return None
        return RelationViolation(n, tuple(L.names[a] for a in args), _bad_columns(total))

    return [v for v in _pmap(one, work, jobs) if v is not None]


def check_module_morphism(h: Dict[int, Dict[Args, F2Matrix]], source: LInftyModuleOps,
                          target: LInftyModuleOps, n_max: int) -> List[RelationViolation]:
    """Module homomorphism relation for h: source -> target over one algebra.

      sum_{i<n} h_{n-i+1}(l_i(x_S), x_rest, m) + sum_i h_{n-i+1}(x_rest, k'_i(x_S, m))
    + sum_{r+s=n+1} k_r(x_A, h_s(x_B, m)) = 0,
    with all sums over the corresponding two-block unshuffles.
    """
    L = source.algebra
    rows, cols = target.dim, source.dim

    def h_op(n, args):
        t = h.get(n)
        return None if not t else t.get(_multiset_key(args))

    def h_eval(n, vectors):
        t = h.get(n)
        if not t:
            return None
        acc = None
        for args in _expand(vectors):
            m = t.get(args)
            if m is not None:
                acc = m if acc is None else acc + m
        return acc

    bad = []
    for n in range(1, n_max + 1):
        m = n - 1
        for args in itertools.combinations_with_replacement(range(L.dim), m):
            terms = []
            for i in range(1, n):
                for chosen, rest in _splits(m, i):
                    inner = L.op(i, [args[s] for s in chosen])
                    if inner:
                        terms.append(h_eval(n - i + 1, [inner] + [1 << args[t] for t in rest]))
            for i in range(1, n + 1):
                for chosen, rest in _splits(m, i - 1):
                    inner = source.op(i, [args[s] for s in chosen])
                    outer = h_op(n - i + 1, [args[t] for t in rest])
                    if inner is not None and outer is not None:
                        terms.append(outer @ inner)
            for r in range(1, n + 1):
                s = n + 1 - r
                for chosen, rest in _splits(m, r - 1):
                    outer = target.op(r, [args[a] for a in chosen])
                    inner = h_op(s, [args[b] for b in rest])
                    if inner is not None and outer is not None:
                        terms.append(outer @ inner)
            acc = None
            for t in terms:
                if t is not None:
                    acc = t if acc is None else acc + t
            if acc is not None and not acc.is_zero():
                bad.append(RelationViolation(n, tuple(L.names[a] for a in args),
                                             _bad_columns(acc)))
    return bad


def grading_violations(mod: LInftyModuleOps, n_max: int) -> List[Tuple[int, Tuple[str, ...]]]:
    """k_n(x_1..x_{n-1}) must raise the first grading by sum |x_i| + 2 - n."""
    if mod.gradings is None:
        return []
    bad = []
    for n, table in mod.ops.items():
        if n > n_max:
            continue
        for args, m in table.items():
            shift = sum(mod.algebra.degrees[a] for a in args) + 2 - n
            for r, c in m.entries():
                if mod.gradings[r][0] - mod.gradings[c][0] != shift:
                    bad.append((n, tuple(mod.algebra.names[a] for a in args)))
                    break
    return bad


# ------------------------------------------------------------------ transfer

class _ModuleTransfer:
    """Memoized sums over ordered block sequences for module transfer.

    For a multiset U of algebra arguments, H(U) is the sum over all ordered
    partitions (B_1, ..., B_t) of the argument slots of
        k(B_t) T k(B_{t-1}) T ... T k(B_1) i,
    so that the transferred operation is q H(U) and the extended inclusion
    is T H(U).
    """

    def __init__(self, mod: LInftyModuleOps, c: ModuleContraction):
        self.mod = mod
        self.c = c
        self._memo: Dict[Args, Optional[F2Matrix]] = {}

    def head(self, U: Args) -> Optional[F2Matrix]:
        """T H(U) for nonempty U, i for the empty multiset."""
        if not U:
            return self.c.i
        h = self.H(U)
        return None if h is None else self.c.T @ h

    def H(self, U: Args) -> Optional[F2Matrix]:
        if U in self._memo:
            return self._memo[U]
        size = len(U)
        acc = None
        for r in range(1, size + 1):
            for chosen, rest in _splits(size, r):
                k = self.mod.op(r + 1, [U[s] for s in chosen])
                if k is None:
                    continue
                below = self.head(_multiset_key(U[t] for t in rest))
                if below is None:
                    continue
                term = k @ below
                acc = term if acc is None else acc + term
        if acc is not None and acc.is_zero():
            acc = None
        self._memo[U] = acc
        return acc


def _check_contraction(mod: LInftyModuleOps, c: ModuleContraction) -> None:
    if c.big_dim != mod.dim:
        raise ContractionInvalid("contraction and module carrier differ in size")
    k1 = mod.op_or_zero(1, ())
    if not (k1 == c.differential):
        raise ContractionInvalid("contraction differential is not k1")
    c.verify()


def transfer_module(mod: LInftyModuleOps, c: ModuleContraction, n_max: int,
                    jobs: int = 1) -> LInftyModuleOps:
    """Transferred operations k'_n = q H(x_1..x_{n-1}) on the small carrier."""
    _check_contraction(mod, c)
    engine = _ModuleTransfer(mod, c)
    L = mod.algebra
    ops: Dict[int, Dict[Args, F2Matrix]] = {1: {(): c.q @ mod.op_or_zero(1, ()) @ c.i}}
    for n in range(2, n_max + 1):
        tuples = list(itertools.combinations_with_replacement(range(L.dim), n - 1))

        def one(U):
            h = engine.H(U)
            return None if h is None else c.q @ h

        ops[n] = {U: m for U, m in zip(tuples, _pmap(one, tuples, jobs)) if m is not None}
    gradings = None
    if mod.gradings is not None and c.small_basis:
        gradings = [mod.gradings[b] for b in c.small_basis]
    return LInftyModuleOps(L, c.small_dim, ops, gradings)


def extend_inclusion(mod: LInftyModuleOps, c: ModuleContraction,
                     n_max: int) -> Dict[int, Dict[Args, F2Matrix]]:
    """Morphism components I_1 = i and I_n = T H(x_1..x_{n-1}) for n >= 2."""
    _check_contraction(mod, c)
    engine = _ModuleTransfer(mod, c)
    out: Dict[int, Dict[Args, F2Matrix]] = {1: {(): c.i}}
    for n in range(2, n_max + 1):
        table = {}
        for U in itertools.combinations_with_replacement(range(mod.algebra.dim), n - 1):
            m = engine.head(U)
            if m is not None and not m.is_zero():
                table[U] = m
        out[n] = table
    return out


def restrict_scalars(f: Morphism, mod: LInftyModuleOps, source: LInftyAlgebra,
                     n_max: int) -> LInftyModuleOps:
    """Pull a module over L back along an L-infinity morphism f: source -> L.

    k'_n(x_1..x_{n-1}) = sum over unordered set partitions {B_1..B_r} of the
    slots of k_{r+1}(f(B_1), ..., f(B_r), -).
    """
    ops: Dict[int, Dict[Args, F2Matrix]] = {}
    k1 = mod.op(1, ())
    if k1 is not None:
        ops[1] = {(): k1}
    for n in range(2, n_max + 1):
        table = {}
        for U in itertools.combinations_with_replacement(range(source.dim), n - 1):
            acc = None
            for blocks in set_partitions(n - 1):
                vecs = [morphism_value(f, len(b), [1 << U[s] for s in b]) for b in blocks]
                if not all(vecs):
                    continue
                m = mod.evaluate(len(blocks) + 1, vecs)
                if m is not None:
                    acc = m if acc is None else acc + m
            if acc is not None and not acc.is_zero():
                table[U] = acc
        ops[n] = table
    return LInftyModuleOps(source, mod.dim, ops, mod.gradings)


def identity_morphism(alg: LInftyAlgebra) -> Morphism:
    return {1: {(a,): 1 << a for a in range(alg.dim)}}


def transfer_algebra(big: LInftyAlgebra, c: ModuleContraction, small_names: Sequence[str],
                     n_max: int) -> Tuple[LInftyAlgebra, Morphism]:
    """Transferred operations l'_n = q theta_n and morphism I_n = K theta_n.

    theta_n(x_1..x_n) sums l_k(I_{|B_1|}(x_{B_1}), ..., I_{|B_k|}(x_{B_k}))
    over all unordered set partitions of the n slots into k >= 2 blocks.
    ``c.T`` plays the role of K.
    """
    c.verify()
    if c.big_dim != big.dim:
        raise ContractionInvalid("contraction does not match the algebra")
    l1 = F2Matrix.from_columns(big.dim, [bits(big.op(1, (a,))) for a in range(big.dim)])
    if not (l1 == c.differential):
        raise ContractionInvalid("contraction differential is not l1")

    def as_fn(m: F2Matrix) -> Callable[[int], int]:
        cols = [sum(1 << r for r in col) for col in m.columns()]

        def apply(v: int) -> int:
            out = 0
            for b in bits(v):
                out ^= cols[b]
            return out
        return apply

    i_fn, q_fn, K_fn = as_fn(c.i), as_fn(c.q), as_fn(c.T)
    dim = c.small_dim
    I: Morphism = {1: {(a,): i_fn(1 << a) for a in range(dim)}}
    small_ops: Dict[int, Dict[Args, int]] = {
        1: {(a,): q_fn(big.evaluate(1, [i_fn(1 << a)])) for a in range(dim)}}

    def I_value(args: Args) -> int:
        return I.get(len(args), {}).get(_multiset_key(args), 0)

    for n in range(2, n_max + 1):
        I[n] = {}
        small_ops[n] = {}
        for args in itertools.combinations_with_replacement(range(dim), n):
            theta = 0
            for blocks in set_partitions(n):
                k = len(blocks)
                if k < 2 or k not in big.ops:
                    continue
                vecs = [I_value(tuple(args[s] for s in b)) for b in blocks]
                if all(vecs):
                    theta ^= big.evaluate(k, vecs)
            I[n][args] = K_fn(theta)
            small_ops[n][args] = q_fn(theta)
    small = LInftyAlgebra(small_names, [big.degrees[b] for b in c.small_basis] if c.small_basis
                          else [0] * dim, small_ops)
    I = {n: {a: v for a, v in t.items() if v} for n, t in I.items()}
    return small, I
