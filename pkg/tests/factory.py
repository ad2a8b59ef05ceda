"""Diagram generators used only by the tests.

Braid closures: strands run upward, the closure arc goes around the
braid axis, and the reference arc from the axis crosses every strand
once at the bottom seam.
"""
from __future__ import annotations

import itertools
import random
from importlib import resources
from typing import Dict, List, Sequence, Tuple

from annular_linfty.diagram import AnnularDiagram, make_diagram, parse_apd
from annular_linfty.f2 import F2Matrix
from annular_linfty.homology import inverse, rank


def braid_closure(word: Sequence[int], strands: int, axis: bool = True) -> AnnularDiagram:
    """Closure of a braid word; +i is sigma_i (positive), -i its inverse.

    With ``axis`` the braid axis is the annulus core; otherwise the
    basepoint sits outside the closed braid and every circle is trivial.
    """
    init = list(range(strands))
    cur = list(init)
    nxt = strands
    crossings: List[List[int]] = []
    signs: List[int] = []
    for g in word:
        i = abs(g)
        left, right = cur[i - 1], cur[i]
        new_left, new_right = nxt, nxt + 1
        nxt += 2
        if g > 0:
            crossings.append([right, new_right, new_left, left])
            signs.append(1)
        else:
            crossings.append([left, right, new_right, new_left])
            signs.append(-1)
        cur[i - 1], cur[i] = new_left, new_right
    rename = {cur[p]: init[p] for p in range(strands) if cur[p] != init[p]}
    crossings = [[rename.get(e, e) for e in q] for q in crossings]
    used = sorted({e for q in crossings for e in q})
    relabel = {e: k for k, e in enumerate(used)}
    crossings = [[relabel[e] for e in q] for q in crossings]
    touched = {p for p in range(strands) if cur[p] != init[p]}
    free = [1 if axis else 0 for p in range(strands) if p not in touched]
    ax = [[relabel[init[p]], 1] for p in sorted(touched)] if axis else []
    return make_diagram(crossings, len(used), ax, free, signs)


def kinked(base: AnnularDiagram, edge: int, kind: str) -> AnnularDiagram:
    """Insert a Reidemeister I kink on ``edge`` of a diagram with crossings.

    The edge is split into p (incoming part), l (the kink loop) and a new
    outgoing part o; ``kind`` selects one of the four kink shapes.
    """
    n = base.n_edges
    tail, head = base.edge_direction(edge)
    p, loop, o = edge, n, n + 1
    # the occurrence where the edge enters its head crossing now belongs to o
    crossings = [list(q) for q in base.crossings]
    hc, hpos = divmod(head, 4)
    crossings[hc][hpos] = o
    shapes = {
        "neg_a": [p, loop, loop, o],
        "pos_a": [p, o, loop, loop],
        "neg_b": [loop, p, o, loop],
        "pos_b": [loop, loop, o, p],
    }
    crossings.append(shapes[kind])
    signs = None
    if base.orientation is not None:
        signs = list(base.orientation) + [1 if kind.startswith("pos") else -1]
    axis = [[e, s] for e, s in base.axis_crossings]
    return make_diagram(crossings, n + 2, axis, base.free_loops, signs)


def small_corpus() -> List[AnnularDiagram]:
    """All braid words of length <= 2 on 2 and 3 strands, with and without axis."""
    out = []
    for strands in (2, 3):
        gens = [g for i in range(1, strands) for g in (i, -i)]
        for length in (1, 2):
            for word in itertools.product(gens, repeat=length):
                for axis in (True, False):
                    out.append(braid_closure(word, strands, axis))
    return out


def shipped() -> Dict[str, AnnularDiagram]:
    """Every diagram file shipped with the package, by file stem."""
    root = resources.files("annular_linfty") / "data"
    out = {}
    for ref in sorted(root.iterdir(), key=lambda r: r.name):
        if ref.name.endswith(".apd.json"):
            out[ref.name[:-len(".apd.json")]] = parse_apd(ref.read_text())
    return out


def corpus() -> List[Tuple[str, AnnularDiagram]]:
    """Shipped diagrams, all one and two crossing braid closures, and a few extras."""
    out = sorted(shipped().items())
    out += [(f"small_{k}", dg) for k, dg in enumerate(small_corpus())]
    base = shipped()["trefoil_left_axis"]
    out += [(f"kink_{kind}", kinked(base, 1, kind)) for kind in ("neg_a", "pos_a", "neg_b", "pos_b")]
    out += [("braid_1212", braid_closure([1, 2, 1, 2], 3)),
            ("braid_1-21-2", braid_closure([1, -2, 1, -2], 3))]
    return out


def random_invertible(n: int, rng: random.Random) -> F2Matrix:
    while True:
        m = F2Matrix.from_entries(n, n, [(r, c) for r in range(n) for c in range(n)
                                         if rng.random() < 0.5])
        if rank(m) == n:
            return m


def random_graded_complex(rng: random.Random, max_dim: int = 64):
    """A random complex with known homology: (d, gradings, homology dims by grading).

    Gradings are (degree, weight) pairs.  The complex starts as a direct sum
    of cancelling pairs x -> y plus idle generators, is conjugated by a
    random grading-preserving change of basis, and its basis is shuffled.
    """
    n = rng.randint(1, max_dim)
    top = rng.randint(0, 4)
    grads = [(rng.randint(0, top), rng.randint(0, 1)) for _ in range(n)]
    pool: Dict[tuple, List[int]] = {}
    for idx, g in enumerate(grads):
        pool.setdefault(g, []).append(idx)
    for members in pool.values():
        rng.shuffle(members)
    entries = []
    paired = set()
    for (deg, w), members in sorted(pool.items()):
        targets = [b for b in pool.get((deg + 1, w), []) if b not in paired]
        free = [a for a in members if a not in paired]
        for a, b in zip(free, targets):
            if rng.random() < 0.7:
                entries.append((b, a))
                paired.update((a, b))
    d = F2Matrix.from_entries(n, n, entries)
    P_entries = []
    for members in pool.values():
        m = random_invertible(len(members), rng)
        P_entries += [(members[r], members[c]) for r, c in m.entries()]
    P = F2Matrix.from_entries(n, n, P_entries)
    d = P @ d @ inverse(P)
    expected: Dict[tuple, int] = {}
    for idx, g in enumerate(grads):
        if idx not in paired:
            expected[g] = expected.get(g, 0) + 1
    return d, grads, expected
