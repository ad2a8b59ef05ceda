"""Acceptance criteria, one test each.  Every test prints one PASS/FAIL line."""
import itertools
import random
import time

from annular_linfty.akh import (ckh_module, ckh_wedge_module, compute_akh, invariance_report,
                                k2_rank_profile)
from annular_linfty.cli import main
from annular_linfty.complex import KhovanovComplex
from annular_linfty.f2 import F2Matrix
from annular_linfty.homology import contract_onto_homology
from annular_linfty.lie import dg_contraction
from annular_linfty.linfty import (LInftyAlgebra, check_module_relation, transfer_algebra,
                                   transfer_module)
from annular_linfty.suite import operator_action, random_contraction, random_strict_module

from factory import corpus, random_graded_complex, shipped, small_corpus

PAIRS = ["ri_pos", "ri_neg", "rii", "riii", "riii_mixed"]


def report(n: int, ok: bool, detail: str) -> None:
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def bracket_corpus():
    """All shipped diagrams plus every one and two crossing braid closure."""
    return list(shipped().items()) + [(f"small_{k}", dg) for k, dg in enumerate(small_corpus())]


def test_criterion_1_trefoil_k3():
    start = time.time()
    left = compute_akh(shipped()["trefoil_left_axis"])
    cx = left.complex
    z = cx.find("000", "000")
    assert cx.label(z) == "000:w-w-w-"
    cls = left.contraction.q.column(z)
    survives = bool(cls)
    k3 = left.k3("v2", "v-2")
    image = set()
    for b in cls:
        image ^= set(k3.column(b))
    left_ok = survives and bool(image)

    right = compute_akh(shipped()["trefoil_right_axis"])
    grads = right.small_gradings()
    lowest = min(g[0] for g in grads)
    low_cols = [b for b, g in enumerate(grads) if g[0] == lowest]
    k3r = right.k3("v2", "v-2")
    right_ok = all(not k3r.column(b) for b in low_cols)
    elapsed = time.time() - start
    report(1, left_ok and right_ok and elapsed < 5,
           f"left: class of w-w-w- survives={survives}, k3(v2,v-2) nonzero on it={bool(image)}; "
           f"right: k3(v2,v-2) zero in lowest degree={right_ok}; {elapsed:.2f}s")


def test_criterion_2_chain_level_k3_is_lee0():
    bad = []
    for name, dg in shipped().items():
        cx = KhovanovComplex(dg)
        if not ckh_wedge_module(cx, 3).by_name("v2", "v-2") == cx.matrix("lee0"):
            bad.append(name)
    report(2, not bad, f"{len(shipped())} shipped diagrams, mismatches: {bad}")


def test_criterion_3_algebra_transfer():
    start = time.time()
    c = dg_contraction()
    big = LInftyAlgebra.from_lie(c.big, differential="d")
    small, I = transfer_algebra(big, c.contraction, c.small.names, 5)
    key = tuple(sorted((small.index("v2"), small.index("v-2"))))
    i2 = big.names_of(I[2].get(key, 0))
    tuples = {n: sum(1 for _ in itertools.combinations_with_replacement(range(small.dim), n))
              for n in (3, 4, 5)}
    nonzero = {n: len(small.ops.get(n, {})) for n in (3, 4, 5)}
    elapsed = time.time() - start
    ok = i2 == ["D"] and not any(nonzero.values()) and elapsed < 1
    report(3, ok, f"I2(v2,v-2)={i2}; nonzero l'_n on {tuples} tuples: {nonzero}; {elapsed:.2f}s")


def test_criterion_4_bracket_dictionary():
    alg = dg_contraction().big
    failures = []
    checked = 0
    diagrams = bracket_corpus()
    for name, dg in diagrams:
        cx = KhovanovComplex(dg)
        rho = operator_action(cx)
        M = cx.matrix
        comm = lambda a, b: a @ b + b @ a
        if not comm(M("d0"), M("lee0")) == comm(M("leeplus"), M("dminus")):
            failures.append((name, "[d0, lee0] = [leeplus, dminus]"))
        if not comm(M("e"), M("dminus")) == comm(M("f"), M("leeplus")):
            failures.append((name, "[e, dminus] = [f, leeplus]"))
        for a, b in itertools.combinations_with_replacement(range(alg.dim), 2):
            rhs = F2Matrix.zeros(cx.dim, cx.dim)
            for c in alg.names_of(alg.bracket_basis(a, b)):
                rhs = rhs + rho[c]
            checked += 1
            if not comm(rho[alg.names[a]], rho[alg.names[b]]) == rhs:
                failures.append((name, f"[{alg.names[a]}, {alg.names[b]}]"))
        for y in ("d0", "dminus", "lee0", "leeplus"):
            checked += 1
            if not (M(y) @ M(y)).is_zero():
                failures.append((name, f"{y}^2 = 0"))
    report(4, not failures, f"{len(diagrams)} diagrams, {checked} bracket identities, "
                            f"failures: {failures[:5]}")


def test_criterion_5_module_relations():
    failures = []
    diagrams = corpus()
    for name, dg in diagrams:
        cx = KhovanovComplex(dg)
        strict = ckh_module(cx)
        if check_module_relation(strict, 4):
            failures.append((name, "strict"))
        wedge = ckh_wedge_module(strict, 4)
        if check_module_relation(wedge, 4):
            failures.append((name, "restricted"))
        res = compute_akh(cx, n_max=4)
        if res.relation_report:
            failures.append((name, "transferred"))
    report(5, not failures, f"{len(diagrams)} diagrams, n_max=4, failures: {failures[:5]}")


def test_criterion_6_contraction_side_conditions():
    rng = random.Random(6)
    failures = []
    count = 0
    for trial in range(200):
        d, grads, _ = random_graded_complex(rng, 64)
        for pivot in ("canonical", "reverse"):
            c = contract_onto_homology(d, grads, pivot=pivot)
            count += 1
            if c.failures():
                failures.append((trial, pivot, c.failures()))
    for name, dg in corpus():
        cx = KhovanovComplex(dg)
        for pivot in ("canonical", "reverse"):
            c = contract_onto_homology(cx.matrix("d0"), cx.gradings(), pivot=pivot)
            count += 1
            if c.failures():
                failures.append((name, pivot, c.failures()))
    report(6, not failures, f"{count} contractions (200 random complexes x 2 pivots plus corpus), "
                            f"failures: {failures[:3]}")


def test_criterion_7_reidemeister_invariance():
    start = time.time()
    ship = shipped()
    bad = []
    for pair in PAIRS:
        rep = invariance_report(ship[f"{pair}_before"], ship[f"{pair}_after"])
        if not rep.all_equal:
            bad.append((pair, rep.dims_equal, rep.k2_profiles_equal))
    elapsed = time.time() - start
    report(7, not bad and elapsed < 30, f"pairs {PAIRS}, mismatches: {bad}; {elapsed:.2f}s")


def test_criterion_8_micro_oracle():
    rng = random.Random(8)
    trials, mismatches, pairs, nonzero = 100, 0, 0, 0
    for _ in range(trials):
        mod = random_strict_module(rng)
        c = random_contraction(mod, rng)
        small = transfer_module(mod, c, 3)
        for a, b in itertools.combinations_with_replacement(range(mod.algebra.dim), 2):
            ka, kb = mod.op_or_zero(2, (a,)), mod.op_or_zero(2, (b,))
            closed = c.q @ ka @ c.T @ kb @ c.i + c.q @ kb @ c.T @ ka @ c.i
            pairs += 1
            nonzero += not closed.is_zero()
            if not small.op_or_zero(3, (a, b)) == closed:
                mismatches += 1
    report(8, mismatches == 0 and trials >= 100,
           f"{trials} trials, {pairs} argument pairs ({nonzero} with nonzero k3'), "
           f"{mismatches} mismatches")


def test_criterion_9_determinism(capsys):
    names = ["trefoil_left_axis", "riii_mixed_before", "rii_after"]
    differ = []
    for name in names:
        outs = []
        for jobs in ("1", "8"):
            code = main(["compute", name, "--jobs", jobs])
            outs.append((code, capsys.readouterr().out.encode()))
        if outs[0] != outs[1] or outs[0][0] != 0:
            differ.append(name)
    pivot_bad = []
    for name, dg in corpus():
        a = compute_akh(dg, n_max=3, pivot="canonical")
        b = compute_akh(dg, n_max=3, pivot="reverse")
        if a.graded_dims != b.graded_dims or k2_rank_profile(a) != k2_rank_profile(b):
            pivot_bad.append(name)
    report(9, not differ and not pivot_bad,
           f"jobs 1 vs 8 byte-identical on {names}: differ={differ}; "
           f"pivot canonical vs reverse on {len(corpus())} diagrams: differ={pivot_bad}")
