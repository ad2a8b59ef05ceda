import json

import pytest

from annular_linfty.akh import (WEDGE_TO_DG, ckh_module, ckh_wedge_module, compute_akh, dg_algebra,
                                invariance_report, k2_rank_profile, wedge_algebra,
                                wedge_to_dg_morphism)
from annular_linfty.complex import KhovanovComplex
from annular_linfty.diagram import make_diagram
from annular_linfty.homology import rank
from annular_linfty.linfty import check_algebra_morphism, check_module_relation

from factory import corpus, shipped

LEFT_TREFOIL_DIMS = {(-3, -9, 0): 1, (-3, -7, 0): 1, (-2, -7, 0): 1, (-2, -5, 0): 1,
                     (-1, -5, 0): 1, (0, -5, -2): 1, (0, -3, 0): 1, (0, -1, 2): 1}


def block_homology(cx):
    """Graded dimensions of H(CKh, d0) from block ranks alone."""
    d0 = cx.matrix("d0")
    blocks = {}
    for idx, key in enumerate(cx.gradings()):
        blocks.setdefault(key, []).append(idx)
    every = list(range(cx.dim))
    out = {}
    for key, cols in blocks.items():
        h = len(cols) - rank(d0.submatrix(every, cols)) - rank(d0.submatrix(cols, every))
        if h:
            out[key] = h
    return out


def test_left_trefoil_graded_dimensions():
    res = compute_akh(shipped()["trefoil_left_axis"])
    assert res.normalized_dims == LEFT_TREFOIL_DIMS
    assert res.relation_report == []


def test_mirror_reverses_all_gradings():
    res = compute_akh(shipped()["trefoil_right_axis"])
    assert res.normalized_dims == {(-i, -j, -k): n for (i, j, k), n in LEFT_TREFOIL_DIMS.items()}


def test_unknot_around_axis():
    res = compute_akh(shipped()["unknot_axis"])
    assert res.normalized_dims == {(0, -1, -1): 1, (0, 1, 1): 1}
    k2 = res.k2_tables
    assert k2["e"].entries() == [(1, 0)] and k2["f"].entries() == [(0, 1)]
    assert all(k2[n].is_zero() for n in ("v2", "v-2", "v0"))


@pytest.mark.parametrize("name,dg", corpus()[:30], ids=[n for n, _ in corpus()[:30]])
def test_graded_dimensions_match_block_ranks(name, dg):
    cx = KhovanovComplex(dg)
    res = compute_akh(cx, n_max=3)
    assert res.graded_dims == block_homology(cx)
    assert res.k1.is_zero()


def test_wedge_morphism_relation():
    f = wedge_to_dg_morphism(4)
    assert check_algebra_morphism(f, wedge_algebra(), dg_algebra(), 4) == []
    v2, vm2 = wedge_algebra().index("v2"), wedge_algebra().index("v-2")
    assert f[2] == {(v2, vm2): dg_algebra().vector("D")}
    assert set(WEDGE_TO_DG.values()) <= set(dg_algebra().names)


def test_restricted_k3_is_lee0():
    cx = KhovanovComplex(shipped()["riii_before"])
    wedge = ckh_wedge_module(cx, 4)
    assert wedge.by_name("v2", "v-2") == cx.matrix("lee0")
    assert check_module_relation(wedge, 4) == []
    assert check_module_relation(ckh_module(cx), 4) == []


def test_json_schema():
    res = compute_akh(shipped()["trefoil_left_axis"])
    doc = json.loads(json.dumps(res.to_json()))
    assert set(doc) == {"diagram", "n_max", "pivot", "ckh_dim", "akh_dim", "graded_dims",
                        "homology_basis", "k1_zero", "k2_tables", "higher_ops",
                        "relation_report"}
    assert doc["akh_dim"] == 8 and doc["ckh_dim"] == 30
    assert set(doc["higher_ops"]) == {"3", "4"}
    assert doc["relation_report"] == {"n_max": 4, "passed": True, "violations": []}
    lowest = doc["homology_basis"][0]
    assert lowest["generator"] == "000:w-w-w-" and lowest["r"] == 0


def test_text_rendering():
    text = compute_akh(shipped()["unknot_axis"]).to_text()
    assert text.splitlines()[0] == "CKh dimension 2, AKh dimension 2"
    assert "module relation up to n=4: passed" in text


def test_pivot_changes_basis_not_invariants():
    dg = shipped()["riii_mixed_before"]
    a = compute_akh(dg, pivot="canonical")
    b = compute_akh(dg, pivot="reverse")
    assert a.graded_dims == b.graded_dims
    assert k2_rank_profile(a) == k2_rank_profile(b)
    assert b.relation_report == []


def test_distinct_knots_are_told_apart():
    rep = invariance_report(shipped()["trefoil_left_axis"], shipped()["unknot_axis"])
    assert not rep.dims_equal and not rep.all_equal


def test_raw_gradings_align_by_shift():
    # without crossing signs the raw gradings are compared up to an overall shift
    a = shipped()["ri_pos_after"]
    unsigned = make_diagram(a.crossings, a.n_edges, a.axis_crossings, a.free_loops)
    rep = invariance_report(unsigned, shipped()["ri_pos_before"])
    assert rep.grading == "raw" and rep.all_equal
    assert rep.shift == (0, 1)  # j = q_raw + n_plus with n_plus = 1


def test_sl2_acts_nontrivially_in_top_degree_of_left_trefoil():
    res = compute_akh(shipped()["trefoil_left_axis"])
    cx = res.complex
    top = res.contraction.q.column(cx.find("111", "11"))
    mid = res.contraction.q.column(cx.find("111", "10"))
    assert len(top) == 1 and len(mid) == 1
    assert res.k2_tables["e"].column(mid[0]) == top
    # f(v+v+) = v+v- + v-v+ is the d0-image of w+ over F2, so f vanishes on [v+v+]
    assert res.k2_tables["f"].column(top[0]) == []
