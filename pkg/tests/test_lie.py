import pytest

from annular_linfty.homology import rank
from annular_linfty.lie import (BUILTIN_NAMES, LieSuperAlgebra, builtin_algebra, check_super_jacobi,
                                dg_contraction)


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_builtin_tables_satisfy_jacobi(name):
    alg = builtin_algebra(name)
    assert check_super_jacobi(alg) == []
    assert alg.problems() == []


def test_sl2wedge_dg_table():
    alg = builtin_algebra("sl2wedge_dg")
    assert alg.names == ("e", "f", "h", "v2", "v-2", "v0~", "d", "D", "x")
    assert alg.degrees == (0, 0, 0, 1, 1, 1, 1, 1, 2)
    b = lambda x, y: alg.names_of(alg.bracket(alg.vector(x), alg.vector(y)))
    assert b("e", "f") == ["h"]
    assert b("e", "v-2") == b("f", "v2") == ["v0~"]
    assert b("v2", "v-2") == b("d", "D") == ["x"]
    assert b("h", "e") == []  # [h, e] = 2e vanishes mod 2
    for y in ("e", "f", "h", "v2", "v-2"):
        assert b("d", y) == [] and b("D", y) == []


def test_bracket_is_symmetric_and_bilinear():
    alg = builtin_algebra("sl2wedge_dg")
    u, v, w = alg.vector("e", "v2"), alg.vector("f"), alg.vector("v-2", "D")
    assert alg.bracket(u, v) == alg.bracket(v, u)
    assert alg.bracket(u, v ^ w) == alg.bracket(u, v) ^ alg.bracket(u, w)


def test_flipped_entry_is_caught():
    bad = builtin_algebra("sl2").with_entry_flipped("e", "h", "e")
    assert check_super_jacobi(bad) != []
    with pytest.raises(ValueError):
        LieSuperAlgebra("bad", bad.names, bad.degrees,
                        {(bad.names[a], bad.names[b]): bad.names_of(v)
                         for (a, b), v in bad.structure.items()})


def test_degree_additivity_enforced():
    with pytest.raises(ValueError):
        LieSuperAlgebra("bad", ["a", "b"], [0, 1], {("a", "a"): ["b"]})


def test_unknown_algebra():
    with pytest.raises(KeyError):
        builtin_algebra("gl2")


def test_dg_contraction():
    c = dg_contraction()
    assert all(c.side_conditions().values())
    big = c.big
    assert c.K.entries() == [(big.index("D"), big.index("x"))]
    assert c.small.names == ("e", "f", "h", "v2", "v-2", "v0~", "d")
    # ad_d has rank 1 (it sends D to x), so the homology has dimension 9 - 2 = 7
    assert rank(big.adjoint(big.vector("d"))) == 1


def test_json_export_lists_each_bracket_once():
    doc = builtin_algebra("sl2wedge").to_json()
    assert doc["name"] == "sl2wedge"
    assert {"args": ["e", "f"], "value": ["h"]} in doc["brackets"]
    assert len(doc["brackets"]) == 3
    assert doc["basis"][3] == {"name": "v2", "degree": 1, "parity": 1}
