import pytest

try:
    from hypothesis import given, settings, strategies as st
    HAVE_HYP = True
except ImportError:  # pragma: no cover
    HAVE_HYP = False

from tclab import polys
from tclab.embeddings import RealEmbeddings, certified_log_rank
from tclab.numberfield import NumberField

from conftest import quadratic_field


def test_gfp_factor_splits():
    # x^2 - 5 mod 11 = (x - 4)(x + 4)
    factors = polys.gfp_factor((6, 0, 1), 11)
    assert len(factors) == 2
    assert sorted(len(f) - 1 for f, _ in factors) == [1, 1]


def test_gfp_factor_irreducible():
    factors = polys.gfp_factor((1, 0, 1), 7)  # x^2 + 1 mod 7
    assert len(factors) == 1
    assert len(factors[0][0]) - 1 == 2


def test_residue_field_cyclic():
    F = polys.ResidueField(7, (1, 0, 1))  # F_49
    assert F.order == 49
    g = F.subgroup_generator(48)
    assert not F.is_zero(g)
    assert F.pow(g, 48) == F.one
    assert F.pow(g, 24) != F.one


def test_residue_field_dlog():
    F = polys.ResidueField(11, (9, 1))
    g = F.subgroup_generator(10)
    for k in (0, 1, 5, 7):
        assert F.dlog(F.pow(g, k), g, 10) == k


if HAVE_HYP:
    @given(st.integers(min_value=-40, max_value=40),
           st.integers(min_value=-40, max_value=40))
    @settings(max_examples=60, deadline=None)
    def test_residue_respects_mul_hyp(a, b):
        K = quadratic_field(5)
        P = K.prime(19, 1)
        x = K.elt([a, b])
        if x.is_zero() or P.valuation(x) != 0:
            return
        F = P.residue_field
        assert P.residue(x * x) == F.mul(P.residue(x), P.residue(x))


def test_real_embeddings_signs():
    K = quadratic_field(5)
    emb = RealEmbeddings(K)
    signs = emb.element_signs(K.theta)
    assert sorted(signs) == [-1, 1]


def test_certified_log_rank_cubic():
    from tclab.classunit import unit_group
    L = NumberField((-1, -2, 1, 1), label="zeta7plus")
    ub = unit_group(L)
    assert certified_log_rank(L, ub.fundamental_units, 2)
