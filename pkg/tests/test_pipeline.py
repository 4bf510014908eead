import random
from fractions import Fraction

import pytest

from tclab import equivariant as eq, pipeline as pl, selmer as sm
from tclab.numberfield import NumberField, Q

from conftest import quadratic_field


@pytest.fixture(scope="module")
def L5():
    return quadratic_field(5)


@pytest.fixture(scope="module")
def layer7():
    L = NumberField((-1, -2, 1, 1), label="zeta7plus")
    return eq.make_layer(Q, L, [Fraction(0)] * 3, [L.elt([-2, 0, 1])])


def first(field, q):
    return field.factor_prime(q)[0]


def test_untwisted_sandwich_golden(L5):
    T = [first(L5, 5), first(L5, 107)]
    V = T + [first(L5, 197)]
    sw = pl.sha_sandwich(L5, 3, T, V)
    assert (sw.lower, sw.upper, sw.certified) == (1, 1, True)
    assert sw.pinned_dim == 1


def test_sandwich_upper_zero_certifies(L5):
    T = [first(L5, 5), first(L5, 107)]
    V = T + [first(L5, 197)]
    sw = pl.sha_sandwich(L5, 3, V, V)
    assert sw.upper == 0 and sw.certified and sw.pinned_dim == 0


def test_cubic_sandwich_golden(layer7):
    L = layer7.L_field
    T = [first(L, 7), first(L, 181), first(L, 293)]
    V = T + [first(L, 307), first(L, 349)]
    sw = pl.sha_sandwich(L, 2, T, V)
    assert (sw.lower, sw.upper, sw.certified) == (2, 2, True)


def test_twisted_sandwich_transfer(layer7):
    L = layer7.L_field
    A = eq.gamma_module(2, [[[0, 1], [1, 1]]])
    T = [first(L, 7), first(L, 181), first(L, 293)]
    V = T + [first(L, 307), first(L, 349)]
    Tt = layer7.orbit_closure(T)
    Vt = layer7.orbit_closure(V)
    sw = pl.sha_sandwich(L, 2, Tt, Vt, layer=layer7, A=A, T_rep=T, V_rep=V)
    assert sw.certified and sw.pinned_dim == 2


def test_orbit_closure_goldens(layer7):
    L = layer7.L_field
    T = [first(L, 7), first(L, 181), first(L, 293)]
    rep = pl.orbit_closure_check(layer7, layer7.orbit_closure([first(L, 7)]), T[1:], 2)
    assert rep["agree"]


def test_orbit_closure_random_draws(layer7):
    # the closure identity is only promised when X' consists of primes
    # that preserve the Selmer group of the Gamma-stable base set: only
    # then is the governing field Galois over the base field
    rng = random.Random(31415)
    L = layer7.L_field
    stable_sets = [[], layer7.orbit_closure([first(L, 7)])]
    pools = [pl.find_preserving_primes(L, S, 2, 8).X for S in stable_sets]
    done = 0
    while done < 20:
        k = rng.randrange(2)
        S = stable_sets[k]
        X = rng.sample(pools[k], rng.randint(1, 3))
        rep = pl.orbit_closure_check(layer7, S, X, 2)
        assert rep["agree"]
        done += 1


def naive_pth_power_test(x, P, p):
    """Brute force oracle: enumerate p-th powers in the residue field."""
    F = P.residue_field
    target = P.residue(x)
    seen = set()
    for e in F.elements():
        if F.is_zero(e):
            continue
        seen.add(F.pow(e, p))
    return target in seen


def test_find_preserving_primes_golden(L5):
    ps = pl.find_preserving_primes(L5, [], 3, 3)
    assert ps.verified and ps.shortfall == 0
    assert [P.label for P in ps.X] == ["7_1", "13_1", "37_1"]
    sb = sm.selmer_basis(L5, [], 3)
    for P in ps.X:
        if (P.norm - 1) % 3 == 0:
            for g in sb.generators:
                assert naive_pth_power_test(g, P, 3)
        after = sm.selmer_basis(L5, [P], 3)
        assert after.dim == sb.dim


def test_frobenius_order(L5):
    theta = L5.theta
    # split primes in the governing layer have frobenius order 1
    P7 = first(L5, 7)
    assert pl.frobenius_order(theta, P7, 3) in (1, 3)


def test_witness_nonvanishing_rationals():
    rep = pl.witness_nonvanishing(Q, Q.elt([5]), 2, 100)
    assert rep["label"] == "3_1"
    assert rep["order"] == 2


def test_witness_rejects_pth_power():
    with pytest.raises(Exception):
        pl.witness_nonvanishing(Q, Q.elt([4]), 2, 100)


def test_sha_lower_bound_report(L5):
    T = [first(L5, 5), first(L5, 107)]
    V = T + [first(L5, 197)]
    rep = pl.sha_lower_bound(L5, 3, T, V)
    assert rep["precondition"]
    assert rep["lower"] == 1
