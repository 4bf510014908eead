import random

import pytest

from tclab import classunit as cu, selmer as sm
from tclab.numberfield import NumberField, Q

from conftest import SQUAREFREE, quadratic_field


def tame_primes(K, p, rng, count, blocked, norm_cap=400):
    """Pick distinct tame unramified primes away from the blocked set."""
    out = []
    q = 2
    pool = []
    while q < norm_cap:
        if q != p:
            for P in K.factor_prime(q):
                if P.e == 1 and (P.q, P.index) not in blocked:
                    pool.append(P)
        q = next_prime(q)
    rng.shuffle(pool)
    return pool[:count]


def next_prime(q):
    from tclab.numberfield import is_prime
    q += 1
    while not is_prime(q):
        q += 1
    return q


def test_power_residue_class_is_multiplicative():
    K = quadratic_field(5)
    P = K.factor_prime(31)[0]
    rng = random.Random(3)
    for _ in range(20):
        a = K.elt([rng.randint(1, 9), rng.randint(0, 9)])
        b = K.elt([rng.randint(1, 9), rng.randint(0, 9)])
        if P.valuation(a) or P.valuation(b):
            continue
        ca = sm.power_residue_class(a, P, 3)
        cb = sm.power_residue_class(b, P, 3)
        assert sm.power_residue_class(a * b, P, 3) == (ca + cb) % 3


def test_v_empty_dimension_formula():
    # dim V_0 = r1 + r2 - 1 + delta_p + p-rank of the class group
    for n in (5, -1, -23, 13, -3, 10):
        K = quadratic_field(n)
        for p in (3, 5):
            sb = sm.selmer_basis(K, [], p)
            ub = cu.unit_group(K)
            r1, r2 = K.signature
            expect = r1 + r2 - 1 + ub.delta_p(p) + cu.class_group(K).p_rank(p)
            assert sb.dim == expect


def test_selmer_verify_and_certify():
    K = quadratic_field(5)
    P107 = K.factor_prime(107)[0]
    sb = sm.selmer_basis(K, [K.factor_prime(5)[0], P107], 3)
    assert sb.certified
    assert sb.verify()
    for g in sb.generators:
        for P in sb.S:
            if (P.norm - 1) % 3 == 0:
                assert sm.power_residue_class(g, P, 3) == 0


def test_anti_monotone_chains():
    rng = random.Random(99)
    checked = 0
    fields = [quadratic_field(n) for n in (5, 13, -7, -23, 10, 17, -11, 2, 3, -1)]
    while checked < 50:
        K = fields[checked % len(fields)]
        p = rng.choice([3, 5])
        blocked = {(P.q, P.index) for P in cu.class_group(K).generating_primes}
        chain = tame_primes(K, p, rng, 3, blocked)
        dims = []
        for k in range(len(chain) + 1):
            dims.append(sm.selmer_basis(K, chain[:k], p).dim)
        assert all(a >= b for a, b in zip(dims, dims[1:]))
        checked += 1


def test_crosscheck_on_examples():
    L = quadratic_field(5)
    S = [L.factor_prime(5)[0]]
    T = S + [L.factor_prime(107)[0]]
    V = T + [L.factor_prime(197)[0]]
    dims = []
    for X in (S, T, V):
        rep = sm.crosscheck_rusb(L, X, 3)
        assert rep["agree"]
        dims.append(rep["selmer_dim"])
    assert dims == [1, 1, 0]


def test_crosscheck_random_corpus():
    rng = random.Random(2468)
    done = 0
    idx = 0
    candidates = [n for n in SQUAREFREE if abs(quadratic_field(n).disc) <= 200]
    while done < 8:
        n = candidates[idx % len(candidates)]
        idx += 1
        K = quadratic_field(n)
        p = rng.choice([3, 5])
        blocked = {(P.q, P.index) for P in cu.class_group(K).generating_primes}
        S = tame_primes(K, p, rng, rng.randint(0, 3), blocked)
        rep = sm.crosscheck_rusb(K, S, p)
        assert rep["agree"]
        done += 1


def test_rusb_dim_via_h1_rationals():
    # dim RusB over Q with empty S: r - 1 + delta_p = delta_p
    assert sm.rusb_dim_via_h1(Q, [], 2) == 1
    assert sm.rusb_dim_via_h1(Q, [], 3) == 0


def test_exceptional_rationals():
    rep = sm.is_exceptional(Q, [])
    assert not rep.condition_b
    assert not rep.exceptional


def test_exceptional_gaussian():
    rep = sm.is_exceptional(quadratic_field(-1), [])
    assert not rep.condition_a
    assert not rep.exceptional


def test_exceptional_sqrt2_witness():
    K = quadratic_field(2)
    rep = sm.is_exceptional(K, [])
    assert rep.condition_b
    a = rep.witness_b
    minus_four_a4 = a * a * a * a * (-4)
    u = cu.unit_group(K)
    # -4 a^4 must be a unit
    assert abs(minus_four_a4.norm()) == 1


def test_exceptional_condition_c():
    L = NumberField((-1, -2, 1, 1), label="zeta7plus")
    T = [L.factor_prime(7)[0], L.factor_prime(181)[0], L.factor_prime(293)[0]]
    rep = sm.is_exceptional(L, T)
    # 7 = 3 mod 4 blocks condition (c); 181 and 293 are 1 mod 4
    assert rep.per_prime_c == [("7_1", False), ("181_1", True), ("293_1", True)]
    assert not rep.condition_c
    assert not rep.exceptional
