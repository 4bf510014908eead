import random

import pytest

from tclab.numberfield import FieldError, Q, NumberField

from conftest import SQUAREFREE, quadratic_field


def test_rationals_basics():
    assert Q.degree == 1
    assert Q.signature == (1, 0)
    x = Q.elt([3]) * Q.elt([5])
    assert x.norm() == 15


def test_quadratic_discriminants():
    assert quadratic_field(5).disc == 5
    assert quadratic_field(-1).disc == -4
    assert quadratic_field(-23).disc == -23
    assert quadratic_field(10).disc == 40


def test_norm_multiplicative():
    K = quadratic_field(-23)
    rng = random.Random(5)
    for _ in range(50):
        a = K.elt([rng.randint(-9, 9), rng.randint(-9, 9)])
        b = K.elt([rng.randint(-9, 9), rng.randint(-9, 9)])
        if a.is_zero() or b.is_zero():
            continue
        assert (a * b).norm() == a.norm() * b.norm()


def test_factor_prime_split_inert_ramified():
    K = quadratic_field(5)
    # 11 is split, 7 inert, 5 ramified in Q(sqrt 5)
    split = K.factor_prime(11)
    assert len(split) == 2 and all(P.f_deg == 1 for P in split)
    inert = K.factor_prime(7)
    assert len(inert) == 1 and inert[0].f_deg == 2
    ram = K.factor_prime(5)
    assert len(ram) == 1 and ram[0].e == 2


def test_prime_labels_deterministic():
    K = quadratic_field(5)
    a = [P.label for P in K.factor_prime(11)]
    b = [P.label for P in K.factor_prime(11)]
    assert a == b == ["11_1", "11_2"]


def test_norms_cover_rational_prime():
    for n in [5, -23, 13, -1]:
        K = quadratic_field(n)
        for q in [2, 3, 5, 7, 11]:
            prod = 1
            for P in K.factor_prime(q):
                prod *= P.norm ** P.e
            assert prod == q ** K.degree


def test_residue_arithmetic():
    K = quadratic_field(5)
    P = K.prime(11, 1)
    r = P.residue(K.theta)
    F = P.residue_field
    # theta = sqrt(5), so its residue squares to 5 mod P
    lhs = F.add(F.mul(r, r), F.from_int(-5))
    assert F.is_zero(lhs)
    assert F.is_zero(P.residue(K.theta * K.theta + K.elt([-5, 0])))


def test_valuation():
    K = quadratic_field(5)
    P = K.prime(5, 1)
    assert P.valuation(K.elt([5, 0])) == 2
    two_theta_minus_one = K.elt([-1, 2])
    assert P.valuation(two_theta_minus_one * two_theta_minus_one) == 2


def test_minkowski_bound_monotone_in_disc():
    assert quadratic_field(5).minkowski_bound() <= quadratic_field(-163).minkowski_bound()


def test_primes_of_norm_up_to():
    K = quadratic_field(-1)
    primes = K.primes_of_norm_up_to(25)
    assert all(P.norm <= 25 for P in primes)
    assert any(P.norm == 2 for P in primes)
    # norms of split primes above q = 1 mod 4 show up once per factor
    assert sum(1 for P in primes if P.norm == 5) == 2


def test_prime_index_out_of_range():
    K = quadratic_field(5)
    with pytest.raises(FieldError):
        K.prime(11, 3)


def test_cubic_field():
    L = NumberField((-1, -2, 1, 1), label="zeta7plus")
    assert L.degree == 3
    assert L.signature == (3, 0)
    assert L.disc == 49
    assert len(L.factor_prime(13)) == 3
    assert len(L.factor_prime(3)) == 1


def test_quadratic_corpus_consistent():
    for n in SQUAREFREE[:20]:
        K = quadratic_field(n)
        t = K.theta
        acc = K.zero
        for i, c in enumerate(K.min_poly):
            acc = acc + (t ** i) * c
        assert acc.is_zero()
