from fractions import Fraction

import pytest

from tclab import equivariant as eq, rayclass as rc, selmer as sm
from tclab.numberfield import NumberField, Q

from conftest import quadratic_field


@pytest.fixture(scope="module")
def layer5():
    L = quadratic_field(5)
    gamma = L.elt([1, -2])  # sqrt 5 -> -sqrt 5 in the [1, (1+sqrt5)/2] basis
    return eq.make_layer(Q, L, [Fraction(0), Fraction(0)], [gamma])


@pytest.fixture(scope="module")
def layer7():
    L = NumberField((-1, -2, 1, 1), label="zeta7plus")
    gamma = L.elt([-2, 0, 1])
    return eq.make_layer(Q, L, [Fraction(0), Fraction(0), Fraction(0)], [gamma])


def test_layer_orders(layer5, layer7):
    assert layer5.order == 2
    assert layer7.order == 3


def test_automorphism_respects_arithmetic(layer5):
    L = layer5.L_field
    g = layer5.elements[1]
    a = L.elt([2, 3])
    b = L.elt([-1, 4])
    assert g(a * b) == g(a) * g(b)
    assert g(a + b) == g(a) + g(b)


def test_prime_orbits(layer7):
    L = layer7.L_field
    # 13 splits completely; Gamma permutes the three primes transitively
    orbit = layer7.prime_orbit(L.factor_prime(13)[0])
    assert sorted(P.label for P in orbit) == ["13_1", "13_2", "13_3"]
    # 7 is totally ramified, a singleton orbit
    assert len(layer7.prime_orbit(L.factor_prime(7)[0])) == 1


def test_orbit_closure_and_stability(layer7):
    L = layer7.L_field
    X = [L.factor_prime(181)[0]]
    closed = layer7.orbit_closure(X)
    assert len(closed) == 3
    assert layer7.is_stable(closed)
    assert not layer7.is_stable(X)


def test_gamma_module_invariants():
    # sign action of order 2 on F_3: no invariants
    m = eq.gamma_module(3, [[[2]]])
    assert eq.invariants_dim(m) == 0
    assert eq.invariants_dim(eq.trivial_module(3, 2, 1, 2)) == 2


def test_tensor_and_dual():
    # F_2^2 with the order-3 companion matrix A: (A tensor A)^Gamma has dim 2
    A = eq.gamma_module(2, [[[0, 1], [1, 1]]])
    assert eq.invariants_dim(A) == 0
    assert eq.invariants_dim(eq.tensor(A, A)) == 2
    assert eq.invariants_dim(eq.dual(A)) == 0
    # sign module over F_3: dual of sign is sign, sign tensor sign trivial
    s = eq.gamma_module(3, [[[2]]])
    assert eq.invariants_dim(eq.tensor(s, s)) == 1
    assert eq.invariants_dim(eq.tensor(s, eq.dual(s))) == 1


def test_units_module(layer5):
    m = eq.units_module(layer5, 3)
    # U/U^3 of Q(sqrt 5) is 1-dimensional and Gamma acts by -1
    assert m.dim == 1
    assert m.mats[0].entries[0][0] % 3 == 2


def test_selmer_module_action_order(layer7):
    L = layer7.L_field
    T = layer7.orbit_closure([L.factor_prime(7)[0], L.factor_prime(181)[0],
                              L.factor_prime(293)[0]])
    sb = sm.selmer_basis(L, T, 2)
    m = eq.selmer_module(layer7, sb)
    assert m.dim == sb.dim
    g = m.mats[0]
    gg = eq._mat_mul_fp(g, eq._mat_mul_fp(g, g))
    ident = [[1 if i == j else 0 for j in range(m.dim)] for i in range(m.dim)]
    assert gg.entries == ident


def test_selmer_module_requires_stable_set(layer7):
    L = layer7.L_field
    sb = sm.selmer_basis(L, [L.factor_prime(181)[0]], 2)
    with pytest.raises(Exception):
        eq.selmer_module(layer7, sb)


def test_rayclass_module_golden(layer5):
    L = layer5.L_field
    mod = [L.factor_prime(5)[0], L.factor_prime(107)[0]]
    rcd = rc.ray_class_p_part(L, mod, 3)
    m = eq.rayclass_module(layer5, rcd)
    # Gamma acts by inversion on the Z/3 ray class quotient
    assert m.dim == 1
    assert m.mats[0].entries[0][0] % 3 == 2


def test_kernel_module_golden(layer5):
    L = layer5.L_field
    P5 = L.factor_prime(5)[0]
    P107 = L.factor_prime(107)[0]
    P197 = L.factor_prime(197)[0]
    small = rc.ray_class_p_part(L, [P5, P107], 3)
    big = rc.ray_class_p_part(L, [P5, P107, P197], 3)
    m = eq.kernel_module(layer5, big, small)
    assert m.dim == 1
    assert m.mats[0].entries[0][0] % 3 == 2


def test_descent_trivial_coefficients(layer5):
    out = eq.descent_check(layer5, [5, 7], 3)
    assert out["agree"]
    assert out["certified"]


def test_descent_refuses_p_dividing_gamma(layer5):
    with pytest.raises(Exception):
        eq.descent_check(layer5, [5], 2)
