"""Ray class groups with tame finite modulus, p-primary parts.

The group of conductor m = prod q_j is presented on the p-parts of the
residue groups (O/q_j)^* together with the class group generators.
Relations: the residue orders, the images of a generating set of global
units, and the class group relations corrected by the residue classes of
their principal generators.  The cokernel of that presentation agrees
with the ray class group up to prime-to-p noise, so its p-primary part is
exactly the p-primary part of the ray class group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import intlinalg as la
from .classunit import ClassGroupData, class_group, unit_group
from .numberfield import FieldError, NFElement, NumberField, PrimeIdeal


def p_part_order(P: PrimeIdeal, p: int) -> int:
    """p^a with p^a || Norm(P) - 1.  Requires P tame at p."""
    if P.q == p:
        raise FieldError(f"{P.label} is wild at {p}")
    n = P.norm - 1
    a = 0
    while n % p == 0:
        n //= p
        a += 1
    return p**a


@dataclass
class ResGen:
    """Generator of the p-part of (O/P)^*."""

    prime: PrimeIdeal
    order: int  # p^a
    base: tuple  # residue field element of exact order p^a
    proj_exp: int  # u -> u^proj_exp projects onto the p-part, fixing it

    def dlog(self, x: NFElement) -> int:
        rf = self.prime.residue_field
        r = self.prime.residue(x)
        if rf.is_zero(r):
            raise FieldError(f"element not coprime to {self.prime.label}")
        return rf.dlog(rf.pow(r, self.proj_exp), self.base, self.order)


@dataclass
class RayClassData:
    field: NumberField
    p: int
    modulus: list[PrimeIdeal]
    res_gens: list[ResGen]
    class_data: ClassGroupData
    relation_rows: list[list[int]]
    group: la.FinAbGroup  # full cokernel (p-primary part is the RCG's)
    p_group: la.FinAbGroup
    _U: list[list[int]]
    _diag: list[int]

    @property
    def n_gens(self) -> int:
        return len(self.res_gens) + len(self.class_data.generating_primes)

    def coords(self, vec: list[int]) -> tuple[int, ...]:
        """Invariant-factor coordinates of a generator-exponent vector."""
        y = la.mat_vec(self._U, vec)
        return tuple(y[i] % d for i, d in enumerate(self._diag) if d > 1)

    @property
    def coord_orders(self) -> tuple[int, ...]:
        return tuple(d for d in self._diag if d > 1)

    def principal_class(self, x: NFElement) -> list[int]:
        """Generator-exponent vector of the class of the principal ideal
        (x), for x coprime to the modulus with trivial factorization
        support outside it (i.e. a unit times the modulus-coprime part is
        not tracked: x must generate an ideal supported nowhere, a unit,
        or the caller accounts for the ideal part separately)."""
        vec = [g.dlog(x) for g in self.res_gens]
        vec += [0] * len(self.class_data.generating_primes)
        return vec

    def gen_index_of_prime(self, P: PrimeIdeal) -> int:
        for i, g in enumerate(self.res_gens):
            if g.prime is P:
                return i
        raise KeyError(P.label)


def ray_class_p_part(field: NumberField, modulus: list[PrimeIdeal], p: int) -> RayClassData:
    for P in modulus:
        if P.q == p:
            raise FieldError(f"modulus prime {P.label} is wild at {p}")
    cls = class_group(field)
    for P in cls.generating_primes:
        if any(Q.q == P.q and Q.index == P.index for Q in modulus):
            raise FieldError(
                f"class group generator {P.label} divides the modulus; "
                "choose a modulus away from the small primes"
            )
    res_gens = []
    for P in modulus:
        pa = p_part_order(P, p)
        if pa == 1:
            continue
        m = (P.norm - 1) // pa
        mu = pow(m, -1, pa)
        base = P.residue_field.subgroup_generator(pa)
        res_gens.append(ResGen(P, pa, base, (m * mu) % (P.norm - 1)))
    s = len(res_gens)
    k = len(cls.generating_primes)
    rows: list[list[int]] = []
    for j, g in enumerate(res_gens):
        row = [0] * (s + k)
        row[j] = g.order
        rows.append(row)
    ub = unit_group(field)
    for u in [ub.torsion_gen] + ub.fundamental_units:
        rows.append([g.dlog(u) for g in res_gens] + [0] * k)
    for rel, gamma in zip(cls.relation_matrix, cls.relation_elements):
        rows.append([-g.dlog(gamma) for g in res_gens] + list(rel))
    group, U, diag = _present(rows, s + k)
    return RayClassData(field, p, list(modulus), res_gens, cls, rows,
                        group, group.p_primary(p), U, diag)


def _present(rows, n):
    if n == 0:
        return la.FinAbGroup(), [], []
    mt = la.transpose([r[:] for r in rows])
    d, u, v = la.smith_normal_form(mt)
    diag = [d[i][i] if i < len(d) and i < len(d[0]) else 0 for i in range(n)]
    if any(x == 0 for x in diag):
        raise FieldError("presentation does not define a finite group")
    group = la.FinAbGroup(tuple(sorted(x for x in diag if x > 1)))
    return group, u, diag


def rcg_surjection_kernel(big: RayClassData, small: RayClassData) -> la.FinAbGroup:
    """Structure of ker(RCG_V ->> RCG_T) restricted to p-primary parts,
    where small's modulus is a subset of big's.  The kernel is generated
    by the residue generators at the extra primes, and is a p-group."""
    if big.field is not small.field or big.p != small.p:
        raise ValueError("mismatched ray class data")
    small_labels = {P.label for P in small.modulus}
    if not small_labels <= {P.label for P in big.modulus}:
        raise ValueError("small modulus is not contained in the big one")
    extra = [i for i, g in enumerate(big.res_gens)
             if g.prime.label not in small_labels]
    orders = big.coord_orders
    if not extra or not orders:
        return la.FinAbGroup()
    cols = []
    for i in extra:
        vec = [0] * big.n_gens
        vec[i] = 1
        cols.append(list(big.coords(vec)))
    # Subgroup generated by cols inside prod Z/orders: its presentation is
    # Z^t modulo {e : W e = 0 mod orders}.
    t = len(cols)
    r = len(orders)
    stacked = [[cols[j][i] for j in range(t)] + [orders[i] if c == i else 0 for c in range(r)]
               for i in range(r)]
    ker = la.integer_kernel(stacked)
    rel_rows = [vec[:t] for vec in ker]
    sub = la.snf_cokernel(rel_rows, t)
    expected = big.group.order() // small.group.order()
    if sub.order() != expected:
        raise FieldError("kernel order mismatch; presentations inconsistent")
    return sub.p_primary(big.p)
