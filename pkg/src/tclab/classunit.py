"""Class groups and unit groups at desk scale, certified unconditionally.

The class group is computed on the prime ideals of norm up to the
Minkowski bound.  Relations come from explicit principal generators; the
result is certified by checking that every nonzero class of the computed
cokernel is represented by a non-principal ideal.  Principality of an
ideal in a quadratic field is decided exactly through binary quadratic
forms (reduction cycles in the indefinite case), so no GRH and no
floating point enter the certified path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield
from fractions import Fraction

import mpmath

from . import intlinalg as la
from .embeddings import RealEmbeddings, certified_log_rank
from .numberfield import (
    FieldError,
    NFElement,
    NumberField,
    PrimeIdeal,
    lattice_mul,
    lattice_norm,
)


class CertificationError(RuntimeError):
    pass


def _embeddings(field: NumberField) -> RealEmbeddings:
    if not hasattr(field, "_emb_cache"):
        field._emb_cache = RealEmbeddings(field)
    return field._emb_cache


NumberField._embeddings = _embeddings


# ---------------------------------------------------------------------------
# Units


@dataclass
class UnitBasis:
    field: NumberField
    torsion_order: int
    torsion_gen: NFElement
    fundamental_units: list[NFElement]
    saturated_at: tuple[int, ...]
    regulator_nonzero_witness: bool

    @property
    def rank(self) -> int:
        return len(self.fundamental_units)

    def delta_p(self, p: int) -> int:
        """1 iff the p-th roots of unity lie in the field."""
        return 1 if self.torsion_order % p == 0 else 0

    def u_mod_p_generators(self, p: int) -> list[NFElement]:
        gens = list(self.fundamental_units)
        if self.delta_p(p):
            gens.append(self.torsion_gen)
        return gens


class UnitRankError(RuntimeError):
    def __init__(self, wanted: int, achieved: int):
        super().__init__(f"unit rank {wanted} not reached (achieved {achieved})")
        self.wanted = wanted
        self.achieved = achieved


def unit_group(field: NumberField, height_bound: int | None = None,
               saturate_at: tuple[int, ...] = (2, 3, 5)) -> UnitBasis:
    if getattr(field, "_unit_cache", None) is not None:
        cached = field._unit_cache
        if set(saturate_at) <= set(cached.saturated_at):
            return cached
    r1, r2 = field.signature
    rank = r1 + r2 - 1
    w, tgen = _torsion(field)
    if rank == 0:
        ub = UnitBasis(field, w, tgen, [], tuple(saturate_at), True)
    elif field.degree == 2 and r1 == 2:
        height_bound = height_bound or 10**6
        u = _real_quadratic_fundamental(field, height_bound)
        ub = UnitBasis(field, w, tgen, [u], tuple(saturate_at), True)
    else:
        height_bound = height_bound or 10**4
        units = _unit_system_by_enumeration(field, rank, height_bound)
        units = _saturate(field, units, saturate_at)
        witness = certified_log_rank(field, units, rank)
        if not witness:
            raise UnitRankError(rank, 0)
        ub = UnitBasis(field, w, tgen, units, tuple(saturate_at), witness)
    for u in ub.fundamental_units:
        assert abs(u.norm()) == 1
    field._unit_cache = ub
    return ub


def _torsion(field: NumberField) -> tuple[int, NFElement]:
    minus_one = field.elt(-1)
    if field.signature[0] > 0:
        return 2, minus_one
    # Imaginary quadratic: cyclotomic torsion only for disc -3, -4.
    if field.degree == 2:
        if field.disc == -4:
            i = _element_of_order(field, 4)
            return 4, i
        if field.disc == -3:
            z = _element_of_order(field, 6)
            return 6, z
    return 2, minus_one


def _element_of_order(field: NumberField, n: int) -> NFElement:
    for c0 in range(-2, 3):
        for c1 in range(-2, 3):
            x = field.elt([Fraction(c0), Fraction(c1)])
            if x.is_zero() or x.norm() != 1:
                continue
            if x**n == field.one and all(x**k != field.one for k in range(1, n)):
                return x
    raise RuntimeError(f"order-{n} torsion not found")  # pragma: no cover


def _real_quadratic_fundamental(field: NumberField, bound: int) -> NFElement:
    """Fundamental unit (x + y sqrt(D))/2, found as the solution of
    x^2 - D y^2 = +-4 with minimal y, then minimal x."""
    D = field.disc
    omega = field.elt([0, 1])
    t = int(omega.trace())
    for y in range(1, bound + 1):
        for target in (-4, 4):
            xx = D * y * y + target
            if xx <= 0:
                continue
            x = math.isqrt(xx)
            if x * x != xx:
                continue
            # sqrt(D) = 2*omega - t, so u = (x - y*t)/2 + y*omega.
            assert (x - y * t) % 2 == 0
            u = field.elt([(x - y * t) // 2, y])
            assert abs(u.norm()) == 1
            return u
    raise UnitRankError(1, 0)


def _unit_system_by_enumeration(field: NumberField, rank: int, bound: int):
    found: list[NFElement] = []
    units: list[NFElement] = []
    h = 1
    while h <= min(bound, 64):
        for coords in _shell(field.degree, h):
            x = field.elt(coords)
            if abs(x.norm()) != 1:
                continue
            if _is_torsion(field, x):
                continue
            found.append(x)
        found.sort(key=lambda u: sum(abs(c) for c in u.coords))
        units = _pick_independent(field, found, rank)
        if len(units) == rank:
            return units
        h += 1
    raise UnitRankError(rank, len(units))


def _shell(n: int, h: int):
    for vec in _box(n, h):
        if max(abs(v) for v in vec) == h:
            yield vec


def _box(n: int, h: int):
    if n == 0:
        yield ()
        return
    for rest in _box(n - 1, h):
        for c in range(-h, h + 1):
            yield rest + (c,)


def _is_torsion(field: NumberField, x: NFElement) -> bool:
    y = x
    for _ in range(12):
        if y == field.one:
            return True
        y = y * x
    return False


def _pick_independent(field: NumberField, pool, rank: int):
    chosen: list[NFElement] = []
    for u in pool:
        if len(chosen) == rank:
            break
        if certified_log_rank(field, chosen + [u], len(chosen) + 1):
            chosen.append(u)
    return chosen


def _saturate(field: NumberField, units, primes):
    units = list(units)
    changed = True
    while changed:
        changed = False
        for p in primes:
            for exps in _box(len(units), p - 1):
                if all(e == 0 for e in exps) or any(e < 0 for e in exps):
                    continue
                cand = field.one
                for u, e in zip(units, exps):
                    cand = cand * u**e
                for s in (1, -1):
                    root = pth_root(field.elt(s) * cand, p)
                    if root is not None and not _is_torsion(field, root):
                        i = next(i for i, e in enumerate(exps) if e % p != 0)
                        units[i] = root
                        changed = True
                        break
                if changed:
                    break
            if changed:
                break
    return units


def pth_root(x: NFElement, p: int) -> NFElement | None:
    """Exact p-th root of x in the field, or None.  x must be nonzero."""
    field = x.field
    if x.is_zero():
        raise FieldError("p-th root of zero")
    if field.degree == 1:
        val = x.coords[0]

        def _iroot(m: int):
            r = round(m ** (1 / p)) if m else 0
            for c in (r - 1, r, r + 1):
                if c >= 0 and c**p == m:
                    return c
            return None

        num = _iroot(abs(val.numerator))
        den = _iroot(val.denominator)
        if num is None or den is None:
            return None
        for s in (1, -1) if p % 2 else (1,):
            cand = Fraction(s * num, den)
            if cand**p == val:
                return field.elt(cand)
        return None
    r1, r2 = field.signature
    if r2 == 0:
        return _pth_root_totally_real(x, p)
    if field.degree == 2 and r1 == 0:
        return _pth_root_imag_quadratic(x, p)
    raise NotImplementedError("p-th roots for mixed-signature fields")


def _pth_root_totally_real(x: NFElement, p: int) -> NFElement | None:
    field = x.field
    emb = _embeddings(field)
    signs = emb.element_signs(x)
    if p % 2 == 0 and any(s < 0 for s in signs):
        return None
    den = x.denominator()
    n = field.degree
    with mpmath.workdps(60):
        ivs = emb.element_intervals(x, Fraction(1, 2**80))
        mags = [mpmath.root(abs(_mid(iv)), p) for iv in ivs]
        basis_vals = []
        for iv in emb.intervals:
            tv = _mid(iv)
            row = []
            for j in range(n):
                pc = field.elt([int(j == t) for t in range(n)]).power_coords()
                row.append(sum(mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator) * tv**k
                               for k, c in enumerate(pc)))
            basis_vals.append(row)
        A = mpmath.matrix(basis_vals)
        # For odd p the root tracks the sign of x at each embedding; for
        # even p any sign pattern is possible, so try them all (up to a
        # global sign).  The final equality check is exact either way.
        if p % 2:
            patterns = [tuple(1 if s >= 0 else -1 for s in signs)]
        else:
            patterns = [(1,) + rest for rest in _sign_patterns(n - 1)]
        for pat in patterns:
            roots = [s * m for s, m in zip(pat, mags)]
            sol = mpmath.lu_solve(A, mpmath.matrix(roots))
            cand_coords = [Fraction(round(float(sol[i]) * den), den) for i in range(n)]
            cand = field.elt(cand_coords)
            if cand**p == x:
                return cand
    return None


def _sign_patterns(k):
    if k == 0:
        yield ()
        return
    for rest in _sign_patterns(k - 1):
        yield (1,) + rest
        yield (-1,) + rest


def _mid(iv):
    s = iv[0] + iv[1]
    return mpmath.mpf(s.numerator) / mpmath.mpf(s.denominator) / 2


def _pth_root_imag_quadratic(x: NFElement, p: int) -> NFElement | None:
    field = x.field
    den = x.denominator()
    y = x * (den**p)
    nrm = y.norm()
    m = round(float(nrm) ** (1 / p))
    cand_norm = None
    for c in (m - 1, m, m + 1):
        if c >= 0 and Fraction(c) ** p == nrm:
            cand_norm = c
    if cand_norm is None:
        return None
    for cand in _elements_of_norm_imag(field, cand_norm):
        if cand**p == y:
            return cand / den
        if p % 2 == 0 and (-cand) ** p == y:
            return cand / den
    return None


def _elements_of_norm_imag(field: NumberField, n: int):
    """All integral elements of given positive norm in an imaginary
    quadratic field (finite up to torsion; torsion multiples included)."""
    omega = field.elt([0, 1])
    t = int(omega.trace())
    nn = int(omega.norm())
    # N(a + b*omega) = a^2 + t a b + nn b^2, positive definite.
    four_ac = 4 * nn - t * t
    bmax = math.isqrt(4 * n // four_ac) + 1
    out = []
    for b in range(-bmax, bmax + 1):
        disc = t * t * b * b - 4 * (nn * b * b - n)
        if disc < 0:
            continue
        s = math.isqrt(disc)
        if s * s != disc:
            continue
        for sgn in (1, -1):
            num = -t * b + sgn * s
            if num % 2 == 0:
                out.append(field.elt([num // 2, b]))
    uniq = []
    for e in out:
        if e not in uniq:
            uniq.append(e)
    return uniq


def u_mod_p_dim(field: NumberField, p: int) -> int:
    ub = unit_group(field, saturate_at=(p,) if p not in (2, 3, 5) else (2, 3, 5))
    r1, r2 = field.signature
    return r1 + r2 - 1 + ub.delta_p(p)


# ---------------------------------------------------------------------------
# Principality testing via binary quadratic forms (quadratic fields)


def ideal_form(field: NumberField, lat) -> tuple[int, int, int]:
    """Integral binary quadratic form N(s v1 + t v2)/N(I) for a rank-2
    ideal lattice with HNF column basis (v1, v2)."""
    v1 = field.elt([Fraction(lat[i][0]) for i in range(2)])
    v2 = field.elt([Fraction(lat[i][1]) for i in range(2)])
    nI = lattice_norm(lat)
    assert int(v1.norm()) % nI == 0
    a = int(v1.norm()) // nI
    c = int(v2.norm()) // nI
    assert int(v2.norm()) % nI == 0
    b_full = int((v1 * _conjugate(v2) + v2 * _conjugate(v1)).coords[0])
    assert b_full % nI == 0
    b = b_full // nI
    return a, b, c


def _conjugate(x: NFElement) -> NFElement:
    """Galois conjugate in a quadratic field."""
    field = x.field
    return field.elt(x.trace()) - x


def principal_generator(field: NumberField, lat) -> NFElement | None:
    """A generator of the ideal lattice if principal, else None.
    Exact for quadratic fields; bounded search elsewhere."""
    if field.degree == 1:
        return field.elt(lattice_norm(lat))
    if field.degree == 2:
        if field.disc < 0:
            return _principal_imag(field, lat)
        return _principal_real(field, lat)
    return _principal_bounded(field, lat)


def _principal_imag(field: NumberField, lat) -> NFElement | None:
    n = lattice_norm(lat)
    for x in _elements_of_norm_imag(field, n):
        if la.solve_integer(lat, [int(c) for c in x.coords]) is not None:
            return x
    return None


def _principal_real(field: NumberField, lat) -> NFElement | None:
    """Indefinite form reduction cycle with transform tracking: the ideal
    is principal iff its form cycle contains a form with leading
    coefficient +-1, and the tracked SL2(Z) transform recovers a
    generator."""
    a, b, c = ideal_form(field, lat)
    D = b * b - 4 * a * c
    assert D == field.disc
    v1 = field.elt([Fraction(lat[i][0]) for i in range(2)])
    v2 = field.elt([Fraction(lat[i][1]) for i in range(2)])
    nI = lattice_norm(lat)

    def gen_from(s, t):
        x = v1 * s + v2 * t
        if abs(x.norm()) == nI:
            return x
        return None

    if abs(a) == 1:
        g = gen_from(1, 0)
        if g is not None:
            return g
    # Transform columns track images of (1,0) and (0,1).
    m = [[1, 0], [0, 1]]
    seen = set()
    form = (a, b, c)
    for _ in range(8 * (math.isqrt(D) + 2) * 8):
        form, m = _rho(form, m, D)
        if abs(form[0]) == 1:
            g = gen_from(m[0][0], m[1][0])
            if g is not None:
                return g
        key = form
        if _is_reduced(form, D):
            if key in seen:
                return None
            seen.add(key)
    raise RuntimeError("form cycle did not close")  # pragma: no cover


def _is_reduced(form, D):
    a, b, c = form
    s = math.isqrt(D)
    return 0 < b <= s and s - 2 * abs(a) < b


def _rho(form, m, D):
    a, b, c = form
    s = math.isqrt(D)
    ac = abs(c)
    if ac > s:
        lo = -ac
    else:
        lo = s - 2 * ac
    # r = -b + 2*c*k with lo < r <= lo + 2|c|
    r = -b % (2 * ac)
    r += lo - (lo % (2 * ac))
    while r <= lo:
        r += 2 * ac
    while r > lo + 2 * ac:
        r -= 2 * ac
    k = (b + r) // (2 * c)
    new = (c, r, (r * r - D) // (4 * c))
    # rho corresponds to right-multiplication by [[0, -1], [1, k]].
    nm = [
        [m[0][1], -m[0][0] + k * m[0][1]],
        [m[1][1], -m[1][0] + k * m[1][1]],
    ]
    return new, nm


def _principal_bounded(field: NumberField, lat) -> NFElement | None:
    """Bounded generator search for degree > 2 (totally real): any
    generator can be scaled by units into a box derived from the unit
    logs; search that box exactly."""
    ub = unit_group(field)
    n = lattice_norm(lat)
    emb = _embeddings(field)
    with mpmath.workdps(30):
        spread = mpmath.mpf(0)
        for u in ub.fundamental_units:
            ivs = emb.element_intervals(u, Fraction(1, 2**40))
            spread += max(abs(mpmath.log(abs(mpmath.mpf(float(iv[0]))))) for iv in ivs)
        B = float(mpmath.exp(spread) * mpmath.root(n, field.degree))
    coord_bound = int(B * field.degree * 4) + 2
    coord_bound = min(coord_bound, 60)
    cols = list(zip(*lat))
    for vec in _box(field.degree, coord_bound):
        if all(v == 0 for v in vec):
            continue
        coords = [sum(vec[j] * cols[j][i] for j in range(field.degree))
                  for i in range(field.degree)]
        x = field.elt(coords)
        if abs(x.norm()) == n:
            return x
    return None


# ---------------------------------------------------------------------------
# Class group


@dataclass
class ClassGroupData:
    field: NumberField
    group: la.FinAbGroup
    generating_primes: list[PrimeIdeal]
    relation_matrix: list[list[int]]  # rows = relations on generating_primes
    relation_elements: list[NFElement]  # generator of prod P^row
    certified: bool
    # SNF decomposition of the cokernel: class coords of a generator vector.
    _U: list[list[int]] = dfield(default_factory=list)
    _diag: list[int] = dfield(default_factory=list)

    def class_coords(self, exps: list[int]) -> tuple[int, ...]:
        """Coordinates of the class of prod P_i^exps[i] in the invariant
        factor decomposition."""
        if not self.generating_primes:
            return ()
        y = la.mat_vec(self._U, exps)
        return tuple(y[i] % d for i, d in enumerate(self._diag) if d > 1)

    def p_rank(self, p: int) -> int:
        return self.group.p_rank(p)


def class_group(field: NumberField, effort: int | None = None) -> ClassGroupData:
    if getattr(field, "_class_cache", None) is not None:
        return field._class_cache
    mb = field.minkowski_bound()
    if effort is not None and effort < mb:
        raise ValueError(f"effort {effort} below Minkowski bound {mb}")
    gens = [P for P in field.primes_of_norm_up_to(mb)]
    if not gens:
        data = ClassGroupData(field, la.FinAbGroup(), [], [], [], True)
        field._class_cache = data
        return data
    k = len(gens)
    relations: list[list[int]] = []
    elements: list[NFElement] = []
    # Seed with the order relation of each generator prime.
    for i, P in enumerate(gens):
        lat = P.lattice()
        cur = lat
        for power in range(1, 64):
            g = principal_generator(field, cur)
            if g is not None:
                row = [0] * k
                row[i] = power
                relations.append(row)
                elements.append(g)
                break
            cur = lattice_mul(field, cur, lat)
        else:  # pragma: no cover
            raise CertificationError(f"no principal power of {P.label} found")
    # Also seed relations from factoring ramified/split rational primes:
    # (q) = prod P^e is principal with generator q.
    by_q: dict[int, list[int]] = {}
    for i, P in enumerate(gens):
        by_q.setdefault(P.q, []).append(i)
    for q, idxs in by_q.items():
        primes_above = field.factor_prime(q)
        if all(any(gens[i] is Q for i in idxs) for Q in primes_above):
            row = [0] * k
            for Q in primes_above:
                i = next(i for i in idxs if gens[i] is Q)
                row[i] = Q.e
            relations.append(row)
            elements.append(field.elt(q))
    certified = False
    for _ in range(64):
        group, U, diag = _cokernel(relations, k)
        new_rel = _find_principal_class(field, gens, group, U, diag)
        if new_rel is None:
            certified = True
            break
        relations.append(new_rel[0])
        elements.append(new_rel[1])
    data = ClassGroupData(field, group, gens, relations, elements, certified, U, diag)
    field._class_cache = data
    return data


def _cokernel(relations, k):
    m = [row[:] for row in relations]
    mt = la.transpose(m)
    d, u, v = la.smith_normal_form(mt)
    diag = [d[i][i] if i < len(d) and i < len(d[0]) else 0 for i in range(k)]
    if any(x == 0 for x in diag):
        raise CertificationError("relations do not yet present a finite group")
    group = la.FinAbGroup(tuple(sorted(x for x in diag if x > 1)))
    return group, u, diag


def _find_principal_class(field, gens, group, U, diag):
    """Search the nonzero classes of the computed cokernel for one whose
    representative ideal is principal; return (relation_row, generator)."""
    k = len(gens)
    Uinv = _int_inverse(U)
    nontrivial = [i for i, d in enumerate(diag) if d > 1]
    for coords in _group_elements([diag[i] for i in nontrivial]):
        if all(c == 0 for c in coords):
            continue
        y = [0] * k
        for c, i in zip(coords, nontrivial):
            y[i] = c
        exps = la.mat_vec(Uinv, y)
        exps = [e % _exp_mod(diag) for e in exps]
        lat = _ideal_power_product(field, gens, exps)
        g = principal_generator(field, lat)
        if g is not None:
            return exps, g
    return None


def _exp_mod(diag):
    m = 1
    for d in diag:
        if d > 1:
            m = m * d // math.gcd(m, d)
    return max(m, 1)


def _group_elements(orders):
    if not orders:
        yield ()
        return
    for rest in _group_elements(orders[1:]):
        for c in range(orders[0]):
            yield (c,) + rest


def _int_inverse(U):
    n = len(U)
    cols = []
    for j in range(n):
        e = [int(i == j) for i in range(n)]
        sol = la.solve_integer(U, e)
        assert sol is not None
        cols.append(sol)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def _ideal_power_product(field, gens, exps):
    lat = None
    for P, e in zip(gens, exps):
        for _ in range(e):
            lat = P.lattice() if lat is None else lattice_mul(field, lat, P.lattice())
    if lat is None:
        return la.identity(field.degree)
    return lat


def solve_relation_element(data: ClassGroupData, target: list[int]) -> NFElement | None:
    """Element x with (x) = prod P_i^target[i], as an explicit product of
    the stored relation generators; None if target is not in the relation
    lattice."""
    if not data.generating_primes:
        return None
    rows = data.relation_matrix
    mt = la.transpose(rows)  # columns = relations
    sol = la.solve_integer(mt, target)
    if sol is None:
        return None
    x = data.field.one
    for c, g in zip(sol, data.relation_elements):
        x = x * g**c
    return x
