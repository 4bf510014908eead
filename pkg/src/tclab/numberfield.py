"""Number fields at desk scale: construction, element arithmetic, prime
factorization, residue fields and power-residue classes.

Fields are given by a monic irreducible integer polynomial f of degree
n <= 6.  Elements carry rational coordinates with respect to a fixed
integral basis.  Everything is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import sympy

from . import intlinalg as la
from . import polys
from .polys import ResidueField, gfp_factor, gfp_gcd, gfp_trim


class FieldError(ValueError):
    pass


def _sympy_poly(coeffs):
    x = sympy.Symbol("x")
    return sympy.Poly(list(reversed(coeffs)), x)


@dataclass(frozen=True)
class NFElement:
    field: "NumberField"
    coords: tuple[Fraction, ...]  # w.r.t. the integral basis

    def __add__(self, other):
        other = self.field.elt(other)
        return NFElement(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        other = self.field.elt(other)
        return NFElement(self.field, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return NFElement(self.field, tuple(-a for a in self.coords))

    def __mul__(self, other):
        other = self.field.elt(other)
        return self.field._mul(self, other)

    __radd__ = __add__
    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.elt(other)
        return isinstance(other, NFElement) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def inverse(self) -> "NFElement":
        m = self.field._mult_matrix(self)
        sol = la.frac_solve(m, self.field._one_coords)
        return NFElement(self.field, tuple(sol))

    def __truediv__(self, other):
        other = self.field.elt(other)
        return self * other.inverse()

    def norm(self) -> Fraction:
        return la.frac_det(self.field._mult_matrix(self))

    def trace(self) -> Fraction:
        m = self.field._mult_matrix(self)
        return sum(m[i][i] for i in range(len(m)))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def power_coords(self) -> tuple[Fraction, ...]:
        """Coordinates in the power basis 1, theta, ..., theta^(n-1)."""
        B = self.field._basis_rows
        n = self.field.degree
        return tuple(
            sum(self.coords[i] * B[i][j] for i in range(n)) for j in range(n)
        )

    def denominator(self) -> int:
        return math.lcm(*(c.denominator for c in self.coords)) if self.coords else 1

    def minimal_poly(self) -> tuple:
        """Monic minimal polynomial over Q, ascending coefficients."""
        K = self.field
        n = K.degree
        pows = [K.one]
        for _ in range(n):
            pows.append(pows[-1] * self)
        rows = [[Fraction(p.coords[j]) for p in pows] for j in range(n)]
        for deg in range(1, n + 1):
            sub = [row[: deg + 1] for row in rows]
            ker = _frac_kernel(sub)
            if ker:
                v = ker[0]
                lead = v[deg]
                return tuple(c / lead for c in v)
        raise RuntimeError("minimal polynomial not found")  # pragma: no cover

    def __repr__(self):
        return f"NFElement({list(self.coords)})"


def _frac_kernel(rows):
    """Kernel basis of a Fraction matrix given by rows."""
    if not rows:
        return []
    m = [list(r) for r in rows]
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        out.append(v)
    return out


class NumberField:
    """A number field Q[x]/(f) with a fixed integral basis."""

    def __init__(self, min_poly, integral_basis=None, label: str | None = None):
        coeffs = tuple(int(c) for c in min_poly)
        if len(coeffs) < 2:
            raise FieldError("polynomial must have degree >= 1")
        if coeffs[-1] != 1:
            raise FieldError("polynomial must be monic")
        self.min_poly = coeffs
        self.degree = len(coeffs) - 1
        if self.degree > 6:
            raise FieldError("fields of degree > 6 are out of scope")
        sp = _sympy_poly(coeffs)
        if self.degree > 1 and not sp.is_irreducible:
            raise FieldError(f"polynomial {list(coeffs)} is reducible over Q")
        self.disc_poly = int(sympy.discriminant(sp.as_expr())) if self.degree > 1 else 1
        r1 = sp.count_roots() if self.degree > 1 else 1
        self.signature = (r1, (self.degree - r1) // 2)
        self.label = label or f"deg{self.degree}field"

        if integral_basis is None:
            self._set_power_basis()
            self._check_maximality()
            self.disc = self.disc_poly
            self.index = 1
        else:
            self._set_basis([[Fraction(c) for c in row] for row in integral_basis])
        self._one_coords = self._power_to_basis([Fraction(1)] + [Fraction(0)] * (self.degree - 1))
        if self._one_coords != [Fraction(1)] + [Fraction(0)] * (self.degree - 1):
            raise FieldError("integral basis must start with 1")
        self.one = NFElement(self, tuple(self._one_coords))
        self.zero = NFElement(self, tuple(Fraction(0) for _ in range(self.degree)))
        self._mult_table = self._build_mult_table()
        self._factor_gen_cache = None
        self._prime_cache: dict[int, tuple] = {}

    # -- construction helpers ------------------------------------------------

    def _set_power_basis(self):
        n = self.degree
        self._basis_rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        self._basis_inv = [row[:] for row in self._basis_rows]

    def _set_basis(self, rows):
        n = self.degree
        if len(rows) != n or any(len(r) != n for r in rows):
            raise FieldError("integral basis must be a square matrix of size degree")
        self._basis_rows = rows
        try:
            self._basis_inv = la.frac_inv(rows)
        except ZeroDivisionError:
            raise FieldError("integral basis rows are linearly dependent") from None
        # Index of Z[theta] in the claimed order.
        d = la.frac_det(rows)
        if d == 0:
            raise FieldError("integral basis rows are linearly dependent")
        idx = Fraction(1) / abs(d)
        if idx.denominator != 1:
            raise FieldError("integral basis does not contain Z[theta] with integral index")
        self.index = int(idx)
        if self.disc_poly % (self.index**2) != 0:
            raise FieldError("integral basis discriminant does not divide disc(f)")
        self.disc = self.disc_poly // (self.index**2)
        # Closure under multiplication is checked in _build_mult_table.

    def _check_maximality(self):
        for q in _small_prime_squares_dividing(self.disc_poly):
            if not dedekind_is_maximal(self.min_poly, q):
                raise FieldError(
                    f"Z[theta] is not maximal at {q}; supply an integral basis"
                )

    def _build_mult_table(self):
        n = self.degree
        table = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                prod = self._mul_power(self._basis_rows[i], self._basis_rows[j])
                coords = self._power_to_basis(prod)
                if any(c.denominator != 1 for c in coords):
                    raise FieldError(
                        f"integral basis not closed under multiplication at b{i}*b{j}"
                    )
                table[i][j] = table[j][i] = tuple(coords)
        return table

    def _mul_power(self, a, b):
        """Multiply two power-basis coordinate vectors modulo min_poly."""
        n = self.degree
        prod = [Fraction(0)] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        # Reduce modulo f: theta^n = -(c_0 + ... + c_{n-1} theta^{n-1}).
        f = self.min_poly
        for k in range(2 * n - 2, n - 1, -1):
            c = prod[k]
            if c:
                prod[k] = Fraction(0)
                for j in range(n):
                    prod[k - n + j] -= c * f[j]
        return prod[:n]

    def _power_to_basis(self, vec):
        inv = self._basis_inv
        n = self.degree
        return [sum(Fraction(vec[i]) * inv[i][j] for i in range(n)) for j in range(n)]

    # -- element constructors ------------------------------------------------

    def elt(self, value) -> NFElement:
        if isinstance(value, NFElement):
            if value.field is not self:
                raise FieldError("element belongs to a different field")
            return value
        if isinstance(value, (int, Fraction)):
            coords = [Fraction(value) * c for c in self._one_coords]
            return NFElement(self, tuple(coords))
        coords = tuple(Fraction(c) for c in value)
        if len(coords) != self.degree:
            raise FieldError("wrong coordinate length")
        return NFElement(self, coords)

    def from_power(self, vec) -> NFElement:
        vec = list(vec) + [0] * (self.degree - len(vec))
        return NFElement(self, tuple(self._power_to_basis([Fraction(v) for v in vec])))

    @property
    def theta(self) -> NFElement:
        return self.from_power([0, 1])

    def _mul(self, a: NFElement, b: NFElement) -> NFElement:
        n = self.degree
        out = [Fraction(0)] * n
        for i in range(n):
            x = a.coords[i]
            if x:
                for j in range(n):
                    y = b.coords[j]
                    if y:
                        t = self._mult_table[i][j]
                        xy = x * y
                        for k in range(n):
                            if t[k]:
                                out[k] += xy * t[k]
        return NFElement(self, tuple(out))

    def _mult_matrix(self, a: NFElement):
        """Matrix of multiplication by a on the integral basis (columns)."""
        n = self.degree
        cols = []
        for j in range(n):
            bj = NFElement(self, tuple(self._basis_rows_coords(j)))
            cols.append((a * bj).coords)
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    def _basis_rows_coords(self, j):
        return [Fraction(int(i == j)) for i in range(self.degree)]

    # -- discriminant-scale data ----------------------------------------------

    def minkowski_bound(self) -> int:
        """Integer upper bound for the Minkowski bound."""
        n = self.degree
        r2 = self.signature[1]
        # 4/pi < 1.27324; sqrt|d| <= isqrt(|d|) + 1.
        bound = (
            Fraction(math.factorial(n), n**n)
            * Fraction(127324, 100000) ** r2
            * (math.isqrt(abs(self.disc)) + 1)
        )
        return math.ceil(bound)

    # -- prime factorization ---------------------------------------------------

    def _factor_generator(self):
        """An element gen with Z[gen] equal to the full order, used to
        factor primes dividing the index.  None if the search fails."""
        if self.index == 1:
            return ("theta", self.min_poly, None)
        if self._factor_gen_cache is not None:
            return self._factor_gen_cache
        n = self.degree
        for coords in _coord_candidates(n, 3):
            cand = self.elt(coords)
            mp = cand.minimal_poly()
            if len(mp) != n + 1:
                continue
            ints = polys.poly_trim([c for c in mp])
            if any(Fraction(c).denominator != 1 for c in mp):
                continue
            mp_int = tuple(int(c) for c in mp)
            d = int(sympy.discriminant(_sympy_poly(mp_int).as_expr()))
            if d == self.disc:
                # Coordinates of x in Z[cand]: change of basis matrix.
                pows = [self.one]
                for _ in range(n - 1):
                    pows.append(pows[-1] * cand)
                P = [[p.coords[j] for j in range(n)] for p in pows]
                Pinv = la.frac_inv(P)
                self._factor_gen_cache = ("aux", mp_int, (cand, Pinv))
                return self._factor_gen_cache
        raise FieldError(
            "no monogenic generator found; cannot factor primes dividing the index"
        )

    def factor_prime(self, q: int) -> list["PrimeIdeal"]:
        if q in self._prime_cache:
            return list(self._prime_cache[q])
        if self.degree == 1:
            prime = PrimeIdeal(self, q, 1, 1, (0, 1), "theta", 1)
            self._prime_cache[q] = (prime,)
            return [prime]
        if self.index % q != 0:
            kind, genpoly, _ = "theta", self.min_poly, None
        else:
            kind, genpoly, _ = self._factor_generator()
        fmodq = gfp_trim(genpoly, q)
        factors = gfp_factor(fmodq, q)
        primes = []
        for idx, (g, e) in enumerate(factors, start=1):
            primes.append(PrimeIdeal(self, q, e, polys.poly_deg(g), g, kind, idx))
        assert sum(P.e * P.f_deg for P in primes) == self.degree
        self._prime_cache[q] = tuple(primes)
        return primes

    def prime(self, q: int, index: int = 1) -> "PrimeIdeal":
        """The index-th prime above q in the deterministic ordering."""
        primes = self.factor_prime(q)
        if not 1 <= index <= len(primes):
            raise FieldError(f"no prime {q}_{index}: only {len(primes)} above {q}")
        return primes[index - 1]

    def primes_of_norm_up_to(self, bound: int) -> list["PrimeIdeal"]:
        out = []
        for q in _primes_up_to(bound):
            for P in self.factor_prime(q):
                if P.norm <= bound:
                    out.append(P)
        out.sort(key=lambda P: (P.norm, P.q, P.index))
        return out

    def __repr__(self):
        return f"NumberField({self.label}, {list(self.min_poly)})"


def _coord_candidates(n, height):
    for h in range(1, height + 1):
        for vec in _boxes(n, h):
            if max(abs(v) for v in vec) == h:
                yield vec


def _boxes(n, h):
    if n == 0:
        yield ()
        return
    for rest in _boxes(n - 1, h):
        for c in range(-h, h + 1):
            yield rest + (c,)


def _small_prime_squares_dividing(d: int):
    d = abs(d)
    out = []
    q = 2
    while q * q <= d:
        if d % (q * q) == 0:
            out.append(q)
            while d % q == 0:
                d //= q
        elif d % q == 0:
            d //= q
        q += 1
    return out


def dedekind_is_maximal(f, q: int) -> bool:
    """Dedekind's criterion: is Z[theta] maximal at q?"""
    fq = gfp_trim(f, q)
    factors = gfp_factor(fq, q)
    gbar = (1,)
    hbar = (1,)
    for g, e in factors:
        gbar = polys.gfp_mul(gbar, g, q)
        hbar = polys.gfp_mul(hbar, _gfp_pow(g, e - 1, q), q)
    glift = tuple(int(c) for c in gbar)
    hlift = tuple(int(c) for c in hbar)
    gh = polys.poly_mul(glift, hlift)
    diff = polys.poly_sub(gh, f)
    F = tuple(c // q for c in diff)
    assert all(c % q == 0 for c in diff)
    gcd1 = gfp_gcd(gfp_trim(F, q), gbar, q)
    gcd2 = gfp_gcd(gcd1, hbar, q)
    return polys.poly_deg(gcd2) <= 0


def _gfp_pow(g, e, q):
    out = (1,)
    for _ in range(e):
        out = polys.gfp_mul(out, g, q)
    return out


@lru_cache(maxsize=None)
def _primes_up_to(bound: int) -> tuple[int, ...]:
    if bound < 2:
        return ()
    sieve = bytearray([1]) * (bound + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(bound) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return tuple(i for i in range(bound + 1) if sieve[i])


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# Prime ideals


class PrimeIdeal:
    """A prime of the field above the rational prime q, represented by the
    pair (q, g(gen)) where g is a monic irreducible factor of gen's
    minimal polynomial mod q."""

    def __init__(self, field, q, e, f_deg, gpoly, gen_kind, index):
        self.field = field
        self.q = q
        self.e = e
        self.f_deg = f_deg
        self.gpoly = gpoly  # over F_q, ascending coefficients
        self.gen_kind = gen_kind  # "theta" or "aux"
        self.index = index  # 1-based position in the deterministic ordering
        self.norm = q**f_deg
        self.residue_field = ResidueField(q, gpoly)
        self._lattice = None
        self._power_lattices: dict[int, list] = None

    @property
    def label(self) -> str:
        return f"{self.q}_{self.index}"

    def second_generator(self) -> NFElement:
        """The element g(gen) of the two-element representation (q, g(gen))."""
        K = self.field
        if K.degree == 1:
            return K.elt(self.q)
        gen = K.theta if self.gen_kind == "theta" else K._factor_generator()[2][0]
        acc = K.zero
        for c in reversed(self.gpoly):
            acc = acc * gen + K.elt(int(c))
        return acc

    def _gen_coords(self, x: NFElement):
        """Coordinates of x in the power basis of the factoring generator."""
        K = self.field
        if self.gen_kind == "theta":
            return x.power_coords()
        _, _, (cand, Pinv) = K._factor_generator()
        n = K.degree
        return tuple(
            sum(x.coords[i] * Pinv[i][j] for i in range(n)) for j in range(n)
        )

    def residue(self, x: NFElement):
        """Image of x in the residue field; requires x integral at q
        (coordinate denominators coprime to q)."""
        rf = self.residue_field
        coords = self._gen_coords(self.field.elt(x))
        lifted = []
        for c in coords:
            if c.denominator % self.q == 0:
                raise FieldError(f"element is not integral at {self.label}")
            lifted.append(c.numerator * pow(c.denominator, -1, self.q) % self.q)
        return rf.elt(lifted)

    def is_unit_at(self, x: NFElement) -> bool:
        x = self.field.elt(x)
        den = x.denominator()
        if den % self.q == 0:
            return self.valuation(x) == 0
        return not self.residue_field.is_zero(self.residue(x))

    # -- ideal lattice machinery ------------------------------------------

    def lattice(self):
        """HNF basis (columns) of the ideal as a sublattice of the ring of
        integers, in integral-basis coordinates."""
        if self._lattice is None:
            self._lattice = _ideal_lattice(self.field, self.q, self.second_generator())
        return self._lattice

    def valuation(self, x: NFElement) -> int:
        """v_P(x) for nonzero x (possibly non-integral)."""
        x = self.field.elt(x)
        if x.is_zero():
            raise FieldError("valuation of zero")
        den = x.denominator()
        y = x * den
        v = _lattice_valuation(self.field, self, y)
        vden = 0
        d = den
        while d % self.q == 0:
            d //= self.q
            vden += 1
        return v - self.e * vden


def _ideal_lattice(field, q, alpha):
    """HNF column basis of the ideal (q, alpha)."""
    n = field.degree
    gens = []
    for j in range(n):
        e = [0] * n
        e[j] = q
        gens.append(e)
    for j in range(n):
        bj = NFElement(field, tuple(field._basis_rows_coords(j)))
        prod = alpha * bj
        assert prod.is_integral()
        gens.append([int(c) for c in prod.coords])
    m = [[gens[k][i] for k in range(len(gens))] for i in range(n)]
    return la.hnf_column(m)


def lattice_mul(field, lat1, lat2):
    """Product of two full-rank ideal lattices (HNF column bases)."""
    n = field.degree
    cols1 = list(zip(*lat1))
    cols2 = list(zip(*lat2))
    gens = []
    for c1 in cols1:
        x = NFElement(field, tuple(Fraction(v) for v in c1))
        for c2 in cols2:
            y = NFElement(field, tuple(Fraction(v) for v in c2))
            gens.append([int(v) for v in (x * y).coords])
    m = [[g[i] for g in gens] for i in range(n)]
    return la.hnf_column(m)


def lattice_contains(lat, vec) -> bool:
    sol = la.solve_integer(lat, list(vec))
    return sol is not None


def lattice_norm(lat) -> int:
    return abs(la.det(lat))


def _lattice_valuation(field, P, y: NFElement) -> int:
    """Largest k with integral y in P^k, by divide-and-test on lattices."""
    base = P.lattice()
    vec = [int(c) for c in y.coords]
    if not lattice_contains(base, vec):
        return 0
    v = 1
    cur = base
    while True:
        cur = lattice_mul(field, cur, base)
        if not lattice_contains(cur, vec):
            return v
        v += 1
        if v > 4 * 64:  # pragma: no cover - sanity stop
            raise RuntimeError("runaway valuation")


def ideal_sum_contains_one(field, lat1, lat2):
    """If lat1 + lat2 = (1), return (a, b) with a in lat1, b in lat2 and
    a + b = 1, as NFElements; else None."""
    n = field.degree
    cols = [list(c) for c in zip(*lat1)] + [list(c) for c in zip(*lat2)]
    m = [[cols[k][i] for k in range(len(cols))] for i in range(n)]
    one = [int(c) for c in field.one.coords]
    sol = la.solve_integer(m, one)
    if sol is None:
        return None
    k1 = len(lat1[0])
    a = field.zero
    for j in range(k1):
        col = [Fraction(lat1[i][j]) for i in range(n)]
        a = a + NFElement(field, tuple(Fraction(sol[j]) * c for c in col))
    b = field.one - a
    return a, b


Q = NumberField((0, 1), label="q")
