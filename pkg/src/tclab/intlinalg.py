"""Exact linear algebra over Z and F_p.

Everything here works on small dense matrices represented as lists of
lists of Python ints.  No floating point anywhere; transforms are kept
unimodular so results can be certified exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field


Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def mat_copy(m: Matrix) -> Matrix:
    return [row[:] for row in m]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    n, k = len(a), len(a[0])
    assert not b or len(b) == k
    cols = len(b[0]) if b else 0
    out = zeros(n, cols)
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            x = ai[t]
            if x:
                bt = b[t]
                for j in range(cols):
                    oi[j] += x * bt[j]
    return out


def mat_vec(a: Matrix, v: list[int]) -> list[int]:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(m: Matrix) -> Matrix:
    return [list(col) for col in zip(*m)] if m else []


def det(m: Matrix) -> int:
    """Determinant by fraction-free Bareiss elimination (exact)."""
    n = len(m)
    if n == 0:
        return 1
    a = mat_copy(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[-1][-1]


@dataclass(frozen=True)
class FinAbGroup:
    """Finite abelian group in Smith normal form.

    invariant_factors is the ascending divisibility chain d_1 | d_2 | ...,
    all >= 2; the trivial group has an empty list.
    """

    invariant_factors: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        facs = tuple(int(d) for d in self.invariant_factors if int(d) != 1)
        object.__setattr__(self, "invariant_factors", facs)
        for a, b in zip(facs, facs[1:]):
            if b % a != 0:
                raise ValueError(f"invariant factors violate divisibility: {facs}")
        if any(d < 2 for d in facs):
            raise ValueError(f"invariant factors must be >= 2 or absent: {facs}")

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def order(self) -> int:
        n = 1
        for d in self.invariant_factors:
            n *= d
        return n

    def p_rank(self, p: int) -> int:
        return sum(1 for d in self.invariant_factors if d % p == 0)

    def p_part(self) -> "FinAbGroup":
        raise TypeError("p_part needs a prime; use p_primary(p)")

    def p_primary(self, p: int) -> "FinAbGroup":
        facs = []
        for d in self.invariant_factors:
            pk = 1
            while d % p == 0:
                pk *= p
                d //= p
            if pk > 1:
                facs.append(pk)
        return FinAbGroup(tuple(facs))

    def __str__(self) -> str:
        if self.is_trivial:
            return "0"
        return " x ".join(f"Z/{d}" for d in self.invariant_factors)


def _min_pivot(a: Matrix, t: int):
    """Smallest nonzero |entry| in the trailing block starting at (t, t)."""
    best = None
    for i in range(t, len(a)):
        for j in range(t, len(a[0])):
            v = a[i][j]
            if v and (best is None or abs(v) < abs(best[2])):
                best = (i, j, v)
    return best


def smith_normal_form(m: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return (d, u, v) with u*m*v = d diagonal, divisibility chain on the
    diagonal, and u, v unimodular.

    Classic minimal-pivot reduction: at each step the smallest nonzero
    entry of the trailing block is moved to the pivot and used to reduce
    its row and column.  Since the pivot's absolute value strictly drops
    whenever a remainder survives, entries stay small and the loop
    terminates.
    """
    rows = len(m)
    cols = len(m[0]) if m else 0
    a = mat_copy(m)
    u = identity(rows)
    v = identity(cols)
    t = 0
    while t < min(rows, cols):
        piv = _min_pivot(a, t)
        if piv is None:
            break
        i, j, _ = piv
        if i != t:
            a[t], a[i] = a[i], a[t]
            u[t], u[i] = u[i], u[t]
        if j != t:
            for row in a:
                row[t], row[j] = row[j], row[t]
            for row in v:
                row[t], row[j] = row[j], row[t]
        # One reduction sweep; if any remainder survives it becomes the
        # new (strictly smaller) pivot on the next pass.
        clean = True
        for i in range(t + 1, rows):
            if a[i][t]:
                q = a[i][t] // a[t][t]
                for k in range(cols):
                    a[i][k] -= q * a[t][k]
                for k in range(rows):
                    u[i][k] -= q * u[t][k]
                if a[i][t]:
                    clean = False
        for j in range(t + 1, cols):
            if a[t][j]:
                q = a[t][j] // a[t][t]
                for row in a:
                    row[j] -= q * row[t]
                for row in v:
                    row[j] -= q * row[t]
                if a[t][j]:
                    clean = False
        if not clean:
            continue
        # Pivot must divide the whole trailing block for the chain; if
        # not, fold the offending row in and re-pivot.
        offender = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if a[i][j] % a[t][t] != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            for k in range(cols):
                a[t][k] += a[offender][k]
            for k in range(rows):
                u[t][k] += u[offender][k]
            continue
        if a[t][t] < 0:
            for k in range(cols):
                a[t][k] = -a[t][k]
            for k in range(rows):
                u[t][k] = -u[t][k]
        t += 1
    return a, u, v


def snf_cokernel(m: Matrix, n_generators: int | None = None) -> FinAbGroup:
    """Cokernel Z^cols / (row span of m), m read as a relation matrix.

    Rows are relations among n_generators abstract generators (defaults to
    the column count).  A zero column contributes a Z factor, which is
    rejected here: callers in this package always present finite groups.
    """
    cols = len(m[0]) if m else (n_generators or 0)
    if n_generators is None:
        n_generators = cols
    if not m:
        if n_generators:
            raise ValueError("free cokernel is not a finite abelian group")
        return FinAbGroup()
    d, _, _ = smith_normal_form(m)
    rank = sum(1 for i in range(min(len(d), cols)) if d[i][i])
    if rank < cols:
        raise ValueError("relation matrix does not present a finite group")
    facs = sorted(d[i][i] for i in range(cols) if d[i][i] > 1)
    return FinAbGroup(tuple(facs))


def hnf_column(m: Matrix) -> Matrix:
    """Column-style Hermite normal form of the lattice spanned by the
    columns of m.  Returns an n x r lower-triangular-ish basis with
    positive pivots, r = rank."""
    n = len(m)
    cols = [list(c) for c in zip(*m)] if m else []
    basis: list[list[int]] = []
    for row in range(n):
        # Reduce all candidate columns against each other at this row.
        live = [c for c in cols if any(c[row:])]
        rest = [c for c in cols if not any(c[row:])]
        cols = live
        nonzero = [c for c in cols if c[row]]
        while len(nonzero) > 1:
            nonzero.sort(key=lambda c: abs(c[row]))
            c0 = nonzero[0]
            for c in nonzero[1:]:
                q = c[row] // c0[row]
                for k in range(n):
                    c[k] -= q * c0[k]
            nonzero = [c for c in cols if c[row]]
        if nonzero:
            piv = nonzero[0]
            if piv[row] < 0:
                for k in range(n):
                    piv[k] = -piv[k]
            # Reduce earlier basis vectors' entries at this row into [0, piv).
            for b in basis:
                q = b[row] // piv[row]
                if q:
                    for k in range(n):
                        b[k] -= q * piv[k]
            basis.append(piv)
            cols = [c for c in cols if c is not piv]
        cols.extend(rest)
    return [list(r) for r in zip(*basis)] if basis else [[] for _ in range(n)]


def solve_integer(a: Matrix, b: list[int]) -> list[int] | None:
    """One integer solution x of a @ x = b, or None if unsolvable over Z."""
    if not a:
        return [] if not any(b) else None
    d, u, v = smith_normal_form(a)
    rows, cols = len(a), len(a[0])
    c = mat_vec(u, b)
    y = [0] * cols
    for i in range(min(rows, cols)):
        if d[i][i]:
            if c[i] % d[i][i] != 0:
                return None
            y[i] = c[i] // d[i][i]
        elif c[i]:
            return None
    for i in range(min(rows, cols), rows):
        if c[i]:
            return None
    return mat_vec(v, y)


def integer_kernel(a: Matrix) -> list[list[int]]:
    """Basis of the integer kernel {x : a @ x = 0}."""
    if not a:
        return []
    d, _, v = smith_normal_form(a)
    rows, cols = len(a), len(a[0])
    rank = sum(1 for i in range(min(rows, cols)) if d[i][i])
    return [[v[i][j] for i in range(cols)] for j in range(rank, cols)]


# ---------------------------------------------------------------------------
# F_p matrices


@dataclass
class FpMatrix:
    """Dense matrix over Z/p with all entries kept reduced."""

    rows: int
    cols: int
    entries: list[list[int]]
    p: int

    @classmethod
    def from_rows(cls, rows: list[list[int]], p: int, cols: int | None = None) -> "FpMatrix":
        if cols is None:
            cols = len(rows[0]) if rows else 0
        ent = [[x % p for x in r] for r in rows]
        return cls(len(ent), cols, ent, p)

    def copy(self) -> "FpMatrix":
        return FpMatrix(self.rows, self.cols, [r[:] for r in self.entries], self.p)


def fp_rref(m: FpMatrix) -> tuple[FpMatrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    a = m.copy()
    p = a.p
    pivots = []
    r = 0
    for c in range(a.cols):
        pr = next((i for i in range(r, a.rows) if a.entries[i][c]), None)
        if pr is None:
            continue
        a.entries[r], a.entries[pr] = a.entries[pr], a.entries[r]
        inv = pow(a.entries[r][c], -1, p)
        a.entries[r] = [(x * inv) % p for x in a.entries[r]]
        for i in range(a.rows):
            if i != r and a.entries[i][c]:
                f = a.entries[i][c]
                a.entries[i] = [(x - f * y) % p for x, y in zip(a.entries[i], a.entries[r])]
        pivots.append(c)
        r += 1
        if r == a.rows:
            break
    return a, pivots


def fp_rank(m: FpMatrix) -> int:
    return len(fp_rref(m)[1])


def fp_kernel(m: FpMatrix) -> list[list[int]]:
    """Basis of the right kernel of m over F_p."""
    rref, pivots = fp_rref(m)
    p = m.p
    free = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [0] * m.cols
        vec[fc] = 1
        for r, pc in enumerate(pivots):
            vec[pc] = (-rref.entries[r][fc]) % p
        basis.append(vec)
    return basis


def fp_solve(m: FpMatrix, b: list[int]) -> list[int] | None:
    """One solution of m @ x = b over F_p, or None."""
    aug = FpMatrix.from_rows(
        [row + [bv % m.p] for row, bv in zip(m.entries, b)], m.p, m.cols + 1
    )
    rref, pivots = fp_rref(aug)
    if m.cols in pivots:
        return None
    x = [0] * m.cols
    for r, pc in enumerate(pivots):
        x[pc] = rref.entries[r][m.cols]
    return x


# ---------------------------------------------------------------------------
# Small exact helpers over Q (Fractions), used for basis validation and
# norms.  Plain Gaussian elimination; inputs are tiny.


def frac_det(m) -> "Fraction":
    from fractions import Fraction

    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    det_val = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k]), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det_val = -det_val
        det_val *= a[k][k]
        inv = 1 / a[k][k]
        a[k] = [x * inv for x in a[k]]
        for i in range(k + 1, n):
            f = a[i][k]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return det_val


def frac_inv(m):
    from fractions import Fraction

    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[k], a[piv] = a[piv], a[k]
        inv = 1 / a[k][k]
        a[k] = [x * inv for x in a[k]]
        for i in range(n):
            if i != k and a[i][k]:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return [row[n:] for row in a]


def frac_solve(m, b):
    inv = frac_inv(m)
    return [sum(inv[i][j] * b[j] for j in range(len(b))) for i in range(len(inv))]
