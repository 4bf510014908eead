"""Selmer groups V_S(K,F_p)/K^{xp} and the two routes to dim RusB_S.

V_emptyset is assembled from units mod p-th powers plus one element alpha
per order-p-divisible class group factor (with (alpha) = a^p).  Local
conditions at the primes of S cut out V_S as an F_p kernel.  The dual
dimension is crosschecked against the ray-class-group formula; a mismatch
between the two routes is a hard error, and that agreement is the main
self-test of the whole package.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import intlinalg as la
from .classunit import class_group, pth_root, solve_relation_element, unit_group
from .numberfield import FieldError, NFElement, NumberField, PrimeIdeal
from .rayclass import ray_class_p_part


def power_residue_class(x: NFElement, P: PrimeIdeal, p: int) -> int:
    """Class of x in the F_p quotient of (O/P)^*; 0 iff x is a p-th power
    in the completion at P.  Requires Norm(P) = 1 mod p and v_P(x) = 0."""
    if (P.norm - 1) % p != 0:
        raise FieldError(f"{P.label} has norm not 1 mod {p}")
    rf = P.residue_field
    x = P.field.elt(x)
    den = x.denominator()
    num = x * den

    if not hasattr(P, "_chi_base"):
        P._chi_base = {}
    if p not in P._chi_base:
        P._chi_base[p] = rf.subgroup_generator(p)
    z = P._chi_base[p]

    def chi(y) -> int:
        r = P.residue(y)
        if rf.is_zero(r):
            raise FieldError(f"element not coprime to {P.label}")
        t = rf.pow(r, (P.norm - 1) // p)
        return rf.dlog(t, z, p)

    val = chi(num)
    if den != 1:
        val = (val - chi(P.field.elt(den))) % p
    return val


@dataclass
class SelmerBasis:
    field: NumberField
    S: list[PrimeIdeal]
    p: int
    generators: list[NFElement]
    local_matrix: la.FpMatrix  # rows = V_emptyset gens, cols = conditions
    v0_generators: list[NFElement]
    v0_labels: list[str]
    kernel_vectors: list[list[int]]  # exponent vectors over v0_generators
    certified: bool
    aux_primes: list[PrimeIdeal]

    @property
    def dim(self) -> int:
        return len(self.generators)

    def verify(self) -> bool:
        """Re-test every generator against the defining conditions from
        scratch: valuations = 0 mod p on the full support, local p-th
        power at each q in S."""
        for g in self.generators:
            for P in _support(self.field, g):
                if P.valuation(g) % self.p != 0:
                    return False
            for P in self.S:
                if (P.norm - 1) % self.p != 0:
                    continue
                if power_residue_class(g, P, self.p) != 0:
                    return False
        return True


def _support(field: NumberField, x: NFElement):
    nrm = x.norm()
    qs = set(_rational_factors(abs(nrm.numerator)))
    qs |= set(_rational_factors(nrm.denominator))
    qs |= set(_rational_factors(x.denominator()))
    out = []
    for q in sorted(qs):
        out.extend(field.factor_prime(q))
    return out


def _rational_factors(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def v_empty_generators(field: NumberField, p: int):
    """Generators of V_emptyset/K^{xp}: units mod p plus one alpha per
    p-divisible class group invariant factor, with (alpha) = a^p."""
    sat = tuple(sorted({2, 3, 5, p}))
    ub = unit_group(field, saturate_at=sat)
    cls = class_group(field)
    gens: list[NFElement] = []
    labels: list[str] = []
    for i, u in enumerate(ub.fundamental_units):
        gens.append(u)
        labels.append(f"u{i + 1}")
    if ub.delta_p(p):
        gens.append(ub.torsion_gen)
        labels.append("zeta")
    if cls._diag:
        from .classunit import _int_inverse

        Uinv = _int_inverse(cls._U)
        for i, d in enumerate(cls._diag):
            if d > 1 and d % p == 0:
                w = [Uinv[r][i] for r in range(len(Uinv))]
                alpha = solve_relation_element(cls, [d * wi for wi in w])
                if alpha is None:  # pragma: no cover
                    raise FieldError("class relation lattice inconsistent")
                gens.append(alpha)
                labels.append(f"cl{i + 1}")
    return gens, labels, (ub, cls)


def selmer_basis(field: NumberField, S: list[PrimeIdeal], p: int,
                 aux_bound: int = 10**4) -> SelmerBasis:
    for P in S:
        if P.q == p:
            raise FieldError(f"{P.label} is wild at {p}")
    gens, labels, (ub, cls) = v_empty_generators(field, p)
    # Eq-style sanity: dim V_empty must match units + class p-rank.
    r1, r2 = field.signature
    expected = r1 + r2 - 1 + ub.delta_p(p) + cls.group.p_rank(p)
    assert len(gens) == expected
    cond_primes = [P for P in S if (P.norm - 1) % p == 0]
    rows = []
    for g in gens:
        rows.append([power_residue_class(g, P, p) for P in cond_primes])
    local = la.FpMatrix.from_rows(rows, p, cols=len(cond_primes))
    # Left kernel: exponent vectors e with e . local = 0.
    tr = la.FpMatrix.from_rows(
        [[rows[i][j] for i in range(len(gens))] for j in range(len(cond_primes))],
        p, cols=len(gens))
    kernel = la.fp_kernel(tr)
    sel_gens = []
    for vec in kernel:
        x = field.one
        for g, e in zip(gens, vec):
            x = x * g**e
        sel_gens.append(x)
    certified, aux = _certify_independence(field, gens, S, p, aux_bound)
    certified = certified and cls.certified and ub.regulator_nonzero_witness
    return SelmerBasis(field, list(S), p, sel_gens, local, gens, labels,
                       kernel, certified, aux)


def _certify_independence(field, gens, S, p, aux_bound):
    """Auxiliary tame primes whose power-residue matrix on the given
    generators has full rank certify independence mod K^{xp}."""
    if not gens:
        return True, []
    skip = {P.label for P in S}
    cols = []
    aux = []
    rank = 0
    q = 2
    while q < aux_bound:
        q = _next_prime(q)
        if q == p:
            continue
        for P in field.factor_prime(q):
            if P.label in skip or (P.norm - 1) % p != 0:
                continue
            try:
                col = [power_residue_class(g, P, p) for g in gens]
            except FieldError:
                continue
            trial = cols + [col]
            m = la.FpMatrix.from_rows(
                [[trial[j][i] for j in range(len(trial))] for i in range(len(gens))],
                p, cols=len(trial))
            r = la.fp_rank(m)
            if r > rank:
                cols.append(col)
                aux.append(P)
                rank = r
            if rank == len(gens):
                return True, aux
    return False, aux


def _next_prime(n: int) -> int:
    from .numberfield import is_prime

    n += 1
    while not is_prime(n):
        n += 1
    return n


@dataclass
class H1FormulaContext:
    Z: list[PrimeIdeal]
    delta_p_K: int
    r: int
    local_deltas: list[int]
    dim_h1: int

    @property
    def rusb_dim(self) -> int:
        return self.dim_h1 + self.delta_p_K + self.r - 1 - sum(self.local_deltas)


def h1_context(field: NumberField, Z: list[PrimeIdeal], p: int) -> H1FormulaContext:
    for P in Z:
        if P.q == p:
            raise FieldError(f"{P.label} is wild at {p}")
    rcd = ray_class_p_part(field, Z, p)
    ub = unit_group(field)
    r1, r2 = field.signature
    return H1FormulaContext(
        Z=list(Z),
        delta_p_K=ub.delta_p(p),
        r=r1 + r2,
        local_deltas=[1 if (P.norm - 1) % p == 0 else 0 for P in Z],
        dim_h1=rcd.p_group.p_rank(p),
    )


def rusb_dim_via_h1(field: NumberField, Z: list[PrimeIdeal], p: int) -> int:
    return h1_context(field, Z, p).rusb_dim


class CrosscheckError(RuntimeError):
    pass


def crosscheck_rusb(field: NumberField, S: list[PrimeIdeal], p: int) -> dict:
    sb = selmer_basis(field, S, p)
    ctx = h1_context(field, S, p)
    report = {
        "field": field.label or str(field.min_poly),
        "p": p,
        "S": [P.label for P in S],
        "selmer_dim": sb.dim,
        "h1_route_dim": ctx.rusb_dim,
        "dim_h1": ctx.dim_h1,
        "delta_p": ctx.delta_p_K,
        "r": ctx.r,
        "local_deltas": ctx.local_deltas,
        "certified": sb.certified,
        "agree": sb.dim == ctx.rusb_dim,
    }
    if not report["agree"]:
        raise CrosscheckError(
            f"selmer route gives {sb.dim}, ray-class route gives "
            f"{ctx.rusb_dim}; full context: {report}; "
            f"v0 generators: {[g.coords for g in sb.v0_generators]}; "
            f"local matrix: {sb.local_matrix.entries}"
        )
    return report


# ---------------------------------------------------------------------------
# p = 2 exceptionality


@dataclass
class ExceptionalityReport:
    field: NumberField
    S: list[PrimeIdeal]
    condition_a: bool  # zeta_4 not in K
    witness_a: NFElement | None  # a root of x^2 + 1 when condition_a fails
    condition_b: bool  # unit of the form -4 a^4 exists
    witness_b: NFElement | None
    condition_c: bool
    per_prime_c: list[tuple[str, bool]]

    @property
    def exceptional(self) -> bool:
        return self.condition_a and self.condition_b and self.condition_c


def is_exceptional(field: NumberField, S: list[PrimeIdeal]) -> ExceptionalityReport:
    for P in S:
        if P.q == 2:
            raise FieldError(f"{P.label} is wild at 2")
    root = pth_root(field.elt(-1), 2)
    cond_a = root is None
    cond_b, wit_b = _unit_minus_four_fourth(field)
    bits = [(P.label, (P.norm - 1) % 4 == 0) for P in S]
    cond_c = all(b for _, b in bits)
    return ExceptionalityReport(field, list(S), cond_a, root, cond_b, wit_b,
                                cond_c, bits)


def _unit_minus_four_fourth(field: NumberField):
    """Does O_K^* meet -4 K^4?  Equivalent to -u/4 being a fourth power
    for some unit u taken over a transversal of U/U^4.  Rational case is
    settled by absolute values: |-4 a^4| = 4a^4 is never 1."""
    if field.degree == 1:
        return False, None
    ub = unit_group(field)
    reps = [field.one]
    for u in ub.fundamental_units:
        reps = [r * u**e for r in reps for e in range(4)]
    for te in range(ub.torsion_order):
        for r in reps:
            u = r * ub.torsion_gen**te
            target = u * field.elt(-1) / field.elt(4)
            half = pth_root(target, 2)
            if half is None:
                continue
            for cand in (half, -half):
                a = pth_root(cand, 2)
                if a is not None:
                    assert a**4 * field.elt(-4) == u
                    return True, a
    return False, None
