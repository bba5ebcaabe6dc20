"""Exact multiplier spectra over Q and number-field membership certificates.

The multiplier polynomial P_n of a map with rational coefficients is the
monic rational polynomial whose roots are the multipliers of all exact
period-n points (each cycle's multiplier appearing n times; the cycle of
Infinity contributes through an exactly computed extra root).  It is
assembled factor-by-factor:

* an integer fast path splits the dynatomic polynomial along clusters of
  numerically-integer multipliers: cluster roots are refined in high
  precision, multiplied into a candidate integer factor, and certified by
  exact division plus a residue identity in Z[z]/(g); everything exact;
* whatever remains is factored over Z (sympy) and each irreducible factor
  q contributes the minimal polynomial of the multiplier computed in the
  residue field Q[z]/(q) via the homogeneous orbit, so cycles through
  poles or Infinity need no special conjugation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp
import numpy as np

from . import config
from .errors import (
    DegreeCapExceeded,
    InexactDivision,
    RatdynError,
    SpectrumNotRational,
)
from .periodic import (
    dynatomic_numerator,
    infinity_exact_period,
    multiplier as cycle_multiplier,
    periodic_points,
)
from .polys import (
    factor_int_poly,
    fractions_to_int_primitive,
    idivexact,
    int_poly_irreducible,
    isquarefree,
    pdeg,
    pderiv,
    pdivmod,
    pmul,
    pscale,
    pstrip,
    psub,
    poly_to_str,
    qi_poly_to_fractions,
)
from .scalars import Qi
from .sphere import INF, ProjPoint, RationalMap, chordal

# ----------------------------------------------------------------------
# residue field Q[z]/(q)
# ----------------------------------------------------------------------


class ResidueField:
    """Q[z]/(q) for q irreducible over Q (monic Fraction modulus)."""

    def __init__(self, modulus):
        mod = [Fraction(c) for c in pstrip(modulus)]
        lead = mod[-1]
        self.mod = tuple(c / lead for c in mod)
        self.degree = len(self.mod) - 1

    def elt(self, coeffs) -> "FieldElt":
        c = [Fraction(x) for x in coeffs]
        _, r = pdivmod(c, list(self.mod))
        return FieldElt(self, tuple(r + [Fraction(0)] * (self.degree - len(r))))

    def zero(self):
        return FieldElt(self, tuple([Fraction(0)] * self.degree))

    def one(self):
        return self.elt([1])

    def gen(self):
        return self.elt([0, 1])


class FieldElt:
    __slots__ = ("field", "c")

    def __init__(self, field: ResidueField, c: tuple):
        self.field = field
        self.c = c

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.c)

    def __add__(self, o):
        if not isinstance(o, FieldElt):
            o = self.field.elt([Fraction(o)])
        return FieldElt(
            self.field, tuple(a + b for a, b in zip(self.c, o.c))
        )

    __radd__ = __add__

    def __neg__(self):
        return FieldElt(self.field, tuple(-a for a in self.c))

    def __sub__(self, o):
        if not isinstance(o, FieldElt):
            o = self.field.elt([Fraction(o)])
        return self + (-o)

    def __mul__(self, o):
        if not isinstance(o, FieldElt):
            q = Fraction(o)
            return FieldElt(self.field, tuple(a * q for a in self.c))
        prod = pmul(list(self.c), list(o.c))
        _, r = pdivmod(prod, list(self.field.mod))
        r = r + [Fraction(0)] * (self.field.degree - len(r))
        return FieldElt(self.field, tuple(r))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElt":
        # extended Euclid against the modulus
        a, b = list(self.field.mod), pstrip(list(self.c))
        if not b:
            raise ZeroDivisionError("inverse of zero residue")
        s0, s1 = [], [Fraction(1)]
        while True:
            q, r = pdivmod(a, b)
            if not r:
                break
            s0, s1 = s1, psub(s0, pmul(q, s1))
            a, b = b, r
        lead = b[-1]
        if pdeg(b) != 0:
            raise ZeroDivisionError("element not invertible (modulus reducible?)")
        inv = pscale(s1, 1 / lead)
        return self.field.elt(inv)

    def __eq__(self, o):
        if isinstance(o, FieldElt):
            return self.c == o.c
        return (self - o).is_zero()

    def __repr__(self):
        return f"FieldElt({list(self.c)})"


def minimal_polynomial(elem: FieldElt) -> list[Fraction]:
    """Monic minimal polynomial of elem over Q (Krylov linear algebra)."""
    m = elem.field.degree
    # rows: reduced vectors of 1, r, r^2, ... with combination bookkeeping
    rows: list[tuple[list[Fraction], list[Fraction]]] = []
    pivots: list[int] = []
    power = elem.field.one()
    for k in range(m + 1):
        vec = list(power.c)
        comb = [Fraction(0)] * (k + 1)
        comb[k] = Fraction(1)
        for (rv, rc), piv in zip(rows, pivots):
            if vec[piv]:
                t = vec[piv]
                for i in range(m):
                    vec[i] -= t * rv[i]
                for i in range(min(len(comb), len(rc))):
                    comb[i] -= t * rc[i]
        piv = next((i for i, v in enumerate(vec) if v), None)
        if piv is None:
            return _monic_fr(comb)
        t = vec[piv]
        rows.append(([v / t for v in vec], [c / t for c in comb]))
        pivots.append(piv)
        power = power * elem
    raise RatdynError("minimal polynomial search exceeded the field degree")


def _monic_fr(p) -> list[Fraction]:
    p = pstrip([Fraction(c) for c in p])
    lead = p[-1]
    return [c / lead for c in p]


# ----------------------------------------------------------------------
# multiplier of the generic period-n point in a residue field
# ----------------------------------------------------------------------


def _rational_pair(f: RationalMap):
    """(A, B) integer coefficient lists with f = A/B (common scaling)."""
    A = qi_poly_to_fractions(f.num)
    B = qi_poly_to_fractions(f.den)
    den = 1
    for c in list(A) + list(B):
        den = den * c.denominator // math.gcd(den, c.denominator)
    Ai = [int(c * den) for c in A]
    Bi = [int(c * den) for c in B]
    return Ai, Bi


def _hom_pad(p, d, zero):
    return list(p) + [zero] * (d + 1 - len(p))


def multiplier_element(f: RationalMap, n: int, fld: ResidueField) -> FieldElt:
    """Multiplier of the period-n points annihilated by fld's modulus.

    Runs the homogeneous orbit (X, Y) from (z, 1) in the residue field and
    uses lambda = prod det J(X_j, Y_j) / (d^n Y_n^2), with
    det J(z, 1) = d (A'B - A B'); the Y-chart scalings telescope, so
    orbits through Infinity and derivative poles need no special handling.
    """
    A = qi_poly_to_fractions(f.num)
    B = qi_poly_to_fractions(f.den)
    d = f.degree
    Apad = _hom_pad(A, d, Fraction(0))
    Bpad = _hom_pad(B, d, Fraction(0))
    W = psub(pmul(pderiv(A), B), pmul(A, pderiv(B)))
    Wpad = list(W) + [Fraction(0)] * (2 * d - 1 - len(W))
    X, Y = fld.gen(), fld.one()
    acc = fld.one()
    for _ in range(n):
        acc = acc * _hom_eval_field(Wpad, X, Y, fld)
        X, Y = _hom_eval_field(Apad, X, Y, fld), _hom_eval_field(Bpad, X, Y, fld)
    c = Y
    if c.is_zero():
        raise RatdynError("homogeneous orbit did not close projectively")
    return acc * (c * c).inverse()


def _hom_eval_field(coeffs, X, Y, fld: ResidueField) -> FieldElt:
    m = len(coeffs) - 1
    acc = fld.elt([coeffs[m]])
    Yp = None
    for i in range(m - 1, -1, -1):
        Yp = Y if Yp is None else Yp * Y
        acc = acc * X + Yp * coeffs[i]
    return acc


# ----------------------------------------------------------------------
# integer fast path: split by numerically-integer multipliers
# ----------------------------------------------------------------------


def _imulmod(a: list[int], b: list[int], g: list[int]) -> list[int]:
    """a*b mod g for monic integer g, ascending int lists."""
    out = pmul(a, b)
    dg = len(g) - 1
    while len(out) - 1 >= dg:
        c = out[-1]
        if c:
            k = len(out) - 1 - dg
            for i in range(dg):
                out[k + i] -= c * g[i]
        out.pop()
        while out and not out[-1]:
            out.pop()
    return out


def _hom_eval_intmod(coeffs: list[int], X, Y, g) -> list[int]:
    m = len(coeffs) - 1
    acc = [coeffs[m]] if coeffs[m] else []
    Yp = None
    for i in range(m - 1, -1, -1):
        Yp = list(Y) if Yp is None else _imulmod(Yp, Y, g)
        acc = _imulmod(acc, X, g)
        if coeffs[i]:
            term = [coeffs[i] * t for t in Yp]
            acc = _iadd(acc, term)
    return acc


def _iadd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    while out and not out[-1]:
        out.pop()
    return out


def _certify_integer_multiplier(f: RationalMap, n: int, g: list[int], c: int) -> bool:
    """Exact check that every root of g has multiplier exactly c:
    prod W(X_j, Y_j) == c * Y_n^2 in Z[z]/(g) (g monic)."""
    Ai, Bi = _rational_pair(f)
    d = f.degree
    Apad = _hom_pad(Ai, d, 0)
    Bpad = _hom_pad(Bi, d, 0)
    W = psub(pmul(pderiv(Ai), Bi), pmul(Ai, pderiv(Bi)))
    Wpad = list(W) + [0] * (2 * d - 1 - len(W))
    X, Y = [0, 1], [1]
    acc = [1]
    for _ in range(n):
        acc = _imulmod(acc, _hom_eval_intmod(Wpad, X, Y, g), g)
        X, Y = (
            _hom_eval_intmod(Apad, X, Y, g),
            _hom_eval_intmod(Bpad, X, Y, g),
        )
    rhs = _imulmod(Y, Y, g)
    rhs = [c * t for t in rhs]
    diff = _iadd(acc, [-t for t in rhs])
    return not diff


def _mp_qi(c: Qi) -> mp.mpc:
    re = mp.mpf(c.re.numerator) / mp.mpf(c.re.denominator)
    im = mp.mpf(c.im.numerator) / mp.mpf(c.im.denominator)
    return mp.mpc(re, im)


def _mp_refine_periodic(f: RationalMap, z0: complex, n: int, dps: int):
    """Newton-refine a period-n point in mpmath, chart-switching at |z|=1."""
    A = [_mp_qi(Qi.coerce(x)) for x in f.num]
    B = [_mp_qi(Qi.coerce(x)) for x in f.den]
    d = f.degree
    Ap = A + [mp.mpc(0)] * (d + 1 - len(A))
    Bp = B + [mp.mpc(0)] * (d + 1 - len(B))
    Ar = list(reversed(Ap))
    Br = list(reversed(Bp))

    def polyval(p, u):
        acc = mp.mpc(0)
        for ck in reversed(p):
            acc = acc * u + ck
        return acc

    def dpoly(p):
        return [k * p[k] for k in range(1, len(p))]

    dAp, dBp, dAr, dBr = dpoly(Ap), dpoly(Bp), dpoly(Ar), dpoly(Br)

    def ratio(z):
        in_z = abs(z) <= 1
        u = z if in_z else 1 / z
        D = mp.mpc(1) if in_z else -(u * u)
        for _ in range(n):
            if in_z:
                P, Q = polyval(Ap, u), polyval(Bp, u)
                dP, dQ = polyval(dAp, u), polyval(dBp, u)
            else:
                P, Q = polyval(Ar, u), polyval(Br, u)
                dP, dQ = polyval(dAr, u), polyval(dBr, u)
            out_z = abs(P) <= abs(Q)
            if out_z:
                v = P / Q
                s = (dP * Q - P * dQ) / (Q * Q)
            else:
                v = Q / P
                s = (dQ * P - Q * dP) / (P * P)
            D = D * s
            u = v
            in_z = out_z
        val = u if in_z else 1 / u
        dval = D if in_z else -D / (u * u)
        return (val - z) / (dval - 1)

    with mp.workdps(dps):
        z = mp.mpc(z0)
        for _ in range(dps.bit_length() + 8):
            step = ratio(z)
            z = z - step
            if abs(step) < mp.mpf(10) ** (-dps + 5):
                break
        return z


def _integer_cluster_factor(
    f: RationalMap, pts: list[complex], n: int, c: int, prime_poly: list[int]
) -> list[int] | None:
    """Exact monic integer factor of prime_poly whose roots are pts, or None.

    Refines pts in mpmath, multiplies out prod (z - p), rounds, and verifies
    by exact division and the residue certificate for multiplier c.
    """
    size = sum(math.log10(1.0 + abs(p)) for p in pts) + 40
    dps = max(60, int(size) + 30)
    with mp.workdps(dps):
        refined = [_mp_refine_periodic(f, p, n, dps) for p in pts]
        polys = [[mp.mpc(1), -r] for r in refined]
        while len(polys) > 1:
            nxt = []
            for i in range(0, len(polys) - 1, 2):
                a, b = polys[i], polys[i + 1]
                out = [mp.mpc(0)] * (len(a) + len(b) - 1)
                for ia, ca in enumerate(a):
                    for ib, cb in enumerate(b):
                        out[ia + ib] += ca * cb
                nxt.append(out)
            if len(polys) % 2:
                nxt.append(polys[-1])
            polys = nxt
        prod = polys[0]
        g_desc = []
        for coef in prod:
            r = mp.nint(coef.real)
            if abs(coef.real - r) > 0.25 or abs(coef.imag) > 0.25:
                return None
            g_desc.append(int(r))
    g = list(reversed(g_desc))  # ascending, monic
    try:
        idivexact(prime_poly, g)
    except InexactDivision:
        return None
    if not _certify_integer_multiplier(f, n, g, c):
        return None
    return g


# ----------------------------------------------------------------------
# the multiplier polynomial and spectrum assembly
# ----------------------------------------------------------------------


@dataclass
class PeriodFactors:
    """Factored multiplier data for one period (point-level multiplicity)."""

    period: int
    factors: list[tuple[tuple[Fraction, ...], int]]
    point_count: int

    def poly(self) -> list[Fraction]:
        out = [Fraction(1)]
        for fac, mult in self.factors:
            for _ in range(mult):
                out = pmul(out, list(fac))
        return out


def _ensure_exact_rational(f: RationalMap):
    if not f.exact:
        raise SpectrumNotRational("exact spectra need exact map coefficients")
    try:
        qi_poly_to_fractions(f.num)
        qi_poly_to_fractions(f.den)
    except ValueError as e:
        raise SpectrumNotRational(str(e)) from None


def multiplier_factors(
    f: RationalMap,
    n: int,
    cap: int | None = None,
    tol: float = config.SOLVER_TOL,
    seed: int = 0,
) -> PeriodFactors:
    """Irreducible factorization of the multiplier polynomial P_n over Q."""
    _ensure_exact_rational(f)
    cap = cap if cap is not None else config.EXACT_DEGREE_CAP
    d = f.degree
    if d**n + 1 > cap:
        raise DegreeCapExceeded(
            f"d^n + 1 = {d ** n + 1} exceeds exact cap {cap}"
        )
    dyn = dynatomic_numerator(f, n, cap=max(cap, d**n + 2))
    dyn_fr = qi_poly_to_fractions(dyn)
    dyn_int, _scale = fractions_to_int_primitive(dyn_fr)
    factors: dict[tuple[Fraction, ...], int] = {}

    def add_factor(fac, mult):
        key = tuple(Fraction(c) for c in fac)
        factors[key] = factors.get(key, 0) + mult

    total_points = pdeg(dyn_int) if dyn_int else 0
    inf_period, inf_orbit = infinity_exact_period(f, n)
    if inf_period == n:
        lam = cycle_multiplier(f, inf_orbit)
        if not isinstance(lam, Qi) or not lam.is_real():
            raise SpectrumNotRational("Infinity-cycle multiplier is not rational")
        add_factor((-lam.re, Fraction(1)), 1)
        total_points += 1

    remaining = dyn_int
    if pdeg(remaining) >= 1:
        monic_ok = abs(remaining[-1]) == 1
        squarefree = isquarefree(remaining)
        if monic_ok and squarefree and pdeg(remaining) > 0:
            remaining = _fast_path_split(
                f, n, remaining, add_factor, tol=tol, seed=seed, cap=cap
            )
        if pdeg(remaining) >= 1:
            _, irr = factor_int_poly(remaining)
            for q_int, mult in irr:
                fld = ResidueField([Fraction(c) for c in q_int])
                lam_elt = multiplier_element(f, n, fld)
                mu = minimal_polynomial(lam_elt)
                copies = fld.degree // pdeg(mu)
                add_factor(tuple(mu), mult * copies)
    period_factors = sorted(factors.items(), key=lambda kv: (len(kv[0]), kv[0]))
    pf = PeriodFactors(
        period=n,
        factors=[(k, v) for k, v in period_factors],
        point_count=total_points,
    )
    got = sum(m * (len(k) - 1) for k, m in pf.factors)
    if got != total_points:
        raise RatdynError(
            f"multiplier bookkeeping lost roots: {got} != {total_points}"
        )
    return pf


def _fast_path_split(f, n, dyn_int, add_factor, tol, seed, cap):
    """Peel off verified integer-multiplier factors; returns the cofactor.

    The numeric stage only proposes clusters (a loose residual tolerance is
    fine: evaluation noise of f^n is amplified by the multipliers); all
    exactness comes from the division and residue certificates."""
    tol_numeric = max(tol, 1e-9)
    try:
        pts, _rep = periodic_points(
            f, n, tol=tol_numeric, seed=seed,
            cap=max(config.NUMERIC_DEGREE_CAP, cap + 2),
        )
        from .periodic import group_cycles

        # the collision guard stays tight: double-precision roots separate
        # well below the residual tolerance
        cycles = group_cycles(f, pts, n, tol=min(tol, 1e-12))
    except RatdynError:
        return dyn_int
    clusters: dict[int, list[complex]] = {}
    for cyc in cycles:
        lam = cyc.multiplier
        c = round(lam.real)
        if abs(lam.real - c) > 1e-6 * (1 + abs(lam)) or abs(lam.imag) > 1e-6 * (
            1 + abs(lam)
        ):
            continue
        if any(p.is_infinity for p in cyc.points):
            continue  # the Infinity cycle is appended exactly elsewhere
        clusters.setdefault(int(c), []).extend(
            complex(p.z) for p in cyc.points
        )
    remaining = dyn_int
    for c, pts_c in sorted(clusters.items()):
        if pdeg(remaining) < 1 or len(pts_c) > pdeg(remaining):
            break
        g = _integer_cluster_factor(f, pts_c, n, c, remaining)
        if g is None:
            continue
        add_factor((Fraction(-c), Fraction(1)), pdeg(g))
        remaining = idivexact(remaining, g)
    return remaining


def multiplier_polynomial(
    f: RationalMap,
    n: int,
    cap: int | None = None,
    tol: float = config.SOLVER_TOL,
    seed: int = 0,
) -> list[Fraction]:
    """P_n(lambda), monic over Q; roots are the multipliers of exact
    period-n points with multiplicity (one root per point)."""
    return multiplier_factors(f, n, cap=cap, tol=tol, seed=seed).poly()


def factor_spectrum(poly) -> list[tuple[tuple[Fraction, ...], int]]:
    """Complete factorization over Q of a rational polynomial into monic
    irreducible factors with multiplicities."""
    fr = [Fraction(c) for c in poly]
    p_int, _ = fractions_to_int_primitive(fr)
    if pdeg(p_int) < 1:
        return []
    _, irr = factor_int_poly(p_int)
    out = []
    for q, m in irr:
        lead = Fraction(q[-1])
        out.append((tuple(Fraction(c) / lead for c in q), m))
    return sorted(out, key=lambda km: (len(km[0]), km[0]))


# ----------------------------------------------------------------------
# spectrum container
# ----------------------------------------------------------------------


@dataclass
class AlgebraicSpectrum:
    """Per-period multiplier data: monic irreducible rational factors with
    cycle-level multiplicities; provenance is exact."""

    degree: int
    periods: dict[int, list[tuple[tuple[Fraction, ...], int]]] = field(
        default_factory=dict
    )
    point_factors: dict[int, list[tuple[tuple[Fraction, ...], int]]] = field(
        default_factory=dict
    )

    def cycle_count(self, n: int) -> int:
        return sum(m * (len(q) - 1) for q, m in self.periods.get(n, []))

    def describe(self, var: str = "λ") -> dict[int, list[str]]:
        return {
            n: [
                f"{poly_to_str(list(q), var)}" + (f" ^{m}" if m > 1 else "")
                for q, m in facs
            ]
            for n, facs in sorted(self.periods.items())
        }


def algebraic_spectrum(
    f: RationalMap,
    max_period: int,
    cap: int | None = None,
    tol: float = config.SOLVER_TOL,
    seed: int = 0,
) -> AlgebraicSpectrum:
    """Exact spectrum for periods 1..max_period (cycle-level multiplicity:
    each period's point-level multiplicities divide by n)."""
    spec = AlgebraicSpectrum(degree=f.degree)
    for n in range(1, max_period + 1):
        pf = multiplier_factors(f, n, cap=cap, tol=tol, seed=seed)
        cycle_level = []
        for q, m in pf.factors:
            if m % n != 0:
                raise InexactDivision(
                    f"period-{n} factor multiplicity {m} not divisible by n "
                    "(parabolic degeneracy)"
                )
            cycle_level.append((q, m // n))
        spec.periods[n] = cycle_level
        spec.point_factors[n] = pf.factors
    return spec


# ----------------------------------------------------------------------
# number fields and verdicts
# ----------------------------------------------------------------------


def _squarefree_part(n: int) -> int:
    from sympy import factorint

    if n == 0:
        return 0
    sign = -1 if n < 0 else 1
    out = sign
    for p, e in factorint(abs(n)).items():
        if e % 2:
            out *= p
    return out


def _is_rational_square(x: Fraction) -> bool:
    if x < 0:
        return False
    return (
        math.isqrt(x.numerator) ** 2 == x.numerator
        and math.isqrt(x.denominator) ** 2 == x.denominator
    )


class NumberFieldSpec:
    """Target field K by a monic irreducible integer polynomial; degree 1 is
    Q, degree 2 has exact fast paths via the squarefree discriminant D."""

    def __init__(self, poly_int):
        p = [int(c) for c in pstrip(list(poly_int))]
        if not p or p[-1] != 1:
            raise RatdynError("defining polynomial must be monic with integer coefficients")
        if pdeg(p) < 1:
            raise RatdynError("defining polynomial must have degree >= 1")
        if pdeg(p) > 1 and not int_poly_irreducible(p):
            raise RatdynError("defining polynomial is reducible over Q")
        self.poly = tuple(p)
        self.degree = pdeg(p)
        self.D = None
        self.imaginary_quadratic = False
        if self.degree == 2:
            b, c = p[1], p[0]
            disc = b * b - 4 * c
            self.D = _squarefree_part(disc)
            self.imaginary_quadratic = disc < 0

    @staticmethod
    def rationals() -> "NumberFieldSpec":
        return NumberFieldSpec([0, 1])

    @staticmethod
    def quadratic(D: int) -> "NumberFieldSpec":
        D = int(D)
        if D in (0, 1):
            raise RatdynError("quadratic field needs D not in {0, 1}")
        Dsf = _squarefree_part(D)
        return NumberFieldSpec([-Dsf, 0, 1])

    def describe(self) -> str:
        if self.degree == 1:
            return "Q"
        if self.degree == 2:
            return f"Q(sqrt({self.D}))"
        return f"Q[x]/({poly_to_str(list(self.poly), 'x')})"


@dataclass
class FactorVerdict:
    period: int
    factor: tuple[Fraction, ...]
    ok: bool
    heuristic: bool = False
    reason: str = ""


@dataclass
class MembershipVerdict:
    all_in_field: bool
    first_violation: tuple[int, tuple[Fraction, ...]] | None
    per_factor: list[FactorVerdict]
    heuristic: bool

    def describe(self) -> str:
        if self.all_in_field:
            return "AllInK" + (" (heuristic)" if self.heuristic else "")
        n, fac = self.first_violation
        return f"FirstViolation(period={n}, factor={poly_to_str(list(fac), 'λ')})"


def _factor_in_field(q: tuple[Fraction, ...], K: NumberFieldSpec) -> FactorVerdict:
    degq = len(q) - 1
    if degq == 1:
        return FactorVerdict(0, q, True, reason="rational root")
    if degq > K.degree:
        return FactorVerdict(0, q, False, reason="degree exceeds field degree")
    if K.degree == 2 and degq == 2:
        b, c = q[1], q[0]
        disc = b * b - 4 * c
        ok = _is_rational_square(disc / K.D)
        return FactorVerdict(
            0, q, ok, reason=f"disc/D = {disc}/{K.D} square test"
        )
    if K.degree <= 2:
        return FactorVerdict(0, q, False, reason="degree exceeds field degree")
    # general field: heuristic lattice-reconstruction check
    if K.degree % degq != 0:
        return FactorVerdict(
            0, q, False, heuristic=True, reason="degree does not divide field degree"
        )
    ok = _pslq_root_in_field(q, K)
    return FactorVerdict(0, q, ok, heuristic=True, reason="pslq reconstruction")


def _pslq_root_in_field(q, K: NumberFieldSpec, dps: int = 80) -> bool:
    with mp.workdps(dps):
        kp = [mp.mpf(c) for c in K.poly]
        field_roots = mp.polyroots(list(reversed(kp)), maxsteps=200, extraprec=200)
        qq = [mp.mpf(c.numerator) / mp.mpf(c.denominator) for c in q]
        q_roots = mp.polyroots(list(reversed(qq)), maxsteps=200, extraprec=200)
        for r in q_roots:
            for theta in field_roots:
                vec = [mp.mpf(1)]
                for _ in range(K.degree - 1):
                    vec.append(vec[-1] * theta)
                vec.append(r)
                if any(abs(mp.im(v)) > mp.mpf(10) ** (-dps // 2) for v in vec):
                    # complex embeddings: use real/imag stacking via pslq on
                    # the complexes is unsupported; fall back to real parts
                    continue
                rel = mp.pslq([mp.re(v) for v in vec], maxcoeff=10**12)
                if rel and rel[-1] != 0:
                    # verify the relation to 1e-20 at doubled precision
                    with mp.workdps(2 * dps):
                        kp2 = [mp.mpf(c) for c in K.poly]
                        th2 = mp.polyroots(list(reversed(kp2)))[0]
                        vv = [mp.mpf(1)]
                        for _ in range(K.degree - 1):
                            vv.append(vv[-1] * th2)
                        qq2 = [mp.mpf(c.numerator) / mp.mpf(c.denominator) for c in q]
                        rr = min(
                            mp.polyroots(list(reversed(qq2))),
                            key=lambda t: abs(t - r),
                        )
                        vv.append(rr)
                        resid = abs(mp.fsum(a * v for a, v in zip(rel, vv)))
                        if resid < mp.mpf(10) ** (-20):
                            return True
    return False


def membership(spectrum: AlgebraicSpectrum, K: NumberFieldSpec) -> MembershipVerdict:
    """AllInK iff every irreducible factor has a root in K (exact for
    deg K <= 2; heuristic, and flagged as such, beyond)."""
    per = []
    heuristic = False
    first = None
    for n in sorted(spectrum.periods):
        for q, _m in spectrum.periods[n]:
            v = _factor_in_field(q, K)
            v.period = n
            per.append(v)
            heuristic = heuristic or v.heuristic
            if not v.ok and first is None:
                first = (n, q)
    return MembershipVerdict(
        all_in_field=first is None,
        first_violation=first,
        per_factor=per,
        heuristic=heuristic,
    )


@dataclass
class IntegralityVerdict:
    all_algebraic_integers: bool
    all_rational_integers: bool
    first_violation: tuple[int, tuple[Fraction, ...]] | None

    def describe(self) -> str:
        if self.all_rational_integers:
            return "AllRationalIntegers"
        if self.all_algebraic_integers:
            return "AllAlgebraicIntegers"
        n, fac = self.first_violation
        return f"FirstViolation(period={n}, factor={poly_to_str(list(fac), 'λ')})"


def integrality(spectrum: AlgebraicSpectrum) -> IntegralityVerdict:
    """Monic-integer-coefficient test per factor; rational integers need
    all factors linear with integer roots."""
    alg = True
    rat = True
    first = None
    for n in sorted(spectrum.periods):
        for q, _m in spectrum.periods[n]:
            is_int = all(c.denominator == 1 for c in q)
            if not is_int:
                alg = False
                rat = False
                if first is None:
                    first = (n, q)
            elif len(q) - 1 > 1:
                rat = False
                if first is None:
                    first = (n, q)
    return IntegralityVerdict(alg, rat and alg, first)


# ----------------------------------------------------------------------
# Galois-stable periodic sets
# ----------------------------------------------------------------------


@dataclass
class GaloisPeriodicSet:
    period: int
    factor_tags: list[str]
    points: list[ProjPoint]
    cycle_count: int
    point_count: int


def galois_orbit_sets(
    f: RationalMap,
    n: int,
    cap: int | None = None,
    tol: float = config.SOLVER_TOL,
    seed: int = 0,
) -> list[GaloisPeriodicSet]:
    """Partition the exact-period-n points into Galois-stable sets.

    One set per orbit of irreducible dynatomic factors under the action of
    f on root sets (usually a single factor), so every set is a union of
    cycles; the Infinity cycle forms its own set merged with the factors
    its finite points satisfy.
    """
    _ensure_exact_rational(f)
    cap = cap if cap is not None else config.EXACT_DEGREE_CAP
    d = f.degree
    if d**n + 1 > cap:
        raise DegreeCapExceeded(f"d^n + 1 = {d ** n + 1} exceeds exact cap {cap}")
    dyn = dynatomic_numerator(f, n, cap=max(cap, d**n + 2))
    dyn_fr = qi_poly_to_fractions(dyn)
    dyn_int, _ = fractions_to_int_primitive(dyn_fr)
    groups: list[dict] = []
    if pdeg(dyn_int) >= 1:
        _, irr = factor_int_poly(dyn_int)
        from .roots import solve_poly

        fac_roots = []
        for q, mult in irr:
            roots = solve_poly(np.array([float(c) for c in q], dtype=complex), seed=seed)
            fac_roots.append((q, mult, [complex(r) for r in roots]))

        def owner(z: complex) -> int:
            best, bi = None, -1
            for i, (_q, _m, roots) in enumerate(fac_roots):
                dd = min(abs(z - r) for r in roots)
                if best is None or dd < best:
                    best, bi = dd, i
            return bi

        # factor orbit structure under f
        parent = list(range(len(fac_roots)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        def union(i, j):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)

        for i, (_q, _m, roots) in enumerate(fac_roots):
            img = f.evaluate(ProjPoint.finite(roots[0]))
            if img.is_infinity:
                continue
            union(i, owner(complex(img.z)))
        clusters: dict[int, list[int]] = {}
        for i in range(len(fac_roots)):
            clusters.setdefault(find(i), []).append(i)
        for root_i, members in sorted(clusters.items()):
            tags = []
            pts: list[ProjPoint] = []
            count = 0
            for i in members:
                q, mult, roots = fac_roots[i]
                lead = Fraction(q[-1])
                tags.append(poly_to_str([Fraction(c) / lead for c in q], "z"))
                pts.extend(ProjPoint.finite(r) for r in roots)
                count += pdeg(q)
            groups.append(
                {"tags": tags, "points": pts, "count": count, "has_inf": False}
            )
    inf_period, inf_orbit = infinity_exact_period(f, n)
    if inf_period == n:
        # attach the Infinity cycle to the factors of its finite points
        finite = [p for p in inf_orbit if not p.is_infinity]
        target = None
        for g in groups:
            for p in finite:
                if any(chordal(p, q) < 1e-8 for q in g["points"]):
                    target = g
                    break
            if target:
                break
        if target is None:
            groups.append(
                {"tags": ["(infinity cycle)"], "points": [INF], "count": 1,
                 "has_inf": True}
            )
        else:
            target["points"].append(INF)
            target["count"] += 1
            target["tags"].append("(infinity)")
    out = []
    for g in groups:
        cc = g["count"] // n if g["count"] % n == 0 else 0
        out.append(
            GaloisPeriodicSet(
                period=n,
                factor_tags=g["tags"],
                points=g["points"],
                cycle_count=cc,
                point_count=g["count"],
            )
        )
    return out
