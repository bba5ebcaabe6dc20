"""Rational maps and Möbius transformations on the Riemann sphere.

Points live on the sphere as an explicit Finite/Infinity tag pair; all
numeric kernels work on normalized homogeneous pairs (X, Y) so Infinity is
an ordinary point.  Maps carry exact Gaussian-rational coefficients when
possible and always keep complex-float shadows for the numeric paths.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import config
from .errors import DegenerateMap, DegreeTooLow, RootFindingFailed
from .polys import (
    padd,
    pdeg,
    pderiv,
    pexactdiv,
    pgcd,
    pmul,
    pscale,
    pstrip,
    psub,
    preverse,
)
from .scalars import Qi

# ----------------------------------------------------------------------
# points
# ----------------------------------------------------------------------


class ProjPoint:
    """A point of the sphere: Finite(z) with z exact (Qi) or complex, or
    the explicit Infinity tag (never an overflow artifact)."""

    __slots__ = ("z", "is_infinity")

    def __init__(self, z=None, is_infinity: bool = False):
        self.is_infinity = bool(is_infinity)
        if is_infinity:
            self.z = None
        else:
            # ints and Fractions are exact; keep them that way
            if isinstance(z, (int, Fraction)):
                z = Qi(z)
            self.z = z

    @staticmethod
    def finite(z) -> "ProjPoint":
        return ProjPoint(z=z, is_infinity=False)

    @staticmethod
    def infinity() -> "ProjPoint":
        return ProjPoint(is_infinity=True)

    @property
    def is_exact(self) -> bool:
        return self.is_infinity or isinstance(self.z, Qi)

    def to_complex(self) -> complex:
        if self.is_infinity:
            return complex("inf")
        return complex(self.z)

    def xy(self) -> tuple[complex, complex]:
        """Normalized homogeneous representative (|X|, |Y| <= 1, max = 1)."""
        if self.is_infinity:
            return (1.0 + 0.0j, 0.0 + 0.0j)
        z = complex(self.z)
        if abs(z) <= 1.0:
            return (z, 1.0 + 0.0j)
        return (1.0 + 0.0j, 1.0 / z)

    def __repr__(self):
        if self.is_infinity:
            return "ProjPoint(inf)"
        return f"ProjPoint({self.z!r})"

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        if self.is_infinity or other.is_infinity:
            return self.is_infinity and other.is_infinity
        return self.z == other.z

    def __hash__(self):
        return hash("inf") if self.is_infinity else hash(complex(self.z))


INF = ProjPoint.infinity()


def chordal(p: ProjPoint | complex, q: ProjPoint | complex) -> float:
    """Chordal distance |X_p Y_q - X_q Y_p| on normalized representatives,
    in [0, 1]; Infinity is an ordinary point."""
    xp, yp = p.xy() if isinstance(p, ProjPoint) else ProjPoint.finite(p).xy()
    xq, yq = q.xy() if isinstance(q, ProjPoint) else ProjPoint.finite(q).xy()
    num = abs(xp * yq - xq * yp)
    den = math.sqrt((abs(xp) ** 2 + abs(yp) ** 2) * (abs(xq) ** 2 + abs(yq) ** 2))
    return num / den


def chordal_xy(X1, Y1, X2, Y2):
    """Vectorized chordal distance for normalized homogeneous arrays."""
    num = np.abs(X1 * Y2 - X2 * Y1)
    den = np.sqrt(
        (np.abs(X1) ** 2 + np.abs(Y1) ** 2) * (np.abs(X2) ** 2 + np.abs(Y2) ** 2)
    )
    return num / den


def points_to_xy(points: Sequence[ProjPoint]):
    X = np.empty(len(points), dtype=complex)
    Y = np.empty(len(points), dtype=complex)
    for i, p in enumerate(points):
        X[i], Y[i] = p.xy()
    return X, Y


def xy_to_points(X, Y, inf_cut: float = 1e300) -> list[ProjPoint]:
    out = []
    for x, y in zip(np.asarray(X).ravel(), np.asarray(Y).ravel()):
        if abs(y) * inf_cut <= abs(x) or y == 0:
            out.append(INF)
        else:
            out.append(ProjPoint.finite(complex(x / y)))
    return out


def normalize_xy(X, Y):
    s = np.maximum(np.abs(X), np.abs(Y))
    s = np.where(s == 0, 1.0, s)
    return X / s, Y / s


# ----------------------------------------------------------------------
# scalar helpers shared by exact and float paths
# ----------------------------------------------------------------------


def _mag2_leq_one(z) -> bool:
    if isinstance(z, Qi):
        return z.abs2() <= 1
    return (z.real * z.real + z.imag * z.imag) <= 1.0


def hom_eval_scalar(coeffs_pad, X, Y):
    """Sum c[i] X^i Y^(d-i) for scalars supporting ring ops (Qi/complex/...)."""
    d = len(coeffs_pad) - 1
    acc = coeffs_pad[d]
    Yp = None
    for i in range(d - 1, -1, -1):
        Yp = Y if Yp is None else Yp * Y
        acc = acc * X + coeffs_pad[i] * Yp
    return acc


# ----------------------------------------------------------------------
# Möbius transformations
# ----------------------------------------------------------------------


class MoebiusMap:
    """z -> (a z + b)/(c z + d) with nonzero determinant."""

    __slots__ = ("a", "b", "c", "d", "exact")

    def __init__(self, a, b, c, d):
        vals = [a, b, c, d]
        exact = True
        try:
            vals = [Qi.coerce(v) for v in vals]
        except TypeError:
            vals = [complex(v) for v in vals]
            exact = False
        self.a, self.b, self.c, self.d = vals
        self.exact = exact
        det = self.a * self.d - self.b * self.c
        if (exact and det.is_zero()) or (not exact and abs(det) < 1e-14):
            raise DegenerateMap("Moebius determinant is zero")

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def __call__(self, p: ProjPoint | complex) -> ProjPoint:
        if not isinstance(p, ProjPoint):
            p = ProjPoint.finite(p)
        a, b, c, d = self.a, self.b, self.c, self.d
        if not self.exact:
            X, Y = p.xy()
        elif p.is_infinity:
            X, Y = Qi(1), Qi(0)
        else:
            X, Y = Qi.coerce(p.z), Qi(1)
        nx = a * X + b * Y
        ny = c * X + d * Y
        if (isinstance(ny, Qi) and ny.is_zero()) or (
            not isinstance(ny, Qi) and ny == 0
        ):
            return INF
        return ProjPoint.finite(nx / ny)

    def __repr__(self):
        return f"MoebiusMap({self.a}, {self.b}, {self.c}, {self.d})"


# ----------------------------------------------------------------------
# rational maps
# ----------------------------------------------------------------------


def _coerce_coeffs(coeffs):
    """Try exact (Qi) coercion of a coefficient list, else complex floats."""
    try:
        return [Qi.coerce(c) for c in coeffs], True
    except TypeError:
        return [complex(c) for c in coeffs], False


class RationalMap:
    """A degree-d rational map as a coprime numerator/denominator pair.

    ``num``/``den`` are ascending coefficient tuples, exact (Qi) or complex.
    Numeric shadows (numpy arrays padded to homogeneous length d+1) are
    always available for the float kernels.
    """

    def __init__(self, num, den, exact: bool, _reduced: bool = True):
        self.num = tuple(num)
        self.den = tuple(den)
        self.exact = exact
        self.degree = max(pdeg(list(num)), pdeg(list(den)))
        d = self.degree
        nf = np.zeros(d + 1, dtype=complex)
        df = np.zeros(d + 1, dtype=complex)
        for i, c in enumerate(num):
            nf[i] = complex(c)
        for i, c in enumerate(den):
            df[i] = complex(c)
        scale = max(np.abs(nf).max(), np.abs(df).max())
        self._nf = nf / scale
        self._df = df / scale
        # reversed (w = 1/z chart) coefficient arrays, same homogeneous pad
        self._nf_rev = self._nf[::-1].copy()
        self._df_rev = self._df[::-1].copy()
        self._wronskian_f = np.polynomial.polynomial.polysub(
            np.polynomial.polynomial.polymul(
                np.polynomial.polynomial.polyder(self._nf), self._df
            ),
            np.polynomial.polynomial.polymul(
                self._nf, np.polynomial.polynomial.polyder(self._df)
            ),
        )

    # -- exact views ----------------------------------------------------
    def num_fractions(self):
        from .polys import qi_poly_to_fractions

        return qi_poly_to_fractions(self.num)

    def den_fractions(self):
        from .polys import qi_poly_to_fractions

        return qi_poly_to_fractions(self.den)

    @property
    def is_polynomial(self) -> bool:
        return pdeg(list(self.den)) == 0

    def wronskian_exact(self):
        """num' den - num den' with Qi coefficients (exact maps only)."""
        n, d = list(self.num), list(self.den)
        return psub(pmul(pderiv(n), d), pmul(n, pderiv(d)))

    # -- evaluation -------------------------------------------------------
    def evaluate(self, p: ProjPoint | complex) -> ProjPoint:
        if not isinstance(p, ProjPoint):
            p = ProjPoint.finite(p)
        if self.exact and p.is_exact:
            return self._evaluate_exact(p)
        X, Y = p.xy()
        Xa, Ya = self.eval_hom(np.array([X]), np.array([Y]))
        return xy_to_points(Xa, Ya)[0]

    def _evaluate_exact(self, p: ProjPoint) -> ProjPoint:
        d = self.degree
        numq = list(self.num) + [Qi(0)] * (d + 1 - len(self.num))
        denq = list(self.den) + [Qi(0)] * (d + 1 - len(self.den))
        if p.is_infinity:
            X, Y = Qi(1), Qi(0)
        else:
            X, Y = Qi.coerce(p.z), Qi(1)
        F = hom_eval_scalar(numq, X, Y)
        G = hom_eval_scalar(denq, X, Y)
        if G.is_zero():
            if F.is_zero():
                raise DegenerateMap("common root met in exact evaluation")
            return INF
        return ProjPoint.finite(F / G)

    def eval_hom(self, X, Y):
        """Homogeneous step (F(X,Y), G(X,Y)), normalized output."""
        d = self.degree
        nf, df = self._nf, self._df
        accF = np.full_like(X, nf[d])
        accG = np.full_like(X, df[d])
        Yp = np.ones_like(Y)
        for i in range(d - 1, -1, -1):
            Yp = Yp * Y
            accF = accF * X + nf[i] * Yp
            accG = accG * X + df[i] * Yp
        return normalize_xy(accF, accG)

    def iterate_hom(self, X, Y, n: int):
        for _ in range(n):
            X, Y = self.eval_hom(X, Y)
        return X, Y

    # -- spherical derivative ----------------------------------------------
    def spherical_norm_xy(self, X, Y):
        """||f'|| in the spherical metric, scale-invariant homogeneous form:
        (|X|^2+|Y|^2) |det J(X,Y)| / (d (|F|^2+|G|^2))."""
        d = self.degree
        nf, df = self._nf, self._df
        accF = np.full_like(X, nf[d])
        accG = np.full_like(X, df[d])
        Yp = np.ones_like(Y)
        for i in range(d - 1, -1, -1):
            Yp = Yp * Y
            accF = accF * X + nf[i] * Yp
            accG = accG * X + df[i] * Yp
        # det J(X, Y) = d * (num' den - num den') homogenized to degree 2d-2
        w = self._wronskian_f
        wpad = np.zeros(2 * d - 1, dtype=complex)
        wpad[: len(w)] = w
        dd = 2 * d - 2
        accW = np.full_like(X, wpad[dd])
        Yp = np.ones_like(Y)
        for i in range(dd - 1, -1, -1):
            Yp = Yp * Y
            accW = accW * X + wpad[i] * Yp
        # det J(X, Y) = d * (homogenized Wronskian); the d cancels against the
        # d in the chart formula, leaving:
        num = (np.abs(X) ** 2 + np.abs(Y) ** 2) * np.abs(accW)
        den = np.abs(accF) ** 2 + np.abs(accG) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            out = num / den
        return out

    def spherical_norm_sq_exact(self, p: ProjPoint) -> Fraction:
        """||f'||^2 as an exact rational (exact maps and points only)."""
        if not (self.exact and p.is_exact):
            raise TypeError("exact squared norm needs an exact map and point")
        d = self.degree
        numq = list(self.num) + [Qi(0)] * (d + 1 - len(self.num))
        denq = list(self.den) + [Qi(0)] * (d + 1 - len(self.den))
        X = Qi(1) if p.is_infinity else Qi.coerce(p.z)
        Y = Qi(0) if p.is_infinity else Qi(1)
        F = hom_eval_scalar(numq, X, Y)
        G = hom_eval_scalar(denq, X, Y)
        w = self.wronskian_exact()
        wpad = list(w) + [Qi(0)] * (2 * d - 1 - len(w))
        W = hom_eval_scalar(wpad, X, Y)
        n2 = (X.abs2() + Y.abs2()) ** 2 * W.abs2()
        d2 = (F.abs2() + G.abs2()) ** 2
        return n2 / d2

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        return f"RationalMap(degree={self.degree}, {kind})"


# ----------------------------------------------------------------------
# construction
# ----------------------------------------------------------------------


def build_map(num_coeffs: Iterable, den_coeffs: Iterable, exact: bool | None = None) -> RationalMap:
    """Build a reduced RationalMap from ascending coefficient lists.

    Exact (Q(i)) coefficients get exact gcd reduction; float coefficients
    are only checked for a (normalized) nonzero resultant, since float gcd
    is ill-posed.  ``exact=False`` forces the float realization.
    """
    num = pstrip(list(num_coeffs))
    den = pstrip(list(den_coeffs))
    if not num and not den:
        raise DegenerateMap("empty map")
    if not den:
        raise DegenerateMap("zero denominator")
    nq, n_exact = _coerce_coeffs(num)
    dq, d_exact = _coerce_coeffs(den)
    exact = (n_exact and d_exact) if exact is None else (exact and n_exact and d_exact)
    if exact:
        nq = [Qi.coerce(c) for c in num]
        dq = [Qi.coerce(c) for c in den]
        g = pgcd(nq, dq)
        reduced = pdeg(g) > 0
        if reduced:
            nq = pexactdiv(nq, g)
            dq = pexactdiv(dq, g)
        d = max(pdeg(nq), pdeg(dq))
        if d < 2:
            if reduced:
                raise DegenerateMap(
                    "numerator and denominator share a factor; reduced degree "
                    f"{d} < 2"
                )
            raise DegreeTooLow(f"degree {d} < 2")
        # canonical scale: monic denominator
        lead = dq[-1]
        nq = [c / lead for c in nq]
        dq = [c / lead for c in dq]
        return RationalMap(nq, dq, exact=True)
    nf = [complex(c) for c in num]
    df = [complex(c) for c in den]
    d = max(pdeg(nf), pdeg(df))
    if d < 2:
        raise DegreeTooLow(f"degree {d} < 2")
    if _float_resultant_small(nf, df):
        raise DegenerateMap("numerator and denominator are numerically degenerate")
    return RationalMap(nf, df, exact=False)


def _float_resultant_small(nf, df, threshold: float = 1e-10) -> bool:
    """Normalized Sylvester-determinant resultant test."""
    n = pstrip(nf)
    dd = pstrip(df)
    dn, dm = len(n) - 1, len(dd) - 1
    if dn < 0 or dm < 0:
        return True
    if dn == 0 or dm == 0:
        return False  # a nonzero constant shares no root with anything
    sn = math.sqrt(sum(abs(c) ** 2 for c in n))
    sm = math.sqrt(sum(abs(c) ** 2 for c in dd))
    n = [c / sn for c in n]
    dd = [c / sm for c in dd]
    size = dn + dm
    S = np.zeros((size, size), dtype=complex)
    for i in range(dm):
        S[i, i : i + dn + 1] = list(reversed(n))
    for i in range(dn):
        S[dm + i, i : i + dm + 1] = list(reversed(dd))
    res = np.linalg.det(S)
    return abs(res) < threshold


# ----------------------------------------------------------------------
# spec-surface operations
# ----------------------------------------------------------------------


def evaluate(f: RationalMap, p: ProjPoint | complex) -> ProjPoint:
    return f.evaluate(p)


def spherical_norm(f: RationalMap, p: ProjPoint | complex) -> float:
    """Norm of the differential of f in the spherical metric, extended
    continuously over the whole sphere."""
    if not isinstance(p, ProjPoint):
        p = ProjPoint.finite(p)
    if f.exact and p.is_exact:
        return math.sqrt(float(f.spherical_norm_sq_exact(p)))
    X, Y = p.xy()
    return float(f.spherical_norm_xy(np.array([X]), np.array([Y]))[0])


def conjugate(f: RationalMap, phi: MoebiusMap) -> RationalMap:
    """phi o f o phi^(-1) as a reduced RationalMap of the same degree."""
    d = f.degree
    if f.exact and phi.exact:
        num = list(f.num) + [Qi(0)] * (d + 1 - len(f.num))
        den = list(f.den) + [Qi(0)] * (d + 1 - len(f.den))
        a, b, c, dd = phi.a, phi.b, phi.c, phi.d
        zero, one = Qi(0), Qi(1)
    else:
        num = [complex(c) for c in f.num] + [0j] * (d + 1 - len(f.num))
        den = [complex(c) for c in f.den] + [0j] * (d + 1 - len(f.den))
        a, b, c, dd = (complex(phi.a), complex(phi.b), complex(phi.c), complex(phi.d))
        zero, one = 0j, 1 + 0j
    # inverse of phi acts on (X, Y) by the adjugate matrix;
    # dehomogenized linear forms (X -> z, Y -> 1), ascending
    U = [-b, dd]  # d*X - b*Y
    V = [a, -c]  # -c*X + a*Y
    # powers of the linear forms
    Upow = [[one]]
    Vpow = [[one]]
    for _ in range(d):
        Upow.append(pmul(Upow[-1], U))
        Vpow.append(pmul(Vpow[-1], V))
    Ft = []
    Gt = []
    for i in range(d + 1):
        term = pmul(Upow[i], Vpow[d - i])
        Ft = padd(Ft, pscale(term, num[i]))
        Gt = padd(Gt, pscale(term, den[i]))
    new_num = padd(pscale(Ft, a), pscale(Gt, b))
    new_den = padd(pscale(Ft, c), pscale(Gt, dd))
    return build_map(new_num, new_den)


def critical_points(
    f: RationalMap, tol: float = 1e-9
) -> list[tuple[ProjPoint, int]]:
    """The 2d-2 critical points with multiplicities.

    Finite critical points are the roots of num' den - num den'; Infinity
    carries whatever multiplicity is missing from that count (computed in
    the chart w = 1/z).
    """
    from .roots import solve_poly

    d = f.degree
    if f.exact:
        w = [complex(c) for c in f.wronskian_exact()]
    else:
        raw = np.asarray(f._wronskian_f)
        cut = 1e-13 * (np.abs(raw).max() if raw.size else 1.0)
        w = list(raw)
        while w and abs(w[-1]) <= cut:
            w.pop()
    total = 2 * d - 2
    out: list[tuple[ProjPoint, int]] = []
    if w:
        wa = np.array(w, dtype=complex)
        roots = solve_poly(wa)
        groups = _cluster_points(
            [ProjPoint.finite(complex(r)) for r in roots], max(tol, 1e-7)
        )
        for pt, mult in groups:
            out.append((pt, mult))
    found = sum(m for _, m in out)
    inf_mult = total - found
    if inf_mult > 0:
        out.append((INF, inf_mult))
    elif inf_mult < 0:
        raise RootFindingFailed(
            f"critical point multiplicities add to {found} > {total}",
            unconverged=found - total,
        )
    return out


def _cluster_points(points: list[ProjPoint], tol: float):
    """Greedy chordal clustering; returns [(representative, multiplicity)]."""
    reps: list[tuple[ProjPoint, int]] = []
    for p in points:
        for i, (q, m) in enumerate(reps):
            if chordal(p, q) <= tol:
                reps[i] = (q, m + 1)
                break
        else:
            reps.append((p, 1))
    return reps


class PostcriticalTruncation:
    """Union of f^k(critical set) for 1 <= k <= depth, deduplicated at tol."""

    def __init__(self, points: list[ProjPoint], depth: int, closed: bool, tol: float):
        self.points = points
        self.depth = depth
        self.closed = closed
        self.tol = tol

    def min_chordal(self, p: ProjPoint | complex) -> float:
        if not self.points:
            return float("inf")
        return min(chordal(p, q) for q in self.points)

    def __repr__(self):
        return (
            f"PostcriticalTruncation({len(self.points)} points, depth={self.depth}, "
            f"closed={self.closed})"
        )


def postcritical_truncation(
    f: RationalMap, depth: int, tol: float = config.DEDUP_TOL
) -> PostcriticalTruncation:
    """Truncated forward orbit of the critical set.

    Runs numerically with chordal deduplication at tol; when the truncation
    closes numerically and every critical point is recognizably in Q(i),
    the closure is re-confirmed with exact Gaussian-rational orbits (the
    orbit is then bounded, so exact values stay small).
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    crit = [p for p, _ in critical_points(f, tol)]
    pts: list[ProjPoint] = []
    frontier = crit
    for _ in range(depth):
        frontier = [f.evaluate(p) for p in frontier]
        fresh = []
        for p in frontier:
            if all(chordal(p, q) > tol for q in pts):
                pts.append(p)
                fresh.append(p)
        frontier = fresh
        if not frontier:
            break
    closed = all(
        any(chordal(f.evaluate(p), q) <= tol for q in pts) for p in pts
    )
    if closed and f.exact:
        exact_crit = _try_exact_points(f, crit)
        if exact_crit is not None:
            try:
                return _postcritical_exact(f, exact_crit, depth)
            except OverflowError:
                # the exact orbit is still escaping: the numeric closure was
                # an attracting-cycle artifact, not PCF
                closed = False
    return PostcriticalTruncation(pts, depth, closed, tol)


def _postcritical_exact(f: RationalMap, crit: list[ProjPoint], depth: int):
    size_cap = 1 << 512

    def small(p: ProjPoint) -> bool:
        if p.is_infinity:
            return True
        q = Qi.coerce(p.z)
        a2 = q.abs2()
        return a2.numerator < size_cap and a2.denominator < size_cap

    pts: list[ProjPoint] = []
    frontier = crit
    for _ in range(depth):
        frontier = [f.evaluate(p) for p in frontier]
        if not all(small(p) for p in frontier):
            raise OverflowError("exact orbit values grew past the size cap")
        fresh = [p for p in frontier if p not in pts]
        for p in fresh:
            if p not in pts:
                pts.append(p)
        frontier = fresh
        if not frontier:
            break
    closed = all(f.evaluate(p) in pts for p in pts)
    return PostcriticalTruncation(pts, depth, closed, 0.0)


def _try_exact_points(f: RationalMap, pts: list[ProjPoint]):
    """Snap numeric points to small Gaussian rationals verified against the
    Wronskian; None unless every point snaps."""
    w = f.wronskian_exact()
    out = []
    for p in pts:
        if p.is_infinity:
            out.append(p)
            continue
        cand = _snap_qi(complex(p.z))
        if cand is None:
            return None
        # verify exactly: w(cand) == 0
        acc = Qi(0)
        for c in reversed(pstrip(w)):
            acc = acc * cand + Qi.coerce(c)
        if not acc.is_zero():
            return None
        out.append(ProjPoint.finite(cand))
    return out


def _snap_qi(z: complex, max_den: int = 64, tol: float = 1e-8):
    fr = Fraction(z.real).limit_denominator(max_den)
    fi = Fraction(z.imag).limit_denominator(max_den)
    if abs(float(fr) - z.real) <= tol and abs(float(fi) - z.imag) <= tol:
        return Qi(fr, fi)
    return None


# ----------------------------------------------------------------------
# chart-step derivatives (used for multipliers)
# ----------------------------------------------------------------------


def _charts_for(p: ProjPoint):
    """True for the z chart (|z| <= 1), False for the w = 1/z chart."""
    if p.is_infinity:
        return False
    return _mag2_leq_one(p.z if isinstance(p.z, Qi) else complex(p.z))


def _chart_value(p: ProjPoint, exact: bool):
    z_chart = _charts_for(p)
    if p.is_infinity:
        return (Qi(0) if exact else 0j), False
    z = Qi.coerce(p.z) if exact else complex(p.z)
    if z_chart:
        return z, True
    one = Qi(1) if exact else 1.0 + 0j
    return one / z, False


def chart_step_derivative(f: RationalMap, p: ProjPoint, q: ProjPoint):
    """Derivative of chart_out o f o chart_in^(-1) at p, where each point
    uses the z chart iff |z| <= 1.  Multiplying these along a cycle gives
    the multiplier (chart corrections telescope)."""
    exact = f.exact and p.is_exact
    d = f.degree
    if exact:
        num = list(f.num) + [Qi(0)] * (d + 1 - len(f.num))
        den = list(f.den) + [Qi(0)] * (d + 1 - len(f.den))
    else:
        num = list(np.asarray(f._nf))
        den = list(np.asarray(f._df))
    u, in_z = _chart_value(p, exact)
    if in_z:
        P, Q = pstrip(num), pstrip(den)
    else:
        P, Q = preverse(num, d + 1), preverse(den, d + 1)
    out_z = _charts_for(q)

    def ev(poly):
        acc = Qi(0) if exact else 0j
        for c in reversed(pstrip(poly)):
            acc = acc * u + c
        return acc

    Pu, Qu = ev(P), ev(Q)
    dPu, dQu = ev(pderiv(P)), ev(pderiv(Q))
    if out_z:
        return (dPu * Qu - Pu * dQu) / (Qu * Qu)
    return (dQu * Pu - Qu * dPu) / (Pu * Pu)
