"""Constructors and a classifier for the exceptional rational maps:
power maps, Chebyshev maps and Lattès maps.

The classifier combines the canonical orbifold signature of a
postcritically finite map with exact multiplier data: a map is only
declared not exceptional on an exact certificate (a multiplier factor that
cannot sit inside the integers of Q or of any single imaginary quadratic
field); inconclusive evidence yields Undetermined, never a guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DegreeCapExceeded, RatdynError, SingularCurve
from .polys import pmul, pscale, psub
from .sphere import (
    ProjPoint,
    RationalMap,
    build_map,
    chordal,
    critical_points,
    postcritical_truncation,
)

# ----------------------------------------------------------------------
# constructors
# ----------------------------------------------------------------------


def power_map(d: int, sign: int = 1) -> RationalMap:
    """z -> z^d (sign +1) or z -> z^(-d) (sign -1), exact."""
    if d < 2:
        raise RatdynError("power map needs d >= 2")
    mono = [0] * d + [1]
    if sign >= 0:
        return build_map(mono, [1])
    return build_map([1], mono)


def chebyshev_polynomial(d: int) -> list[int]:
    """Monic integer T_d with T_d(z + 1/z) = z^d + z^(-d), ascending
    coefficients, via T_0 = 2, T_1 = w, T_(k+1) = w T_k - T_(k-1)."""
    if d < 0:
        raise RatdynError("need d >= 0")
    t0, t1 = [2], [0, 1]
    if d == 0:
        return t0
    for _ in range(d - 1):
        t0, t1 = t1, psub([0] + t1, t0)
    return t1


def chebyshev_map(d: int, sign: int = 1) -> RationalMap:
    """+T_d or -T_d as an exact polynomial map."""
    if d < 2:
        raise RatdynError("Chebyshev map needs d >= 2")
    T = chebyshev_polynomial(d)
    if sign < 0:
        T = [-c for c in T]
    return build_map(T, [1])


@dataclass(frozen=True)
class LattesSpec:
    """Curve y^2 = x^3 + a x + b with integer multiplier m >= 2 (degree m^2)."""

    a: Fraction
    b: Fraction
    m: int

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))


# division polynomials: psi_m = poly(x) * y^s with s = 1 for even m,
# represented as (s, ascending Fraction list); y^2 is reduced to E(x).


class _DivPolys:
    def __init__(self, a: Fraction, b: Fraction):
        self.E = [Fraction(b), Fraction(a), Fraction(0), Fraction(1)]
        a, b = Fraction(a), Fraction(b)
        self.cache: dict[int, tuple[int, list[Fraction]]] = {
            0: (0, []),
            1: (0, [Fraction(1)]),
            2: (1, [Fraction(2)]),
            3: (
                0,
                [
                    -a * a,
                    12 * b,
                    6 * a,
                    Fraction(0),
                    Fraction(3),
                ],
            ),
            4: (
                1,
                pscale(
                    [
                        -8 * b * b - a**3,
                        -4 * a * b,
                        -5 * a * a,
                        20 * b,
                        5 * a,
                        Fraction(0),
                        Fraction(1),
                    ],
                    Fraction(4),
                ),
            ),
        }

    def _mul(self, u, v):
        s = u[0] + v[0]
        p = pmul(u[1], v[1])
        if s == 2:
            return (0, pmul(p, self.E))
        return (s, p)

    def _sub(self, u, v):
        if u[0] != v[0]:
            raise RatdynError("division polynomial parity mismatch")
        return (u[0], psub(u[1], v[1]))

    def psi(self, m: int) -> tuple[int, list[Fraction]]:
        if m < 0:
            s, p = self.psi(-m)
            return (s, pscale(p, Fraction(-1)))
        if m in self.cache:
            return self.cache[m]
        k = m // 2
        if m % 2 == 1:
            a = self._mul(self.psi(k + 2), self._pow3(self.psi(k)))
            b = self._mul(self.psi(k - 1), self._pow3(self.psi(k + 1)))
            out = self._sub(a, b)
            # odd psi is a pure x-polynomial; a y^2 pair reduces via E
            if out[0] == 1:
                raise RatdynError("odd division polynomial came out odd in y")
        else:
            t1 = self._mul(self.psi(k + 2), self._mul(self.psi(k - 1), self.psi(k - 1)))
            t2 = self._mul(self.psi(k - 2), self._mul(self.psi(k + 1), self.psi(k + 1)))
            inner = self._sub(t1, t2)
            prod = self._mul(self.psi(k), inner)
            if prod[0] != 1:
                raise RatdynError("even division polynomial has wrong parity")
            out = (1, pscale(prod[1], Fraction(1, 2)))
        self.cache[m] = out
        return out

    def _pow3(self, u):
        return self._mul(u, self._mul(u, u))


def flexible_lattes(spec: LattesSpec) -> RationalMap:
    """The map induced on x-coordinates by multiplication by m on
    y^2 = x^3 + a x + b:  x(mP) = x - psi_(m-1) psi_(m+1) / psi_m^2."""
    a, b, m = spec.a, spec.b, spec.m
    if m < 2:
        raise RatdynError("multiplier m must be >= 2")
    if 4 * a**3 + 27 * b**2 == 0:
        raise SingularCurve(f"discriminant vanishes for a={a}, b={b}")
    dp = _DivPolys(a, b)
    num_pair = dp._mul(dp.psi(m - 1), dp.psi(m + 1))
    den_pair = dp._mul(dp.psi(m), dp.psi(m))
    if num_pair[0] == 1 or den_pair[0] == 1:
        raise RatdynError("x-coordinate map should be y-free")
    P1 = num_pair[1]
    P2 = den_pair[1]
    num = psub([Fraction(0)] + list(P2), P1)  # x * psi_m^2 - psi_(m-1) psi_(m+1)
    f = build_map(num, P2)
    if f.degree != m * m:
        raise RatdynError(f"expected degree {m * m}, got {f.degree}")
    return f


def cm_lattes_fixture() -> RationalMap:
    """Numeric degree-2 Lattès test fixture from the curve y^2 = x^3 - x
    with complex multiplication: f(z) = -i (z^2 - 1)/(2z).

    Validated by the curve-arithmetic semiconjugacy oracle in the tests;
    kept in the float realization on purpose (its multipliers are Gaussian,
    not rational, so the exact-spectra pipeline does not apply)."""
    return build_map([1j, 0, -1j], [0, 2], exact=False)


# ----------------------------------------------------------------------
# orbifold signature
# ----------------------------------------------------------------------

WEIGHT_CAP = 64  # genuine orbifold weights here are <= 6 or infinity


@dataclass(frozen=True)
class OrbifoldSignature:
    """Multiset of ramification weights (ints >= 2, math.inf for cusps)."""

    weights: tuple

    def key(self) -> tuple:
        return tuple(sorted((float(w) for w in self.weights)))

    def __str__(self):
        names = ["inf" if w == math.inf else str(w) for w in sorted(
            self.weights, key=float
        )]
        return "(" + ",".join(names) + ")"


_LATTES_SIGNATURES = {
    (2.0, 2.0, 2.0, 2.0),
    (3.0, 3.0, 3.0),
    (2.0, 4.0, 4.0),
    (2.0, 3.0, 6.0),
}


def _orbifold_weights(f: RationalMap, depth: int, tol: float):
    """(representatives, nu) for the canonical orbifold, or None if the
    postcritical truncation does not close.

    nu(p) is the lcm of the local degrees deg_c(f^k) over all critical
    chains f^k(c) = p; a critical point inside a cycle forces weight
    infinity (detected via the WEIGHT_CAP)."""
    trunc = postcritical_truncation(f, depth, tol)
    if not trunc.closed:
        return None
    crit = critical_points(f, tol)
    reps: list[ProjPoint] = []

    def rep_index(p: ProjPoint) -> int:
        for i, q in enumerate(reps):
            if chordal(p, q) <= 10 * tol:
                return i
        reps.append(p)
        return len(reps) - 1

    def local_degree(p: ProjPoint) -> int:
        for q, m in crit:
            if chordal(p, q) <= 10 * tol:
                return m + 1
        return 1

    nu: dict[int, float] = {}
    max_steps = 4 * (len(trunc.points) + 2)
    for c, mult in crit:
        acc: float = mult + 1
        x = f.evaluate(c)
        for _ in range(max_steps):
            i = rep_index(x)
            cur = nu.get(i, 1)
            new = _lcm_w(cur, acc)
            if new == cur and acc > 1:
                break  # stable along this chain
            nu[i] = new
            acc = acc * local_degree(x)
            if acc > WEIGHT_CAP:
                acc = math.inf
            x = f.evaluate(x)
    return reps, nu


def orbifold_signature(
    f: RationalMap, depth: int = 48, tol: float = 1e-8
) -> OrbifoldSignature | None:
    """Canonical orbifold weights of a PCF map, None when the postcritical
    truncation does not close (NotPCF at this depth/tolerance)."""
    got = _orbifold_weights(f, depth, tol)
    if got is None:
        return None
    _reps, nu = got
    weights = tuple(w for w in nu.values() if w > 1)
    return OrbifoldSignature(weights=weights)


def _lcm_w(a, b):
    if a == math.inf or b == math.inf:
        return math.inf
    l = a * b // math.gcd(int(a), int(b))
    return math.inf if l > WEIGHT_CAP else l


# ----------------------------------------------------------------------
# classification
# ----------------------------------------------------------------------


@dataclass
class ExceptionalClass:
    """Decision: power | chebyshev | lattes-flexible | lattes-rigid |
    not-exceptional | undetermined, with the evidence trace."""

    kind: str
    sign: str | None = None
    degree: int | None = None
    reason: str = ""
    evidence: dict = field(default_factory=dict)

    def __str__(self):
        if self.kind in ("power", "chebyshev"):
            return f"{self.kind}({self.sign}, {self.degree})"
        return self.kind + (f": {self.reason}" if self.reason else "")


def _exact_field_violation(f: RationalMap, max_period: int, cap=None, seed=0):
    """An exact certificate that the multipliers cannot all lie in Z or in
    the integers of one imaginary quadratic field, or None."""
    from .spectra import algebraic_spectrum

    try:
        spec = algebraic_spectrum(f, max_period, cap=cap, seed=seed)
    except (DegreeCapExceeded, RatdynError):
        return None
    quad_discs = set()
    for n in sorted(spec.periods):
        for q, _m in spec.periods[n]:
            degq = len(q) - 1
            if any(c.denominator != 1 for c in q):
                return (n, q, "factor is not an algebraic integer")
            if degq >= 3:
                return (n, q, "irreducible factor of degree >= 3")
            if degq == 2:
                disc = q[1] * q[1] - 4 * q[0]
                if disc > 0:
                    return (n, q, "real quadratic multiplier")
                from .spectra import _squarefree_part

                quad_discs.add(_squarefree_part(int(disc)))
                if len(quad_discs) > 1:
                    return (n, q, "multipliers span two imaginary quadratic fields")
    return None


def classify(
    f: RationalMap,
    max_period: int = 3,
    depth: int = 48,
    tol: float = 1e-8,
    cap: int | None = None,
    seed: int = 0,
) -> ExceptionalClass:
    """Signature-plus-spectra decision tree.

    (inf, inf) -> power; (2, 2, inf) -> chebyshev; the four Lattès
    signatures -> Lattès, flexible iff the exact spectra up to max_period
    are rational integers.  Anything else is not-exceptional only on an
    exact multiplier-field violation, else undetermined.
    """
    sig = orbifold_signature(f, depth=depth, tol=tol)
    evidence: dict = {"signature": str(sig) if sig else "NotPCF"}
    if sig is not None:
        key = sig.key()
        if key == (math.inf, math.inf):
            s = _fix_or_swap_sign(f, sig, math.inf, tol)
            return ExceptionalClass(
                "power", sign=s, degree=f.degree, evidence=evidence
            )
        if key == (2.0, 2.0, math.inf):
            if f.degree % 2 == 0:
                s = "+"
            else:
                s = _fix_or_swap_sign(f, sig, 2, tol)
            return ExceptionalClass(
                "chebyshev", sign=s, degree=f.degree, evidence=evidence
            )
        if key in _LATTES_SIGNATURES:
            return _classify_lattes(f, max_period, evidence, cap=cap, seed=seed)
    viol = _exact_field_violation(f, max_period, cap=cap, seed=seed)
    if viol is not None:
        n, q, why = viol
        from .polys import poly_to_str

        evidence["violation"] = {
            "period": n,
            "factor": poly_to_str(list(q), "λ"),
            "why": why,
        }
        return ExceptionalClass(
            "not-exceptional",
            degree=f.degree,
            reason=f"period-{n} factor violates every candidate field",
            evidence=evidence,
        )
    reason = (
        "postcritical set did not close within depth"
        if sig is None
        else f"unrecognized signature {sig}"
    )
    return ExceptionalClass(
        "undetermined", degree=f.degree, reason=reason, evidence=evidence
    )


def _weight_points(f: RationalMap, weight, depth: int, tol: float):
    """Postcritical points carrying the given canonical weight."""
    got = _orbifold_weights(f, depth, tol)
    if got is None:
        return []
    reps, nu = got
    return [reps[i] for i, w in nu.items() if w == weight]


def _fix_or_swap_sign(f: RationalMap, sig, weight, tol: float) -> str:
    """'+' when f fixes the two weight-`weight` orbifold points, '-' when
    it swaps them (conjugation-invariant)."""
    pts = _weight_points(f, weight, depth=48, tol=tol)
    if len(pts) != 2:
        return "+"
    a, b = pts
    fa = f.evaluate(a)
    if chordal(fa, a) <= 100 * tol:
        return "+"
    if chordal(fa, b) <= 100 * tol:
        return "-"
    return "+"


def _classify_lattes(f, max_period, evidence, cap=None, seed=0) -> ExceptionalClass:
    from .spectra import SpectrumNotRational, algebraic_spectrum, integrality

    if f.exact:
        try:
            spec = algebraic_spectrum(f, max_period, cap=cap, seed=seed)
            verdict = integrality(spec)
            evidence["integrality"] = verdict.describe()
            if verdict.all_rational_integers:
                return ExceptionalClass(
                    "lattes-flexible", degree=f.degree, evidence=evidence
                )
            if verdict.all_algebraic_integers:
                return ExceptionalClass(
                    "lattes-rigid", degree=f.degree, evidence=evidence
                )
            return ExceptionalClass(
                "undetermined",
                degree=f.degree,
                reason="Lattès signature but non-integral spectra",
                evidence=evidence,
            )
        except (SpectrumNotRational, DegreeCapExceeded) as e:
            evidence["spectra"] = f"unavailable: {e}"
    # float map: numeric multipliers decide rigid vs undetermined
    from .periodic import cycles_of_period

    gaussian_like = True
    nonreal = False
    try:
        for n in range(1, max_period + 1):
            cycles, _ = cycles_of_period(f, n, seed=seed)
            for c in cycles:
                lam = c.multiplier
                if abs(lam.real - round(lam.real)) > 1e-6 * (1 + abs(lam)) or abs(
                    lam.imag - round(lam.imag)
                ) > 1e-6 * (1 + abs(lam)):
                    gaussian_like = False
                if abs(lam.imag) > 1e-6 * (1 + abs(lam)):
                    nonreal = True
    except RatdynError:
        gaussian_like = False
    evidence["numeric-multipliers"] = {
        "gaussian_like": gaussian_like,
        "nonreal": nonreal,
    }
    if gaussian_like and nonreal:
        return ExceptionalClass(
            "lattes-rigid",
            degree=f.degree,
            reason="numeric multipliers are non-real quadratic integers",
            evidence=evidence,
        )
    return ExceptionalClass(
        "undetermined",
        degree=f.degree,
        reason="Lattès signature; exact coefficients needed for the "
        "flexible/rigid split",
        evidence=evidence,
    )
