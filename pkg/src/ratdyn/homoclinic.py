"""Periodic orbits with prescribed characteristic exponent near a repelling
fixed point, built from inverse branches.

Given a repelling periodic point z0 away from the postcritical set, a
backward chain returning to a small disk around z0 yields, for every large
n, a periodic point w_n of exact period n whose orbit spends n - l steps
near z0; the exponents chi(w_n) converge to chi(z0) like O(1/n).  Inverse
branches are realized numerically by nearest-preimage continuation; each
w_n is Newton-refined, then re-verified in high precision (period and
proper-divisor separation), never trusted from double precision alone.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from . import config
from .errors import (
    InPostcriticalSet,
    NewtonDiverged,
    NoReturnFound,
    NotRepelling,
    PeriodCollision,
    RatdynError,
)
from .periodic import compose_hom, multiplier
from .roots import solve_poly
from .scalars import Qi
from .sphere import (
    ProjPoint,
    RationalMap,
    build_map,
    chordal,
    critical_points,
    postcritical_truncation,
    spherical_norm,
)
from .spectra import _mp_refine_periodic


def iterate_map(f: RationalMap, q: int) -> RationalMap:
    """f^q as an explicit RationalMap (used to reduce period-q seeds to
    fixed-point seeds)."""
    if q == 1:
        return f
    N, D = compose_hom(f, q)
    if f.exact:
        return build_map(N, D)
    return build_map(N, D, exact=False)


@dataclass
class HomoclinicSeed:
    """A repelling fixed point of f^q with a backward chain returning to
    its linearization disk.

    chain = [z_l, z_(l-1), ..., z_1, z_0] with F(z_j) = z_(j-1) for the
    working map F = f^q; radii are Euclidean in the plane around z0."""

    z0: complex
    q: int
    multiplier: complex
    l: int
    chain: list[complex]
    r_U: float
    r_V: float
    r_W: float
    map_q: RationalMap = field(repr=False)

    @property
    def target_exponent(self) -> float:
        return math.log(abs(self.multiplier))


def _preimages_of(F: RationalMap, w: complex) -> np.ndarray:
    """All finite preimages of w under F."""
    d = F.degree
    A = np.zeros(d + 1, dtype=complex)
    B = np.zeros(d + 1, dtype=complex)
    for i, c in enumerate(F.num):
        A[i] = complex(c)
    for i, c in enumerate(F.den):
        B[i] = complex(c)
    coeffs = A - w * B
    nz = np.nonzero(np.abs(coeffs) > 1e-14 * max(1.0, np.abs(coeffs).max()))[0]
    if nz.size == 0:
        return np.empty(0, dtype=complex)
    return np.asarray(solve_poly(coeffs[: nz[-1] + 1]), dtype=complex)


def _nearest_preimage(F: RationalMap, w: complex, target: complex) -> complex:
    pre = _preimages_of(F, w)
    if pre.size == 0:
        raise RatdynError("empty preimage set")
    return complex(pre[np.argmin(np.abs(pre - target))])


def find_seed(
    f: RationalMap,
    z0: ProjPoint | complex,
    q: int = 1,
    search_depth: int = 14,
    tol: float = 1e-9,
) -> HomoclinicSeed:
    """Breadth-first search over iterated preimages of z0 (excluding the
    branch fixing z0) for the first return into the linearization disk V.

    Disk radii: 2 r_V clear of the critical values of f^q (so the inverse
    branch structure over V is unbranched), r_U = r_V / |multiplier|, and
    r_W kept clear of critical points along the chain.
    """
    F = iterate_map(f, q)
    p0 = z0 if isinstance(z0, ProjPoint) else ProjPoint.finite(z0)
    if p0.is_infinity:
        raise RatdynError("seed construction expects a finite base point")
    z0c = complex(p0.z)
    p0f = ProjPoint.finite(z0c)  # the construction is numeric throughout
    img = F.evaluate(p0f)
    if chordal(img, p0f) > 100 * tol:
        raise RatdynError(f"point is not fixed by f^{q} at tolerance")
    lam = multiplier(F, [p0f])
    lam_c = complex(lam) if isinstance(lam, Qi) else complex(lam)
    if abs(lam_c) <= 1.0 + 1e-9:
        raise NotRepelling(f"|multiplier| = {abs(lam_c):.6g} <= 1")
    trunc = postcritical_truncation(f, depth=32, tol=config.DEDUP_TOL)
    if trunc.min_chordal(p0) <= 10 * tol:
        raise InPostcriticalSet(
            "base point is within 10*tol of the postcritical truncation"
        )
    # critical values of F: depth-q truncation of f's critical orbit
    critvals = postcritical_truncation(f, depth=q, tol=config.DEDUP_TOL).points
    dists = [abs(complex(p.z) - z0c) for p in critvals if not p.is_infinity]
    d_cv = min(dists) if dists else 1.0
    r_V = min(0.25 * d_cv, 0.5)
    # the inverse branch of F fixing z0 must contract V into itself
    for _ in range(10):
        if _branch_contracts(F, z0c, lam_c, r_V):
            break
        r_V *= 0.6
    else:
        raise RatdynError("could not certify a contracting inverse branch")
    # breadth-first search for a return into V
    parents: dict[int, list[int]] = {}
    level_pts: list[np.ndarray] = [np.array([z0c])]
    found = None
    for depth in range(1, search_depth + 1):
        prev = level_pts[-1]
        cur = []
        back = []
        for pi, w in enumerate(prev):
            pre = _preimages_of(F, complex(w))
            for x in pre:
                if abs(x - z0c) <= 10 * tol:
                    continue  # the branch fixing z0
                cur.append(x)
                back.append(pi)
        if not cur:
            break
        cur = np.asarray(cur)
        order = np.argsort(np.abs(cur - z0c), kind="stable")
        if cur.size > 8192:
            order = order[:8192]
        cur = cur[order]
        back_arr = [back[i] for i in order]
        hits = np.nonzero(np.abs(cur - z0c) < r_V)[0]
        level_pts.append(cur)
        parents[depth] = back_arr
        if hits.size:
            found = (depth, int(hits[0]))
            break
    if found is None:
        raise NoReturnFound(
            f"no preimage re-entered V within depth {search_depth}",
            search_depth=search_depth,
        )
    l, idx = found
    chain = []
    for depth in range(l, 0, -1):
        chain.append(complex(level_pts[depth][idx]))
        idx = parents[depth][idx]
    chain.append(z0c)  # chain = [z_l, ..., z_1, z_0]
    crit = [complex(p.z) for p, _ in critical_points(f) if not p.is_infinity]
    if crit:
        d_crit = min(min(abs(zj - c) for c in crit) for zj in chain[:-1])
    else:
        d_crit = 1.0
    r_W = min(r_V / 4, d_crit / 4)
    return HomoclinicSeed(
        z0=z0c,
        q=q,
        multiplier=lam_c,
        l=l,
        chain=chain,
        r_U=r_V / abs(lam_c),
        r_V=r_V,
        r_W=r_W,
        map_q=F,
    )


def _branch_contracts(F, z0: complex, lam: complex, r: float, samples: int = 8):
    """Empirical check that the inverse branch of F at z0 maps the disk of
    radius r into itself with ratio about 1/|lam|."""
    for k in range(samples):
        y = z0 + r * cmath.exp(2j * math.pi * (k + 0.37) / samples)
        try:
            g = _nearest_preimage(F, y, z0 + (y - z0) / lam)
        except RatdynError:
            return False
        if abs(g - z0) >= 0.95 * abs(y - z0):
            return False
    return True


def branch_contraction_ratios(seed: HomoclinicSeed, samples: int = 16):
    """Observed |g(y) - z0| / |y - z0| on the V-circle (for diagnostics)."""
    F = seed.map_q
    out = []
    for k in range(samples):
        y = seed.z0 + seed.r_U * cmath.exp(2j * math.pi * (k + 0.5) / samples)
        g = _nearest_preimage(F, y, seed.z0 + (y - seed.z0) / seed.multiplier)
        out.append(abs(g - seed.z0) / abs(y - seed.z0))
    return out


# ----------------------------------------------------------------------
# the sequence of periodic points
# ----------------------------------------------------------------------


@dataclass
class SequenceEntry:
    n: int
    point: complex
    period_verified: bool
    multiplier: complex
    char_exponent: float
    residual: float


@dataclass
class ExponentSequence:
    """Periodic points w_n (exact period n for the working map f^q) whose
    characteristic exponents approach the seed's target exponent."""

    seed: HomoclinicSeed
    entries: list[SequenceEntry]

    @property
    def target_chi(self) -> float:
        return self.seed.target_exponent


def _apply_g(F, z0, lam, y, times: int) -> complex:
    for _ in range(times):
        y = _nearest_preimage(F, y, z0 + (y - z0) / lam)
    return y


def _apply_h(F, chain, y) -> complex:
    """Backward continuation along the chain: maps a point near z0 to the
    corresponding point near z_l."""
    l = len(chain) - 1
    u = y
    for j in range(1, l + 1):
        u = _nearest_preimage(F, u, chain[l - j])
    return u


def _mp_orbit_exponent(F: RationalMap, w, n: int, dps: int = 40):
    """(multiplier, chi, residual) of the period-n orbit through w, in mp."""
    with mp.workdps(dps):
        A = [mp.mpc(complex(c)) for c in F.num]
        B = [mp.mpc(complex(c)) for c in F.den]
        if F.exact:
            from .spectra import _mp_qi

            A = [_mp_qi(Qi.coerce(c)) for c in F.num]
            B = [_mp_qi(Qi.coerce(c)) for c in F.den]

        def ev(p, u):
            acc = mp.mpc(0)
            for ck in reversed(p):
                acc = acc * u + ck
            return acc

        dA = [k * A[k] for k in range(1, len(A))]
        dB = [k * B[k] for k in range(1, len(B))]
        z = mp.mpc(w)
        lam = mp.mpc(1)
        log_norm = mp.mpf(0)
        for _ in range(n):
            a, b = ev(A, z), ev(B, z)
            da, db = ev(dA, z), ev(dB, z)
            deriv = (da * b - a * db) / (b * b)
            lam *= deriv
            log_norm += mp.log(abs(deriv))
            z = a / b
        residual = abs(z - mp.mpc(w))
        chi = float(log_norm) / n
        return complex(lam), chi, float(residual)


def exponent_sequence(
    f: RationalMap,
    seed: HomoclinicSeed,
    n_min: int,
    n_max: int,
    tol: float = 1e-9,
) -> ExponentSequence:
    """For each n in [n_min, n_max]: pseudo-orbit through W plus n - l
    inverse-branch contractions, Newton refinement of f^n(w) = w, and
    high-precision verification of exact period n.

    Requires n_min >= 2 l + 1 (below that the period argument can fail)."""
    F = seed.map_q
    l = seed.l
    if n_min < 2 * l + 1:
        raise ValueError(
            f"n_min = {n_min} < 2l + 1 = {2 * l + 1}: period uniqueness is "
            "not guaranteed below twice the return time"
        )
    if n_max < n_min:
        raise ValueError("n_max < n_min")
    entries: list[SequenceEntry] = []
    for n in range(n_min, n_max + 1):
        w_mp = _refine_entry(F, seed, n, tol)
        lam, chi, resid = _mp_orbit_exponent(F, w_mp, n, dps=60)
        # exact-period check at high precision via proper divisors
        verified = resid < tol
        for k in _proper_divisors(n):
            _, _, rk = _mp_orbit_exponent(F, w_mp, k, dps=60)
            if rk < 10 * tol:
                raise PeriodCollision(
                    f"refined point has period dividing {k} < {n}: bad seed",
                    n=n,
                )
        entries.append(
            SequenceEntry(
                n=n,
                point=complex(float(w_mp.real), float(w_mp.imag)),
                period_verified=verified,
                multiplier=lam,
                char_exponent=chi,
                residual=resid,
            )
        )
    return ExponentSequence(seed=seed, entries=entries)


def _proper_divisors(n: int) -> list[int]:
    return [k for k in range(1, n) if n % k == 0]


def _refine_entry(F, seed: HomoclinicSeed, n: int, tol: float):
    z0, lam, l = seed.z0, seed.multiplier, seed.l
    r_W = seed.r_W
    for attempt in range(2):
        y = seed.chain[0]  # z_l
        if attempt == 1:
            # re-seed once with a tighter start (shrunken r_W)
            y = seed.chain[0] + 0.25 * r_W
        x = _apply_g(F, z0, lam, y, n - l)
        guess = _apply_h(F, seed.chain, x)
        w = _newton_period(F, guess, n)
        if w is not None:
            # refine in extended precision for verifiable residuals;
            # keep the mp value (double truncation would wreck them)
            return _mp_refine_periodic(F, w, n, dps=60)
    raise NewtonDiverged(f"Newton did not converge for n = {n}", n=n)


def _newton_period(F, w0: complex, n: int, max_iter: int = 60):
    from .periodic import make_period_ratio

    ratio = make_period_ratio(F, n)
    w = np.array([w0], dtype=complex)
    for _ in range(max_iter):
        step = ratio(w)
        if not np.isfinite(step[0]):
            return None
        w = w - step
        if abs(step[0]) < 1e-14 * (1 + abs(w[0])):
            return complex(w[0])
        if abs(w[0]) > 1e8:
            return None
    return None


# ----------------------------------------------------------------------
# convergence diagnostics
# ----------------------------------------------------------------------


@dataclass
class ConvergenceReport:
    target_chi: float
    deltas: list[tuple[int, float]]
    c_over_n_constant: float
    c_over_n_holds: bool
    geometric_fit: dict
    sandwich: dict

    def max_delta(self) -> float:
        return max(d for _n, d in self.deltas) if self.deltas else 0.0


def convergence_report(seq: ExponentSequence, alpha: float = 1.5) -> ConvergenceReport:
    """chi_n - chi(z0) per n, a fitted C/n envelope, a geometric fit of the
    multipliers lambda_n ~ a lambda^n + b, and the empirical sandwich-bound
    slack from min/max of ||f'|| on the seed disks."""
    if len(seq.entries) < 4:
        raise ValueError("need at least 4 entries for a convergence report")
    chi0 = seq.target_chi
    deltas = [(e.n, abs(e.char_exponent - chi0)) for e in seq.entries]
    C = max(n * d for n, d in deltas)
    holds = all(d <= C / n + 1e-15 for n, d in deltas)
    # geometric fit: lambda_n / lambda^n = a + b lambda^(-n)
    lam = seq.seed.multiplier
    xs = []
    ts = []
    for e in seq.entries:
        ln = lam ** e.n
        xs.append(1.0 / ln)
        ts.append(e.multiplier / ln)
    Amat = np.stack([np.ones(len(xs), dtype=complex), np.array(xs)], axis=1)
    coef, *_ = np.linalg.lstsq(Amat, np.array(ts), rcond=None)
    a_hat, b_hat = complex(coef[0]), complex(coef[1])
    resid = [
        abs(e.multiplier - (a_hat * lam**e.n + b_hat)) / abs(lam) ** e.n
        for e in seq.entries
    ]
    # sandwich bound slack with empirical m, M
    F = seq.seed.map_q
    m_emp, M_emp = _disk_norm_extrema(F, seq.seed)
    l = seq.seed.l
    J = l  # operational surrogate for the proof's J_alpha
    slacks = []
    for e in seq.entries:
        lower = J * math.log(m_emp) + (e.n - J - l + 1) * (chi0 - math.log(alpha))
        slacks.append((e.n, math.log(abs(e.multiplier)) - lower))
    return ConvergenceReport(
        target_chi=chi0,
        deltas=deltas,
        c_over_n_constant=C,
        c_over_n_holds=holds,
        geometric_fit={
            "a": a_hat,
            "b": b_hat,
            "relative_residuals": resid,
        },
        sandwich={
            "m": m_emp,
            "M": M_emp,
            "alpha": alpha,
            "lower_bound_slack": slacks,
        },
    )


def _disk_norm_extrema(F: RationalMap, seed: HomoclinicSeed, samples: int = 64):
    rng = np.random.default_rng(11)
    ang = 2 * np.pi * rng.random(samples)
    rad = np.sqrt(rng.random(samples))
    u_disk = seed.z0 + seed.r_U * rad * np.exp(1j * ang)
    w_disk = seed.chain[0] + seed.r_W * rad * np.exp(1j * ang)
    m_u = min(spherical_norm(F, complex(z)) for z in u_disk)
    # ||(F^l)'|| on W via the chain rule of spherical norms
    m_w = math.inf
    for z in w_disk:
        z = complex(z)
        acc = 1.0
        for _ in range(seed.l):
            acc *= spherical_norm(F, z)
            z = complex(F.evaluate(z).z)
        m_w = min(m_w, acc)
    grid = np.concatenate(
        [u_disk, w_disk, rng.normal(size=samples) + 1j * rng.normal(size=samples)]
    )
    M = max(spherical_norm(F, complex(z)) for z in grid)
    m = min(m_u, m_w)
    return max(m, 1e-12), M
