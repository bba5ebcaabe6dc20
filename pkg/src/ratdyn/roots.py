"""Simultaneous polynomial root finding.

The workhorse is an Aberth–Ehrlich iteration with seeded random-perturbation
restarts (deterministic for a fixed seed).  Newton ratios p/p' are computed
through the w = 1/z chart for |z| > 1, so high-degree polynomials are
evaluated without overflow.  A generic "ratio function" mode lets the
periodic-point solver run the same iteration against an implicitly evaluated
polynomial (iterated maps) instead of explicit coefficients.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import RootFindingFailed

_CHUNK = 512


def _pairwise_repulsion(z: np.ndarray) -> np.ndarray:
    """S_i = sum_{j != i} 1/(z_i - z_j), chunked to bound memory."""
    n = z.size
    out = np.zeros(n, dtype=complex)
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        diff = z[lo:hi, None] - z[None, :]
        np.fill_diagonal(diff[:, lo:hi], np.inf)
        with np.errstate(divide="ignore", invalid="ignore"):
            out[lo:hi] = (1.0 / diff).sum(axis=1)
    return out


def newton_ratio_from_coeffs(coeffs_asc: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    """Return z -> p(z)/p'(z) evaluated stably on both charts.

    For |z| > 1 uses p(z) = z^D q(1/z) with q the reversed coefficients:
    p'/p = (D - w q'(w)/q(w))/z, w = 1/z.
    """
    c = np.asarray(coeffs_asc, dtype=complex)
    D = len(c) - 1
    cr = c[::-1].copy()

    def ratio(z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        out = np.empty_like(z)
        inner = np.abs(z) <= 1.0
        if inner.any():
            zi = z[inner]
            p = np.full_like(zi, c[D])
            dp = np.zeros_like(zi)
            for k in range(D - 1, -1, -1):
                dp = dp * zi + p
                p = p * zi + c[k]
            with np.errstate(divide="ignore", invalid="ignore"):
                out[inner] = p / dp
        if (~inner).any():
            zo = z[~inner]
            w = 1.0 / zo
            q = np.full_like(w, cr[D])
            dq = np.zeros_like(w)
            for k in range(D - 1, -1, -1):
                dq = dq * w + q
                q = q * w + cr[k]
            with np.errstate(divide="ignore", invalid="ignore"):
                out[~inner] = zo * q / (D * q - w * dq)
        return out

    return ratio


def aberth_ratio(
    ratio_fn: Callable[[np.ndarray], np.ndarray],
    starts: np.ndarray,
    tol: float = 1e-13,
    max_iter: int = 120,
    seed: int = 0,
    restarts: int = 3,
) -> tuple[np.ndarray, np.ndarray]:
    """Aberth–Ehrlich iteration from given starts.

    Returns (roots, converged_mask); unconverged entries keep their last
    iterate.  Deterministic for fixed seed/starts.
    """
    rng = np.random.default_rng(seed)
    z = np.array(starts, dtype=complex)
    n = z.size
    scale = float(np.median(np.abs(z))) + 1.0
    locked = np.zeros(n, dtype=bool)
    for round_ in range(restarts + 1):
        for _ in range(max_iter):
            with np.errstate(all="ignore"):
                N = ratio_fn(z)
            # a non-finite ratio means the iterate is lost (underflow basin,
            # pole, ...): it must not lock, and gets redrawn at restart
            bad = ~np.isfinite(N)
            if bad.any():
                N = np.where(bad, 0.0, N)
            S = _pairwise_repulsion(z)
            with np.errstate(divide="ignore", invalid="ignore"):
                corr = N / (1.0 - N * S)
            corr = np.where(np.isfinite(corr), corr, N)
            # clamp: one huge correction must not fling the iterate away
            lim = 0.5 * (1.0 + np.abs(z))
            mag = np.abs(corr)
            with np.errstate(invalid="ignore", divide="ignore"):
                corr = np.where(mag > lim, corr * (lim / np.maximum(mag, 1e-300)), corr)
            corr = np.where(locked, 0.0, corr)
            z = z - corr
            step = np.abs(corr)
            locked = locked | ((step <= tol * (1.0 + np.abs(z))) & ~bad)
            if locked.all():
                break
        if locked.all():
            break
        # seeded restart: runaways and half the stragglers re-drawn at the
        # start scale (sphere-uniform modulus), the rest locally kicked
        idx = np.nonzero(~locked)[0]
        redraw = idx[
            (np.abs(z[idx]) > 1e6 * scale) | (rng.random(idx.size) < 0.5)
        ]
        if redraw.size:
            u = rng.random(redraw.size)
            r = scale * np.sqrt(u / (1.0 - u + 1e-12))
            z[redraw] = r * np.exp(2j * np.pi * rng.random(redraw.size))
        rest = np.setdiff1d(idx, redraw)
        if rest.size:
            spread = 0.05 / (round_ + 1)
            z[rest] = z[rest] * (
                1.0 + spread * (rng.random(rest.size) - 0.5)
            ) + spread * (rng.random(rest.size) - 0.5)
    # finishing sweep: a few stragglers may just need a long Newton walk
    # (far-field steps are only |z|/degree); repel against locked roots only
    idx = np.nonzero(~locked)[0]
    if idx.size and idx.size <= max(8, n // 20):
        zi = z[idx]
        done = np.zeros(idx.size, dtype=bool)
        for _ in range(4 * n + 300):
            with np.errstate(all="ignore"):
                N = ratio_fn(zi)
            bad = ~np.isfinite(N)
            N = np.where(bad, 0.0, N)
            S = np.zeros(zi.size, dtype=complex)
            zl = z[locked]
            for lo in range(0, zl.size, _CHUNK):
                hi = min(lo + _CHUNK, zl.size)
                with np.errstate(all="ignore"):
                    S += (1.0 / (zi[:, None] - zl[None, lo:hi])).sum(axis=1)
            with np.errstate(all="ignore"):
                corr = N / (1.0 - N * S)
            corr = np.where(np.isfinite(corr), corr, N)
            lim = 0.5 * (1.0 + np.abs(zi))
            mag = np.abs(corr)
            corr = np.where(mag > lim, corr * (lim / np.maximum(mag, 1e-300)), corr)
            corr = np.where(done, 0.0, corr)
            zi = zi - corr
            done = done | ((np.abs(corr) <= tol * (1.0 + np.abs(zi))) & ~bad)
            if done.all():
                break
        z[idx] = zi
        locked[idx] = done
    return z, locked


def _newton_polygon_starts(c: np.ndarray, seed: int) -> np.ndarray:
    """Per-root modulus estimates from the upper convex hull of
    (k, log|c_k|) (Bini's initialization), with seeded angular twist."""
    D = len(c) - 1
    ks = [k for k in range(D + 1) if c[k] != 0]
    logs = {k: math.log(abs(c[k])) for k in ks}
    hull = [ks[0]]
    for k in ks[1:]:
        while len(hull) >= 2:
            k1, k2 = hull[-2], hull[-1]
            # keep the hull upper-convex
            if (logs[k2] - logs[k1]) * (k - k2) <= (logs[k] - logs[k2]) * (k2 - k1):
                hull.pop()
            else:
                break
        hull.append(k)
    radii = np.empty(D)
    pos = 0
    for k1, k2 in zip(hull, hull[1:]):
        u = math.exp((logs[k1] - logs[k2]) / (k2 - k1))
        u = min(max(u, 1e-6), 1e6)
        radii[pos : pos + (k2 - k1)] = u
        pos += k2 - k1
    rng = np.random.default_rng(seed)
    ang = 2 * np.pi * (np.arange(D) * 0.61803398875 % 1.0) + rng.random() * 0.2
    return radii * np.exp(1j * ang)


def aberth(
    coeffs_asc: np.ndarray,
    tol: float = 1e-13,
    max_iter: int = 120,
    seed: int = 0,
    starts: np.ndarray | None = None,
) -> np.ndarray:
    """All complex roots of a coefficient polynomial via Aberth–Ehrlich."""
    c = np.asarray(coeffs_asc, dtype=complex)
    # strip exactly-zero leading (high-order) coefficients
    nz = np.nonzero(np.abs(c) > 0)[0]
    if nz.size == 0:
        raise RootFindingFailed("zero polynomial")
    c = c[: nz[-1] + 1]
    D = len(c) - 1
    if D == 0:
        return np.empty(0, dtype=complex)
    # roots at the origin
    k0 = nz[0]
    zeros = np.zeros(k0, dtype=complex)
    c = c[k0:]
    D = len(c) - 1
    if D == 0:
        return zeros
    if starts is None:
        starts = _newton_polygon_starts(c, seed)
    ratio = newton_ratio_from_coeffs(c)
    roots, ok = aberth_ratio(ratio, starts, tol=tol, max_iter=max_iter, seed=seed)
    if not ok.all():
        raise RootFindingFailed(
            f"{int((~ok).sum())} of {D} roots unconverged",
            unconverged=int((~ok).sum()),
        )
    return np.concatenate([zeros, roots])


def solve_poly(coeffs_asc: np.ndarray, tol: float = 1e-13, seed: int = 0) -> np.ndarray:
    """Roots of an explicit-coefficient polynomial (ascending coefficients).

    Small degrees go to the companion-matrix solver; larger ones to Aberth.
    """
    c = np.asarray(coeffs_asc, dtype=complex)
    nz = np.nonzero(np.abs(c) > 0)[0]
    if nz.size == 0:
        raise RootFindingFailed("zero polynomial")
    c = c[: nz[-1] + 1]
    if len(c) - 1 <= 0:
        return np.empty(0, dtype=complex)
    if len(c) - 1 <= 48:
        return np.roots(c[::-1])
    return aberth(c, tol=tol, seed=seed)


def newton_polish(ratio_fn, z: np.ndarray, iters: int = 2) -> np.ndarray:
    for _ in range(iters):
        N = ratio_fn(z)
        N = np.where(np.isfinite(N), N, 0.0)
        z = z - N
    return z


# ----------------------------------------------------------------------
# batched small-degree solves (preimages)
# ----------------------------------------------------------------------


def batched_roots(coeffs: np.ndarray) -> np.ndarray:
    """Roots of a batch of same-length ascending-coefficient polynomials.

    coeffs has shape (N, d+1); returns (N, d) roots.  Rows whose leading
    coefficient (nearly) vanishes get inf entries for the missing roots.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    N, m = coeffs.shape
    d = m - 1
    out = np.full((N, d), np.inf, dtype=complex)
    if d == 0:
        return out
    scale = np.abs(coeffs).max(axis=1)
    scale = np.where(scale == 0, 1.0, scale)
    lead_ok = np.abs(coeffs[:, -1]) > 1e-14 * scale
    if d == 1:
        rows = lead_ok
        out[rows, 0] = -coeffs[rows, 0] / coeffs[rows, 1]
        return out
    if d == 2:
        rows = lead_ok
        a, b, c = coeffs[rows, 2], coeffs[rows, 1], coeffs[rows, 0]
        disc = b * b - 4 * a * c
        sq = np.sqrt(disc)
        # pick the sign that avoids cancellation
        flip = np.real(np.conj(b) * sq) < 0
        sq = np.where(flip, -sq, sq)
        q = -0.5 * (b + sq)
        r1 = np.where(q != 0, q / a, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            r2 = np.where(q != 0, c / q, np.sqrt(-c / a + 0j) * 0)
        deg_zero = q == 0
        if deg_zero.any():
            # b = 0 and c = 0 edge: both roots are +-sqrt(-c/a) = 0
            s = np.sqrt(-c[deg_zero] / a[deg_zero] + 0j)
            r1 = r1.copy()
            r2 = r2.copy()
            r1[deg_zero] = s
            r2[deg_zero] = -s
        out[rows, 0] = r1
        out[rows, 1] = r2
    else:
        rows = np.nonzero(lead_ok)[0]
        if rows.size:
            comp = np.zeros((rows.size, d, d), dtype=complex)
            comp[:, 1:, :-1] = np.eye(d - 1)
            comp[:, :, -1] = -coeffs[rows, :-1] / coeffs[rows, -1][:, None]
            vals = np.linalg.eigvals(comp)
            out[rows, :] = vals
    # degree-drop rows: solve the reduced polynomial per row
    bad = ~lead_ok
    for i in np.nonzero(bad)[0]:
        row = coeffs[i]
        nz = np.nonzero(np.abs(row) > 1e-14 * scale[i])[0]
        if nz.size == 0:
            continue
        sub = row[: nz[-1] + 1]
        if len(sub) > 1:
            r = np.roots(sub[::-1])
            out[i, : r.size] = r
    return out
