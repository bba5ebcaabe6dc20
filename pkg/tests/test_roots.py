import numpy as np
import pytest

from ratdyn.errors import RootFindingFailed
from ratdyn.roots import aberth, batched_roots, newton_ratio_from_coeffs, solve_poly


def test_solve_quartic():
    r = np.sort_complex(solve_poly(np.array([-1, 0, 0, 0, 1], dtype=complex)))
    expect = np.sort_complex(np.array([1, -1, 1j, -1j]))
    assert np.abs(r - expect).max() < 1e-12


def test_aberth_high_degree_cyclotomic_like():
    # z^1024 - z: roots are 0 and the 1023rd roots of unity
    c = np.zeros(1025, dtype=complex)
    c[1] = -1
    c[1024] = 1
    r = aberth(c, seed=1)
    assert r.size == 1024
    nz = r[np.abs(r) > 1e-8]
    assert np.abs(nz**1023 - 1).max() < 1e-10
    assert (np.abs(r) < 1e-12).sum() == 1


def test_aberth_is_deterministic():
    c = np.array(np.random.default_rng(0).normal(size=80), dtype=complex)
    c[-1] = 1.0
    r1 = aberth(c.copy(), seed=42)
    r2 = aberth(c.copy(), seed=42)
    assert np.array_equal(r1, r2)


def test_newton_ratio_both_charts():
    # p = z^8 - 256: ratio p/p' exact on both sides of |z| = 1
    c = np.zeros(9, dtype=complex)
    c[0] = -256
    c[8] = 1
    ratio = newton_ratio_from_coeffs(c)
    for z in (0.5 + 0.2j, 3.0 - 1.0j, 0.9j, 2.2):
        z = complex(z)
        expect = (z**8 - 256) / (8 * z**7)
        assert abs(ratio(np.array([z]))[0] - expect) < 1e-12 * max(1, abs(expect))


def test_batched_roots_quadratic_and_degenerate():
    co = np.array(
        [[-4, 0, 1], [-9, 0, 1], [0, 0, 1], [2, 3, 0]], dtype=complex
    )
    rr = batched_roots(co)
    assert np.allclose(np.sort_complex(rr[0]), [-2, 2])
    assert np.allclose(np.sort_complex(rr[1]), [-3, 3])
    assert np.allclose(rr[2], 0)
    # degenerate leading coefficient: one finite root, one at infinity
    finite = rr[3][np.isfinite(rr[3])]
    assert finite.size == 1 and abs(finite[0] + 2 / 3) < 1e-12


def test_batched_roots_quartic_matches_numpy():
    co = np.array([[-1, 0, 0, 0, 1], [16, 0, 0, 0, 1]], dtype=complex)
    rr = batched_roots(co)
    for row, poly in zip(rr, co):
        assert np.abs(
            np.sort_complex(row) - np.sort_complex(np.roots(poly[::-1]))
        ).max() < 1e-10


def test_zero_polynomial_rejected():
    with pytest.raises(RootFindingFailed):
        solve_poly(np.zeros(4, dtype=complex))
