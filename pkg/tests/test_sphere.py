import math
from fractions import Fraction

import numpy as np
import pytest

from ratdyn import (
    INF,
    DegenerateMap,
    DegreeTooLow,
    MoebiusMap,
    ProjPoint,
    Qi,
    build_map,
    chordal,
    conjugate,
    critical_points,
    evaluate,
    postcritical_truncation,
    spherical_norm,
)
from ratdyn.homoclinic import iterate_map

Z2 = build_map([0, 0, 1], [1])
BASILICA = build_map([-1, 0, 1], [1])


def test_build_map_literal_examples():
    f = build_map([0, 0, 1], [1])
    assert f.degree == 2 and f.exact
    g = build_map([-1, 0, 1], [1])
    assert g.degree == 2
    with pytest.raises(DegenerateMap):
        build_map([0, 0, 1], [0, 0, 1])  # num = den = z^2
    with pytest.raises(DegreeTooLow):
        build_map([1, 1], [1])  # degree 1


def test_build_map_reduces_common_factor():
    # (z^3 + z)/z has the common factor z; reduced degree 2 survives
    f = build_map([0, 1, 0, 1], [0, 1])
    assert f.degree == 2
    assert [c for c in f.num] == [Qi(1), Qi(0), Qi(1)]


def test_evaluate_examples():
    assert evaluate(Z2, 2).z == Qi(4)
    assert evaluate(Z2, INF).is_infinity
    assert evaluate(BASILICA, 0).z == Qi(-1)


def test_evaluate_homogeneous_at_infinity_for_inverse_power():
    f = build_map([1], [0, 0, 1])  # 1/z^2
    assert evaluate(f, INF).z == Qi(0)
    assert evaluate(f, 0).is_infinity


def test_spherical_norm_examples():
    assert abs(spherical_norm(Z2, 1) - 2.0) < 1e-15
    assert abs(spherical_norm(Z2, 2) - 20 / 17) < 1e-15
    # chart w = 1/z gives g(w) = w^2 with g'(0) = 0; also the limit of the
    # formula as |z| grows
    assert spherical_norm(Z2, INF) == 0.0
    vals = [spherical_norm(Z2, 10.0**k) for k in range(2, 7)]
    assert all(v2 < v1 for v1, v2 in zip(vals, vals[1:]))


def test_spherical_norm_matches_displayed_formula_within_ulps():
    rng = np.random.default_rng(5)
    for f in (Z2, BASILICA):
        for _ in range(200):
            z = complex(rng.normal(), rng.normal())
            fz = evaluate(f, z).to_complex()
            if not np.isfinite(fz):
                continue
            # |f'(z)| (1+|z|^2)/(1+|f(z)|^2)
            h = 1e-7
            direct = abs(2 * z) if f is Z2 else abs(2 * z)
            ref = direct * (1 + abs(z) ** 2) / (1 + abs(fz) ** 2)
            got = spherical_norm(f, z)
            assert abs(got - ref) <= 4 * math.ulp(max(ref, 1.0)) + 1e-13 * ref


def test_spherical_norm_exact_squared_form():
    # exact rational square of the displayed formula
    z = ProjPoint.finite(Qi(Fraction(3, 2), Fraction(-1, 3)))
    n2 = Z2.spherical_norm_sq_exact(z)
    q = Qi(Fraction(3, 2), Fraction(-1, 3))
    fz = q * q
    deriv = Qi(2) * q
    ref = deriv.abs2() * (1 + q.abs2()) ** 2 / (1 + fz.abs2()) ** 2
    assert n2 == ref


def test_chain_rule_for_spherical_norm():
    rng = np.random.default_rng(7)
    ff = iterate_map(BASILICA, 2)
    for _ in range(50):
        z = complex(rng.normal(), rng.normal())
        lhs = spherical_norm(ff, z)
        fz = evaluate(BASILICA, z)
        rhs = spherical_norm(BASILICA, fz) * spherical_norm(BASILICA, z)
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


def test_conjugate_examples():
    ident = MoebiusMap(1, 0, 0, 1)
    g = conjugate(Z2, ident)
    assert list(g.num) == list(Z2.num) and list(g.den) == list(Z2.den)
    # phi(z) = 2z: 2 (z/2)^2 = z^2/2
    g = conjugate(Z2, MoebiusMap(2, 0, 0, 1))
    assert g.evaluate(2).z == Qi(2)
    # phi(z) = 1/z fixes z^2
    g = conjugate(Z2, MoebiusMap(0, 1, 1, 0))
    assert list(g.num) == [Qi(0), Qi(0), Qi(1)] and list(g.den) == [Qi(1)]


def test_conjugate_roundtrip_exact():
    phi = MoebiusMap(Qi(1), Qi(2), Qi(3), Qi(1))
    g = conjugate(conjugate(BASILICA, phi), phi.inverse())
    assert list(g.num) == list(BASILICA.num)
    assert list(g.den) == list(BASILICA.den)


def test_conjugate_commutes_with_evaluate():
    rng = np.random.default_rng(3)
    for _ in range(25):
        a, b, c, d = (complex(x, y) for x, y in rng.normal(size=(4, 2)))
        try:
            phi = MoebiusMap(a, b, c, d)
        except DegenerateMap:
            continue
        g = conjugate(BASILICA, phi)
        z = complex(rng.normal(), rng.normal())
        lhs = g.evaluate(phi(z))
        rhs = phi(BASILICA.evaluate(z))
        assert chordal(lhs, rhs) < 1e-9


def test_critical_points_count_and_examples():
    crit = critical_points(Z2)
    pts = {("inf" if p.is_infinity else round(abs(p.to_complex()), 6)): m for p, m in crit}
    assert pts == {0.0: 1, "inf": 1}
    crit_b = critical_points(BASILICA)
    assert sum(m for _, m in crit_b) == 2
    lattes = build_map(
        [Fraction(1, 4), 0, Fraction(1, 2), 0, Fraction(1, 4)], [0, -1, 0, 1]
    )
    crit_l = critical_points(lattes)
    assert sum(m for _, m in crit_l) == 2 * 4 - 2


def test_postcritical_truncation_examples():
    t = postcritical_truncation(Z2, 3)
    vals = {str(p) for p in t.points}
    assert t.closed and len(t.points) == 2
    t = postcritical_truncation(BASILICA, 4)
    assert t.closed and len(t.points) == 3  # {-1, 0, inf}
    t = postcritical_truncation(build_map([1, 0, 1], [1]), 2)
    assert not t.closed
    finite = sorted(
        p.to_complex().real for p in t.points if not p.is_infinity
    )
    assert finite == pytest.approx([1.0, 2.0])


def test_chordal_metric_basics():
    assert chordal(INF, INF) == 0.0
    assert abs(chordal(0, INF) - 1.0) < 1e-15
    assert chordal(1.0, 1.0) == 0.0
    # symmetric, and huge finite points sit close to Infinity
    assert chordal(1e9, INF) < 1e-8
    assert abs(chordal(0.3 + 0.1j, 2.0) - chordal(2.0, 0.3 + 0.1j)) < 1e-16
