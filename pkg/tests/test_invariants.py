"""Cross-module invariants that do not belong to a single unit file."""

import json
import math
import subprocess
import sys

import pytest

from ratdyn import (
    DegenerateMap,
    LattesSpec,
    MoebiusMap,
    Qi,
    build_map,
    chebyshev_map,
    flexible_lattes,
    power_map,
)
from ratdyn.periodic import cycles_of_period
from ratdyn.scalars import qi_from_string


def test_exceptional_flatness_of_repelling_exponents():
    # every repelling cycle of the exceptional fixtures up to period 6 has
    # the closed-form exponent exactly (integer multiplier spectra): log d
    # for power and Chebyshev, (1/2) log d for the flexible Lattès
    cases = [
        (power_map(2, 1), math.log(2), 6, None),
        (chebyshev_map(2, 1), math.log(2), 6, None),
        (chebyshev_map(2, -1), math.log(2), 6, None),
        (flexible_lattes(LattesSpec(-1, 0, 2)), 0.5 * math.log(4), 5, 8192),
    ]
    for f, target, nmax, cap in cases:
        for n in range(1, nmax + 1):
            cycles, _ = cycles_of_period(f, n, tol=1e-9, cap=cap)
            for c in cycles:
                if not c.repelling:
                    continue
                # branch cycles on the postcritical set may carry 2*target
                err = min(
                    abs(c.char_exponent - target),
                    abs(c.char_exponent - 2 * target),
                )
                assert err <= 1e-9


def test_float_map_degenerate_resultant_rejected():
    # (z - 1)(z - 2) over (z - 1)(z - 3) as floats shares a root
    num = [2.0, -3.0, 1.0]
    den = [3.0, -4.0, 1.0]
    with pytest.raises(DegenerateMap):
        build_map(num, den, exact=False)


def test_moebius_degenerate_determinant():
    with pytest.raises(DegenerateMap):
        MoebiusMap(1, 2, 2, 4)
    with pytest.raises(DegenerateMap):
        MoebiusMap(1.0 + 0j, 2.0 + 0j, 0.5 + 0j, 1.0 + 0j)


def test_qi_scalar_arithmetic():
    from fractions import Fraction

    a = qi_from_string("3/4+1/2i")
    assert a == Qi(Fraction(3, 4), Fraction(1, 2))
    assert qi_from_string("-5/3") == Qi(Fraction(-5, 3))
    assert qi_from_string("2i") == Qi(0, 2)
    b = Qi(1, 1)
    assert b ** -2 == Qi(1) / (b * b)
    assert (b * b.conj()).re == 2


def test_console_script_end_to_end():
    # the installed entry point, exercised as a real OS pipeline
    made = subprocess.run(
        [sys.executable, "-m", "ratdyn.cli", "make", "chebyshev", "--d", "3"],
        capture_output=True, text=True, timeout=120,
    )
    assert made.returncode == 0
    rep = json.loads(made.stdout)
    assert rep["results"]["num"] == ["0", "-3", "0", "1"]
    cyc = subprocess.run(
        [sys.executable, "-m", "ratdyn.cli", "cycles", "--map", "-",
         "--period", "1"],
        input=made.stdout, capture_output=True, text=True, timeout=120,
    )
    assert cyc.returncode == 0
    out = json.loads(cyc.stdout)
    assert out["results"]["cycles"]


def test_indent_flag_pretty_prints():
    import io

    from ratdyn.cli import run

    buf = io.StringIO()
    rc = run(["make", "power", "--d", "2", "--indent", "2"], out=buf)
    assert rc == 0
    assert buf.getvalue().startswith("{\n")
