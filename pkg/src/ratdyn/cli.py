"""Command-line front end.

Map specifications are either rational-coefficient expressions in z
("(z^2+1)^2/(4*(z^3-z))"), builder forms ("power:2:+", "chebyshev:3:-",
"lattes:-1:0:2"), or "-" to read coefficients as JSON from stdin.  Every
subcommand emits a single JSON report on stdout (CSV with --csv where a
table makes sense); diagnostics go to stderr.

Exit codes: 0 success, 2 parse/config error, 3 numeric failure (partial
results attached when available), 4 degree cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from . import config
from .errors import (
    DegreeCapExceeded,
    MapParseError,
    RatdynError,
)
from .polys import (
    fractions_to_int_primitive,
    igcd_poly,
    pdeg,
    pexactdiv,
    pmul,
    pscale,
    pstrip,
    psub,
    padd,
    poly_to_str,
)
from .report import fraction_str, render, run_report, to_jsonable
from .scalars import Qi, qi_from_string
from .sphere import ProjPoint, RationalMap, build_map

# ----------------------------------------------------------------------
# map-spec parsing
# ----------------------------------------------------------------------


class _Tok:
    def __init__(self, kind, value, pos):
        self.kind = kind
        self.value = value
        self.pos = pos


def _tokenize(text: str, var: str):
    toks = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "+-*/^()":
            toks.append(_Tok(c, c, i))
            i += 1
            continue
        if c == var:
            toks.append(_Tok("var", c, i))
            i += 1
            continue
        if c.isdigit() or c == ".":
            j = i
            while j < len(text) and (text[j].isdigit() or text[j] == "."):
                j += 1
            lit = text[i:j]
            try:
                val = Fraction(lit)
            except ValueError:
                raise MapParseError(f"bad number literal {lit!r}", position=i)
            toks.append(_Tok("num", val, i))
            i = j
            continue
        raise MapParseError(f"unexpected character {c!r}", position=i)
    return toks


class _RatFunc:
    """Rational function over Q as a reduced (num, den) Fraction-poly pair."""

    __slots__ = ("num", "den")

    def __init__(self, num, den):
        self.num = pstrip([Fraction(c) for c in num])
        self.den = pstrip([Fraction(c) for c in den])
        if not self.den:
            raise MapParseError("division by the zero polynomial")
        self._reduce()

    def _reduce(self):
        ni, ns = fractions_to_int_primitive(self.num)
        di, ds = fractions_to_int_primitive(self.den)
        if not ni:
            self.num, self.den = [], [Fraction(1)]
            return
        g = igcd_poly(ni, di)
        if pdeg(g) > 0:
            ni = pexactdiv(ni, g)
            di = pexactdiv(di, g)
        scale = ns / ds
        self.num = pscale([Fraction(c) for c in ni], scale)
        self.den = [Fraction(c) for c in di]

    def __add__(self, o):
        return _RatFunc(
            padd(pmul(self.num, o.den), pmul(o.num, self.den)),
            pmul(self.den, o.den),
        )

    def __sub__(self, o):
        return _RatFunc(
            psub(pmul(self.num, o.den), pmul(o.num, self.den)),
            pmul(self.den, o.den),
        )

    def __mul__(self, o):
        return _RatFunc(pmul(self.num, o.num), pmul(self.den, o.den))

    def __truediv__(self, o):
        if not o.num:
            raise MapParseError("division by zero expression")
        return _RatFunc(pmul(self.num, o.den), pmul(self.den, o.num))

    def __neg__(self):
        return _RatFunc([-c for c in self.num], self.den)

    def pow(self, k: int):
        if k < 0:
            return _RatFunc([Fraction(1)], [Fraction(1)]) / self.pow(-k)
        out = _RatFunc([Fraction(1)], [Fraction(1)])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out


class _ExprParser:
    def __init__(self, text: str, var: str = "z"):
        self.text = text
        self.toks = _tokenize(text, var)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, kind=None):
        t = self.peek()
        if t is None:
            raise MapParseError("unexpected end of expression", position=len(self.text))
        if kind and t.kind != kind:
            raise MapParseError(f"expected {kind}, got {t.value!r}", position=t.pos)
        self.i += 1
        return t

    def parse(self) -> _RatFunc:
        out = self.expr()
        if self.peek() is not None:
            t = self.peek()
            raise MapParseError(f"trailing input {t.value!r}", position=t.pos)
        return out

    def expr(self) -> _RatFunc:
        t = self.peek()
        if t and t.kind in "+-":
            self.take()
            first = self.term()
            if t.kind == "-":
                first = -first
        else:
            first = self.term()
        while self.peek() and self.peek().kind in "+-":
            op = self.take().kind
            rhs = self.term()
            first = first + rhs if op == "+" else first - rhs
        return first

    def term(self) -> _RatFunc:
        out = self.factor()
        while self.peek() and self.peek().kind in "*/":
            op = self.take().kind
            rhs = self.factor()
            out = out * rhs if op == "*" else out / rhs
        return out

    def factor(self) -> _RatFunc:
        base = self.atom()
        while self.peek() and self.peek().kind == "^":
            pos = self.take().pos
            sign = 1
            if self.peek() and self.peek().kind == "-":
                self.take()
                sign = -1
            t = self.take("num")
            if t.value.denominator != 1:
                raise MapParseError("exponent must be an integer", position=t.pos)
            base = base.pow(sign * int(t.value))
        return base

    def atom(self) -> _RatFunc:
        t = self.take()
        if t.kind == "num":
            return _RatFunc([t.value], [Fraction(1)])
        if t.kind == "var":
            return _RatFunc([Fraction(0), Fraction(1)], [Fraction(1)])
        if t.kind == "(":
            inner = self.expr()
            self.take(")")
            return inner
        if t.kind == "-":
            return -self.atom()
        if t.kind == "+":
            return self.atom()
        raise MapParseError(f"unexpected token {t.value!r}", position=t.pos)


def _coeff_from_json(v):
    if isinstance(v, (int, float)):
        return v
    if isinstance(v, str):
        q = qi_from_string(v)
        return q
    if isinstance(v, dict):
        if v.get("inf"):
            raise MapParseError("Infinity is not a coefficient")
        re, im = v.get("re", 0), v.get("im", 0)
        if isinstance(re, str) or isinstance(im, str):
            return Qi(Fraction(str(re)), Fraction(str(im)))
        return complex(re, im)
    raise MapParseError(f"bad coefficient {v!r}")


def parse_map(spec: str, stdin_text: str | None = None) -> RationalMap:
    """Builder form, expression text, or '-' (JSON coefficients on stdin)."""
    spec = spec.strip()
    if spec == "-":
        payload = stdin_text if stdin_text is not None else sys.stdin.read()
        try:
            data = json.loads(payload)
        except json.JSONDecodeError as e:
            raise MapParseError(f"stdin is not valid JSON: {e}") from None
        if "results" in data and isinstance(data["results"], dict):
            data = data["results"]
        if "num" not in data or "den" not in data:
            raise MapParseError("stdin JSON needs 'num' and 'den' arrays")
        num = [_coeff_from_json(v) for v in data["num"]]
        den = [_coeff_from_json(v) for v in data["den"]]
        return build_map(num, den)
    low = spec.lower()
    if low.startswith(("power:", "chebyshev:", "lattes:")):
        return _builder_map(spec)
    rf = _ExprParser(spec, "z").parse()
    if not rf.num:
        raise MapParseError("the zero map is not a rational map of degree >= 2")
    return build_map(rf.num, rf.den)


def _builder_map(spec: str) -> RationalMap:
    from .exceptional import LattesSpec, chebyshev_map, flexible_lattes, power_map

    parts = spec.split(":")
    kind = parts[0].lower()
    try:
        if kind == "power":
            d = int(parts[1])
            sign = 1 if len(parts) < 3 or parts[2] in ("+", "", "+1", "1") else -1
            return power_map(d, sign)
        if kind == "chebyshev":
            d = int(parts[1])
            sign = 1 if len(parts) < 3 or parts[2] in ("+", "", "+1", "1") else -1
            return chebyshev_map(d, sign)
        if kind == "lattes":
            a, b, m = Fraction(parts[1]), Fraction(parts[2]), int(parts[3])
            return flexible_lattes(LattesSpec(a, b, m))
    except (IndexError, ValueError) as e:
        raise MapParseError(f"bad builder spec {spec!r}: {e}") from None
    raise MapParseError(f"unknown builder {kind!r}")


def parse_field(text: str):
    from .spectra import NumberFieldSpec

    t = text.strip()
    if t in ("Q", "q", "QQ"):
        return NumberFieldSpec.rationals()
    if t.lower().startswith("quad:"):
        return NumberFieldSpec.quadratic(int(t.split(":", 1)[1]))
    if t.lower().startswith("poly:"):
        body = t.split(":", 1)[1].strip().strip('"')
        if "," in body:
            coeffs = [int(x) for x in body.split(",")]
        else:
            rf = _ExprParser(body, "x").parse()
            if pdeg(rf.den) != 0:
                raise MapParseError("field polynomial must be a polynomial")
            coeffs_fr = pscale(rf.num, 1 / rf.den[0])
            if any(c.denominator != 1 for c in coeffs_fr):
                raise MapParseError("field polynomial must have integer coefficients")
            coeffs = [int(c) for c in coeffs_fr]
        return NumberFieldSpec(coeffs)
    raise MapParseError(f"bad field spec {text!r} (use Q | quad:D | poly:...)")


def _parse_point(text: str) -> ProjPoint:
    t = text.strip().lower()
    if t in ("inf", "infinity", "oo"):
        return ProjPoint.infinity()
    try:
        rf = _ExprParser(text.strip(), "z").parse()
        if pdeg(rf.num) > 0 or pdeg(rf.den) > 0:
            raise MapParseError("point must be a constant")
        val = rf.num[0] / rf.den[0] if rf.num else Fraction(0)
        return ProjPoint.finite(Qi(val))
    except MapParseError:
        pass
    try:
        return ProjPoint.finite(complex(text.replace("i", "j")))
    except ValueError:
        raise MapParseError(f"bad point {text!r}") from None


# ----------------------------------------------------------------------
# serialization helpers for results
# ----------------------------------------------------------------------


def _cycle_payload(cyc):
    return {
        "period": cyc.period,
        "points": [to_jsonable(p) for p in cyc.points],
        "multiplier": to_jsonable(cyc.multiplier),
        "char_exponent": to_jsonable(cyc.char_exponent),
        "repelling": cyc.repelling,
    }


def _map_payload(f: RationalMap):
    def ser(coeffs):
        out = []
        for c in coeffs:
            if isinstance(c, Qi):
                if c.is_real():
                    out.append(fraction_str(c.re))
                else:
                    out.append({"re": fraction_str(c.re), "im": fraction_str(c.im)})
            else:
                out.append(to_jsonable(complex(c)))
        return out

    return {"num": ser(f.num), "den": ser(f.den), "degree": f.degree,
            "exact": f.exact}


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------


def _cmd_cycles(args, stdin_text=None):
    from .periodic import cycles_of_period
    from .spectra import multiplier_factors

    f = parse_map(args.map, stdin_text)
    cycles, rep = cycles_of_period(
        f, args.period, tol=args.tol, seed=args.seed, cap=args.cap
    )
    cycles.sort(key=lambda c: (-abs(c.multiplier), c.char_exponent))
    out = {
        "map": _map_payload(f),
        "period": args.period,
        "cycles": [_cycle_payload(c) for c in cycles],
        "solve_report": to_jsonable(rep),
    }
    if args.exact:
        pf = multiplier_factors(f, args.period, cap=args.cap, seed=args.seed)
        out["exact_factors"] = [
            {"factor": poly_to_str(list(q), "λ"), "multiplicity": m}
            for q, m in pf.factors
        ]
    rows = [
        {
            "period": c["period"],
            "multiplier_re": c["multiplier"]["re"],
            "multiplier_im": c["multiplier"]["im"],
            "char_exponent": c["char_exponent"],
            "repelling": c["repelling"],
        }
        for c in out["cycles"]
    ]
    return out, rows


def _cmd_spectrum(args, stdin_text=None):
    from .spectra import algebraic_spectrum

    f = parse_map(args.map, stdin_text)
    spec = algebraic_spectrum(f, args.max_period, cap=args.cap, seed=args.seed)
    per = {}
    rows = []
    for n in sorted(spec.periods):
        per[str(n)] = [
            {"factor": poly_to_str(list(q), "λ"), "multiplicity": m,
             "coefficients": [fraction_str(c) for c in q]}
            for q, m in spec.periods[n]
        ]
        for q, m in spec.periods[n]:
            rows.append(
                {"period": n, "factor": poly_to_str(list(q), "λ"), "multiplicity": m}
            )
    return {"map": _map_payload(f), "per_period": per}, rows


def _cmd_field_check(args, stdin_text=None):
    from .spectra import algebraic_spectrum, integrality, membership

    f = parse_map(args.map, stdin_text)
    K = parse_field(args.field)
    spec = algebraic_spectrum(f, args.max_period, cap=args.cap, seed=args.seed)
    mv = membership(spec, K)
    iv = integrality(spec)
    out = {
        "map": _map_payload(f),
        "field": K.describe(),
        "membership": {
            "verdict": mv.describe(),
            "all_in_field": mv.all_in_field,
            "heuristic": mv.heuristic,
            "first_violation": None
            if mv.first_violation is None
            else {
                "period": mv.first_violation[0],
                "factor": poly_to_str(list(mv.first_violation[1]), "λ"),
            },
        },
        "integrality": {
            "verdict": iv.describe(),
            "all_algebraic_integers": iv.all_algebraic_integers,
            "all_rational_integers": iv.all_rational_integers,
        },
    }
    return out, None


def _cmd_classify(args, stdin_text=None):
    from .exceptional import classify

    f = parse_map(args.map, stdin_text)
    res = classify(f, max_period=args.max_period, cap=args.cap, seed=args.seed)
    return {
        "map": _map_payload(f),
        "class": res.kind,
        "sign": res.sign,
        "degree": res.degree,
        "reason": res.reason,
        "evidence": to_jsonable(res.evidence),
    }, None


def _cmd_lyapunov(args, stdin_text=None):
    from .ergodic import backward_orbit_sample, lyapunov, lyapunov_from_periodic

    f = parse_map(args.map, stdin_text)
    cloud = backward_orbit_sample(f, args.samples, burn_in=args.burn, seed=args.seed)
    mc = lyapunov(f, cloud)
    out = {"map": _map_payload(f), "monte_carlo": to_jsonable(mc)}
    if args.periodic:
        pa = lyapunov_from_periodic(f, args.periodic, seed=args.seed, cap=args.cap)
        out["periodic_average"] = to_jsonable(pa)
    return out, None


def _cmd_equidist(args, stdin_text=None):
    from .ergodic import backward_orbit_sample, periodic_cloud, weak_convergence_report

    f = parse_map(args.map, stdin_text)
    periods = [int(x) for x in args.periods.split(",") if x.strip()]
    if not periods:
        raise MapParseError("need at least one period")
    reference = backward_orbit_sample(
        f, args.samples, burn_in=args.burn, seed=args.seed
    )
    clouds = [periodic_cloud(f, n, seed=args.seed, cap=args.cap) for n in periods]
    rep = weak_convergence_report(clouds, reference, args.test_degree, f=f)
    rows = []
    for n, row in zip(periods, rep.rows):
        for name, val in row.items():
            rows.append({"period": n, "test_function": name, "discrepancy": val})
    return {
        "map": _map_payload(f),
        "test_names": rep.test_names,
        "periods": periods,
        "discrepancies": {str(n): row for n, row in zip(periods, rep.rows)},
    }, rows


def _cmd_homoclinic(args, stdin_text=None):
    from .homoclinic import convergence_report, exponent_sequence, find_seed

    f = parse_map(args.map, stdin_text)
    z0 = _parse_point(args.point)
    seed_obj = find_seed(f, z0, q=args.q, tol=args.tol)
    seq = exponent_sequence(f, seed_obj, args.n_min, args.n_max, tol=args.tol)
    rep = convergence_report(seq)
    entries = [
        {
            "n": e.n,
            "point": to_jsonable(e.point),
            "period_verified": e.period_verified,
            "multiplier": to_jsonable(e.multiplier),
            "char_exponent": e.char_exponent,
            "residual": e.residual,
        }
        for e in seq.entries
    ]
    return {
        "map": _map_payload(f),
        "seed": {
            "z0": to_jsonable(seed_obj.z0),
            "q": seed_obj.q,
            "multiplier": to_jsonable(seed_obj.multiplier),
            "l": seed_obj.l,
            "chain": [to_jsonable(c) for c in seed_obj.chain],
            "r_U": seed_obj.r_U,
            "r_V": seed_obj.r_V,
            "r_W": seed_obj.r_W,
        },
        "target_chi": seq.target_chi,
        "entries": entries,
        "convergence": to_jsonable(rep),
    }, entries


def _cmd_zdunik(args, stdin_text=None):
    from .ergodic import _zdunik_report, backward_orbit_sample, lyapunov

    f = parse_map(args.map, stdin_text)
    cloud = backward_orbit_sample(f, args.samples, burn_in=args.burn, seed=args.seed)
    est = lyapunov(f, cloud)
    rep = _zdunik_report(
        f, args.max_period, est, tol=args.tol, seed=args.seed, cap=args.cap
    )
    rows = [
        {
            "period": c.period,
            "char_exponent": c.char_exponent,
            "margin": m,
            "multiplier_abs": abs(c.multiplier),
        }
        for c, m in rep.hits
    ]
    return {
        "map": _map_payload(f),
        "lyapunov": to_jsonable(est),
        "threshold": rep.threshold,
        "hits": [
            dict(_cycle_payload(c), margin=m) for c, m in rep.hits
        ],
        "excluded_postcritical": [
            dict(_cycle_payload(c), margin=m) for c, m in rep.excluded
        ],
    }, rows


def _cmd_make(args, stdin_text=None):
    from .exceptional import LattesSpec, chebyshev_map, flexible_lattes, power_map

    if args.family == "power":
        f = power_map(args.d, -1 if args.sign == "-" else 1)
        desc = {"family": "power", "d": args.d, "sign": args.sign}
    elif args.family == "chebyshev":
        f = chebyshev_map(args.d, -1 if args.sign == "-" else 1)
        desc = {"family": "chebyshev", "d": args.d, "sign": args.sign}
    else:
        spec = LattesSpec(Fraction(args.a), Fraction(args.b), args.m)
        f = flexible_lattes(spec)
        desc = {
            "family": "lattes",
            "a": fraction_str(spec.a),
            "b": fraction_str(spec.b),
            "m": args.m,
        }
    pay = _map_payload(f)
    pay.update(desc)
    return pay, None


# ----------------------------------------------------------------------
# dispatcher
# ----------------------------------------------------------------------


def _add_common(sub, need_map=True):
    if need_map:
        sub.add_argument("--map", "-m", required=True, help="map spec or '-' for stdin")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--tol", type=float, default=config.SOLVER_TOL)
    sub.add_argument("--cap", type=int, default=None, help="degree cap override")
    sub.add_argument("--csv", action="store_true", help="emit CSV instead of JSON")
    sub.add_argument("--indent", type=int, default=None, help="JSON indent")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ratdyn",
        description="Multiplier data, exact spectra and ergodic diagnostics "
        "for rational maps on the Riemann sphere.",
    )
    ap.add_argument("--config", help="JSON file with default option values")
    sp = ap.add_subparsers(dest="cmd", required=True)

    s = sp.add_parser("cycles", help="periodic cycles with multipliers")
    _add_common(s)
    s.add_argument("--period", type=int, required=True)
    s.add_argument("--exact", action="store_true")
    s.set_defaults(fn=_cmd_cycles)

    s = sp.add_parser("spectrum", help="factored multiplier polynomials")
    _add_common(s)
    s.add_argument("--max-period", type=int, required=True)
    s.set_defaults(fn=_cmd_spectrum)

    s = sp.add_parser("field-check", help="membership + integrality verdicts")
    _add_common(s)
    s.add_argument("--max-period", type=int, required=True)
    s.add_argument("--field", required=True, help="Q | quad:D | poly:...")
    s.set_defaults(fn=_cmd_field_check)

    s = sp.add_parser("classify", help="exceptional-map classification")
    _add_common(s)
    s.add_argument("--max-period", type=int, default=3)
    s.set_defaults(fn=_cmd_classify)

    s = sp.add_parser("lyapunov", help="Lyapunov exponent estimates")
    _add_common(s)
    s.add_argument("--samples", type=int, default=100000)
    s.add_argument("--burn", type=int, default=50)
    s.add_argument("--periodic", type=int, default=None,
                   help="also average over the exact-period-N set")
    s.set_defaults(fn=_cmd_lyapunov)

    s = sp.add_parser("equidist", help="weak-convergence discrepancy table")
    _add_common(s)
    s.add_argument("--periods", required=True, help="comma-separated periods")
    s.add_argument("--test-degree", type=int, default=2)
    s.add_argument("--samples", type=int, default=20000)
    s.add_argument("--burn", type=int, default=50)
    s.set_defaults(fn=_cmd_equidist)

    s = sp.add_parser("homoclinic", help="periodic points approaching a "
                      "repelling point's exponent")
    _add_common(s)
    s.add_argument("--point", required=True)
    s.add_argument("--q", type=int, default=1)
    s.add_argument("--n-min", type=int, required=True)
    s.add_argument("--n-max", type=int, required=True)
    s.set_defaults(fn=_cmd_homoclinic)

    s = sp.add_parser("zdunik", help="characteristic exponents above the "
                      "Lyapunov exponent")
    _add_common(s)
    s.add_argument("--max-period", type=int, required=True)
    s.add_argument("--samples", type=int, default=100000)
    s.add_argument("--burn", type=int, default=50)
    s.set_defaults(fn=_cmd_zdunik)

    s = sp.add_parser("make", help="emit coefficients of a named family")
    s.add_argument("family", choices=["power", "chebyshev", "lattes"])
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--sign", choices=["+", "-"], default="+")
    s.add_argument("--a", default="0")
    s.add_argument("--b", default="0")
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--csv", action="store_true")
    s.add_argument("--indent", type=int, default=None)
    s.set_defaults(fn=_cmd_make)
    return ap


def _apply_config_file(args):
    if not getattr(args, "config", None):
        return
    with open(args.config) as fh:
        data = json.load(fh)
    for key, val in data.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and getattr(args, attr) in (None, False):
            setattr(args, attr, val)


def _emit_csv(rows) -> str:
    import csv
    import io

    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        for r in rows:
            writer.writerow({k: r.get(k, "") for k in rows[0].keys()})
    return buf.getvalue()


def run(argv: list[str], stdin_text: str | None = None, out=None, err=None) -> int:
    """Entry point: returns the exit code; JSON on stdout, diagnostics on
    stderr."""
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        _apply_config_file(args)
    except (OSError, json.JSONDecodeError) as e:
        print(json.dumps({"error": {"code": "config", "message": str(e)}}), file=err)
        return 2
    t0 = time.perf_counter()
    try:
        results, rows = args.fn(args, stdin_text)
    except MapParseError as e:
        print(
            json.dumps(
                {"error": {"code": e.code, "message": str(e), "position": e.position}}
            ),
            file=err,
        )
        return 2
    except DegreeCapExceeded as e:
        print(json.dumps({"error": {"code": e.code, "message": str(e)}}), file=err)
        return 4
    except RatdynError as e:
        print(json.dumps({"error": {"code": e.code, "message": str(e)}}), file=err)
        return 3
    seconds = time.perf_counter() - t0
    if getattr(args, "csv", False) and rows:
        out.write(_emit_csv(rows))
        return 0
    seed = getattr(args, "seed", 0)
    cfg = {
        k: v
        for k, v in vars(args).items()
        if k not in ("fn", "cmd", "config") and not callable(v)
    }
    report = run_report(args.cmd, cfg, results, seed, seconds)
    out.write(render(report, indent=getattr(args, "indent", None)) + "\n")
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
