"""Dense univariate polynomial kit.

Three coefficient domains, all as ascending lists [a0, a1, ...]:

* generic field scalars (Qi or Fraction) for map construction and quotient
  ring arithmetic,
* plain ints for the heavy exact work (subresultant PRS, resultants,
  factorization via sympy),
* complex floats (handled mostly in :mod:`ratdyn.roots` with numpy).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _igcd

from .errors import InexactDivision
from .scalars import Qi

# ----------------------------------------------------------------------
# generic field polynomials (ascending coefficient lists)
# ----------------------------------------------------------------------


def pstrip(p):
    """Drop trailing zero coefficients (zero poly -> [])."""
    n = len(p)
    while n and not p[n - 1]:
        n -= 1
    return list(p[:n])


def pdeg(p) -> int:
    """Degree, -1 for the zero polynomial."""
    return len(pstrip(p)) - 1


def padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = out[i] + c
    return pstrip(out)


def psub(a, b):
    return padd(a, [-c for c in b])


def pscale(a, c):
    return pstrip([c * x for x in a])


def pmul(a, b):
    a, b = pstrip(a), pstrip(b)
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] = out[i + j] + ca * cb
    return pstrip(out)


def peval(p, x):
    acc = 0
    for c in reversed(pstrip(p)):
        acc = acc * x + c
    return acc


def pderiv(p):
    return pstrip([i * c for i, c in enumerate(p)][1:])


def pdivmod(a, b):
    """Division over a field (coefficients must support true division)."""
    a, b = pstrip(a), pstrip(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return [], a
    q = [0] * (len(a) - len(b) + 1)
    r = list(a)
    lb = b[-1]
    for k in range(len(a) - len(b), -1, -1):
        top = r[k + len(b) - 1]
        if top:
            c = top / lb
            q[k] = c
            for i, cb in enumerate(b):
                r[k + i] = r[k + i] - c * cb
    return pstrip(q), pstrip(r[: len(b) - 1])


def pexactdiv(a, b):
    q, r = pdivmod(a, b)
    if r:
        raise InexactDivision("polynomial division left a remainder")
    return q


def pgcd(a, b):
    """Monic gcd over a field (Euclid). Fine at construction-time degrees."""
    a, b = pstrip(a), pstrip(b)
    while b:
        _, r = pdivmod(a, b)
        a, b = b, r
    if not a:
        return []
    lead = a[-1]
    return [c / lead for c in a]


def pcompose(outer, inner):
    """outer(inner(z)) by Horner."""
    acc = []
    for c in reversed(pstrip(outer)):
        acc = padd(pmul(acc, inner), [c])
    return acc


def preverse(p, length: int):
    """Coefficients of z^(length-1) * p(1/z); pads p to `length` first."""
    q = list(p) + [0] * (length - len(p))
    return pstrip(list(reversed(q)))


def pmonic(p):
    p = pstrip(p)
    if not p:
        return []
    lead = p[-1]
    return [c / lead for c in p]


# ----------------------------------------------------------------------
# integer polynomials
# ----------------------------------------------------------------------


def icontent(p) -> int:
    g = 0
    for c in p:
        g = _igcd(g, abs(int(c)))
        if g == 1:
            break
    return g


def iprimitive(p):
    """Primitive part with positive leading coefficient; returns (prim, content)."""
    p = pstrip(p)
    if not p:
        return [], 0
    g = icontent(p)
    if p[-1] < 0:
        g = -g
    return [c // g for c in p], g


def idivexact(a, b):
    """Exact division in Z[z]; raises InexactDivision otherwise."""
    a, b = pstrip(list(a)), pstrip(list(b))
    if not b:
        raise ZeroDivisionError
    if not a:
        return []
    da, db = len(a) - 1, len(b) - 1
    if da < db:
        raise InexactDivision("degree too small for exact division")
    lb = b[-1]
    q = [0] * (da - db + 1)
    r = list(a)
    for k in range(da - db, -1, -1):
        top = r[k + db]
        if top % lb:
            raise InexactDivision("leading coefficient does not divide")
        c = top // lb
        q[k] = c
        if c:
            for i, cb in enumerate(b):
                r[k + i] -= c * cb
    if any(r):
        raise InexactDivision("nonzero remainder")
    return pstrip(q)


def ipseudo_rem(a, b):
    """prem(a, b) = (lc(b)^(deg a - deg b + 1) * a) mod b over Z."""
    a, b = pstrip(list(a)), pstrip(list(b))
    da, db = len(a) - 1, len(b) - 1
    if da < db:
        raise ValueError("pseudo-remainder needs deg a >= deg b")
    lb = b[-1]
    r = list(a)
    for k in range(da - db, -1, -1):
        top = r[k + db]
        r = [lb * c for c in r]
        if top:
            for i in range(db):
                r[k + i] -= top * b[i]
        r[k + db] = 0
    return pstrip(r[:db])


def igcd_poly(a, b):
    """gcd in Z[z] via the subresultant PRS; primitive, positive lead."""
    a, _ = iprimitive(a)
    b, _ = iprimitive(b)
    if pdeg(a) < pdeg(b):
        a, b = b, a
    if not b:
        return a
    g, h = 1, 1
    while True:
        delta = pdeg(a) - pdeg(b)
        r = ipseudo_rem(a, b)
        if not r:
            prim, _ = iprimitive(b)
            return prim
        if pdeg(r) == 0:
            return [1]
        denom = g * h**delta
        a, b = b, [c // denom for c in r]
        g = a[-1]
        if delta == 1:
            h = g
        elif delta > 1:
            h = g**delta // h ** (delta - 1)


def iresultant(a, b) -> int:
    """Res(a, b) over Z via the subresultant PRS (Cohen Alg. 3.3.7)."""
    a, b = pstrip(list(a)), pstrip(list(b))
    if not a or not b:
        return 0
    da, db = pdeg(a), pdeg(b)
    if da == 0:
        return a[0] ** db if db else 1
    if db == 0:
        return b[0] ** da
    ac, ca = iprimitive(a)
    bc, cb = iprimitive(b)
    a, b = ac, bc
    s = 1
    t = ca**db * cb**da
    if da < db:
        a, b = b, a
        if (da * db) % 2:
            s = -s
    g, h = 1, 1
    while True:
        da, db = pdeg(a), pdeg(b)
        delta = da - db
        if (da % 2) and (db % 2):
            s = -s
        r = ipseudo_rem(a, b)
        if not r:
            return 0
        denom = g * h**delta
        a, b = b, [c // denom for c in r]
        g = a[-1]
        if delta == 1:
            h = g
        elif delta > 1:
            h = g**delta // h ** (delta - 1)
        if pdeg(b) == 0:
            da = pdeg(a)
            if da == 0:
                # both constant after reduction; resultant of constants is 1
                return s * t
            val = b[0] ** da
            if da > 1:
                val //= h ** (da - 1)
            return s * t * val


def isquarefree(p) -> bool:
    """Squarefree test in Z[z], certified by a modular gcd at a good prime."""
    p = pstrip(p)
    if pdeg(p) <= 1:
        return True
    dp = pderiv(p)
    prime = 2147483629
    for _ in range(8):
        if p[-1] % prime:
            g = _gf_gcd([c % prime for c in p], [c % prime for c in dp], prime)
            if len(g) == 1:
                return True
            # gcd mod p can only overestimate; a nontrivial modular gcd is
            # inconclusive, try the exact route below
            break
        prime = _prev_prime(prime)
    return pdeg(igcd_poly(p, dp)) == 0


def _prev_prime(p: int) -> int:
    from sympy import prevprime

    return int(prevprime(p))


def _gf_gcd(a, b, p):
    """Monic gcd mod p (ascending int lists)."""
    a = pstrip([c % p for c in a])
    b = pstrip([c % p for c in b])
    while b:
        inv = pow(b[-1], p - 2, p)
        bm = [(c * inv) % p for c in b]
        r = list(a)
        for k in range(len(r) - len(bm), -1, -1):
            c = r[k + len(bm) - 1] % p
            if c:
                for i in range(len(bm)):
                    r[k + i] = (r[k + i] - c * bm[i]) % p
        a, b = bm, pstrip(r[: len(bm) - 1])
    if not a:
        return []
    inv = pow(a[-1], p - 2, p)
    return [(c * inv) % p for c in a]


def factor_int_poly(p):
    """Irreducible factorization in Z[z] via sympy.

    Returns (content, [(factor_ascending_ints, multiplicity), ...]) with
    primitive positive-lead factors.
    """
    from sympy import Poly, Symbol, ZZ

    p = pstrip(list(p))
    if not p:
        return 0, []
    z = Symbol("z")
    sp = Poly(list(reversed([int(c) for c in p])), z, domain=ZZ)
    content, pairs = sp.factor_list()
    out = []
    for fac, mult in pairs:
        coeffs = [int(c) for c in reversed(fac.all_coeffs())]
        out.append((coeffs, int(mult)))
    return int(content), out


def int_poly_irreducible(p) -> bool:
    p = pstrip(p)
    if pdeg(p) < 1:
        return False
    _, pairs = factor_int_poly(p)
    return len(pairs) == 1 and pairs[0][1] == 1 and pdeg(pairs[0][0]) == pdeg(p)


# ----------------------------------------------------------------------
# Fraction <-> integer bridges
# ----------------------------------------------------------------------


def fractions_to_int_primitive(p):
    """Clear denominators of a Fraction poly: returns (int_poly, scale) with
    poly == scale * int_poly and int_poly primitive (positive lead)."""
    p = pstrip([Fraction(c) for c in p])
    if not p:
        return [], Fraction(0)
    den = 1
    for c in p:
        den = den * c.denominator // _igcd(den, c.denominator)
    ints = [int(c * den) for c in p]
    prim, content = iprimitive(ints)
    return prim, Fraction(content, den)


def qi_poly_is_rational(p) -> bool:
    return all(Qi.coerce(c).is_real() for c in p)


def qi_poly_to_fractions(p):
    out = []
    for c in p:
        q = Qi.coerce(c)
        if not q.is_real():
            raise ValueError("polynomial has nonreal Gaussian coefficients")
        out.append(q.re)
    return pstrip(out)


# ----------------------------------------------------------------------
# formatting
# ----------------------------------------------------------------------


def poly_to_str(p, var: str = "z") -> str:
    """Human formatting like 'λ^2-2λ-4' (ascending input)."""
    p = pstrip(list(p))
    if not p:
        return "0"
    terms = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if not c:
            continue
        frac = c if isinstance(c, Fraction) else Fraction(c)
        neg = frac < 0
        mag = -frac if neg else frac
        if k == 0:
            body = str(mag)
        else:
            vp = var if k == 1 else f"{var}^{k}"
            body = vp if mag == 1 else f"{mag}{vp}"
        if not terms:
            terms.append(("-" if neg else "") + body)
        else:
            terms.append(("-" if neg else "+") + body)
    return "".join(terms)
