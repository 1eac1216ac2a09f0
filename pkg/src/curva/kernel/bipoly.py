"""Exact bivariate polynomials over Q(i), with resultants.

BiPoly is the representation type for implicit equations h(X, Y) and for the
coefficient functions of differential forms.  The Sylvester resultant here is
the implicitization device for parametrized branches.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from ..errors import ValidationError
from .scalar import ONE, Scalar, ZERO
from .series import Series


class BiPoly:
    __slots__ = ("terms",)

    def __init__(self, terms: dict):
        clean = {}
        for (a, b), c in terms.items():
            if a < 0 or b < 0:
                raise ValidationError("negative exponent in BiPoly")
            if not c.is_zero():
                clean[(a, b)] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("BiPoly is immutable")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero() -> "BiPoly":
        return BiPoly({})

    @staticmethod
    def const(c: Scalar) -> "BiPoly":
        return BiPoly({(0, 0): c})

    @staticmethod
    def monomial(a: int, b: int, c: Scalar = ONE) -> "BiPoly":
        return BiPoly({(a, b): c})

    @staticmethod
    def X() -> "BiPoly":
        return BiPoly({(1, 0): ONE})

    @staticmethod
    def Y() -> "BiPoly":
        return BiPoly({(0, 1): ONE})

    # -- inspection ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((a + b for a, b in self.terms), default=-1)

    def order(self) -> int:
        """Order at the origin: the smallest total degree of a term."""
        return min((a + b for a, b in self.terms), default=-1)

    def leading_key(self):
        """Graded-lex leading monomial key."""
        return max(self.terms, key=lambda k: (k[0] + k[1], k[0]))

    def coeff(self, a: int, b: int) -> Scalar:
        return self.terms.get((a, b), ZERO)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "BiPoly") -> "BiPoly":
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, ZERO) + c
        return BiPoly(terms)

    def __neg__(self) -> "BiPoly":
        return BiPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        return self + (-other)

    def scale(self, c: Scalar) -> "BiPoly":
        if c.is_zero():
            return BiPoly({})
        return BiPoly({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other: "BiPoly") -> "BiPoly":
        terms = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                k = (a1 + a2, b1 + b2)
                prev = terms.get(k)
                terms[k] = c1 * c2 if prev is None else prev + c1 * c2
        return BiPoly(terms)

    def __pow__(self, k: int) -> "BiPoly":
        out = BiPoly({(0, 0): ONE})
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def derivative(self, var: str) -> "BiPoly":
        terms = {}
        for (a, b), c in self.terms.items():
            if var == "x" and a >= 1:
                terms[(a - 1, b)] = c * Scalar(a)
            elif var == "y" and b >= 1:
                terms[(a, b - 1)] = c * Scalar(b)
        return BiPoly(terms)

    def divexact(self, other: "BiPoly"):
        """Exact quotient self/other, or None if not divisible."""
        if other.is_zero():
            raise ZeroDivisionError("BiPoly division by zero")
        rem = dict(self.terms)
        lk = other.leading_key()
        lc = other.terms[lk].inverse()
        out = {}
        while rem:
            key = max(rem, key=lambda k: (k[0] + k[1], k[0]))
            a, b = key[0] - lk[0], key[1] - lk[1]
            if a < 0 or b < 0:
                return None
            q = rem[key] * lc
            out[(a, b)] = q
            for (a2, b2), c2 in other.terms.items():
                k2 = (a + a2, b + b2)
                val = rem.get(k2, ZERO) - q * c2
                if val.is_zero():
                    rem.pop(k2, None)
                else:
                    rem[k2] = val
        return BiPoly(out)

    # -- evaluation -----------------------------------------------------------

    def pullback(self, x: Series, y: Series) -> Series:
        """h(x(t), y(t)) on truncated series."""
        trunc = min(x.trunc, y.trunc)
        by_a: dict[int, list] = {}
        for (a, b), c in self.terms.items():
            by_a.setdefault(a, []).append((b, c))
        big = trunc + (self.total_degree() + 1) * (max(x.ord_lb(), y.ord_lb()) + 1)
        xpow = {0: Series({0: ONE}, big)}
        ypow = {0: Series({0: ONE}, big)}
        acc = None
        for a in sorted(by_a):
            row = Series({}, big)
            for b, c in sorted(by_a[a]):
                if b not in ypow:
                    ypow[b] = _cached_pow(ypow, y, b)
                row = row + ypow[b].scale(c)
            if a not in xpow:
                xpow[a] = _cached_pow(xpow, x, a)
            inner = row * xpow[a]
            acc = inner if acc is None else acc + inner
        if acc is None:
            return Series({}, x.trunc + y.trunc)
        return acc

    def subst(self, u: "BiPoly", v: "BiPoly") -> "BiPoly":
        """Polynomial substitution h(u(X,Y), v(X,Y))."""
        upow = {0: BiPoly({(0, 0): ONE})}
        vpow = {0: BiPoly({(0, 0): ONE})}
        out = BiPoly({})
        for (a, b), c in self.terms.items():
            if a not in upow:
                upow[a] = _cached_bipow(upow, u, a)
            if b not in vpow:
                vpow[b] = _cached_bipow(vpow, v, b)
            out = out + (upow[a] * vpow[b]).scale(c)
        return out

    # -- normalization ----------------------------------------------------------

    def primitive(self) -> "BiPoly":
        """Divide by content and unit-normalize the graded-lex lead."""
        if not self.terms:
            return self
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, abs(c.re.numerator))
            num = gcd(num, abs(c.im.numerator))
            den = den * c.re.denominator // gcd(den, c.re.denominator)
            den = den * c.im.denominator // gcd(den, c.im.denominator)
        scale = Scalar(Fraction(den, num if num else 1))
        out = {k: c * scale for k, c in self.terms.items()}
        lead = out[max(out, key=lambda k: (k[0] + k[1], k[0]))]
        unit = _canonical_unit(lead)
        return BiPoly({k: c * unit for k, c in out.items()})

    # -- identity -----------------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, BiPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items(), key=lambda kv: kv[0])))

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for (a, b) in sorted(self.terms, key=lambda k: (k[0] + k[1], k[0])):
            c = self.terms[(a, b)]
            mono = "".join(s for s in (f"X^{a}" if a else "", f"Y^{b}" if b else "") if s)
            bits.append(f"({c}){'*' + mono if mono else ''}")
        return " + ".join(bits)


def _canonical_unit(lead: Scalar) -> Scalar:
    """Unit u in {1,-1,i,-i} making u*lead have positive real part (or re=0, im>0)."""
    for u in (Scalar(1), Scalar(-1), Scalar(0, -1), Scalar(0, 1)):
        v = lead * u
        if v.re > 0 or (v.re == 0 and v.im > 0):
            return u
    return Scalar(1)


def _cached_pow(cache: dict, base: Series, k: int) -> Series:
    best = max(e for e in cache if e <= k)
    out = cache[best]
    while best < k:
        out = out * base
        best += 1
        cache[best] = out
    return out


def _cached_bipow(cache: dict, base: BiPoly, k: int) -> BiPoly:
    best = max(e for e in cache if e <= k)
    out = cache[best]
    while best < k:
        out = out * base
        best += 1
        cache[best] = out
    return out


# -- resultants ------------------------------------------------------------------


def resultant_in_t(p: list, q: list) -> BiPoly:
    """Sylvester resultant eliminating t from two t-polynomials with BiPoly
    coefficients (p[k] is the coefficient of t^k)."""
    while p and p[-1].is_zero():
        p = p[:-1]
    while q and q[-1].is_zero():
        q = q[:-1]
    m, n = len(p) - 1, len(q) - 1
    if m <= 0 and n <= 0:
        raise ValidationError("resultant: both inputs constant in the eliminated variable")
    if m < 0 or n < 0:
        raise ValidationError("resultant of the zero polynomial")
    if m == 0:
        return p[0] ** n
    if n == 0:
        return q[0] ** m
    size = m + n
    rows = []
    for i in range(n):
        row = [BiPoly({})] * size
        for k in range(m + 1):
            row[i + k] = p[m - k]
        rows.append(row)
    for i in range(m):
        row = [BiPoly({})] * size
        for k in range(n + 1):
            row[i + k] = q[n - k]
        rows.append(row)
    return _bareiss_det(rows)


def _bareiss_det(rows: list) -> BiPoly:
    """Fraction-free determinant of a square BiPoly matrix."""
    n = len(rows)
    m = [row[:] for row in rows]
    sign = 1
    prev = BiPoly({(0, 0): ONE})
    for k in range(n - 1):
        if m[k][k].is_zero():
            pivot = next((i for i in range(k + 1, n) if not m[i][k].is_zero()), None)
            if pivot is None:
                return BiPoly({})
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[k][k] * m[i][j] - m[i][k] * m[k][j]
                quo = num.divexact(prev)
                if quo is None:
                    raise ValidationError("Bareiss exact division failed")
                m[i][j] = quo
            m[i][k] = BiPoly({})
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign == 1 else -det


def charpoly_mult_matrix(y: Series, n: int, lead: Scalar, degree_cap: int) -> BiPoly:
    """det(Y*I - M) for M = multiplication by y(t) on Q(i)[t]/(t^n - X/lead).

    Fast implicitization path for a branch whose x-part is exactly lead*t^n.
    ``degree_cap`` bounds the t-degree of y that participates.
    """
    lead_inv = lead.inverse()
    cols = []
    for r in range(n):
        # y(t) * t^r reduced mod t^n = X/lead
        acc: dict[int, BiPoly] = {}
        for e, c in y.terms.items():
            if e > degree_cap:
                continue
            tot = e + r
            q, rem = divmod(tot, n)
            term = BiPoly.monomial(q, 0, c * (lead_inv**q))
            acc[rem] = acc.get(rem, BiPoly({})) + term
        cols.append(acc)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            entry = -cols[j].get(i, BiPoly({}))
            if i == j:
                entry = entry + BiPoly.Y()
            row.append(entry)
        rows.append(row)
    return _bareiss_det(rows)
