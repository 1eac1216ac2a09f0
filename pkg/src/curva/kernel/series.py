"""Truncated univariate power series with exact Scalar coefficients.

A series carries an explicit ``trunc``: exponents >= trunc are unknown, not
zero.  Every operation computes the largest provably-correct trunc of its
result; silently wrong orders are the failure mode this module exists to
prevent.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from ..errors import PrecisionError, ValidationError
from .scalar import ExtNat, Scalar, ZERO, ONE


class Series:
    __slots__ = ("terms", "trunc")

    def __init__(self, terms: dict, trunc: int):
        if trunc < 0:
            raise ValidationError("trunc must be non-negative")
        clean = {}
        for e, c in terms.items():
            if e < 0:
                raise ValidationError("negative exponent in Series")
            if e < trunc and not c.is_zero():
                clean[e] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "trunc", trunc)

    def __setattr__(self, name, value):
        raise AttributeError("Series is immutable")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(trunc: int) -> "Series":
        return Series({}, trunc)

    @staticmethod
    def monomial(e: int, trunc: int, coeff: Scalar = ONE) -> "Series":
        return Series({e: coeff}, trunc)

    @staticmethod
    def t(trunc: int) -> "Series":
        return Series({1: ONE}, trunc)

    @staticmethod
    def from_pairs(pairs, trunc: int) -> "Series":
        terms = {}
        for e, c in pairs:
            terms[e] = terms.get(e, ZERO) + c
        return Series(terms, trunc)

    # -- inspection ---------------------------------------------------------

    def ord_lb(self) -> int:
        """Order lower bound: the true order is >= this value."""
        return min(self.terms) if self.terms else self.trunc

    def ord(self) -> ExtNat:
        """Exact order.  A termless series of finite trunc is ambiguous."""
        if self.terms:
            return min(self.terms)
        raise PrecisionError(
            f"order unknown: series vanishes below trunc {self.trunc}",
            required=self.trunc + 1,
        )

    def is_known_zero(self) -> bool:
        return not self.terms

    def coeff(self, e: int) -> Scalar:
        if e >= self.trunc:
            raise PrecisionError(
                f"coefficient of t^{e} beyond trunc {self.trunc}", required=e + 1
            )
        return self.terms.get(e, ZERO)

    def support(self):
        return sorted(self.terms)

    def leading(self) -> Scalar:
        return self.terms[min(self.terms)]

    def truncate(self, trunc: int) -> "Series":
        if trunc >= self.trunc:
            return self
        return Series({e: c for e, c in self.terms.items() if e < trunc}, trunc)

    def extend_exact(self, trunc: int) -> "Series":
        """Declare exponents >= old trunc to be zero (polynomial semantics)."""
        if trunc <= self.trunc:
            return self
        return Series(dict(self.terms), trunc)

    def sort_key(self):
        return tuple((e, c.sort_key()) for e, c in sorted(self.terms.items()))

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "Series") -> "Series":
        trunc = min(self.trunc, other.trunc)
        terms = {e: c for e, c in self.terms.items() if e < trunc}
        for e, c in other.terms.items():
            if e < trunc:
                terms[e] = terms.get(e, ZERO) + c
        return Series(terms, trunc)

    def __neg__(self) -> "Series":
        return Series({e: -c for e, c in self.terms.items()}, self.trunc)

    def __sub__(self, other: "Series") -> "Series":
        return self + (-other)

    def scale(self, k: Scalar) -> "Series":
        if k.is_zero():
            return Series({}, self.trunc)
        return Series({e: c * k for e, c in self.terms.items()}, self.trunc)

    def __mul__(self, other: "Series") -> "Series":
        trunc = min(self.trunc + other.ord_lb(), other.trunc + self.ord_lb())
        # integer cross-multiplication: clear denominators once per factor,
        # normalize once per result coefficient
        da = 1
        for c in self.terms.values():
            da = da * c.re.denominator // gcd(da, c.re.denominator)
            da = da * c.im.denominator // gcd(da, c.im.denominator)
        db = 1
        for c in other.terms.values():
            db = db * c.re.denominator // gcd(db, c.re.denominator)
            db = db * c.im.denominator // gcd(db, c.im.denominator)
        left = [(e, int(c.re * da), int(c.im * da))
                for e, c in self.terms.items()]
        right = [(e, int(c.re * db), int(c.im * db))
                 for e, c in other.terms.items()]
        acc: dict = {}
        for e1, a1, b1 in left:
            for e2, a2, b2 in right:
                e = e1 + e2
                if e >= trunc:
                    continue
                cur = acc.get(e)
                if cur is None:
                    acc[e] = [a1 * a2 - b1 * b2, a1 * b2 + b1 * a2]
                else:
                    cur[0] += a1 * a2 - b1 * b2
                    cur[1] += a1 * b2 + b1 * a2
        den = da * db
        terms = {}
        for e, (a, b) in acc.items():
            if a or b:
                terms[e] = Scalar(Fraction(a, den), Fraction(b, den))
        return Series(terms, trunc)

    def mul_monomial(self, e: int, coeff: Scalar = ONE) -> "Series":
        return Series({k + e: c * coeff for k, c in self.terms.items()}, self.trunc + e)

    def shift_down(self, e: int) -> "Series":
        """Divide by t^e; requires order >= e."""
        if self.terms and min(self.terms) < e:
            raise ValidationError(f"cannot divide by t^{e}: order {min(self.terms)}")
        return Series({k - e: c for k, c in self.terms.items()}, self.trunc - e)

    def derivative(self) -> "Series":
        terms = {e - 1: c * Scalar(e) for e, c in self.terms.items() if e >= 1}
        return Series(terms, self.trunc - 1)

    def __pow__(self, k: int) -> "Series":
        if k < 0:
            raise ValidationError("negative series power")
        out = Series({0: ONE}, self.trunc + self.ord_lb() * max(k - 1, 0))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- composition and inversion -------------------------------------------

    def compose(self, g: "Series") -> "Series":
        """f(g(t)); requires ord(g) >= 1."""
        if g.terms and min(g.terms) < 1:
            raise ValidationError("series_compose requires ord(g) >= 1")
        og = g.ord_lb()
        if og == 0:
            # termless g with trunc 0: nothing is known
            raise PrecisionError("compose with series known to order 0", required=1)
        inner = min((e for e in self.terms if e >= 1), default=None)
        trunc = self.trunc * og
        if inner is not None:
            trunc = min(trunc, g.trunc + (inner - 1) * og)
        elif self.terms or self.trunc > 0:
            trunc = min(trunc, self.trunc * og)
        # Horner over descending exponents
        exps = sorted(self.terms, reverse=True)
        out = Series({}, trunc)
        prev = None
        for e in exps:
            if prev is not None:
                out = out * g ** (prev - e)
            out = out + Series({0: self.terms[e]}, trunc)
            prev = e
        if prev is not None and prev > 0:
            out = out * g**prev
        return out.truncate(trunc)

    def reparam_inverse(self) -> "Series":
        """Compositional inverse of a reparametrization (ord 1, unit lead)."""
        if self.coeff(1).is_zero():
            raise ValidationError("reparam inverse needs a unit linear coefficient")
        if self.terms and min(self.terms) < 1:
            raise ValidationError("reparam inverse needs order exactly 1")
        T = self.trunc
        c1 = self.coeff(1)
        inv = {1: c1.inverse()}
        for k in range(2, T):
            partial = Series(dict(inv), k + 1)
            val = self.truncate(k + 1).compose(partial)
            err = val.terms.get(k, ZERO)
            if not err.is_zero():
                inv[k] = -err * c1.inverse()
        return Series(inv, T)

    def unit_nth_root(self, n: int) -> "Series":
        """The n-th root with constant term 1 of a series with constant term 1."""
        if self.coeff(0) != ONE:
            raise ValidationError("unit_nth_root requires constant term 1")
        T = self.trunc
        root = {0: ONE}
        for k in range(1, T):
            partial = Series(dict(root), k + 1)
            val = (partial**n).truncate(k + 1)
            err = self.coeff(k) - val.terms.get(k, ZERO)
            if not err.is_zero():
                root[k] = err * Scalar(Fraction(1, n))
        return Series(root, T)

    def div_unit(self, other: "Series") -> "Series":
        """Divide by a series whose order-``o`` coefficient is a unit.

        Requires ord(self) >= ord(other); the quotient is computed to the
        largest provably-correct trunc.
        """
        if other.is_known_zero():
            raise ValidationError("division by (known-)zero series")
        ob = min(other.terms)
        oa = self.ord_lb()
        if self.terms and min(self.terms) < ob:
            raise ValidationError("div_unit: dividend order below divisor order")
        trunc = min(self.trunc - ob, oa + other.trunc - 2 * ob)
        if trunc <= 0:
            raise PrecisionError("div_unit: no provable precision", required=ob + 1)
        lead = other.terms[ob].inverse()
        rem = dict(self.terms)
        out = {}
        for k in range(trunc):
            c = rem.get(k + ob, ZERO)
            if c.is_zero():
                continue
            q = c * lead
            out[k] = q
            for e2, c2 in other.terms.items():
                tgt = k + e2
                if tgt < trunc + ob:
                    rem[tgt] = rem.get(tgt, ZERO) - q * c2
        return Series(out, trunc)

    # -- identity -------------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Series)
            and self.trunc == other.trunc
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.trunc, tuple(sorted((e, c) for e, c in self.terms.items()))))

    def __repr__(self):
        if not self.terms:
            return f"O(t^{self.trunc})"
        bits = []
        for e in sorted(self.terms):
            c = self.terms[e]
            bits.append(f"({c})*t^{e}" if e else f"({c})")
        return " + ".join(bits) + f" + O(t^{self.trunc})"


def support_gcd(*series: Series) -> int:
    g = 0
    for s in series:
        for e in s.terms:
            g = gcd(g, e)
    return g
