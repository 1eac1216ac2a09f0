"""Exact scalars: Gaussian rationals and the extended naturals.

Every coefficient in the library is a ``Scalar`` (an element of Q(i)):
equality is exact and there is no tolerance anywhere in the system.
Valuations take values in N ∪ {∞}, modelled as ``int`` plus the ``INF``
singleton.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

from ..errors import ValidationError


class _Infinity:
    """The single ∞ of the extended naturals: absorbing for +, maximal for <."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("curva-INF")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __sub__(self, other):
        if other is self:
            raise ValidationError("INF - INF is undefined")
        return self


INF = _Infinity()

ExtNat = Union[int, _Infinity]


def ext_min(*values: ExtNat) -> ExtNat:
    best: ExtNat = INF
    for v in values:
        if v is INF:
            continue
        if best is INF or v < best:
            best = v
    return best


def ext_add(a: ExtNat, b: ExtNat) -> ExtNat:
    if a is INF or b is INF:
        return INF
    return a + b


def ext_le(a: ExtNat, b: ExtNat) -> bool:
    if a is INF:
        return b is INF
    if b is INF:
        return True
    return a <= b


class Scalar:
    """A Gaussian rational re + im*i with Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", re if isinstance(re, Fraction) else Fraction(re))
        object.__setattr__(self, "im", im if isinstance(im, Fraction) else Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_one(self) -> bool:
        return self.re == 1 and not self.im

    def is_real(self) -> bool:
        return not self.im

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "Scalar") -> "Scalar":
        return Scalar(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "Scalar") -> "Scalar":
        return Scalar(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "Scalar":
        return Scalar(-self.re, -self.im)

    def __mul__(self, other: "Scalar") -> "Scalar":
        a, b, c, d = self.re, self.im, other.re, other.im
        return Scalar(a * c - b * d, a * d + b * c)

    def inverse(self) -> "Scalar":
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("inverse of zero Scalar")
        return Scalar(self.re / n, -self.im / n)

    def __truediv__(self, other: "Scalar") -> "Scalar":
        return self * other.inverse()

    def conjugate(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __pow__(self, k: int) -> "Scalar":
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- identity -----------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, Scalar) and self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def sort_key(self):
        """Deterministic total order used only for canonical tie-breaking."""
        return (self.re, self.im)

    def __repr__(self):
        return f"Scalar({self.re!r}, {self.im!r})" if self.im else f"Scalar({self.re!r})"

    def __str__(self):
        return format_scalar(self)


ZERO = Scalar(0)
ONE = Scalar(1)
IUNIT = Scalar(0, 1)


def _format_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def format_scalar(s: Scalar) -> str:
    """Serialize as "p/q" or "p/q+r/s*i" with explicit sign, lowest terms."""
    if not s.im:
        return _format_fraction(s.re)
    sign = "+" if s.im > 0 else "-"
    return f"{_format_fraction(s.re)}{sign}{_format_fraction(abs(s.im))}*i"


def parse_scalar(text) -> Scalar:
    """Parse the wire format emitted by :func:`format_scalar`.

    Integers and "p/q" strings are accepted for convenience.
    """
    if isinstance(text, int):
        return Scalar(text)
    if isinstance(text, Scalar):
        return text
    if not isinstance(text, str):
        raise ValidationError(f"cannot parse scalar from {text!r}")
    raw = text.strip().replace(" ", "")
    if not raw:
        raise ValidationError("empty scalar string")
    if raw.endswith("*i") or raw.endswith("i"):
        body = raw[: -2 if raw.endswith("*i") else -1]
        # split real and imaginary at the sign separating the two fractions
        split = -1
        depth_digits = False
        for idx in range(1, len(body)):
            ch = body[idx]
            if ch in "+-" and body[idx - 1] not in "+-/":
                if depth_digits:
                    split = idx
            elif ch.isdigit() or ch == "/":
                depth_digits = True
        if split < 0:
            # purely imaginary, e.g. "1/2*i"
            return Scalar(0, _parse_fraction(body))
        return Scalar(_parse_fraction(body[:split]), _parse_fraction(body[split:]))
    return Scalar(_parse_fraction(raw))


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"bad rational {text!r}: {exc}") from exc


def format_extnat(v: ExtNat):
    return "inf" if v is INF else v


def parse_extnat(v) -> ExtNat:
    if v == "inf" or v is INF:
        return INF
    if isinstance(v, int) and v >= 0:
        return v
    raise ValidationError(f"bad extended natural {v!r}")
