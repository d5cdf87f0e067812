"""Exact complex-rational arithmetic and univariate polynomial helpers.

Everything in this module is exact: unbounded integers underneath, no
rounding anywhere.  All higher modules that claim zero-tolerance results
(operator annihilation, rational-branch residuals, resultants) reduce to
arithmetic here.
"""

from __future__ import annotations

import re as _re
from fractions import Fraction

from .errors import InvalidInputError

_NUMERIC = (int, Fraction)


class ComplexRational:
    """A complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("ComplexRational is immutable")

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, ComplexRational):
            return other
        if isinstance(other, _NUMERIC):
            return ComplexRational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ComplexRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ComplexRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ComplexRational(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ComplexRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero ComplexRational")
        return ComplexRational(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __neg__(self):
        return ComplexRational(-self.re, -self.im)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __repr__(self):
        return f"ComplexRational({self.re!r}, {self.im!r})"

    def __str__(self):
        return format_complex_rational(self)

    # -- queries ------------------------------------------------------------

    def conjugate(self):
        return ComplexRational(self.re, -self.im)

    def abs2(self):
        """|z|^2 as an exact Fraction."""
        return self.re * self.re + self.im * self.im

    @property
    def is_real(self):
        return self.im == 0

    def __complex__(self):
        return complex(self.re, self.im)


ZERO = ComplexRational(0)
ONE = ComplexRational(1)
MINUS_ONE = ComplexRational(-1)


def is_nonpositive_integer(x: ComplexRational) -> bool:
    return x.im == 0 and x.re.denominator == 1 and x.re <= 0


# -- text form "p/q+r/s*i" --------------------------------------------------

_CR_FULL = _re.compile(
    r"^\s*(?P<re>[+-]?\d+(?:/\d+)?)\s*(?P<sign>[+-])\s*(?P<im>\d+(?:/\d+)?)\s*\*\s*i\s*$"
)
_CR_REAL = _re.compile(r"^\s*(?P<re>[+-]?\d+(?:/\d+)?)\s*$")
_CR_IMAG = _re.compile(r"^\s*(?P<im>[+-]?\d+(?:/\d+)?)\s*\*\s*i\s*$")


def parse_complex_rational(text: str) -> ComplexRational:
    """Parse the exchange form ``p/q+r/s*i`` (also accepts ``p/q`` and ``r/s*i``)."""
    m = _CR_FULL.match(text)
    if m:
        im = Fraction(m.group("im"))
        if m.group("sign") == "-":
            im = -im
        return ComplexRational(Fraction(m.group("re")), im)
    m = _CR_REAL.match(text)
    if m:
        return ComplexRational(Fraction(m.group("re")))
    m = _CR_IMAG.match(text)
    if m:
        return ComplexRational(0, Fraction(m.group("im")))
    raise InvalidInputError(f"cannot parse complex rational {text!r}")


def _frac_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def format_complex_rational(x: ComplexRational) -> str:
    """Canonical exchange form with explicit positive denominators."""
    sign = "+" if x.im >= 0 else "-"
    return f"{_frac_str(x.re)}{sign}{_frac_str(abs(x.im))}*i"


# -- exact univariate polynomials -------------------------------------------
#
# A polynomial is a list of ComplexRational, index k = coefficient of z^k,
# trimmed so the last entry is nonzero (the zero polynomial is []).


def poly_trim(p):
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def poly_is_zero(p):
    return all(not c for c in p)


def poly_add(p, q):
    n = max(len(p), len(q))
    out = []
    for k in range(n):
        a = p[k] if k < len(p) else ZERO
        b = q[k] if k < len(q) else ZERO
        out.append(a + b)
    return poly_trim(out)


def poly_sub(p, q):
    return poly_add(p, [-c for c in q])


def poly_scale(p, c):
    if not c:
        return []
    return [ci * c for ci in p]


def poly_mul(p, q):
    if not p or not q:
        return []
    out = [ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if not a:
            continue
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return poly_trim(out)


def poly_pow(p, k):
    out = [ONE]
    for _ in range(k):
        out = poly_mul(out, p)
    return out


def poly_eval(p, z: ComplexRational) -> ComplexRational:
    out = ZERO
    for c in reversed(p):
        out = out * z + c
    return out


def poly_divexact(p, q):
    """Quotient p / q when the division is exact; raises otherwise.

    Needed by the fraction-free determinant: Bareiss pivots always divide
    exactly over an integral domain.
    """
    p = poly_trim(p)
    q = poly_trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    if not p:
        return []
    out = [ZERO] * (len(p) - len(q) + 1)
    rem = list(p)
    lead = q[-1]
    for k in range(len(out) - 1, -1, -1):
        c = rem[k + len(q) - 1] / lead
        out[k] = c
        if c:
            for j, b in enumerate(q):
                rem[k + j] = rem[k + j] - c * b
    if not poly_is_zero(rem):
        raise ArithmeticError("polynomial division was not exact")
    return poly_trim(out)


def poly_from_roots(roots):
    out = [ONE]
    for r in roots:
        out = poly_mul(out, [-r, ONE])
    return out
