"""Exact arithmetic for integer Laurent polynomials in one variable A.

LaurentPoly is the workhorse value type of the whole package: every graph
and diagram invariant lands in Z[A, A^-1].  RationalFn adds the field of
fractions, which the edge replacement machinery needs for intermediate
values (the final results always reduce back to Laurent polynomials).
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator

from .errors import YamadaError


class DivisionByZero(YamadaError):
    pass


class NonExactDivision(YamadaError):
    pass


class PoleAtZero(YamadaError):
    pass


class ParseError(YamadaError):
    pass


class LaurentPoly:
    """Sparse Laurent polynomial with integer coefficients.

    Stored as {exponent: coefficient} with no zero coefficients.  Instances
    are immutable by convention: every operation returns a new polynomial.

    >>> s = sigma()
    >>> print(s ** 2)
    A^2 + 2*A + 3 + 2*A^-1 + A^-2
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, int] | Iterable[tuple[int, int]] = ()):
        data: dict[int, int] = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for e, c in items:
            c = data.get(e, 0) + c
            if c:
                data[e] = c
            elif e in data:
                del data[e]
        self.terms = data

    @classmethod
    def zero(cls) -> LaurentPoly:
        return cls()

    @classmethod
    def one(cls) -> LaurentPoly:
        return cls({0: 1})

    @classmethod
    def const(cls, c: int) -> LaurentPoly:
        return cls({0: c} if c else {})

    @classmethod
    def monomial(cls, coeff: int, exp: int) -> LaurentPoly:
        return cls({exp: coeff} if coeff else {})

    def is_zero(self) -> bool:
        return not self.terms

    def min_exp(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no exponent range")
        return min(self.terms)

    def max_exp(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no exponent range")
        return max(self.terms)

    def span(self) -> int:
        """max_exp - min_exp; 0 for monomials and for the zero polynomial."""
        return 0 if not self.terms else max(self.terms) - min(self.terms)

    def coeff(self, exp: int) -> int:
        return self.terms.get(exp, 0)

    def items(self) -> Iterator[tuple[int, int]]:
        return iter(sorted(self.terms.items(), reverse=True))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other) -> LaurentPoly:
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            c = out.get(e, 0) + c
            if c:
                out[e] = c
            elif e in out:
                del out[e]
        r = LaurentPoly.__new__(LaurentPoly)
        r.terms = out
        return r

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        r = LaurentPoly.__new__(LaurentPoly)
        r.terms = {e: -c for e, c in self.terms.items()}
        return r

    def __sub__(self, other) -> LaurentPoly:
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> LaurentPoly:
        return (-self) + other

    def __mul__(self, other) -> LaurentPoly:
        if isinstance(other, int):
            if other == 0:
                return LaurentPoly.zero()
            r = LaurentPoly.__new__(LaurentPoly)
            r.terms = {e: c * other for e, c in self.terms.items()}
            return r
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: dict[int, int] = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = e1 + e2
                c = out.get(e, 0) + c1 * c2
                if c:
                    out[e] = c
                elif e in out:
                    del out[e]
        r = LaurentPoly.__new__(LaurentPoly)
        r.terms = out
        return r

    __rmul__ = __mul__

    def __pow__(self, n: int) -> LaurentPoly:
        if not isinstance(n, int):
            raise ValueError("LaurentPoly powers must be integers")
        if n < 0:
            # only monomials with unit coefficient are invertible here
            if len(self.terms) == 1:
                (exp, coeff), = self.terms.items()
                if coeff in (1, -1):
                    return LaurentPoly.monomial(coeff if n % 2 else 1, exp * n)
            raise ValueError("negative power of a non-invertible Laurent polynomial")
        result = LaurentPoly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def shift(self, k: int) -> LaurentPoly:
        """Multiply by A^k."""
        r = LaurentPoly.__new__(LaurentPoly)
        r.terms = {e + k: c for e, c in self.terms.items()}
        return r

    def mirror(self) -> LaurentPoly:
        """Substitute A -> A^-1."""
        r = LaurentPoly.__new__(LaurentPoly)
        r.terms = {-e: c for e, c in self.terms.items()}
        return r

    def eval_complex(self, z: complex) -> complex:
        """Evaluate at a nonzero complex number (zero is fine if no negative
        exponents occur).  Horner on the shifted ordinary polynomial."""
        if not self.terms:
            return 0j
        lo = self.min_exp()
        if z == 0:
            if lo < 0:
                raise PoleAtZero("negative exponents cannot be evaluated at 0")
            return complex(self.terms.get(0, 0))
        hi = self.max_exp()
        acc = 0j
        for e in range(hi, lo - 1, -1):
            acc = acc * z + self.terms.get(e, 0)
        return acc * z ** lo

    def dense_coeffs(self) -> tuple[int, list[int]]:
        """Return (min_exp, coefficient list ascending) for the nonzero poly."""
        lo, hi = self.min_exp(), self.max_exp()
        return lo, [self.terms.get(e, 0) for e in range(lo, hi + 1)]

    def content(self) -> int:
        """gcd of the coefficients (0 for the zero polynomial)."""
        g = 0
        for c in self.terms.values():
            g = gcd(g, abs(c))
        return g

    def to_text(self, var: str = "A") -> str:
        if not self.terms:
            return "0"
        parts: list[str] = []
        for e, c in self.items():
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                head = var if e == 1 else f"{var}^{e}"
                body = head if mag == 1 else f"{mag}*{head}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"LaurentPoly({self.to_text()!r})"


_A = LaurentPoly({1: 1})


def variable() -> LaurentPoly:
    """The generator A."""
    return _A


def sigma() -> LaurentPoly:
    """The loop constant A + 1 + A^-1."""
    return LaurentPoly({1: 1, 0: 1, -1: 1})


_TERM_RE = re.compile(
    r"^(?P<coeff>\d+)?(?:(?(coeff)\*)(?P<var>[A-Za-z]\w*)(?:\^(?P<exp>[+-]?\d+))?)?$"
)


def parse_poly(text: str, var: str = "A") -> LaurentPoly:
    """Parse the rendering produced by to_text, e.g. 'A^2 + 2*A - 3 + A^-2'.

    >>> parse_poly("A^2 + 2*A + 3 + 2*A^-1 + A^-2") == sigma() ** 2
    True
    """
    s = text.strip()
    if not s:
        raise ParseError("empty polynomial text")
    # An exponent minus (as in A^-1) is part of the term, not a separator.
    s = s.replace("^-", "^~").replace("^+", "^")
    s = s.replace("-", "+-").replace(" ", "").replace("~", "-")
    chunks = [c for c in s.split("+") if c]
    terms: list[tuple[int, int]] = []
    for chunk in chunks:
        sign = 1
        while chunk.startswith("-"):
            sign = -sign
            chunk = chunk[1:]
        m = _TERM_RE.match(chunk)
        if not m or (m.group("coeff") is None and m.group("var") is None):
            raise ParseError(f"cannot parse term {chunk!r}")
        coeff = int(m.group("coeff") or 1)
        if m.group("var") is None:
            exp = 0
        else:
            if m.group("var") != var:
                raise ParseError(f"unexpected variable {m.group('var')!r}")
            exp = int(m.group("exp") or 1)
        terms.append((exp, sign * coeff))
    return LaurentPoly(terms)


def _divmod_fraction(num: list[Fraction], den: list[Fraction]):
    """Long division of dense ascending coefficient lists over Q."""
    num = list(num)
    dn = len(den) - 1
    while den and den[-1] == 0:
        den.pop()
        dn -= 1
    q: list[Fraction] = [Fraction(0)] * max(len(num) - dn, 0)
    lead = den[-1]
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c == 0:
            continue
        f = c / lead
        q[i - dn] = f
        for j, d in enumerate(den):
            num[i - dn + j] -= f * d
    return q, num


def exact_div(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """Divide p by q, requiring the quotient to be a Laurent polynomial
    over the integers.

    >>> s = sigma()
    >>> print(exact_div(s + (-s) ** 3, s + 1))
    -A^2 - A - 2 - A^-1 - A^-2
    """
    if q.is_zero():
        raise DivisionByZero("division by the zero polynomial")
    if p.is_zero():
        return LaurentPoly.zero()
    plo, pc = p.dense_coeffs()
    qlo, qc = q.dense_coeffs()
    quot, rem = _divmod_fraction(
        [Fraction(c) for c in pc], [Fraction(c) for c in qc]
    )
    if any(rem):
        raise NonExactDivision(f"({p}) is not divisible by ({q})")
    if any(f.denominator != 1 for f in quot):
        raise NonExactDivision(
            f"({p}) / ({q}) has non-integer coefficients"
        )
    base = plo - qlo
    return LaurentPoly({base + i: int(f) for i, f in enumerate(quot) if f})


def compare_up_to_unit(p: LaurentPoly, q: LaurentPoly) -> int | None:
    """Return n with p == (-A)^n * q, or None when no such unit exists.

    Both zero compares as n = 0; exactly one zero gives None.
    """
    if p.is_zero() and q.is_zero():
        return 0
    if p.is_zero() or q.is_zero():
        return None
    n = p.min_exp() - q.min_exp()
    if p.max_exp() - q.max_exp() != n:
        return None
    sign = -1 if n % 2 else 1
    for e, c in q.terms.items():
        if p.terms.get(e + n) != sign * c:
            return None
    return n


def _primitive(coeffs: list[int]) -> list[int]:
    g = 0
    for c in coeffs:
        g = gcd(g, abs(c))
    if g in (0, 1):
        return list(coeffs)
    return [c // g for c in coeffs]


def _poly_gcd(a: list[int], b: list[int]) -> list[int]:
    """Primitive gcd over Q of two dense integer coefficient lists."""
    fa = [Fraction(c) for c in a]
    fb = [Fraction(c) for c in b]

    def trim(v):
        while v and v[-1] == 0:
            v.pop()
        return v

    fa, fb = trim(fa), trim(fb)
    while fb:
        _, r = _divmod_fraction(fa, list(fb))
        fa, fb = fb, trim(r)
    if not fa:
        return []
    den_lcm = 1
    for f in fa:
        den_lcm = den_lcm * f.denominator // gcd(den_lcm, f.denominator)
    ints = [int(f * den_lcm) for f in fa]
    ints = _primitive(ints)
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return ints


class RationalFn:
    """Quotient of two LaurentPoly in canonical reduced form.

    Invariants after construction: the denominator is an ordinary polynomial
    with nonzero constant term (powers of A live in the numerator), the
    polynomial gcd of numerator and denominator is 1, their integer contents
    are coprime, and the denominator's leading coefficient is positive.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: LaurentPoly = LaurentPoly({0: 1})):
        if den.is_zero():
            raise DivisionByZero("rational function with zero denominator")
        if num.is_zero():
            self.num = LaurentPoly.zero()
            self.den = LaurentPoly.one()
            return
        nlo, nc = num.dense_coeffs()
        dlo, dc = den.dense_coeffs()
        shift = nlo - dlo
        g = _poly_gcd(nc, dc)
        if len(g) > 1:
            # g is primitive and divides both over Q, so by Gauss's lemma the
            # integer quotients are exact.
            qn, _ = _divmod_fraction([Fraction(c) for c in nc], [Fraction(c) for c in g])
            qd, _ = _divmod_fraction([Fraction(c) for c in dc], [Fraction(c) for c in g])
            nc = [int(f) for f in qn]
            dc = [int(f) for f in qd]
        cg = gcd(_content(nc), _content(dc))
        if cg > 1:
            nc = [c // cg for c in nc]
            dc = [c // cg for c in dc]
        if dc[-1] < 0:
            nc = [-c for c in nc]
            dc = [-c for c in dc]
        self.num = LaurentPoly({shift + i: c for i, c in enumerate(nc) if c})
        self.den = LaurentPoly({i: c for i, c in enumerate(dc) if c})

    @classmethod
    def from_laurent(cls, p: LaurentPoly) -> RationalFn:
        r = cls.__new__(cls)
        r.num = p
        r.den = LaurentPoly.one()
        return r

    @classmethod
    def from_int(cls, c: int) -> RationalFn:
        return cls.from_laurent(LaurentPoly.const(c))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, LaurentPoly)):
            other = RationalFn.from_laurent(
                LaurentPoly.const(other) if isinstance(other, int) else other
            )
        if not isinstance(other, RationalFn):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other) -> RationalFn:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> RationalFn:
        r = RationalFn.__new__(RationalFn)
        r.num = -self.num
        r.den = self.den
        return r

    def __sub__(self, other) -> RationalFn:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> RationalFn:
        return (-self) + other

    def __mul__(self, other) -> RationalFn:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> RationalFn:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise DivisionByZero("division by the zero rational function")
        return RationalFn(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> RationalFn:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n: int) -> RationalFn:
        if not isinstance(n, int):
            raise ValueError("RationalFn powers must be integers")
        if n < 0:
            if self.is_zero():
                raise DivisionByZero("negative power of zero")
            inv = RationalFn(self.den, self.num)
            return inv ** (-n)
        result = RationalFn.from_int(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def to_laurent(self) -> LaurentPoly:
        """Collapse to a LaurentPoly; NonExactDivision when the denominator
        does not divide out."""
        return exact_div(self.num, self.den)

    def eval_complex(self, z: complex) -> complex:
        d = self.den.eval_complex(z)
        if d == 0:
            raise DivisionByZero(f"denominator vanishes at {z}")
        return self.num.eval_complex(z) / d

    def to_text(self, var: str = "A") -> str:
        if self.den == LaurentPoly.one():
            return self.num.to_text(var)
        return f"({self.num.to_text(var)}) / ({self.den.to_text(var)})"

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"RationalFn({self.to_text()!r})"


def _content(coeffs: list[int]) -> int:
    g = 0
    for c in coeffs:
        g = gcd(g, abs(c))
    return g or 1


def _coerce(x) -> RationalFn:
    if isinstance(x, RationalFn):
        return x
    if isinstance(x, LaurentPoly):
        return RationalFn.from_laurent(x)
    if isinstance(x, int):
        return RationalFn.from_int(x)
    return NotImplemented
