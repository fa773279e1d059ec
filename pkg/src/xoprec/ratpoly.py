"""Exact univariate polynomial and rational-function arithmetic over Q.

Scalars are :class:`fractions.Fraction`. A :class:`Poly` is an immutable
ascending coefficient tuple with no trailing zeros; :class:`RatFunc` is a
reduced quotient with a monic denominator. Both support the usual operators,
so ``(x + 1) * (x - 1)`` and ``(x - a) / x`` read naturally.

High-precision evaluation (``BigReal``) is delegated to :mod:`gmpy2`; every
``mpfr`` carries its own precision, which is what :func:`evaluate` honours.
"""

from __future__ import annotations

import math
import warnings
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

import gmpy2

Scalar = Fraction
BigReal = type(gmpy2.mpfr(0))
ScalarLike = Union[int, Fraction]

ZERO_DEGREE = -1
"""Degree reported for the zero polynomial."""

INF = math.inf


class NotAPoleWarning(UserWarning):
    pass


def as_scalar(value: ScalarLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    raise TypeError(f"exact scalar required, got {type(value).__name__}")


def parse_scalar(text: str) -> Fraction:
    """Parse ``"p"`` or ``"p/q"``. Decimal and exponent forms are refused."""
    s = str(text).strip()
    if not s or any(ch in s for ch in ".eE"):
        raise ValueError(
            f"{text!r} is not an exact rational; write it as p or p/q (e.g. 7/3)"
        )
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"{text!r} is not an exact rational: {exc}") from None


def scalar_to_str(value: Fraction) -> str:
    value = as_scalar(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class Poly:
    """Dense univariate polynomial with exact rational coefficients."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable[ScalarLike] = ()) -> None:
        cs = [as_scalar(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        self._hash = None

    @classmethod
    def _raw(cls, cs: list) -> "Poly":
        while cs and cs[-1] == 0:
            cs.pop()
        p = object.__new__(cls)
        p.coeffs = tuple(cs)
        p._hash = None
        return p

    @classmethod
    def x(cls) -> "Poly":
        return cls._raw([Fraction(0), Fraction(1)])

    @classmethod
    def const(cls, c: ScalarLike) -> "Poly":
        return cls._raw([as_scalar(c)])

    @classmethod
    def monomial(cls, k: int, c: ScalarLike = 1) -> "Poly":
        return cls._raw([Fraction(0)] * k + [as_scalar(c)])

    @classmethod
    def from_roots(cls, roots: Iterable[ScalarLike]) -> "Poly":
        out = cls.const(1)
        for r in roots:
            out = out * cls._raw([-as_scalar(r), Fraction(1)])
        return out

    # -- basic properties ------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    # -- ring operations -------------------------------------------------
    @staticmethod
    def _coerce(other) -> "Poly | None":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Poly._raw([Fraction(other)])
        return None

    def __add__(self, other):
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        a, b = self.coeffs, q.coeffs
        if len(a) < len(b):
            a, b = b, a
        cs = list(a)
        for i, c in enumerate(b):
            cs[i] += c
        return Poly._raw(cs)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw([-c for c in self.coeffs])

    def __sub__(self, other):
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        return self + (-q)

    def __rsub__(self, other):
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        return q + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            c = Fraction(other)
            if c == 0:
                return Poly._raw([])
            return Poly._raw([c * a for a in self.coeffs])
        if not isinstance(other, Poly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly._raw([])
        cs = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for k, bk in enumerate(b):
                cs[i + k] += ai * bk
        return Poly._raw(cs)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial power needs a non-negative int")
        out, base = Poly.const(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                raise ZeroDivisionError("polynomial divided by zero")
            inv = 1 / Fraction(other)
            return Poly._raw([c * inv for c in self.coeffs])
        if isinstance(other, (Poly, RatFunc)):
            return RatFunc(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return RatFunc(Poly.const(other), self)
        return NotImplemented

    def __divmod__(self, other: "Poly") -> tuple["Poly", "Poly"]:
        other = self._coerce(other)
        if other is None or other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        if len(rem) - 1 < dq:
            return Poly._raw([]), self
        inv = 1 / other.lc
        quot = [Fraction(0)] * (len(rem) - dq)
        ocs = other.coeffs
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            c = c * inv
            quot[k - dq] = c
            base = k - dq
            for i in range(dq + 1):
                rem[base + i] -= c * ocs[i]
        return Poly._raw(quot), Poly._raw(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        from .errors import InexactDivisionError

        q, r = divmod(self, other)
        if not r.is_zero():
            raise InexactDivisionError(f"{self} is not divisible by {other}", remainder=r)
        return q

    # -- comparison ------------------------------------------------------
    def __eq__(self, other) -> bool:
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        return self.coeffs == q.coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(("Poly", self.coeffs))
        return self._hash

    # -- calculus and composition ----------------------------------------
    def derivative(self) -> "Poly":
        return Poly._raw([k * c for k, c in enumerate(self.coeffs)][1:])

    def antiderivative(self) -> "Poly":
        return Poly._raw([Fraction(0)] + [c / (k + 1) for k, c in enumerate(self.coeffs)])

    def monic(self) -> "Poly":
        if self.is_zero():
            raise _zero_poly("cannot normalise the zero polynomial")
        return self / self.lc

    def compose(self, q: "Poly") -> "Poly":
        out = Poly._raw([])
        for c in reversed(self.coeffs):
            out = out * q + c
        return out

    def compose_affine(self, c: ScalarLike, d: ScalarLike = 0) -> "Poly":
        return compose_affine(self, c, d)

    def __call__(self, x):
        return evaluate(self, x)

    # -- display ----------------------------------------------------------
    def __repr__(self) -> str:
        return f"Poly([{', '.join(scalar_to_str(c) for c in self.coeffs)}])"

    def __str__(self) -> str:
        return self.pretty()

    def pretty(self, var: str = "x") -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if k == 0:
                body = scalar_to_str(mag)
            else:
                mono = var if k == 1 else f"{var}^{k}"
                body = mono if mag == 1 else f"{scalar_to_str(mag)}*{mono}"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def to_strings(self) -> list[str]:
        return [scalar_to_str(c) for c in self.coeffs]

    @classmethod
    def from_strings(cls, items: Sequence[str]) -> "Poly":
        return cls(parse_scalar(s) for s in items)


def _zero_poly(msg: str):
    from .errors import ZeroPolynomialError

    return ZeroPolynomialError(msg)


X = Poly.x()
ONE = Poly.const(1)
ZERO = Poly()


# ---------------------------------------------------------------------------
# Module-level operations
# ---------------------------------------------------------------------------

def poly_arith(p: Poly, q: Poly, op: str) -> Poly:
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown polynomial operation {op!r}")


def derivative(p: Poly) -> Poly:
    return p.derivative()


def antiderivative(p: Poly) -> Poly:
    """Formal antiderivative with zero constant term."""
    return p.antiderivative()


def compose_affine(p: Poly, c: ScalarLike, d: ScalarLike = 0) -> Poly:
    """Return ``p(c*x + d)``."""
    c, d = as_scalar(c), as_scalar(d)
    if c == 0:
        raise ValueError("compose_affine needs a nonzero scale factor")
    return p.compose(Poly._raw([d, c]))


def wronskian(f: Poly, g: Poly) -> Poly:
    return f * g.derivative() - f.derivative() * g


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd (zero only if both inputs are zero)."""
    while not q.is_zero():
        p, q = q, p % q
    return p.monic() if not p.is_zero() else p


def squarefree_part(p: Poly) -> Poly:
    if p.is_zero():
        raise _zero_poly("square-free part of the zero polynomial")
    if p.degree < 1:
        return p.monic()
    return p.exact_div(poly_gcd(p, p.derivative())).monic()


def evaluate(p: Poly, x):
    """Horner evaluation.

    Exact for ``int``/``Fraction`` input. For an ``mpfr`` argument each step
    is rounded at ``x.precision`` bits and the coefficients are rounded to the
    same precision on entry.
    """
    if isinstance(x, BigReal):
        with gmpy2.context(gmpy2.get_context(), precision=x.precision):
            acc = gmpy2.mpfr(0)
            for c in reversed(p.coeffs):
                acc = acc * x + to_bigreal(c, x.precision)
            return acc
    x = as_scalar(x)
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def to_bigreal(value, precision: int):
    """Correctly rounded conversion of an exact scalar to ``mpfr``."""
    if precision < 2:
        raise ValueError("precision must be at least 2 bits")
    if isinstance(value, BigReal):
        return gmpy2.mpfr(value, precision)
    v = as_scalar(value)
    return gmpy2.mpfr(gmpy2.mpq(v.numerator, v.denominator), precision)


def rational_roots(p: Poly) -> list[Fraction]:
    """Distinct rational roots of ``p`` in increasing order."""
    if p.is_zero():
        raise _zero_poly("the zero polynomial has every rational as a root")
    lcm = 1
    for c in p.coeffs:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in p.coeffs]
    roots: set[Fraction] = set()
    shift = 0
    while ints and ints[0] == 0:
        ints.pop(0)
        shift += 1
    if shift:
        roots.add(Fraction(0))
    if len(ints) > 1:
        q = Poly(ints)
        for r in _divisors(abs(ints[0])):
            for s in _divisors(abs(ints[-1])):
                for cand in (Fraction(r, s), Fraction(-r, s)):
                    if cand not in roots and q(cand) == 0:
                        roots.add(cand)
    return sorted(roots)


def _divisors(n: int) -> list[int]:
    out = []
    k = 1
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            if k * k != n:
                out.append(n // k)
        k += 1
    return out


# ---------------------------------------------------------------------------
# Sturm chains
# ---------------------------------------------------------------------------

def sturm_chain(p: Poly) -> list[Poly]:
    sf = squarefree_part(p)
    chain = [sf, sf.derivative()]
    while not chain[-1].is_zero():
        chain.append(-(chain[-2] % chain[-1]))
    chain.pop()
    return chain


def _sign_at(q: Poly, x) -> int:
    if x == INF or x == -INF:
        if q.is_zero():
            return 0
        s = 1 if q.lc > 0 else -1
        if x < 0 and q.degree % 2 == 1:
            s = -s
        return s
    v = q(x)
    return (v > 0) - (v < 0)


def _variations(chain: list[Poly], x) -> int:
    signs = [s for s in (_sign_at(q, x) for q in chain) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sturm_count(p: Poly, lo, hi) -> int:
    """Number of distinct real roots of ``p`` in ``(lo, hi]``.

    Bounds are exact scalars or ``±math.inf``; infinite ends are handled by
    the sign of the leading coefficient, never by a finite surrogate.
    """
    if p.is_zero():
        raise _zero_poly("sturm_count of the zero polynomial")
    lo = lo if lo in (INF, -INF) else as_scalar(lo)
    hi = hi if hi in (INF, -INF) else as_scalar(hi)
    if not lo < hi:
        raise ValueError("sturm_count needs lo < hi")
    chain = sturm_chain(p)
    return _variations(chain, lo) - _variations(chain, hi)


def count_roots_closed(p: Poly, lo, hi) -> int:
    """Distinct real roots in ``[lo, hi]`` (finite ends included)."""
    n = sturm_count(p, lo, hi)
    if lo not in (INF, -INF) and p(lo) == 0:
        n += 1
    return n


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------

class RatFunc:
    """Reduced quotient ``num/den`` with monic ``den``."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None) -> None:
        num = Poly._coerce(num) if not isinstance(num, Poly) else num
        den = ONE if den is None else (Poly._coerce(den) if not isinstance(den, Poly) else den)
        if num is None or den is None:
            raise TypeError("RatFunc needs polynomial or scalar parts")
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            num, den = ZERO, ONE
        elif den.degree > 0:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num.exact_div(g), den.exact_div(g)
        lc = den.lc
        if lc != 1:
            num, den = num / lc, den / lc
        self.num: Poly = num
        self.den: Poly = den

    @staticmethod
    def _coerce(other) -> "RatFunc | None":
        if isinstance(other, RatFunc):
            return other
        p = Poly._coerce(other)
        return RatFunc(p) if p is not None else None

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def to_poly(self) -> Poly:
        if not self.is_polynomial():
            raise ValueError(f"{self} is not a polynomial")
        return self.num

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if k < 0:
            return RatFunc(ONE) / RatFunc(self.num ** (-k), self.den ** (-k))
        return RatFunc(self.num ** k, self.den ** k)

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self) -> int:
        return hash(("RatFunc", self.num, self.den))

    def derivative(self) -> "RatFunc":
        n, d = self.num, self.den
        return RatFunc(n.derivative() * d - n * d.derivative(), d * d)

    def __call__(self, x):
        dv = evaluate(self.den, x)
        if dv == 0:
            raise ZeroDivisionError(f"{self} has a pole at {x}")
        return evaluate(self.num, x) / dv

    def __repr__(self) -> str:
        return f"RatFunc({self.num!r}, {self.den!r})"

    def __str__(self) -> str:
        if self.is_polynomial():
            return str(self.num)
        return f"({self.num})/({self.den})"


def residue_simple(f: RatFunc, at: ScalarLike) -> Fraction:
    """Residue of ``f`` at a simple pole ``at``: ``num(at) / den'(at)``.

    A point that is not a pole has residue zero; that case returns 0 and
    emits :class:`NotAPoleWarning` so callers can tell it apart.
    """
    from .errors import MultiplePoleError

    at = as_scalar(at)
    if f.den(at) != 0:
        warnings.warn(f"{at} is not a pole of {f}", NotAPoleWarning, stacklevel=2)
        return Fraction(0)
    dprime = f.den.derivative()
    if poly_gcd(f.den, dprime)(at) == 0:
        raise MultiplePoleError(f"pole of {f} at {at} is not simple", at=at)
    return f.num(at) / dprime(at)


def pullback_at_infinity(f: RatFunc) -> tuple[int, Poly, Poly]:
    """Write ``f(1/w) = w**k * P(w) / Q(w)`` with ``Q(0) != 0``.

    Returns ``(k, P, Q)`` where ``P, Q`` are the reversed numerator and
    denominator.
    """
    rn = Poly(reversed(f.num.coeffs))
    rd = Poly(reversed(f.den.coeffs))
    return f.den.degree - f.num.degree, rn, rd


def residue_at_infinity(f: RatFunc) -> Fraction:
    """``Res_{z=inf} f = -Res_{w=0} f(1/w) / w**2``, via the pullback."""
    if f.num.is_zero():
        return Fraction(0)
    k, rn, rd = pullback_at_infinity(f)
    order = 2 - k  # pole order of f(1/w)/w^2 at w = 0
    if order <= 0:
        return Fraction(0)
    # Laurent coefficient of w^-1 is the (order-1)-th Taylor coefficient of rn/rd.
    series = _series_div(rn, rd, order)
    return -series[order - 1]


def _series_div(n: Poly, d: Poly, terms: int) -> list[Fraction]:
    out: list[Fraction] = []
    d0 = d.coeff(0)
    for k in range(terms):
        acc = n.coeff(k) - sum((d.coeff(k - i) * out[i] for i in range(k)), Fraction(0))
        out.append(acc / d0)
    return out
