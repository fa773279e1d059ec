"""Closed-form recurrence coefficients for the low-j classical cases.

Each :class:`Relation` gives ``beta_{n,l}`` as an expression in ``n`` and the
family parameter ``a`` (with ``b = a`` for Jacobi), together with the printed
monic multiplier. Coefficients are built with ``a`` kept symbolic and only
substituted at the end, so removable ``0/0`` cases (for instance the
``(4a^2 - 1)/(2n + 2a - 1)`` factor at ``n = 0, a = 1/2``) resolve to their
limit instead of raising.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .classical import Curve, Kind
from .ratpoly import X, Poly, RatFunc

F = Fraction


def poch(x, k: int):
    """Rising factorial ``(x)_k``; works on scalars and on polynomials in ``a``."""
    out = 1
    for i in range(k):
        out = out * (x + i)
    return out


@dataclass(frozen=True)
class Relation:
    name: str
    kind: Kind
    rho: Curve
    j: int
    coeffs: Callable[[int, object], dict[int, object]]
    multiplier: Callable[[Fraction], Poly]
    excluded_n: frozenset[int] = frozenset()

    def coefficients(self, n: int, a) -> dict[int, Fraction]:
        """Band coefficients at concrete ``(n, a)``; missing shifts are zero.

        Shifts whose target index is negative are dropped. Raises
        ``ZeroDivisionError`` when an expression has a genuine pole at ``a``.
        """
        a = Fraction(a) if a is not None else Fraction(0)
        raw = self.coeffs(n, X)
        out = {}
        for l in range(self.j + 1, -self.j - 2, -1):
            if n + l < 0:
                continue
            expr = raw.get(l, 0)
            out[l] = _substitute(expr, a)
        return out


def _substitute(expr, a: Fraction) -> Fraction:
    if isinstance(expr, (int, Fraction)):
        return Fraction(expr)
    f = expr if isinstance(expr, RatFunc) else RatFunc(expr)
    den = f.den(a)
    if den == 0:
        raise ZeroDivisionError(f"coefficient has a pole at a={a}")
    return f.num(a) / den


def _hermite_iii_2(n, a):
    return {
        3: 1,
        1: F(3, 2) * n,
        -1: F(3, 4) * n * (n - 3),
        -3: F(1, 8) * n * (n - 4) * (n - 5),
    }


def _laguerre_i_1(n, a):
    return {
        2: 1,
        1: 4 * (n + a + 2),
        0: 2 * (n + a + 2) * (3 * n + 2 * a + 2),
        -1: 4 * (n + a + 2) * (n + a) * n,
        -2: (n + a + 2) * (n + a - 1) * n * (n - 1),
    }


def _laguerre_i_2(n, a):
    return {
        3: 1,
        2: 6 * (n + a + 3),
        1: 3 * (n + a + 3) * (5 * n + 4 * a + 8),
        0: 4 * (n + a + 3) * (n + a + 1) * (5 * n + 2 * a + 4),
        -1: 3 * (n + a + 3) * (n + a) * (5 * n + 4 * a + 3) * n,
        -2: 6 * (n + a + 3) * poch(n + a - 1, 2) * poch(n - 1, 2),
        -3: (n + a + 3) * poch(n + a - 2, 2) * poch(n - 2, 3),
    }


def _laguerre_ii_1(n, a):
    return {
        2: 1,
        1: 4 * (n + a),
        0: 2 * (n + a - 1) * (3 * n + 2 * a + 1),
        -1: 4 * (n + a - 2) * (n + a) * n,
        -2: (n + a - 3) * (n + a) * n * (n - 1),
    }


def _laguerre_ii_2(n, a):
    return {
        3: 1,
        2: 6 * (n + a),
        1: 3 * (n + a - 1) * (5 * n + 4 * a + 2),
        0: 4 * (n + a - 2) * (n + a) * (5 * n + 2 * a + 1),
        -1: 3 * (n + a - 3) * (n + a) * (5 * n + 4 * a - 3) * n,
        -2: 6 * (n + a - 4) * poch(n + a - 1, 2) * poch(n - 1, 2),
        -3: (n + a - 5) * poch(n + a - 1, 2) * poch(n - 2, 3),
    }


def _laguerre_iii_1(n, a):
    return {
        2: 1,
        1: 4 * n,
        0: 2 * n * (3 * n + a - 4),
        -1: 4 * n * (n - 2) * (n + a - 2),
        -2: n * (n - 3) * (n + a - 2) * (n + a - 3),
    }


def _laguerre_iii_2(n, a):
    return {
        3: 1,
        2: 6 * n,
        1: 3 * n * (5 * n + a - 7),
        0: 4 * n * (n - 2) * (5 * n + 3 * a - 11),
        -1: 3 * n * (n - 3) * (n + a - 3) * (5 * n + a - 12),
        -2: 6 * n * poch(n - 4, 2) * poch(n + a - 4, 2),
        -3: n * poch(n - 5, 2) * poch(n + a - 5, 3),
    }


def _jacobi_i_1(n, a):
    m = 2 * n + 2 * a
    return {
        2: 1,
        1: 2 * a,
        0: 2 * (4 * a**2 - 1) * (n + a - 1) * (n + a + 2) / ((m - 1) * (m + 3)),
        -1: 8 * a * ((n + a) ** 2 - 4) * n * (n + 2 * a) / (poch(m - 2, 2) * poch(m + 1, 2)),
        -2: 4 * (n + a - 3) * (n + a + 2) * poch(n - 1, 2) * poch(n + 2 * a - 1, 2)
        / (poch(m - 3, 3) * poch(m - 1, 3)),
    }


def _jacobi_i_2(n, a):
    m = 2 * n + 2 * a
    q = 4 * a**2 - 1
    return {
        3: 1,
        2: F(3, 2) * a,
        1: q * (n + a + 3) * (n + a - 1) / ((m - 1) * (m + 5)),
        0: a * q * (n + a + 3) * (n + a - 2) / (3 * (m - 1) * (m + 3)),
        -1: q * (n + a + 3) * (n + a - 3) / ((m - 1) * (m + 2))
        * (n * (n + 2 * a) / ((m - 3) * (m + 3))),
        -2: 6 * a * (n + a + 3) * (n + a - 4) / (m - 1) ** 2
        * (poch(n - 1, 2) * poch(n + 2 * a - 1, 2) / (poch(m - 4, 2) * poch(m + 1, 2))),
        -3: 4 * (n + a + 3) * (n + a - 5) / ((m - 1) * (m - 3))
        * (poch(n - 2, 3) * poch(n + 2 * a - 2, 3) / (poch(m - 5, 3) * poch(m - 1, 3))),
    }


def _jacobi_iii_1(n, a):
    m = 2 * n + 2 * a
    return {
        2: 1,
        0: 2 * (2 * a + 1) * n * (n + 2 * a - 3) / ((2 * a - 1) * (m - 5) * (m - 1)),
        -2: n * (n - 3) * (n + 2 * a - 5) * (n + 2 * a - 2)
        / (8 * (m - 5) * poch(n + a - F(7, 2), 3)),
    }


def _jacobi_iii_2(n, a):
    m = 2 * n + 2 * a
    return {
        3: 1,
        1: 3 * (2 * a + 1) * n * (n + 2 * a - 4) / ((2 * a - 3) * (m - 1) * (m - 7)),
        -1: 3 * (2 * a + 1) * n * (n - 3) * (n + 2 * a - 3) * (n + 2 * a - 6)
        / (16 * (2 * a - 3) * poch(n + a - F(9, 2), 4)),
        -3: n * (n - 4) * (n - 5) * (n + 2 * a - 8) * poch(n + 2 * a - 4, 2)
        / (64 * poch(n + a - F(9, 2), 2) * poch(n + a - F(11, 2), 4)),
    }


def _p(*coeffs) -> Poly:
    """Polynomial from descending coefficients (as printed)."""
    return Poly(list(reversed(coeffs)))


RELATIONS: tuple[Relation, ...] = (
    Relation("hermite-III-2", Kind.HERMITE, Curve.III, 2, _hermite_iii_2,
             lambda a: _p(1, 0, F(3, 2), 0), frozenset({1, 2})),
    Relation("laguerre-I-1", Kind.LAGUERRE, Curve.I, 1, _laguerre_i_1,
             lambda a: _p(1, 2 * a + 2, a * (a + 1))),
    Relation("laguerre-I-2", Kind.LAGUERRE, Curve.I, 2, _laguerre_i_2,
             lambda a: _p(1, 3 * (a + 2), 3 * (a + 1) * (a + 2), a * (a + 1) * (a + 2))),
    Relation("laguerre-II-1", Kind.LAGUERRE, Curve.II, 1, _laguerre_ii_1,
             lambda a: _p(1, 2 * a - 2, a * (a - 1))),
    Relation("laguerre-II-2", Kind.LAGUERRE, Curve.II, 2, _laguerre_ii_2,
             lambda a: _p(1, 3 * (a - 2), 3 * (a - 1) * (a - 2), a * (a - 1) * (a - 2))),
    Relation("laguerre-III-1", Kind.LAGUERRE, Curve.III, 1, _laguerre_iii_1,
             lambda a: _p(1, -2 * a + 2, a * (a - 1)), frozenset({1})),
    Relation("laguerre-III-2", Kind.LAGUERRE, Curve.III, 2, _laguerre_iii_2,
             lambda a: _p(1, -3 * (a - 2), 3 * (a - 1) * (a - 2), -a * (a - 1) * (a - 2)),
             frozenset({1, 2})),
    Relation("jacobi-I-1", Kind.JACOBI, Curve.I, 1, _jacobi_i_1,
             lambda a: _p(1, 2 * a, 2 * a * a - 1)),
    Relation("jacobi-I-2", Kind.JACOBI, Curve.I, 2, _jacobi_i_2,
             lambda a: _p(1, F(3, 2) * a, (a - 1) * (a + 1), a * (2 * a * a - 5) / 6)),
    Relation("jacobi-III-1", Kind.JACOBI, Curve.III, 1, _jacobi_iii_1,
             lambda a: _p(1, 0, 1 / (2 * a - 1)), frozenset({1})),
    Relation("jacobi-III-2", Kind.JACOBI, Curve.III, 2, _jacobi_iii_2,
             lambda a: _p(1, 0, 3 / (2 * a - 3), 0), frozenset({1, 2})),
)


def relation(name: str) -> Relation:
    for rel in RELATIONS:
        if rel.name == name:
            return rel
    raise KeyError(name)


HERMITE_PIN = _p(1, 0, F(3, 2), 0)
"""Printed value of the real twisted Hermite polynomial of degree 3."""
