from __future__ import annotations

from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from xoprec.classical import FamilySpec
from xoprec.ratpoly import Poly

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

SX = sp.Symbol("x")
SAMPLE_A = (Fraction(1, 2), Fraction(1), Fraction(7, 3), Fraction(4))


def to_sympy(p: Poly) -> sp.Expr:
    return sum((sp.Rational(c.numerator, c.denominator) * SX**k for k, c in enumerate(p.coeffs)), sp.Integer(0))


def from_sympy(expr) -> Poly:
    poly = sp.Poly(sp.expand(expr), SX)
    coeffs = [Fraction(int(sp.fraction(c)[0]), int(sp.fraction(c)[1])) for c in reversed(poly.all_coeffs())]
    return Poly(coeffs)


def sympy_monic(expr) -> Poly:
    p = from_sympy(expr)
    return p.monic()


fractions = st.fractions(min_value=-8, max_value=8, max_denominator=7)
nonzero_fractions = fractions.filter(lambda f: f != 0)
polys = st.lists(fractions, min_size=0, max_size=6).map(Poly)
nonzero_polys = polys.filter(lambda p: not p.is_zero())


def regular_families() -> list[FamilySpec]:
    out = [FamilySpec.hermite()]
    out += [FamilySpec.laguerre(a) for a in SAMPLE_A]
    out += [FamilySpec.jacobi(a, a) for a in SAMPLE_A]
    out += [FamilySpec.jacobi(Fraction(1, 2), 4), FamilySpec.jacobi(3, Fraction(5, 2))]
    return out


@pytest.fixture(params=regular_families(), ids=lambda f: f.label())
def family(request) -> FamilySpec:
    return request.param
