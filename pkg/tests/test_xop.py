from fractions import Fraction

import pytest
import sympy as sp

from conftest import SAMPLE_A, SX, regular_families, sympy_monic, to_sympy
from xoprec.classical import Curve, FamilySpec, Kind, monic
from xoprec.errors import (
    DegenerateDivisor,
    EigenvalueCollision,
    InvalidParameter,
    NonexistentCombination,
    NonPolynomialResult,
    SeedHasRootsInDomain,
    XopError,
)
from xoprec.ratpoly import ONE, X, Poly, RatFunc, count_roots_closed
from xoprec.xop import (
    ADOPTED_JACOBI_III_PI,
    CORRECTED,
    EXCLUDED,
    PRINTED,
    _check_collisions,
    apply_darboux,
    darboux_xop,
    degree_set,
    effective_parameters,
    jacobi_reflection_holds,
    validate,
    weight_data,
    xop_poly,
)

F = Fraction
TYPES = (Curve.I, Curve.II, Curve.III)


def rat(q):
    return sp.Rational(q.numerator, q.denominator)


def all_specs(jmax=4, require_regular=False):
    out = []
    for fam in regular_families():
        for rho in TYPES:
            for j in range(1, jmax + 1):
                try:
                    out.append(validate(fam, rho, j, require_regular=require_regular))
                except XopError:
                    pass
    return out


SPECS = all_specs()
SPEC_IDS = [s.label() for s in SPECS]


# --- independent construction from the explicit seed functions ---------------------


def jacobi_sum(n, a, b):
    """Binomial-sum form of P_n^{(a,b)}, valid for any rational a, b."""
    return sp.expand(sum(
        sp.binomial(n + a, n - k) * sp.binomial(n + b, k) * ((SX - 1) / 2) ** k * ((SX + 1) / 2) ** (n - k)
        for k in range(n + 1)
    ))


_AL, _BE = sp.symbols("alpha beta")


def jacobi_monic(n, a, b):
    """Monic Jacobi, normalised with symbolic parameters before substitution."""
    # a = b is taken along the symmetric line, where 0/0 terms cancel
    expr = jacobi_sum(n, _AL, _AL if a == b else _BE)
    lc = sp.Poly(expr, SX).LC()
    return sp.expand(sp.cancel(expr / lc).subs({_AL: a, _BE: b}))


def sympy_seed(fam, rho, j):
    """Seed phi as (power factors, exponential argument, polynomial part)."""
    if fam.kind is Kind.HERMITE:
        h = sp.expand(sp.I ** (-j) * sp.hermite(j, sp.I * SX))
        return [], SX**2, h
    if fam.kind is Kind.LAGUERRE:
        a = rat(fam.a)
        if rho is Curve.I:
            return [], SX, sp.assoc_laguerre(j, a, -SX)
        if rho is Curve.II:
            return [(SX, -a)], 0, sp.assoc_laguerre(j, -a, SX)
        return [(SX, -a)], SX, sp.assoc_laguerre(j, -a, -SX)
    a, b = rat(fam.a), rat(fam.b)
    if rho is Curve.I:
        return [(1 + SX, -b)], 0, jacobi_monic(j, a, -b)
    if rho is Curve.II:
        return [(1 - SX, -a)], 0, jacobi_monic(j, -a, b)
    return [(1 - SX, -a), (1 + SX, -b)], 0, jacobi_monic(j, -a, -b)


def sympy_classical(fam, n):
    if fam.kind is Kind.HERMITE:
        return sp.hermite(n, SX)
    if fam.kind is Kind.LAGUERRE:
        return sp.assoc_laguerre(n, rat(fam.a), SX)
    return jacobi_sum(n, rat(fam.a), rat(fam.b))


def sympy_a_rho(fam, rho):
    if fam.kind is Kind.HERMITE or (fam.kind is Kind.LAGUERRE and rho is Curve.I):
        return sp.Integer(1)
    if fam.kind is Kind.LAGUERRE:
        return SX
    return {Curve.I: 1 + SX, Curve.II: 1 - SX, Curve.III: 1 - SX**2}[rho]


def sympy_xop(spec, n):
    """A_rho p (d - phi'/phi) P_m with the log-derivative of phi taken by hand."""
    fam, rho, j = spec.fam, spec.rho, spec.j
    if rho is Curve.III and n == 0:
        return ONE
    m = n - j - 1 if rho is Curve.III else n
    P = sp.expand(sympy_classical(fam, m))
    powers, expo, p = sympy_seed(fam, rho, j)
    p = sp.expand(p)
    gauge = sum((e * sp.diff(f, SX) / f for f, e in powers), sp.diff(expo, SX))
    image = sympy_a_rho(fam, rho) * (p * sp.diff(P, SX) - (p * gauge + sp.diff(p, SX)) * P)
    return sympy_monic(sp.cancel(sp.together(image)))


# --- validation -------------------------------------------------------------------


def test_hermite_existence_rules():
    herm = FamilySpec.hermite()
    with pytest.raises(NonexistentCombination):
        validate(herm, Curve.I, 1)
    with pytest.raises(NonexistentCombination):
        validate(herm, Curve.II, 2)
    with pytest.raises(NonexistentCombination):
        validate(herm, Curve.III, 3)
    assert validate(herm, Curve.III, 2).regular


def test_laguerre_type_one_half():
    spec = validate(FamilySpec.laguerre(F(1, 2)), Curve.I, 1)
    assert spec.seed.monic() == Poly([F(3, 2), 1])
    assert count_roots_closed(spec.seed, 0, spec.fam.domain.hi) == 0


def test_seed_roots_in_domain_rejected():
    # L_1^{(-1/2)}(x) = x - 1/2 vanishes inside [0, inf)
    fam = FamilySpec.laguerre(F(1, 2))
    with pytest.raises(SeedHasRootsInDomain):
        validate(fam, Curve.II, 1)
    spec = validate(fam, Curve.II, 1, require_regular=False)
    assert not spec.regular and "root" in spec.irregular_reason


def test_degenerate_divisor_rejected():
    # type II Laguerre divides by n + a - j, zero at n = 0 when a = j
    with pytest.raises(DegenerateDivisor) as info:
        validate(FamilySpec.laguerre(1), Curve.II, 1, require_regular=False)
    assert info.value.details["n"] == 0


def test_degenerate_divisor_ignored_for_type_three_ground_state():
    # n + a + b - 2j - 1 = 0 at n = 0; that degree is defined as 1 directly
    spec = validate(FamilySpec.jacobi(F(3, 2), F(3, 2)), Curve.III, 1, require_regular=False)
    assert xop_poly(spec, 0) == ONE


def test_eigenvalue_collision_guard():
    # formal Jacobi(-2,-2): lambda_n = -n(n-3) gives lambda_0 = lambda_3
    fam = FamilySpec.jacobi(-2, -2, formal=True)
    with pytest.raises(EigenvalueCollision):
        _check_collisions(fam, Curve.III, 1, 8)


def test_invalid_parameters_rejected():
    with pytest.raises(InvalidParameter):
        validate(FamilySpec.laguerre(1), Curve.I, 0)
    with pytest.raises(NonexistentCombination):
        validate(FamilySpec.laguerre(1), Curve.EMPTY, 1)
    with pytest.raises(InvalidParameter):
        validate(FamilySpec.laguerre(-2, formal=True), Curve.I, 1)


# --- degree sets --------------------------------------------------------------------


def test_degree_set_examples():
    spec3 = validate(FamilySpec.hermite(), Curve.III, 2)
    ds = degree_set(spec3)
    assert ds.members(6) == [0, 3, 4, 5, 6]
    assert ds.gap() == [1, 2]
    spec1 = validate(FamilySpec.laguerre(1), Curve.I, 3)
    assert degree_set(spec1).members(5) == list(range(6))
    spec31 = validate(FamilySpec.laguerre(F(7, 3)), Curve.III, 1, require_regular=False)
    assert 1 not in degree_set(spec31)
    assert -1 not in degree_set(spec1)


@pytest.mark.parametrize("spec", SPECS, ids=SPEC_IDS)
def test_degree_contract_and_monicity(spec):
    ds = spec.degrees
    for n in range(17):
        p = xop_poly(spec, n)
        if n in ds:
            assert p.degree == ds.degree_of(n)
            assert p.lc == 1
            assert not p.excluded
        else:
            assert p is EXCLUDED


def test_excluded_is_distinguishable():
    spec = validate(FamilySpec.hermite(), Curve.III, 2)
    assert xop_poly(spec, 1) == Poly()
    assert xop_poly(spec, 1).excluded
    assert not Poly().excluded


# --- constructions ------------------------------------------------------------------


def test_xop_examples():
    spec = validate(FamilySpec.laguerre(1), Curve.I, 1)
    assert xop_poly(spec, 0) == Poly([3, 1])
    herm = validate(FamilySpec.hermite(), Curve.III, 2)
    assert xop_poly(herm, 0) == ONE
    assert xop_poly(herm, 1) is EXCLUDED


@pytest.mark.parametrize("spec", SPECS, ids=SPEC_IDS)
def test_explicit_equals_darboux(spec):
    for n in spec.degrees.members(12):
        assert xop_poly(spec, n) == darboux_xop(spec, n)


ORACLE_SPECS = [s for s in SPECS if s.j <= 2]


@pytest.mark.parametrize("spec", ORACLE_SPECS, ids=[s.label() for s in ORACLE_SPECS])
def test_explicit_matches_seed_function_oracle(spec):
    for n in spec.degrees.members(spec.j + 4):
        assert xop_poly(spec, n) == sympy_xop(spec, n)


def test_darboux_kills_its_seed():
    for spec in SPECS:
        # with the gauge folded into the target, phi itself maps to zero
        assert apply_darboux(spec, spec.seed, use_eta=RatFunc(Poly())).is_zero()


def test_darboux_cross_path_example():
    spec = validate(FamilySpec.laguerre(1), Curve.I, 1)
    assert apply_darboux(spec, monic(spec.fam, 2)).monic() == xop_poly(spec, 2)


def test_hermite_ground_image_is_seed_derivative_data():
    spec = validate(FamilySpec.hermite(), Curve.III, 2)
    p = spec.seed
    # P_0 = 1: image is -(2x p + p')
    assert apply_darboux(spec, ONE) == -(Poly([0, 2]) * p + p.derivative())


def test_printed_jacobi_three_factor_is_not_polynomial():
    fam = FamilySpec.jacobi(F(7, 3), F(7, 3))
    spec = validate(fam, Curve.III, 1, pi_variant=PRINTED, require_regular=False)
    with pytest.raises(NonPolynomialResult):
        apply_darboux(spec, monic(fam, 1))
    good = validate(fam, Curve.III, 1, pi_variant=CORRECTED, require_regular=False)
    assert apply_darboux(good, monic(fam, 1)).degree == 3
    assert ADOPTED_JACOBI_III_PI == CORRECTED


# --- weights ------------------------------------------------------------------------


def test_weight_examples():
    lag1 = validate(FamilySpec.laguerre(F(7, 3)), Curve.I, 2)
    w = weight_data(lag1)
    assert lag1.a_rho == ONE
    assert w.denominator == lag1.seed**2
    assert w.numerator_extra == X
    lag2 = validate(FamilySpec.laguerre(F(7, 3)), Curve.II, 1)
    assert lag2.a_rho == X
    assert validate(FamilySpec.hermite(), Curve.III, 2).a_rho == ONE


@pytest.mark.parametrize("spec", SPECS, ids=SPEC_IDS)
def test_decoupling_factorises(spec):
    assert spec.decouple == spec.a_rho * spec.seed


@pytest.mark.parametrize("spec", all_specs(require_regular=True), ids=lambda s: s.label())
def test_regular_weight_denominator_positive(spec):
    dom = spec.fam.domain
    den = weight_data(spec).denominator
    assert count_roots_closed(spec.seed, dom.lo, dom.hi) == 0
    assert effective_parameters(spec.fam, spec.a_rho) is not None
    # only endpoint factors may vanish; the interior stays positive
    inner = den.exact_div(spec.a_rho**2)
    assert count_roots_closed(inner, dom.lo, dom.hi) == 0
    assert inner(Fraction(0) if spec.fam.kind is not Kind.LAGUERRE else Fraction(1)) > 0


@pytest.mark.parametrize("a", SAMPLE_A)
@pytest.mark.parametrize("j", [1, 2, 3])
def test_jacobi_reflection(a, j):
    for n in range(13):
        try:
            assert jacobi_reflection_holds(a, j, n)
        except DegenerateDivisor:
            pytest.skip(f"degenerate divisor at a={a}, j={j}")
