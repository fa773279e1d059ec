import json
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from conftest import SX, regular_families, to_sympy
from xoprec.classical import Curve, FamilySpec, Kind, monic
from xoprec.errors import InvalidParameter, UnrepresentableTarget, XopError
from xoprec.ratpoly import ONE, X, Poly
from xoprec.recurrence import (
    CLOSED,
    RAW,
    CoeffTable,
    TableKind,
    convention_shift_check,
    expand_in_classical_basis,
    expand_in_xop_basis,
    family_of,
    jzero_matches,
    lemma2_constants,
    multiplier,
    recurrence_2j3,
    recurrence_4j1,
    recurrence_classical,
    tables_to_csv,
)
from xoprec.xop import validate, xop_poly

F = Fraction


def specs(types=("I", "II", "III"), jmax=4):
    out = []
    for fam in regular_families():
        for rho in types:
            js = (2, 4) if fam.kind is Kind.HERMITE else range(1, jmax + 1)
            for j in js:
                try:
                    out.append(validate(fam, rho, j, require_regular=False))
                except XopError:
                    pass
    return out


ALL = specs()
IDS = [s.label() for s in ALL]


def sympy_band(spec, n, mult):
    """Solve mult * P^_n = sum_l c_l P^_{n+l} over all members of degree <= deg."""
    top = (mult * xop_poly(spec, n)).degree
    idx = [k for k in spec.degrees.members(top + spec.j + 1) if spec.degrees.degree_of(k) <= top]
    cs = sp.symbols(f"c0:{len(idx)}")
    lhs = to_sympy(mult) * to_sympy(xop_poly(spec, n))
    rhs = sum((c * to_sympy(xop_poly(spec, k)) for c, k in zip(cs, idx)), sp.Integer(0))
    eqs = sp.Poly(sp.expand(lhs - rhs), SX).all_coeffs()
    sol = sp.solve(eqs, cs, dict=True)[0]
    out = {}
    for c, k in zip(cs, idx):
        v = sol.get(c, 0)
        if v != 0:
            out[k - n] = F(int(sp.fraction(v)[0]), int(sp.fraction(v)[1]))
    return out


# --- multipliers -----------------------------------------------------------------


def test_multiplier_examples():
    m = multiplier(validate(FamilySpec.laguerre(1), Curve.I, 1))
    assert m.closed == Poly([2, 4, 1])
    m = multiplier(validate(FamilySpec.hermite(), Curve.III, 2))
    assert m.closed == Poly([0, F(3, 2), 0, 1])
    assert m.shift == 0
    a = F(3, 2)
    m = multiplier(validate(FamilySpec.jacobi(a, a), Curve.III, 1, require_regular=False))
    assert m.closed == Poly([1 / (2 * a - 1), 0, 1])


@pytest.mark.parametrize("spec", ALL, ids=IDS)
def test_multiplier_invariants(spec):
    m = multiplier(spec)
    assert m.raw.coeff(0) == 0
    assert m.raw.lc == 1 and m.raw.degree == spec.j + 1
    assert m.raw.derivative() == (spec.j + 1) * spec.seed / spec.seed.lc
    if m.closed is not None:
        assert m.closed.lc == 1 and m.closed.degree == spec.j + 1
        assert (m.closed - m.raw).degree <= 0


def test_laguerre_type_one_superscript():
    """The antiderivative picks the a-1 superscript."""
    a = F(7, 3)
    spec = validate(FamilySpec.laguerre(a), Curve.I, 2)
    wrong = -monic(FamilySpec.laguerre(a, formal=True), 3).compose_affine(-1)
    assert (wrong - multiplier(spec).raw).degree > 0
    assert (multiplier(spec).closed - multiplier(spec).raw).degree <= 0


# --- expansion ---------------------------------------------------------------------


def test_expand_examples():
    herm = FamilySpec.hermite()
    assert expand_in_classical_basis(herm, X * monic(herm, 3)) == {4: 1, 2: F(3, 2)}
    spec = validate(FamilySpec.laguerre(1), Curve.I, 1)
    assert expand_in_xop_basis(spec, xop_poly(spec, 5)) == {5: 1}
    assert expand_in_xop_basis(spec, Poly()) == {}


def test_expand_gap_degree_is_unrepresentable():
    spec = validate(FamilySpec.hermite(), Curve.III, 2)
    with pytest.raises(UnrepresentableTarget):
        expand_in_xop_basis(spec, X)
    spec1 = validate(FamilySpec.laguerre(1), Curve.I, 2)
    with pytest.raises(UnrepresentableTarget):
        expand_in_xop_basis(spec1, ONE)


@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=5), min_size=1, max_size=6))
def test_expansion_reconstructs_target(cs):
    spec = validate(FamilySpec.laguerre(F(7, 3)), Curve.III, 2)
    members = spec.degrees.members(12)
    target = sum((c * xop_poly(spec, k) for c, k in zip(cs, members)), Poly())
    got = expand_in_xop_basis(spec, target)
    assert sum((c * xop_poly(spec, k) for k, c in got.items()), Poly()) == target
    assert got == {k: c for c, k in zip(cs, members) if c != 0}


# --- 2j+3 relation -----------------------------------------------------------------


def test_laguerre_two_example():
    spec = validate(FamilySpec.laguerre(3), Curve.II, 1)
    t = recurrence_2j3(spec, 2, CLOSED)
    assert t.nonzero() == {2: 1, 1: 20, 0: 104, -1: 120, -2: 20}
    assert t.multiplier_poly.to_strings() == ["6", "4", "1"]


def test_laguerre_two_matches_closed_formulas():
    a, n = 3, 2
    t = recurrence_2j3(validate(FamilySpec.laguerre(a), Curve.II, 1), n, CLOSED)
    assert t.get(1) == 4 * (n + a)
    assert t.get(0) == 2 * (n + a - 1) * (3 * n + 2 * a + 1)
    assert t.get(-1) == 4 * (n + a - 2) * (n + a) * n
    assert t.get(-2) == (n + a - 3) * (n + a) * n * (n - 1)


def test_hermite_three_example():
    spec = validate(FamilySpec.hermite(), Curve.III, 2)
    t = recurrence_2j3(spec, 4, CLOSED)
    assert t.entries == {3: 1, 2: 0, 1: 6, 0: 0, -1: 3, -2: 0, -3: 0}
    n = 4
    assert t.get(1) == F(3, 2) * n
    assert t.get(-1) == F(3, 4) * n * (n - 3)
    assert t.get(-3) == F(1, 8) * n * (n - 4) * (n - 5)


def test_jacobi_three_ground_row():
    for a in (F(3, 2), F(7, 3), F(4)):
        try:
            spec = validate(FamilySpec.jacobi(a, a), Curve.III, 1, require_regular=False)
        except XopError:
            continue
        assert recurrence_2j3(spec, 0, CLOSED).nonzero() == {2: 1}


@pytest.mark.parametrize("spec", ALL, ids=IDS)
def test_sparsity(spec):
    for n in spec.degrees.members(16):
        for conv in (RAW, CLOSED) if spec.multiplier_closed is not None else (RAW,):
            t = recurrence_2j3(spec, n, conv)
            assert set(t.entries) <= set(range(-spec.j - 1, spec.j + 2))
            assert t.get(spec.j + 1) == 1


ORACLE = [s for s in ALL if s.j <= 2]


@pytest.mark.parametrize("spec", ORACLE, ids=[s.label() for s in ORACLE])
def test_coefficients_match_linear_solve(spec):
    mult = multiplier(spec).raw
    for n in spec.degrees.members(spec.j + 3):
        assert recurrence_2j3(spec, n, RAW).nonzero() == sympy_band(spec, n, mult)


@pytest.mark.parametrize("spec", [s for s in ALL if s.rho is Curve.III], ids=lambda s: s.label())
def test_gap_shifts_are_zero(spec):
    for n in spec.degrees.members(16):
        t = recurrence_2j3(spec, n, RAW)
        for l, c in t.entries.items():
            if n + l not in spec.degrees:
                assert c == 0


def test_excluded_degree_table():
    spec = validate(FamilySpec.hermite(), Curve.III, 2)
    t = recurrence_2j3(spec, 1, CLOSED)
    assert t.excluded and t.entries == {}
    assert t.to_dict()["excluded"] is True


def test_negative_shifts_absent_at_ground_degree():
    spec = validate(FamilySpec.laguerre(1), Curve.I, 2)
    assert all(l >= 0 for l in recurrence_2j3(spec, 0).entries)
    assert all(l >= 0 for l in recurrence_4j1(spec, 0).entries)


# --- 4j+1 relation -----------------------------------------------------------------


def test_four_j_plus_one_examples():
    spec = validate(FamilySpec.laguerre(1), Curve.I, 1)
    t = recurrence_4j1(spec, 3)
    assert set(t.nonzero()) <= set(range(-2, 3))
    assert t.get(2) == 1
    spec2 = validate(FamilySpec.laguerre(1), Curve.I, 2)
    t2 = recurrence_4j1(spec2, 5)
    assert len(t2.entries) == 9 and t2.get(4) == 1
    with pytest.raises(InvalidParameter):
        recurrence_4j1(validate(FamilySpec.hermite(), Curve.III, 2), 0)


@pytest.mark.parametrize("spec", [s for s in ALL if s.rho is not Curve.III], ids=lambda s: s.label())
def test_four_j_plus_one_band(spec):
    for n in range(13):
        t = recurrence_4j1(spec, n)
        assert t.kind is TableKind.FOUR_J_PLUS_1
        assert set(t.entries) <= set(range(-2 * spec.j, 2 * spec.j + 1))
        assert t.get(2 * spec.j) == 1


# --- lemma 2 and conventions ---------------------------------------------------------


def test_lemma2_hermite():
    spec = validate(FamilySpec.hermite(), Curve.III, 2)
    alpha, beta = lemma2_constants(spec, CLOSED)
    top = xop_poly(spec, 3)
    assert alpha * top + beta * ONE == Poly([0, F(3, 2), 0, 1])
    assert alpha == 1


def test_lemma2_jacobi():
    a = F(3, 2)
    spec = validate(FamilySpec.jacobi(a, a), Curve.III, 1, require_regular=False)
    assert lemma2_constants(spec, CLOSED) == (1, 0)


@pytest.mark.parametrize("spec", [s for s in ALL if s.rho is Curve.III], ids=lambda s: s.label())
def test_lemma2_conventions_differ_by_shift(spec):
    a_raw, b_raw = lemma2_constants(spec, RAW)
    m = multiplier(spec)
    if m.closed is None:
        return
    a_cl, b_cl = lemma2_constants(spec, CLOSED)
    assert a_raw == a_cl
    assert b_cl - b_raw == m.shift


def test_lemma2_needs_type_three():
    with pytest.raises(InvalidParameter):
        lemma2_constants(validate(FamilySpec.laguerre(1), Curve.I, 1))


def test_convention_shift_examples():
    a = 1
    spec = validate(FamilySpec.laguerre(a), Curve.I, 1)
    m = multiplier(spec)
    assert convention_shift_check(spec, 3)
    assert m.shift == a * (a + 1) - m.raw.coeff(0)
    raw, closed = recurrence_2j3(spec, 3, RAW), recurrence_2j3(spec, 3, CLOSED)
    assert {l for l in raw.entries if raw.get(l) != closed.get(l)} == {0}
    herm = validate(FamilySpec.hermite(), Curve.III, 2)
    assert multiplier(herm).shift == 0
    assert recurrence_2j3(herm, 5, RAW).entries == recurrence_2j3(herm, 5, CLOSED).entries


@pytest.mark.parametrize("spec", ALL, ids=IDS)
def test_convention_shift(spec):
    for n in spec.degrees.members(10):
        assert convention_shift_check(spec, n)


# --- j = 0 ------------------------------------------------------------------------


@pytest.mark.parametrize("fam", regular_families(), ids=lambda f: f.label())
def test_jzero_is_three_term(fam):
    for n in range(13):
        assert jzero_matches(fam, n)
    assert recurrence_classical(fam, 0).entries.keys() == {1, 0}


# --- serialisation -----------------------------------------------------------------


def test_json_shape():
    t = recurrence_2j3(validate(FamilySpec.laguerre(3), Curve.II, 1), 2, CLOSED)
    d = json.loads(t.to_json())
    assert d["family"] == "laguerre" and d["type"] == "II" and d["j"] == 1
    assert d["params"] == {"a": "3"} and d["n"] == 2 and d["multiplier"] == "closed"
    assert d["multiplier_poly"] == ["6", "4", "1"]
    assert {k: v for k, v in d["coeffs"].items() if v != "0"} == {
        "2": "1", "1": "20", "0": "104", "-1": "120", "-2": "20"
    }


@given(
    st.sampled_from([s for s in ALL if s.j <= 2]),
    st.integers(min_value=0, max_value=8),
    st.sampled_from([RAW, CLOSED]),
)
def test_json_round_trip(spec, n, conv):
    if conv == CLOSED and spec.multiplier_closed is None:
        conv = RAW
    t = recurrence_2j3(spec, n, conv)
    back = CoeffTable.from_json(t.to_json())
    assert back == t
    assert family_of(back) == spec.fam


def test_csv_and_latex():
    t = recurrence_2j3(validate(FamilySpec.hermite(), Curve.III, 2), 4, CLOSED)
    text = tables_to_csv([t])
    lines = text.strip().splitlines()
    assert lines[0] == "family,type,j,params,n,shift,coeff"
    assert lines[1] == "hermite,III,2,,4,3,1"
    tex = t.to_latex()
    assert tex.startswith("\\begin{tabular}") and tex.rstrip().endswith("\\end{tabular}")
    assert "$+1$ & $6$ \\\\" in tex
