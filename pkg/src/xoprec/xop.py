"""Exceptional orthogonal polynomials obtained by one Darboux step.

``validate`` turns a (family, type, j) triple into an immutable
:class:`XopSpec`. ``xop_poly`` evaluates the explicit per-family formulas
(all monic); ``apply_darboux`` is the generic first-order operator built
from the gauge log-derivative and serves as the independent second route.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .classical import (
    Curve,
    FamilySpec,
    Kind,
    eta_gamma,
    monic,
    seed_polynomial,
    spectral_value,
    twisted_hermite,
)
from .errors import (
    DegenerateDivisor,
    DegenerateRecurrence,
    EigenvalueCollision,
    IdentityViolation,
    InvalidParameter,
    NonexistentCombination,
    NonPolynomialResult,
    SeedHasRootsInDomain,
)
from .ratpoly import ONE, X, Poly, RatFunc, compose_affine, count_roots_closed

PRINTED = "printed"
CORRECTED = "corrected"
ADOPTED_JACOBI_III_PI = CORRECTED
"""Type-III Jacobi decoupling factor in use; see :func:`decoupling_factor`."""

DEFAULT_COLLISION_RANGE = 32


class ExcludedDegree(Poly):
    """The zero polynomial returned for a degree outside the degree set.

    Compares equal to ``Poly()`` but is distinguishable with ``isinstance``
    or :attr:`excluded`, so an excluded degree is never confused with an
    expression that happened to cancel.
    """

    excluded = True

    def __repr__(self) -> str:
        return "EXCLUDED"


EXCLUDED = ExcludedDegree()
Poly.excluded = False


@dataclass(frozen=True)
class DegreeSet:
    rho: Curve
    j: int

    def __contains__(self, n: int) -> bool:
        if n < 0:
            return False
        return self.rho is not Curve.III or n == 0 or n >= self.j + 1

    def degree_of(self, n: int) -> int:
        if n not in self:
            raise ValueError(f"{n} is not in the degree set")
        return n if self.rho is Curve.III else n + self.j

    def index_of_degree(self, d: int) -> int | None:
        """Index whose polynomial has degree ``d`` (``None`` in a gap)."""
        n = d if self.rho is Curve.III else d - self.j
        return n if n in self else None

    def members(self, upto: int) -> list[int]:
        return [n for n in range(upto + 1) if n in self]

    def gap(self) -> list[int]:
        return list(range(1, self.j + 1)) if self.rho is Curve.III else []


@dataclass(frozen=True)
class XopWeight:
    family: FamilySpec
    denominator: Poly
    numerator_extra: Poly


@dataclass(frozen=True)
class XopSpec:
    fam: FamilySpec
    rho: Curve
    j: int
    seed: Poly
    eta: RatFunc
    decouple: Poly
    a_rho: Poly
    multiplier_closed: Poly | None
    regular: bool
    pi_variant: str = CORRECTED
    irregular_reason: str = field(default="", compare=False)

    @property
    def degrees(self) -> DegreeSet:
        return DegreeSet(self.rho, self.j)

    def label(self) -> str:
        return f"X{self.j}-{self.fam.label()} type {self.rho.value}"

    def describe(self) -> dict:
        return {
            "family": self.fam.kind.value,
            "type": self.rho.value,
            "j": self.j,
            "params": self.fam.params_str(),
        }


# ---------------------------------------------------------------------------
# Per-family tables
# ---------------------------------------------------------------------------

def _formal(kind: Kind, a, b=None) -> FamilySpec:
    return FamilySpec(kind, a, b)


def decoupling_factor(fam: FamilySpec, rho: Curve, j: int, pi_variant: str = CORRECTED) -> Poly:
    """The normalisation factor ``pi = A_rho * p``.

    For type-III Jacobi the printed factor is ``(1-x)^2 J``; the factor that
    makes the Darboux image polynomial (and the weight orthogonal) is
    ``(1-x^2) J``. Both are available; ``pi_variant`` picks one.
    """
    p = seed_polynomial(fam, rho, j)
    if fam.kind is Kind.HERMITE:
        return p
    if fam.kind is Kind.LAGUERRE:
        return p if rho is Curve.I else X * p
    if rho is Curve.I:
        return Poly([1, 1]) * p
    if rho is Curve.II:
        return Poly([1, -1]) * p
    if pi_variant == PRINTED:
        return Poly([1, -1]) ** 2 * p
    if pi_variant != CORRECTED:
        raise ValueError(f"unknown decoupling variant {pi_variant!r}")
    return Poly([1, 0, -1]) * p


def closed_multiplier(fam: FamilySpec, rho: Curve, j: int) -> Poly:
    """Monic closed form of ``(j+1) * integral(p)`` from the explicit tables."""
    if fam.kind is Kind.HERMITE:
        return twisted_hermite(j + 1)
    sign = (-1) ** (j + 1)
    if fam.kind is Kind.LAGUERRE:
        a = fam.a
        if rho is Curve.I:
            return sign * compose_affine(monic(_formal(Kind.LAGUERRE, a - 1), j + 1), -1)
        if rho is Curve.II:
            return monic(_formal(Kind.LAGUERRE, -a - 1), j + 1)
        return sign * compose_affine(monic(_formal(Kind.LAGUERRE, -a - 1), j + 1), -1)
    a, b = fam.a, fam.b
    pa, pb = {
        Curve.I: (a - 1, -b - 1),
        Curve.II: (-a - 1, b - 1),
        Curve.III: (-a - 1, -b - 1),
    }[rho]
    return monic(_formal(Kind.JACOBI, pa, pb), j + 1)


def critical_degree(fam: FamilySpec, rho: Curve, j: int) -> Fraction | None:
    """Root in n of the explicit formula's divisor (``None`` if it has none)."""
    if fam.kind is Kind.LAGUERRE and rho is Curve.II:
        return j - fam.a
    if fam.kind is Kind.JACOBI:
        if rho is Curve.I:
            return j - fam.b
        if rho is Curve.II:
            return j - fam.a
        return 2 * j + 1 - fam.a - fam.b
    return None


def _uses_divisor(rho: Curve, j: int, n: int) -> bool:
    # type III defines P^_0 = 1 directly, so only n >= j+1 go through the formula
    return n >= j + 1 if rho is Curve.III else n >= 0


def _divisor(fam: FamilySpec, rho: Curve, j: int, n: int) -> Fraction:
    crit = critical_degree(fam, rho, j)
    if crit is None:
        return Fraction(1)
    if fam.kind is Kind.JACOBI and rho is Curve.II:
        return crit - n
    return n - crit


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate(
    fam: FamilySpec,
    rho,
    j: int,
    *,
    require_regular: bool = True,
    pi_variant: str | None = None,
    collision_range: int = DEFAULT_COLLISION_RANGE,
) -> XopSpec:
    """Check a Darboux parameter and build its :class:`XopSpec`.

    Algebraic failures always raise. Weight regularity (seed free of roots
    on the closed domain, integrable transformed weight) is recorded in
    ``spec.regular`` and only raises when ``require_regular`` is set; the
    recurrence identities are polynomial identities and stay meaningful for
    irregular seeds.
    """
    rho = Curve(rho)
    if rho is Curve.EMPTY:
        raise NonexistentCombination("type must be one of I, II, III")
    if not isinstance(j, int) or j < 1:
        raise InvalidParameter(f"j must be a positive integer, got {j!r}")
    fam.check_integrable()
    if fam.kind is Kind.HERMITE:
        if rho is not Curve.III:
            raise NonexistentCombination(
                f"there are no type-{rho.value} exceptional Hermite polynomials",
                family="hermite", type=rho.value, j=j,
            )
        if j % 2:
            raise NonexistentCombination(
                "type-III exceptional Hermite polynomials need even j", j=j
            )
    if pi_variant is None:
        pi_variant = ADOPTED_JACOBI_III_PI
    try:
        seed = seed_polynomial(fam, rho, j)
    except DegenerateRecurrence as exc:
        raise InvalidParameter(f"seed polynomial undefined: {exc}", j=j) from exc
    if seed.degree != j:
        raise InvalidParameter(f"seed polynomial has degree {seed.degree}, expected {j}")

    crit = critical_degree(fam, rho, j)
    if crit is not None and crit.denominator == 1 and _uses_divisor(rho, j, int(crit)):
        raise DegenerateDivisor(
            f"explicit formula divides by zero at n={int(crit)} for {fam.label()} "
            f"type {rho.value}, j={j}",
            n=int(crit),
        )

    _check_collisions(fam, rho, j, collision_range)

    eta = eta_gamma(fam, rho)
    decouple = decoupling_factor(fam, rho, j, pi_variant)
    a_rho = decouple.exact_div(seed)
    try:
        closed = closed_multiplier(fam, rho, j)
    except DegenerateRecurrence:
        closed = None

    reason = _irregularity(fam, rho, seed, a_rho)
    if reason and require_regular:
        raise SeedHasRootsInDomain(reason, family=fam.label(), type=rho.value, j=j)
    return XopSpec(
        fam=fam, rho=rho, j=j, seed=seed, eta=eta, decouple=decouple, a_rho=a_rho,
        multiplier_closed=closed, regular=not reason, pi_variant=pi_variant,
        irregular_reason=reason,
    )


def _check_collisions(fam: FamilySpec, rho: Curve, j: int, upto: int) -> None:
    seed_val = spectral_value(fam, rho, j)
    seen: dict[Fraction, int] = {}
    for m in range(upto + 1):
        lam = spectral_value(fam, Curve.EMPTY, m)
        if lam == seed_val:
            raise EigenvalueCollision(
                f"seed eigenvalue {seed_val} equals that of P_{m}", m=m, value=seed_val
            )
        if lam in seen:
            raise EigenvalueCollision(
                f"P_{seen[lam]} and P_{m} share eigenvalue {lam}", value=lam
            )
        seen[lam] = m


def _irregularity(fam: FamilySpec, rho: Curve, seed: Poly, a_rho: Poly) -> str:
    dom = fam.domain
    roots = count_roots_closed(seed, dom.lo, dom.hi)
    if roots:
        return f"seed {seed} has {roots} root(s) in the closed domain {dom}"
    shifted = effective_parameters(fam, a_rho)
    if shifted is None:
        return f"A_rho = {a_rho} is not a product of the weight's endpoint factors"
    if any(v <= -1 for v in shifted.values()):
        return f"transformed weight is not integrable (exponents {shifted})"
    return ""


def effective_parameters(fam: FamilySpec, a_rho: Poly) -> dict[str, Fraction] | None:
    """Exponents of ``A w / A_rho^2`` read as a classical weight.

    Returns ``None`` when ``A_rho`` is not (a constant times) a product of the
    endpoint factors ``x`` (Laguerre) or ``1 -+ x`` (Jacobi).
    """
    if fam.kind is Kind.HERMITE:
        return {} if a_rho.degree == 0 else None
    if fam.kind is Kind.LAGUERRE:
        k, rest = _strip_factor(a_rho, X)
        return {"a": fam.a + 1 - 2 * k} if rest.degree == 0 else None
    k1, rest = _strip_factor(a_rho, Poly([1, -1]))
    k2, rest = _strip_factor(rest, Poly([1, 1]))
    if rest.degree != 0:
        return None
    return {"a": fam.a + 1 - 2 * k1, "b": fam.b + 1 - 2 * k2}


def _strip_factor(p: Poly, f: Poly) -> tuple[int, Poly]:
    k = 0
    while p.degree >= 1:
        q, r = divmod(p, f)
        if not r.is_zero():
            break
        p, k = q, k + 1
    return k, p


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def degree_set(spec: XopSpec) -> DegreeSet:
    return spec.degrees


def xop_poly(spec: XopSpec, n: int) -> Poly:
    """Monic ``P^(rho,j)_n`` from the explicit per-family formula.

    Returns :data:`EXCLUDED` for degrees outside the degree set.
    """
    if n not in spec.degrees:
        return EXCLUDED
    return _xop_poly(spec, n)


@lru_cache(maxsize=8192)
def _xop_poly(spec: XopSpec, n: int) -> Poly:
    fam, rho, j = spec.fam, spec.rho, spec.j
    if rho is Curve.III and n == 0:
        return ONE
    m = n - j - 1 if rho is Curve.III else n
    P = monic(fam, m)
    dP = P.derivative()
    p = spec.seed
    dp = p.derivative()
    if fam.kind is Kind.HERMITE:
        out = Fraction(-1, 2) * (p * (dP - Poly([0, 2]) * P) - dp * P)
    elif fam.kind is Kind.LAGUERRE:
        a = fam.a
        if rho is Curve.I:
            out = (-1) ** (j + 1) * (p * (dP - P) - dp * P)
        elif rho is Curve.II:
            out = p * (X * dP + a * P) - X * dp * P
        else:
            out = (-1) ** (j + 1) * (p * (X * dP + Poly([a, -1]) * P) - X * dp * P)
    else:
        a, b = fam.a, fam.b
        if rho is Curve.I:
            opx = Poly([1, 1])
            out = p * (opx * dP + b * P) - opx * dp * P
        elif rho is Curve.II:
            omx = Poly([1, -1])
            out = p * (omx * dP - a * P) - omx * dp * P
        else:
            out = p * (Poly([-1, 0, 1]) * dP + Poly([a - b, a + b]) * P) + Poly([1, 0, -1]) * dp * P
    div = _divisor(fam, rho, j, n)
    if div == 0:
        raise DegenerateDivisor(f"divisor vanishes at n={n}", n=n)
    out = out / div
    want = spec.degrees.degree_of(n)
    if out.degree != want or out.lc != 1:
        raise IdentityViolation(
            f"{spec.label()} n={n}: explicit formula gave degree {out.degree}, "
            f"leading coefficient {out.lc}; expected monic degree {want}",
        )
    return out


def apply_darboux(spec: XopSpec, target: Poly, use_eta: RatFunc | None = None) -> Poly:
    """``A_rho * (p * t' - (eta * p + p') * t)``, asserted to be a polynomial."""
    eta = spec.eta if use_eta is None else use_eta
    p, a_rho = spec.seed, spec.a_rho
    expr = a_rho * (RatFunc(p * target.derivative()) - (eta * p + p.derivative()) * target)
    if not expr.is_polynomial():
        raise NonPolynomialResult(
            f"Darboux image is not polynomial for {spec.label()} "
            f"(decoupling variant {spec.pi_variant})",
            denominator=expr.den.to_strings(),
        )
    return expr.to_poly()


def darboux_xop(spec: XopSpec, n: int) -> Poly:
    """Same family as :func:`xop_poly`, through the generic operator."""
    if n not in spec.degrees:
        return EXCLUDED
    if spec.rho is Curve.III and n == 0:
        return ONE
    m = n - spec.j - 1 if spec.rho is Curve.III else n
    return apply_darboux(spec, monic(spec.fam, m)).monic()


def weight_data(spec: XopSpec) -> XopWeight:
    return XopWeight(spec.fam, (spec.a_rho * spec.seed) ** 2, spec.fam.A)


def jacobi_reflection_holds(a, j: int, n: int) -> bool:
    """``J^(II,j)_n(x; a, a) == (-1)^(n+j) J^(I,j)_n(-x; a, a)``."""
    fam = FamilySpec.jacobi(a, a)
    s1 = validate(fam, Curve.I, j, require_regular=False)
    s2 = validate(fam, Curve.II, j, require_regular=False)
    lhs = xop_poly(s2, n)
    rhs = (-1) ** (n + j) * compose_affine(xop_poly(s1, n), -1)
    return lhs == rhs
