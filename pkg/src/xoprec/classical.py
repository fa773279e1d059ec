"""Monic Hermite, Laguerre and Jacobi polynomials and their Bochner data.

Every family is described by a :class:`FamilySpec` carrying the operator
coefficients ``A`` and ``B`` of ``A p'' + B p' = lambda p``, the weight
log-derivative and the monic three-term recurrence. Two independent
generators are provided (recurrence and Rodrigues expansion) so that each
can police the other.

Families with negative parameters (``L^{(-a)}``, ``J^{(-a,-b)}``) are needed
as seed polynomials even though their weights are not integrable; build them
with ``formal=True``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import (
    DegenerateRecurrence,
    GaugeError,
    IdentityViolation,
    InvalidParameter,
    NonexistentCombination,
)
from .ratpoly import (
    INF,
    ONE,
    X,
    Poly,
    RatFunc,
    ScalarLike,
    as_scalar,
    compose_affine,
    poly_gcd,
    residue_at_infinity,
    residue_simple,
)


class Kind(str, enum.Enum):
    HERMITE = "hermite"
    LAGUERRE = "laguerre"
    JACOBI = "jacobi"


class Curve(str, enum.Enum):
    """Contour label selecting a gauge factor (``EMPTY`` is the trivial one)."""

    EMPTY = "empty"
    I = "I"  # noqa: E741
    II = "II"
    III = "III"


@dataclass(frozen=True)
class Domain:
    lo: object
    hi: object
    lo_closed: bool
    hi_closed: bool

    def __str__(self) -> str:
        lb = "[" if self.lo_closed else "("
        rb = "]" if self.hi_closed else ")"
        return f"{lb}{self.lo}, {self.hi}{rb}"


@dataclass(frozen=True)
class FamilySpec:
    kind: Kind
    a: Fraction | None = None
    b: Fraction | None = None

    def __post_init__(self) -> None:
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        need = {Kind.HERMITE: 0, Kind.LAGUERRE: 1, Kind.JACOBI: 2}[kind]
        got = (self.a is not None) + (self.b is not None)
        if got != need or (need == 1 and self.a is None):
            raise InvalidParameter(f"{kind.value} takes {need} parameter(s)")
        if self.a is not None:
            object.__setattr__(self, "a", as_scalar(self.a))
        if self.b is not None:
            object.__setattr__(self, "b", as_scalar(self.b))

    # -- constructors ----------------------------------------------------
    @classmethod
    def hermite(cls) -> "FamilySpec":
        return cls(Kind.HERMITE)

    @classmethod
    def laguerre(cls, a: ScalarLike, formal: bool = False) -> "FamilySpec":
        fam = cls(Kind.LAGUERRE, as_scalar(a))
        if not formal:
            fam.check_integrable()
        return fam

    @classmethod
    def jacobi(cls, a: ScalarLike, b: ScalarLike, formal: bool = False) -> "FamilySpec":
        fam = cls(Kind.JACOBI, as_scalar(a), as_scalar(b))
        if not formal:
            fam.check_integrable()
        return fam

    @classmethod
    def from_params(cls, kind: str, a=None, b=None, formal: bool = False) -> "FamilySpec":
        kind = Kind(kind)
        if kind is Kind.HERMITE:
            if a is not None or b is not None:
                raise InvalidParameter("hermite takes no parameters")
            return cls.hermite()
        if kind is Kind.LAGUERRE:
            if a is None or b is not None:
                raise InvalidParameter("laguerre takes exactly one parameter a")
            return cls.laguerre(a, formal)
        if a is None or b is None:
            raise InvalidParameter("jacobi takes parameters a and b")
        return cls.jacobi(a, b, formal)

    # -- Bochner data ------------------------------------------------------
    @property
    def integrable(self) -> bool:
        return all(p > -1 for p in self.params().values())

    def check_integrable(self) -> None:
        if not self.integrable:
            raise InvalidParameter(
                f"{self.label()}: weight parameters must exceed -1", params=self.params_str()
            )

    def params(self) -> dict[str, Fraction]:
        out = {}
        if self.a is not None:
            out["a"] = self.a
        if self.b is not None:
            out["b"] = self.b
        return out

    def params_str(self) -> dict[str, str]:
        from .ratpoly import scalar_to_str

        return {k: scalar_to_str(v) for k, v in self.params().items()}

    def label(self) -> str:
        ps = ",".join(f"{k}={v}" for k, v in self.params_str().items())
        return f"{self.kind.value}({ps})" if ps else self.kind.value

    @property
    def A(self) -> Poly:
        if self.kind is Kind.HERMITE:
            return ONE
        if self.kind is Kind.LAGUERRE:
            return X
        return Poly([1, 0, -1])

    @property
    def B(self) -> Poly:
        if self.kind is Kind.HERMITE:
            return Poly([0, -2])
        if self.kind is Kind.LAGUERRE:
            return Poly([self.a + 1, -1])
        a, b = self.a, self.b
        return Poly([b - a, -(a + b + 2)])

    @property
    def domain(self) -> Domain:
        if self.kind is Kind.HERMITE:
            return Domain(-INF, INF, False, False)
        if self.kind is Kind.LAGUERRE:
            return Domain(Fraction(0), INF, True, False)
        return Domain(Fraction(-1), Fraction(1), True, True)

    @property
    def logw(self) -> RatFunc:
        """``w'/w`` as a reduced rational function."""
        if self.kind is Kind.HERMITE:
            return RatFunc(Poly([0, -2]))
        if self.kind is Kind.LAGUERRE:
            return RatFunc(Poly([self.a, -1]), X)
        return RatFunc(Poly([-self.a]), Poly([1, -1])) + RatFunc(Poly([self.b]), Poly([1, 1]))

    def three_term(self, n: int) -> tuple[Fraction, Fraction]:
        """Offset and coupling ``(A_n, B_n)`` of ``p_{n+1} = (x - A_n) p_n - B_n p_{n-1}``."""
        if n < 0:
            raise ValueError("three_term needs n >= 0")
        if self.kind is Kind.HERMITE:
            return Fraction(0), Fraction(n, 2)
        if self.kind is Kind.LAGUERRE:
            a = self.a
            return 2 * n + a + 1, n * (n + a)
        return _jacobi_three_term(self.a, self.b, n)

    def shifted(self) -> "FamilySpec":
        """The family of the derivatives ``P_n'``."""
        if self.kind is Kind.HERMITE:
            return self
        if self.kind is Kind.LAGUERRE:
            return FamilySpec(Kind.LAGUERRE, self.a + 1)
        return FamilySpec(Kind.JACOBI, self.a + 1, self.b + 1)


def _jacobi_three_term(a: Fraction, b: Fraction, n: int) -> tuple[Fraction, Fraction]:
    s = a + b

    def div(num, den):
        if den == 0:
            raise DegenerateRecurrence(
                f"Jacobi recurrence denominator vanishes at n={n}, a={a}, b={b}", n=n
            )
        return num / den

    if a == b:
        # symmetric case: taken along the diagonal, which keeps e.g. a = b = -1 finite
        if n == 0:
            return Fraction(0), Fraction(0)
        if n == 1:
            return Fraction(0), div(Fraction(1), 2 * a + 3)
        return Fraction(0), div(n * (n + 2 * a), (2 * n + s + 1) * (2 * n + s - 1))
    if n == 0:
        return div(b - a, s + 2), Fraction(0)
    off = div((b - a) * (b + a), (2 * n + s) * (2 * n + s + 2))
    if n == 1:
        # (1 + a + b) cancels between numerator and denominator
        cpl = div(4 * (1 + a) * (1 + b), (2 + s) ** 2 * (3 + s))
    else:
        cpl = div(
            4 * n * (n + a) * (n + b) * (n + s),
            (2 * n + s) ** 2 * (2 * n + s + 1) * (2 * n + s - 1),
        )
    return off, cpl


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def monic_by_recurrence(fam: FamilySpec, n: int) -> Poly:
    if n < 0:
        raise ValueError("degree must be non-negative")
    prev, cur = Poly(), ONE
    for k in range(n):
        off, cpl = fam.three_term(k)
        prev, cur = cur, (X - off) * cur - cpl * prev
    return cur


def monic_by_rodrigues(fam: FamilySpec, n: int) -> Poly:
    """Expand the Rodrigues formula with the weight kept as a symbolic prefactor.

    ``(d/dx)^n [weight * poly]`` is carried as ``prefactor * q`` where the
    prefactor exponents drop by one per derivative; after ``n`` steps they
    telescope back to the weight and ``q`` is the polynomial.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    q = ONE
    if fam.kind is Kind.HERMITE:
        for _ in range(n):
            q = q.derivative() - Poly([0, 2]) * q
        out = q * Fraction((-1) ** n, 2**n)
    elif fam.kind is Kind.LAGUERRE:
        alpha = n + fam.a
        for _ in range(n):
            q = alpha * q - X * q + X * q.derivative()
            alpha -= 1
        assert alpha == fam.a
        out = q * (-1) ** n
    else:
        a, b = fam.a, fam.b
        alpha, beta = n + a, n + b
        one_plus, one_minus = Poly([1, 1]), Poly([1, -1])
        for _ in range(n):
            q = (-alpha) * one_plus * q + beta * one_minus * q + Poly([1, 0, -1]) * q.derivative()
            alpha -= 1
            beta -= 1
        assert (alpha, beta) == (a, b)
        norm = _pochhammer(n + a + b + 1, n)
        if norm == 0:
            raise DegenerateRecurrence(
                f"Rodrigues normalisation (n+a+b+1)_n vanishes at n={n}, a={a}, b={b}", n=n
            )
        out = q * Fraction((-1) ** n) / norm
    if out.degree != n or out.lc != 1:
        raise IdentityViolation(
            f"Rodrigues expansion for {fam.label()} n={n} is not monic of degree n",
            poly=out.to_strings(),
        )
    return out


def _pochhammer(x, k: int):
    out = Fraction(1)
    for i in range(k):
        out *= x + i
    return out


@lru_cache(maxsize=4096)
def monic(fam: FamilySpec, n: int) -> Poly:
    """Canonical monic polynomial: recurrence, with Rodrigues where it degenerates.

    The three-term recurrence has genuine poles at some negative parameters
    (e.g. ``J_1^{(a-1,-a-1)}`` does not exist while ``J_2`` does); the Rodrigues
    expansion stays finite there.
    """
    try:
        return monic_by_recurrence(fam, n)
    except DegenerateRecurrence:
        return monic_by_rodrigues(fam, n)


@lru_cache(maxsize=256)
def twisted_hermite(n: int) -> Poly:
    """Real polynomial ``i^{-n} H_n(i x)``: ``h_{k+1} = x h_k + (k/2) h_{k-1}``."""
    prev, cur = Poly(), ONE
    for k in range(n):
        prev, cur = cur, X * cur + Fraction(k, 2) * prev
    return cur


# ---------------------------------------------------------------------------
# Seeds and gauge data
# ---------------------------------------------------------------------------

def _rho(rho) -> Curve:
    c = Curve(rho)
    if c is Curve.EMPTY:
        raise NonexistentCombination("the trivial curve does not define a Darboux seed")
    return c


def seed_polynomial(fam: FamilySpec, rho, j: int) -> Poly:
    """Polynomial part of the seed quasi-polynomial for curve ``rho``."""
    rho = _rho(rho)
    if j < 1:
        raise ValueError("seed degree j must be >= 1")
    if fam.kind is Kind.HERMITE:
        if rho is not Curve.III:
            raise NonexistentCombination(f"no type-{rho.value} exceptional Hermite polynomials")
        return twisted_hermite(j)
    if fam.kind is Kind.LAGUERRE:
        a = fam.a
        if rho is Curve.I:
            return compose_affine(monic(FamilySpec(Kind.LAGUERRE, a), j), -1)
        if rho is Curve.II:
            return monic(FamilySpec(Kind.LAGUERRE, -a), j)
        return compose_affine(monic(FamilySpec(Kind.LAGUERRE, -a), j), -1)
    a, b = fam.a, fam.b
    pa, pb = {Curve.I: (a, -b), Curve.II: (-a, b), Curve.III: (-a, -b)}[rho]
    return monic(FamilySpec(Kind.JACOBI, pa, pb), j)


CURVE_POINTS = {
    # Point enclosed by each single-point curve, fixed by the explicit seeds:
    # the Laguerre e^x gauge is the residue at infinity, x^-a the one at 0.
    Kind.LAGUERRE: {Curve.I: INF, Curve.II: Fraction(0)},
    Kind.JACOBI: {Curve.I: Fraction(-1), Curve.II: Fraction(1)},
}


def eta_gamma(fam: FamilySpec, curve) -> RatFunc:
    """Gauge log-derivative ``xi'/xi`` for ``curve`` as a rational function of x."""
    curve = Curve(curve)
    A, B = fam.A, fam.B
    if curve is Curve.EMPTY:
        return RatFunc(Poly())
    if curve is Curve.III:
        return RatFunc(A.derivative() - B, A)
    if A.degree < 1:
        raise NonexistentCombination(
            f"curve {curve.value} needs deg A >= 1 ({fam.label()} has deg A = {A.degree})"
        )
    numer = B - A.derivative()
    if poly_gcd(numer, A).degree > 0:
        raise GaugeError(f"B - A' shares a root with A for {fam.label()}")
    g = RatFunc(numer, A)
    point = CURVE_POINTS[fam.kind][curve]
    if point == INF:
        # g is bounded at infinity, so g(z)/(z-x) and g(z)/z share the 1/z term.
        return RatFunc(Poly([residue_at_infinity(g / X)]))
    c = residue_simple(g, point)
    return RatFunc(Poly([c]), Poly([point, -1]))


def eigenvalue(fam: FamilySpec, curve, n: int) -> Fraction:
    """Leading-order eigenvalue of ``A p'' + (B + 2 A eta) p' = lambda p``."""
    drift = _drift(fam, curve)
    return n * (n - 1) * fam.A.coeff(2) + n * drift.coeff(1)


def _drift(fam: FamilySpec, curve) -> Poly:
    a_eta = fam.A * eta_gamma(fam, curve)
    if not a_eta.is_polynomial():
        raise GaugeError(f"A*eta is not a polynomial for {fam.label()} curve {Curve(curve).value}")
    return fam.B + 2 * a_eta.to_poly()


def gauge_constant(fam: FamilySpec, curve) -> Fraction:
    """Zeroth-order term ``A(eta' + eta^2) + B eta`` of the gauged operator."""
    eta = eta_gamma(fam, curve)
    c = fam.A * (eta.derivative() + eta * eta) + fam.B * eta
    if not (c.is_polynomial() and c.num.degree <= 0):
        raise GaugeError(f"gauged operator leaves the Bochner class for {fam.label()}")
    return c.num.coeff(0)


def spectral_value(fam: FamilySpec, curve, n: int) -> Fraction:
    """Eigenvalue of the full quasi-polynomial ``xi * p`` under ``A d^2 + B d``."""
    return eigenvalue(fam, curve, n) + gauge_constant(fam, curve)


def norm_ratio(fam: FamilySpec, n: int) -> Fraction:
    """``h_n / h_0`` for the monic family."""
    out = Fraction(1)
    for k in range(1, n + 1):
        cpl = fam.three_term(k)[1]
        if cpl <= 0:
            raise InvalidParameter(
                f"non-positive coupling B_{k} = {cpl} for {fam.label()}", k=k
            )
        out *= cpl
    return out


# ---------------------------------------------------------------------------
# Identities
# ---------------------------------------------------------------------------

def derivative_shift_check(fam: FamilySpec, n: int) -> bool:
    if n < 1:
        raise ValueError("derivative_shift_check needs n >= 1")
    return monic(fam, n).derivative() == n * monic(fam.shifted(), n - 1)


def bochner_holds(fam: FamilySpec, n: int) -> bool:
    p = monic(fam, n)
    lam = eigenvalue(fam, Curve.EMPTY, n)
    return fam.A * p.derivative().derivative() + fam.B * p.derivative() == lam * p


def seed_eigen_holds(fam: FamilySpec, rho, j: int) -> bool:
    p = seed_polynomial(fam, rho, j)
    lam = eigenvalue(fam, rho, j)
    return fam.A * p.derivative().derivative() + _drift(fam, rho) * p.derivative() == lam * p


def pearson_holds(fam: FamilySpec) -> bool:
    A = fam.A
    return A * fam.logw + A.derivative() == RatFunc(fam.B)


def rodrigues_agrees(fam: FamilySpec, n: int) -> bool:
    return monic_by_recurrence(fam, n) == monic_by_rodrigues(fam, n)

