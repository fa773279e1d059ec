"""Numeric orthogonality checks with high-precision Gauss rules.

Gauss nodes come from double-precision eigenvalues of the Jacobi matrix
(scipy) refined by Newton's method on the monic recurrence in gmpy2. The
exceptional weight ``A w / (A_rho p)^2`` is folded into a classical weight
with shifted parameters times ``1 / (c p)^2``, so one classical rule per
shifted family serves every degree.
"""

from __future__ import annotations

import logging
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import numpy as np
from scipy.linalg import eigh_tridiagonal

from .classical import Curve, FamilySpec, Kind
from .errors import InvalidParameter, NonConvergence, NonPolynomialResult, XopError
from .ratpoly import BigReal, Poly, to_bigreal
from .xop import (
    ADOPTED_JACOBI_III_PI,
    CORRECTED,
    PRINTED,
    XopSpec,
    darboux_xop,
    effective_parameters,
    validate,
    xop_poly,
)

log = logging.getLogger(__name__)

DEFAULT_PRECISION = 256
DEFAULT_ORDER_START = 64
DEFAULT_ORDER_CAP = 4096
GUARD_BITS = 32


def default_tolerance(precision: int):
    """Stopping threshold for order doubling.

    ``2^(-precision/2)`` is out of reach below the order cap for the Hermite
    seeds (their complex zeros sit close to the real axis, so the error only
    decays like ``exp(-c sqrt(N))``); a quarter of the working bits still
    resolves off-diagonal entries many orders below any useful threshold.
    """
    return gmpy2.exp2(-(precision // 4))


@dataclass(frozen=True)
class QuadRule:
    family: FamilySpec
    order: int
    precision: int
    nodes: tuple[BigReal, ...]
    weights: tuple[BigReal, ...]

    def integrate(self, values) -> BigReal:
        with gmpy2.context(precision=self.precision):
            return gmpy2.fsum(w * v for w, v in zip(self.weights, values))


def total_mass(fam: FamilySpec, precision: int) -> BigReal:
    """Integral of the classical weight over its domain."""
    with gmpy2.context(precision=precision + GUARD_BITS):
        if fam.kind is Kind.HERMITE:
            out = gmpy2.sqrt(gmpy2.const_pi())
        elif fam.kind is Kind.LAGUERRE:
            out = gmpy2.gamma(to_bigreal(fam.a + 1, precision + GUARD_BITS))
        else:
            a = to_bigreal(fam.a, precision + GUARD_BITS)
            b = to_bigreal(fam.b, precision + GUARD_BITS)
            out = (
                gmpy2.exp2(a + b + 1) * gmpy2.gamma(a + 1) * gmpy2.gamma(b + 1)
                / gmpy2.gamma(a + b + 2)
            )
    return gmpy2.mpfr(out, precision)


_RULES: dict[tuple, QuadRule] = {}
_RULES_LOCK = threading.Lock()


def build_rule(fam: FamilySpec, order: int, precision: int = DEFAULT_PRECISION) -> QuadRule:
    """Gauss rule with ``order`` nodes for the classical weight of ``fam`` (cached)."""
    if order < 1:
        raise ValueError("order must be at least 1")
    if not fam.integrable:
        raise InvalidParameter(
            f"{fam.label()}: weight parameters must exceed -1 for quadrature",
            params=fam.params_str(),
        )
    key = (fam, order, precision)
    with _RULES_LOCK:
        rule = _RULES.get(key)
    if rule is None:
        rule = _build_rule(fam, order, precision)
        with _RULES_LOCK:
            _RULES.setdefault(key, rule)
    return rule


def clear_rule_cache() -> None:
    with _RULES_LOCK:
        _RULES.clear()


def _build_rule(fam: FamilySpec, order: int, precision: int) -> QuadRule:
    coeffs = [fam.three_term(k) for k in range(order)]
    diag = np.array([float(a) for a, _ in coeffs])
    off = np.sqrt(np.array([float(b) for _, b in coeffs[1:]]))
    guess = eigh_tridiagonal(diag, off, eigvals_only=True) if order > 1 else diag
    # symmetric weight: refine the non-negative half and mirror it
    symmetric = all(a == 0 for a, _ in coeffs)
    if symmetric:
        guess = np.sort(guess)[order // 2:]
        if order % 2:
            guess[0] = 0.0
    work = precision + GUARD_BITS
    struct = _structure(fam, order)
    x = _newton(fam, guess, coeffs, struct, precision)
    with gmpy2.context(precision=work):
        A = [to_bigreal(a, work) for a, _ in coeffs]
        B = [to_bigreal(b, work) for _, b in coeffs]
        p, prev = _evaluate(x, A, B)
        dp = _derivative(fam, x, p, prev, struct, work)
        scale = total_mass(fam, work)
        for b in B[1:]:
            scale *= b
        weights = list(scale / (prev * dp))
        nodes = list(x)
        if symmetric:
            lo = 1 if order % 2 else 0
            nodes = [-v for v in reversed(nodes[lo:])] + nodes
            weights = list(reversed(weights[lo:])) + weights
    nodes = tuple(gmpy2.mpfr(v, precision) for v in nodes)
    weights = tuple(gmpy2.mpfr(v, precision) for v in weights)
    return QuadRule(fam, order, precision, nodes, weights)


def _newton(fam: FamilySpec, guess: np.ndarray, coeffs: list, struct, precision: int) -> np.ndarray:
    """Refine double-precision zeros of ``p_N`` to ``precision`` bits.

    The first step runs at reduced precision. Convergence is quadratic, so a
    step below ``2^(-precision/2 - 24)`` leaves an iterate that is already
    accurate to the working precision.
    """
    work = precision + GUARD_BITS
    x = None
    for step_no in range(12):
        prec = min(work, 128) if step_no == 0 else work
        with gmpy2.context(precision=prec):
            if x is None:
                x = np.array([gmpy2.mpfr(float(v)) for v in guess], dtype=object)
            else:
                x = np.array([gmpy2.mpfr(v) for v in x], dtype=object)
            A = [to_bigreal(a, prec) for a, _ in coeffs]
            B = [to_bigreal(b, prec) for _, b in coeffs]
            p, prev = _evaluate(x, A, B)
            step = p / _derivative(fam, x, p, prev, struct, prec)
            x = x - step
            rel = max(abs(s) / max(abs(v), 1) for s, v in zip(step, x))
            if prec == work and rel < gmpy2.exp2(-(precision // 2) - 24):
                return x
    raise NonConvergence(f"Newton refinement of {len(guess)} Gauss nodes did not settle")


def _structure(fam: FamilySpec, order: int):
    """``(c1, c0, c2)`` with ``A p_N' = (c1 x + c0) p_N + c2 p_{N-1}`` for monic ``p_N``.

    ``c2`` is ``kappa_N B_N`` with ``B_N`` the next recurrence coefficient, which
    keeps removable cases such as ``a + b = -1`` finite.
    """
    n = order
    _, b_next = fam.three_term(n)
    if fam.kind is Kind.HERMITE:
        return Fraction(0), Fraction(0), 2 * b_next
    if fam.kind is Kind.LAGUERRE:
        return Fraction(0), Fraction(n), b_next
    a, b = fam.a, fam.b
    s = 2 * n + a + b
    return Fraction(-n), n * (a - b) / s, (s + 1) * b_next


def _evaluate(x: np.ndarray, A: list, B: list):
    """``p_N(x)`` and ``p_{N-1}(x)`` from the monic recurrence."""
    p0 = np.full(len(x), gmpy2.mpfr(0), dtype=object)
    p1 = np.full(len(x), gmpy2.mpfr(1), dtype=object)
    for a, b in zip(A, B):
        t = x - a if a else x
        p0, p1 = p1, t * p1 - b * p0
    return p1, p0


def _derivative(fam: FamilySpec, x: np.ndarray, p: np.ndarray, prev: np.ndarray, struct, prec: int):
    c1, c0, c2 = (to_bigreal(c, prec) for c in struct)
    rhs = (x * c1 + c0) * p + prev * c2 if c1 else p * c0 + prev * c2
    if fam.kind is Kind.HERMITE:
        return rhs
    if fam.kind is Kind.LAGUERRE:
        return rhs / x
    return rhs / ((1 - x) * (1 + x))


# ---------------------------------------------------------------------------
# Gram matrices
# ---------------------------------------------------------------------------

@dataclass
class GramReport:
    spec: XopSpec
    indices: list[int]
    matrix: list[list[BigReal]]
    offdiag_max: BigReal
    precision: int
    orders: list[int]
    deltas: list[BigReal]
    converged: bool
    tolerance: BigReal
    rule_family: FamilySpec | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def order(self) -> int:
        return self.orders[-1]

    def entry(self, n: int, m: int) -> BigReal:
        return self.matrix[self.indices.index(n)][self.indices.index(m)]

    def normalized(self) -> list[list[BigReal]]:
        return _normalize(self.matrix, self.precision)

    def to_dict(self) -> dict:
        digits = _digits(self.precision)
        fmt = lambda v: format(v, f".{digits}g")  # noqa: E731
        return {
            **self.spec.describe(),
            "pi_variant": self.spec.pi_variant,
            "precision": self.precision,
            "indices": self.indices,
            "orders": self.orders,
            "deltas": [fmt(d) for d in self.deltas],
            "tolerance": fmt(self.tolerance),
            "converged": self.converged,
            "offdiag_max": fmt(self.offdiag_max),
            "diagonal": [fmt(self.matrix[i][i]) for i in range(len(self.indices))],
            "matrix": [[fmt(v) for v in row] for row in self.matrix],
            "rule_family": self.rule_family.label() if self.rule_family else None,
            "notes": list(self.notes),
        }


def _digits(precision: int) -> int:
    return max(1, math.floor(precision * math.log10(2)))


def _normalize(matrix, precision):
    with gmpy2.context(precision=precision):
        diag = [gmpy2.sqrt(abs(matrix[i][i])) for i in range(len(matrix))]
        return [
            [matrix[i][k] / (diag[i] * diag[k]) for k in range(len(matrix))]
            for i in range(len(matrix))
        ]


def folded_weight(spec: XopSpec) -> tuple[FamilySpec, Fraction]:
    """Classical family ``F`` and constant ``c`` with ``A w / (A_rho p)^2 = w_F / (c p)^2``."""
    fam = spec.fam
    shifted = effective_parameters(fam, spec.a_rho)
    if shifted is None:
        raise InvalidParameter(f"A_rho = {spec.a_rho} does not fold into a classical weight")
    if fam.kind is Kind.HERMITE:
        rule_fam = fam
    elif fam.kind is Kind.LAGUERRE:
        rule_fam = FamilySpec(Kind.LAGUERRE, shifted["a"])
    else:
        rule_fam = FamilySpec(Kind.JACOBI, shifted["a"], shifted["b"])
    return rule_fam, spec.a_rho.lc


def gram_at_order(
    spec: XopSpec, indices: list[int], order: int, precision: int = DEFAULT_PRECISION
) -> list[list[BigReal]]:
    rule_fam, c = folded_weight(spec)
    rule = build_rule(rule_fam, order, precision)
    polys = [xop_poly(spec, n) for n in indices]
    return _gram_from_rule(rule, polys, spec.seed * c)


def classical_gram(fam: FamilySpec, nmax: int, order: int, precision: int = DEFAULT_PRECISION):
    """Gram matrix of the monic classical polynomials ``P_0..P_nmax``."""
    from .classical import monic

    rule = build_rule(fam, order, precision)
    return _gram_from_rule(rule, [monic(fam, n) for n in range(nmax + 1)], Poly([1]))


def _gram_from_rule(rule: QuadRule, polys: list[Poly], denom: Poly) -> list[list[BigReal]]:
    prec = rule.precision + GUARD_BITS
    with gmpy2.context(precision=prec):
        xs = rule.nodes
        dvals = [_horner(denom, x) for x in xs]
        f = [w / (d * d) for w, d in zip(rule.weights, dvals)]
        vals = [[_horner(p, x) for x in xs] for p in polys]
        k = len(polys)
        out = [[None] * k for _ in range(k)]
        for i in range(k):
            fi = [fv * v for fv, v in zip(f, vals[i])]
            for m in range(i, k):
                s = gmpy2.fsum(a * b for a, b in zip(fi, vals[m]))
                out[i][m] = out[m][i] = gmpy2.mpfr(s, rule.precision)
    return out


def _horner(p: Poly, x):
    acc = gmpy2.mpfr(0)
    for c in reversed(p.coeffs):
        acc = acc * x + gmpy2.mpq(c.numerator, c.denominator)
    return acc


def gram(
    spec: XopSpec,
    nmax: int = 8,
    order: int | None = None,
    precision: int = DEFAULT_PRECISION,
    *,
    order_start: int = DEFAULT_ORDER_START,
    order_cap: int = DEFAULT_ORDER_CAP,
    tol=None,
    raise_on_nonconvergence: bool = True,
) -> GramReport:
    """Gram matrix of ``P^_n`` (``n`` in the degree set, ``n <= nmax``).

    Doubles the order from ``order_start`` until successive normalised Gram
    matrices differ by less than ``tol`` (default ``2^(-precision/4)``). With
    ``order`` given, evaluates at ``order // 2`` and ``order`` only.
    """
    indices = spec.degrees.members(nmax)
    if tol is None:
        tol = default_tolerance(precision)
    tol = gmpy2.mpfr(tol)
    rule_fam, _ = folded_weight(spec)
    if order is not None:
        schedule = [max(1, order // 2), order]
    else:
        schedule = []
        k = order_start
        while k <= order_cap:
            schedule.append(k)
            k *= 2
        if not schedule:
            schedule = [order_cap]
    orders: list[int] = []
    deltas: list = []
    prev_norm = None
    matrix = None
    converged = False
    for k in schedule:
        matrix = gram_at_order(spec, indices, k, precision)
        norm = _normalize(matrix, precision)
        orders.append(k)
        if prev_norm is not None:
            delta = max(abs(a - b) for ra, rb in zip(norm, prev_norm) for a, b in zip(ra, rb))
            deltas.append(delta)
            log.debug("%s order %d delta %s", spec.label(), k, delta)
            if delta < tol:
                converged = True
                if order is None:
                    break
        prev_norm = norm
    offdiag = _offdiag_max(_normalize(matrix, precision))
    report = GramReport(
        spec=spec, indices=indices, matrix=matrix, offdiag_max=offdiag, precision=precision,
        orders=orders, deltas=deltas, converged=converged, tolerance=tol, rule_family=rule_fam,
    )
    if not converged and order is None and raise_on_nonconvergence:
        raise NonConvergence(
            f"{spec.label()}: Gram matrix not converged at order cap {order_cap}",
            report=report.to_dict(),
        )
    return report


def _offdiag_max(norm) -> BigReal:
    k = len(norm)
    vals = [abs(norm[i][m]) for i in range(k) for m in range(k) if i != m]
    return max(vals) if vals else gmpy2.mpfr(0)


def xop_norm(spec: XopSpec, n: int, order: int | None = None, precision: int = DEFAULT_PRECISION, **kw) -> BigReal:
    if n not in spec.degrees:
        raise ValueError(f"{n} is not in the degree set")
    report = gram(spec, nmax=n, order=order, precision=precision, **kw)
    return report.entry(n, n)


def pi_arbiter(fam: FamilySpec, j: int, nmax: int = 8, threshold: float = 1e-10, **quad) -> dict:
    """Compare both type-III Jacobi decoupling factors on the same seed.

    For each variant records whether the generic Darboux operator yields
    polynomials, whether the folded weight is integrable, and the Gram
    off-diagonal maximum when it is.
    """
    out: dict = {"adopted": ADOPTED_JACOBI_III_PI}
    for variant in (PRINTED, CORRECTED):
        entry: dict = {}
        try:
            spec = validate(fam, Curve.III, j, require_regular=False, pi_variant=variant)
        except XopError as exc:
            out[variant] = {"status": "fail", "reason": f"{type(exc).__name__}: {exc}"}
            continue
        entry["a_rho"] = spec.a_rho.to_strings()
        try:
            for n in spec.degrees.members(nmax):
                darboux_xop(spec, n)
            entry["darboux"] = "polynomial"
        except NonPolynomialResult:
            entry["darboux"] = "non-polynomial"
        shifted = effective_parameters(fam, spec.a_rho)
        entry["folded_params"] = {k: str(v) for k, v in (shifted or {}).items()}
        if shifted is None or any(v <= -1 for v in shifted.values()):
            entry.update(status="fail", reason="folded weight is not integrable")
            out[variant] = entry
            continue
        try:
            rep = gram(spec, nmax, raise_on_nonconvergence=False, **quad)
        except XopError as exc:
            entry.update(status="fail", reason=f"{type(exc).__name__}: {exc}")
            out[variant] = entry
            continue
        entry["offdiag_max"] = format(rep.offdiag_max, ".3g")
        entry["converged"] = rep.converged
        entry["orders"] = rep.orders
        ok = rep.converged and rep.offdiag_max < threshold and entry["darboux"] == "polynomial"
        entry["status"] = "pass" if ok else "fail"
        out[variant] = entry
    return out
