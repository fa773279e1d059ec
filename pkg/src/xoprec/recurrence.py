"""Multiplier expansions in the exceptional basis.

Everything here is exact degree reduction: multiply ``P^_n`` by a
polynomial, peel off leading terms against the basis, and read the
coefficients back as shifts ``l`` relative to ``n``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable

from .classical import Curve, FamilySpec, monic
from .errors import (
    ClosedFormMismatch,
    IdentityViolation,
    InvalidParameter,
    SparsityViolation,
    UnrepresentableTarget,
)
from .ratpoly import Poly, parse_scalar, scalar_to_str
from .xop import XopSpec, xop_poly


class TableKind(str, Enum):
    TWO_J_PLUS_3 = "2j+3"
    FOUR_J_PLUS_1 = "4j+1"
    THREE_TERM = "3-term"


CLOSED = "closed"
RAW = "raw"
CONVENTIONS = (CLOSED, RAW)


@dataclass(frozen=True)
class Multiplier:
    raw: Poly
    closed: Poly | None
    shift: Fraction

    def poly(self, convention: str) -> Poly:
        if convention == RAW:
            return self.raw
        if convention != CLOSED:
            raise ValueError(f"unknown multiplier convention {convention!r}")
        if self.closed is None:
            raise InvalidParameter("no closed-form multiplier exists at these parameters")
        return self.closed


def raw_multiplier(spec: XopSpec) -> Poly:
    """Monic antiderivative of the seed with zero constant term."""
    return spec.seed.antiderivative().monic()


def multiplier(spec: XopSpec) -> Multiplier:
    raw = raw_multiplier(spec)
    closed = spec.multiplier_closed
    if closed is None:
        return Multiplier(raw, None, Fraction(0))
    diff = closed - raw
    if diff.degree > 0:
        raise ClosedFormMismatch(
            f"closed multiplier differs from the antiderivative of the seed by a "
            f"non-constant for {spec.label()}",
            closed=closed.to_strings(),
            raw=raw.to_strings(),
            **spec.describe(),
        )
    return Multiplier(raw, closed, diff.coeff(0))


def default_convention(spec: XopSpec) -> str:
    return CLOSED if spec.multiplier_closed is not None else RAW


# ---------------------------------------------------------------------------
# Expansion
# ---------------------------------------------------------------------------

def expand_in_basis(
    target: Poly,
    basis: Callable[[int], Poly],
    index_of_degree: Callable[[int], int | None],
) -> dict[int, Fraction]:
    """Greedy exact expansion of ``target`` in a monic-by-degree basis.

    ``basis(i)`` must be monic; ``index_of_degree(d)`` gives the index whose
    basis element has degree ``d`` or ``None`` when no element has that
    degree. Returns index -> coefficient for nonzero coefficients.
    """
    out: dict[int, Fraction] = {}
    rem = target
    while not rem.is_zero():
        d = rem.degree
        idx = index_of_degree(d)
        if idx is None:
            raise UnrepresentableTarget(
                f"nonzero remainder of degree {d} has no basis element",
                remainder=rem.to_strings(),
            )
        c = rem.lc
        b = basis(idx)
        rem = rem - c * b
        if rem.degree >= d:
            raise UnrepresentableTarget(f"basis element {idx} is not monic of degree {d}")
        out[idx] = c
    return out


def expand_in_xop_basis(spec: XopSpec, target: Poly) -> dict[int, Fraction]:
    """Index -> coefficient of ``target`` in ``{P^_n}``."""
    degs = spec.degrees
    return expand_in_basis(target, lambda i: xop_poly(spec, i), degs.index_of_degree)


def expand_in_classical_basis(fam: FamilySpec, target: Poly) -> dict[int, Fraction]:
    return expand_in_basis(target, lambda i: monic(fam, i), lambda d: d)


# ---------------------------------------------------------------------------
# Coefficient tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoeffTable:
    """Coefficients ``beta_{n,l}`` of ``M * P^_n = sum_l beta_{n,l} P^_{n+l}``.

    ``entries`` lists every band shift whose target index is non-negative,
    zeros included, so a table always shows its full stencil. ``excluded``
    marks a degree outside the degree set, in which case ``entries`` is empty.
    """

    family: str
    type: str
    j: int
    params: dict[str, str]
    n: int
    kind: TableKind
    convention: str
    multiplier_poly: Poly
    entries: dict[int, Fraction]
    excluded: bool = False
    spec: XopSpec | None = field(default=None, compare=False, repr=False)

    def get(self, l: int) -> Fraction:
        return self.entries.get(l, Fraction(0))

    def nonzero(self) -> dict[int, Fraction]:
        return {l: c for l, c in self.entries.items() if c != 0}

    @property
    def band(self) -> int:
        if self.kind is TableKind.FOUR_J_PLUS_1:
            return 2 * self.j
        return self.j + 1

    def to_dict(self) -> dict:
        out = {
            "family": self.family,
            "type": self.type,
            "j": self.j,
            "params": dict(self.params),
            "n": self.n,
            "kind": self.kind.value,
            "multiplier": self.convention,
            "multiplier_poly": self.multiplier_poly.to_strings(),
        }
        if self.excluded:
            out["excluded"] = True
            out["coeffs"] = {}
        else:
            out["coeffs"] = {
                str(l): scalar_to_str(self.entries[l])
                for l in sorted(self.entries, reverse=True)
            }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "CoeffTable":
        return cls(
            family=data["family"],
            type=data["type"],
            j=int(data["j"]),
            params=dict(data["params"]),
            n=int(data["n"]),
            kind=TableKind(data.get("kind", TableKind.TWO_J_PLUS_3.value)),
            convention=data["multiplier"],
            multiplier_poly=Poly.from_strings(data["multiplier_poly"]),
            entries={int(k): parse_scalar(v) for k, v in data["coeffs"].items()},
            excluded=bool(data.get("excluded", False)),
        )

    @classmethod
    def from_json(cls, text: str) -> "CoeffTable":
        return cls.from_dict(json.loads(text))

    def csv_rows(self) -> list[list[str]]:
        head = [self.family, self.type, str(self.j), _params_cell(self.params), str(self.n)]
        if self.excluded:
            return [head + ["", "excluded"]]
        return [
            head + [str(l), scalar_to_str(self.entries[l])]
            for l in sorted(self.entries, reverse=True)
        ]

    def to_latex(self) -> str:
        var = {"hermite": "H", "laguerre": "L", "jacobi": "J"}[self.family]
        sup = f"^{{({self.type},{self.j})}}"
        poly = self.multiplier_poly.pretty().replace("*", " ")
        lhs = f"\\left({poly}\\right)\\widehat {var}{sup}_{{{self.n}}}"
        lines = [
            "\\begin{tabular}{rl}",
            f"\\multicolumn{{2}}{{l}}{{${lhs}$}} \\\\",
            "$l$ & $\\beta_{n,l}$ \\\\",
            "\\hline",
        ]
        if self.excluded:
            lines.append("\\multicolumn{2}{l}{excluded degree} \\\\")
        for l in sorted(self.entries, reverse=True):
            lines.append(f"${l:+d}$ & ${_latex_scalar(self.entries[l])}$ \\\\")
        lines.append("\\end{tabular}")
        return "\n".join(lines)


CSV_HEADER = ["family", "type", "j", "params", "n", "shift", "coeff"]


def tables_to_csv(tables: list[CoeffTable]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for t in tables:
        w.writerows(t.csv_rows())
    return buf.getvalue()


def _params_cell(params: dict[str, str]) -> str:
    return ";".join(f"{k}={v}" for k, v in params.items())


def _latex_scalar(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    sign = "-" if c < 0 else ""
    return f"{sign}\\frac{{{abs(c.numerator)}}}{{{c.denominator}}}"


def _banded(
    spec: XopSpec, n: int, mult: Poly, band: int, kind: TableKind, convention: str
) -> CoeffTable:
    base = dict(
        family=spec.fam.kind.value,
        type=spec.rho.value,
        j=spec.j,
        params=spec.fam.params_str(),
        n=n,
        kind=kind,
        convention=convention,
        multiplier_poly=mult,
        spec=spec,
    )
    if n not in spec.degrees:
        return CoeffTable(entries={}, excluded=True, **base)
    expansion = expand_in_xop_basis(spec, mult * xop_poly(spec, n))
    outside = {k - n: c for k, c in expansion.items() if abs(k - n) > band}
    if outside:
        raise SparsityViolation(
            f"{spec.label()} n={n}: coefficients outside |l| <= {band}",
            outside={str(l): scalar_to_str(c) for l, c in sorted(outside.items())},
            multiplier=mult.to_strings(),
            params=spec.fam.params_str(),
            n=n,
        )
    entries = {
        l: expansion.get(n + l, Fraction(0))
        for l in range(band, -band - 1, -1)
        if n + l >= 0
    }
    return CoeffTable(entries=entries, **base)


def recurrence_2j3(spec: XopSpec, n: int, convention: str | None = None) -> CoeffTable:
    """``I_j * P^_n`` in the exceptional basis; band ``|l| <= j + 1``."""
    convention = convention or default_convention(spec)
    # raw needs no closed form, so a bad closed table cannot mask a band failure
    mult = raw_multiplier(spec) if convention == RAW else multiplier(spec).poly(convention)
    return _banded(spec, n, mult, spec.j + 1, TableKind.TWO_J_PLUS_3, convention)


def recurrence_4j1(spec: XopSpec, n: int) -> CoeffTable:
    """``p^2 * P^_n`` in the exceptional basis; band ``|l| <= 2j``."""
    if spec.rho is Curve.III:
        raise InvalidParameter("the 4j+1 relation is stated for types I and II only")
    mult = (spec.seed * spec.seed).monic()
    return _banded(spec, n, mult, 2 * spec.j, TableKind.FOUR_J_PLUS_1, "seed^2")


def recurrence_classical(fam: FamilySpec, n: int) -> CoeffTable:
    """The ``j = 0`` case: trivial seed, multiplier ``x``, classical basis."""
    if n < 0:
        raise ValueError("n must be non-negative")
    mult = Poly([0, 1])
    expansion = expand_in_classical_basis(fam, mult * monic(fam, n))
    outside = {k - n: c for k, c in expansion.items() if abs(k - n) > 1}
    if outside:
        raise SparsityViolation(f"{fam.label()} n={n}: classical expansion wider than 3 terms")
    entries = {l: expansion.get(n + l, Fraction(0)) for l in (1, 0, -1) if n + l >= 0}
    return CoeffTable(
        family=fam.kind.value, type=Curve.EMPTY.value, j=0, params=fam.params_str(), n=n,
        kind=TableKind.THREE_TERM, convention=RAW, multiplier_poly=mult, entries=entries,
    )


def jzero_matches(fam: FamilySpec, n: int) -> bool:
    t = recurrence_classical(fam, n)
    off, cpl = fam.three_term(n)
    want = {1: Fraction(1), 0: off}
    if n >= 1:
        want[-1] = cpl
    return t.entries == want


def lemma2_constants(spec: XopSpec, convention: str | None = None) -> tuple[Fraction, Fraction]:
    """``(alpha, beta)`` with ``I_j = alpha * P^_{j+1} + beta * P^_0``, checked in full."""
    if spec.rho is not Curve.III:
        raise InvalidParameter("the two-term multiplier identity concerns type III only")
    convention = convention or default_convention(spec)
    mult = raw_multiplier(spec) if convention == RAW else multiplier(spec).poly(convention)
    top = xop_poly(spec, spec.j + 1)
    alpha = mult.lc / top.lc
    rest = mult - alpha * top
    beta = rest.coeff(0)
    if rest.degree > 0:
        raise IdentityViolation(
            f"{spec.label()}: multiplier minus alpha*P^_(j+1) is not constant",
            remainder=rest.to_strings(),
            multiplier=mult.to_strings(),
            params=spec.fam.params_str(),
        )
    return alpha, beta


def convention_shift_check(spec: XopSpec, n: int) -> bool:
    """Raw and closed tables differ only at ``l = 0``, by the multiplier shift."""
    m = multiplier(spec)
    if m.closed is None:
        return True
    raw = recurrence_2j3(spec, n, RAW)
    closed = recurrence_2j3(spec, n, CLOSED)
    if raw.excluded or closed.excluded:
        return raw.excluded and closed.excluded
    for l in set(raw.entries) | set(closed.entries):
        want = m.shift if l == 0 else Fraction(0)
        if closed.get(l) - raw.get(l) != want:
            return False
    return True


def family_of(table: CoeffTable) -> FamilySpec:
    params = {k: parse_scalar(v) for k, v in table.params.items()}
    return FamilySpec.from_params(table.family, params.get("a"), params.get("b"), formal=True)
