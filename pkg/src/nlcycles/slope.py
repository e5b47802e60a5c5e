"""Slope bounds for cubic fourfolds and degree-2 K3 surfaces."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import as_fraction, format_rational
from .discform import discriminant_form
from .eisenstein import eisenstein_coefficient
from .errors import ComputationError
from .lattice import lambda_2d, lambda_cubic, lattice_f2, make_named
from .nlpic import (
    DivisorClassExpr,
    HeegnerSymbol,
    ell_star,
    relation_from_source,
    symbol,
    theta_partner_form,
    to_p_basis,
)

INFINITY = math.inf


class RelationShapeError(ComputationError):
    module = "slope"


@dataclass(frozen=True)
class SlopeExpr:
    """alpha * lambda - beta * (boundary divisor)."""

    alpha: Fraction
    beta: Fraction
    boundary_tag: str = "C2"

    def __add__(self, other: "SlopeExpr") -> "SlopeExpr":
        return SlopeExpr(self.alpha + other.alpha, self.beta + other.beta, self.boundary_tag)

    def to_json(self) -> dict:
        return {"alpha": format_rational(self.alpha), "beta": format_rational(self.beta), "boundary": self.boundary_tag}


def slope(e: SlopeExpr):
    if e.alpha > 0 and e.beta > 0:
        return Fraction(e.alpha) / e.beta
    return INFINITY


def format_slope(s) -> str:
    return "inf" if s == INFINITY else format_rational(s)


def slope_expr_from_relation(rel: DivisorClassExpr, target: HeegnerSymbol, boundary: HeegnerSymbol, tag: str) -> SlopeExpr:
    """Solve rel = 0 for target as alpha*lambda - beta*boundary."""
    rel = to_p_basis(rel) if target.kind == "P" else rel
    extra = [s for s in rel.terms if s != target and s != boundary]
    if extra:
        raise RelationShapeError(f"relation has terms beyond target and boundary: {[str(s) for s in extra]}")
    ct = rel.terms.get(target)
    if not ct:
        raise RelationShapeError(f"relation does not involve {target}")
    return SlopeExpr(-rel.lambda_coeff / ct, rel.terms.get(boundary, Fraction(0)) / ct, tag)


@dataclass
class SlopeBounds:
    lower: Fraction
    upper: Fraction
    expr: SlopeExpr
    relation: DivisorClassExpr
    coefficients: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "lower": format_rational(self.lower),
            "upper": format_rational(self.upper),
            "slope_expr": self.expr.to_json(),
            "relation": self.relation.to_json(relation=True),
            "coefficients": self.coefficients,
        }


def cubic_relation() -> DivisorClassExpr:
    """C6 relation from Delta^{-1} times the E6 theta series."""
    L = lambda_cubic()
    return relation_from_source(L, 1, theta_partner_form(L, make_named("E6"), 1))


def cubic_slope_bounds() -> SlopeBounds:
    L = lambda_cubic()
    D = discriminant_form(L)
    rel = cubic_relation()
    nontrivial = next(mu for mu in D.elements() if any(mu))
    target = symbol(D, "H", 1, D.zero)
    boundary = symbol(D, "H", Fraction(1, 3), nontrivial)
    expr = slope_expr_from_relation(rel, target, boundary, "C2")
    upper = slope(expr)
    L6 = lambda_2d(3)
    mu = discriminant_form(L6).scale(2, ell_star(L6))
    coeffs = {}
    for m in (Fraction(1, 3), Fraction(4, 3), Fraction(7, 3)):
        coeffs[format_rational(m)] = format_rational(eisenstein_coefficient(L6, Fraction(21, 2), m, mu))
    lower = -as_fraction(coeffs["1/3"])
    return SlopeBounds(lower, upper, expr, rel, {"lambda_6_coset": list(mu), "c": coeffs})


def k3deg2_relation() -> DivisorClassExpr:
    L = lambda_2d(1)
    return relation_from_source(L, 1, theta_partner_form(L, make_named("E7"), 1))


def k3deg2_slope_bounds() -> SlopeBounds:
    L = lambda_2d(1)
    D = discriminant_form(L)
    rel = k3deg2_relation()
    e = ell_star(L)
    target = symbol(D, "P", 1, D.zero)
    boundary = symbol(D, "P", Fraction(1, 4), e)
    expr = slope_expr_from_relation(rel, target, boundary, "D11")
    upper = slope(expr)
    F2 = lattice_f2()
    DF = discriminant_form(F2)
    # ell_* of the last <-2> summand
    x = [Fraction(0)] * F2.rank
    x[F2.meta["core"][-1]] = Fraction(1, 2)
    mu = DF.coordinates(x)
    c = eisenstein_coefficient(F2, Fraction(10), Fraction(1, 4), mu)
    coeffs = {
        "c_1/4": format_rational(c),
        "coset": list(mu),
        # C = 24 + (number of roots of E7)
        "theta_counts": {
            "roots": format_rational(-rel.lambda_coeff - 24),
            "coset": format_rational(rel.coefficient("H", Fraction(1, 4), e)),
        },
    }
    return SlopeBounds(-c, upper, expr, rel, coeffs)
