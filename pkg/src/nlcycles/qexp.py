"""Truncated scalar and vector-valued q-expansions with rational exponents."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .arith import as_fraction, format_rational, frac_part, partition_power
from .discform import DiscriminantForm, format_element, parse_element
from .errors import BadInput, ComputationError


class TruncationUnderflow(ComputationError):
    module = "qexp"


class SupportViolation(BadInput):
    module = "qexp"


def support_offset(D: DiscriminantForm, mu, dual: bool) -> Fraction:
    """Residue mod 1 of the exponents allowed in component mu.

    dual=True: m = -q(mu) mod 1 (dual Weil representation); else m = q(mu).
    """
    q = D.q(mu)
    return frac_part(-q if dual else q)


def supported_exponents(D: DiscriminantForm, mu, truncation, dual: bool = True, start=0) -> list[Fraction]:
    off = support_offset(D, mu, dual)
    start, truncation = as_fraction(start), as_fraction(truncation)
    m = off + math.ceil(start - off)
    out = []
    while m <= truncation:
        out.append(m)
        m += 1
    return out


@dataclass
class ScalarQExpansion:
    """sum_n c_n q^n over integers n; complete for n <= truncation, zero below ``valuation``."""

    coefficients: dict[int, Fraction]
    truncation: int
    valuation: int = 0
    weight: Fraction = Fraction(0)

    def __post_init__(self):
        self.coefficients = {int(n): as_fraction(c) for n, c in self.coefficients.items() if c}
        if self.coefficients:
            self.valuation = min(self.valuation, min(self.coefficients))

    def __getitem__(self, n: int) -> Fraction:
        if n > self.truncation:
            raise TruncationUnderflow(f"coefficient q^{n} beyond truncation {self.truncation}")
        return self.coefficients.get(n, Fraction(0))

    def __mul__(self, other: "ScalarQExpansion") -> "ScalarQExpansion":
        trunc = min(self.truncation + other.valuation, other.truncation + self.valuation)
        out: dict[int, Fraction] = {}
        for a, x in self.coefficients.items():
            for b, y in other.coefficients.items():
                if a + b <= trunc:
                    out[a + b] = out.get(a + b, Fraction(0)) + x * y
        return ScalarQExpansion(out, trunc, self.valuation + other.valuation, self.weight + other.weight)

    def __add__(self, other: "ScalarQExpansion") -> "ScalarQExpansion":
        trunc = min(self.truncation, other.truncation)
        out = dict(self.coefficients)
        for n, c in other.coefficients.items():
            out[n] = out.get(n, Fraction(0)) + c
        return ScalarQExpansion(
            {n: c for n, c in out.items() if n <= trunc}, trunc, min(self.valuation, other.valuation), self.weight
        )

    def scale(self, c) -> "ScalarQExpansion":
        c = as_fraction(c)
        return ScalarQExpansion({n: c * x for n, x in self.coefficients.items()}, self.truncation, self.valuation, self.weight)

    def equal_up_to(self, other: "ScalarQExpansion", trunc: int) -> bool:
        lo = min(self.valuation, other.valuation)
        return all(self[n] == other[n] for n in range(lo, trunc + 1))


def delta_inverse_power(N: int, truncation: int) -> ScalarQExpansion:
    """Delta^{-N} = q^{-N} prod (1 - q^j)^{-24N}, complete through q^truncation."""
    if N < 1 or truncation < -N:
        raise BadInput("need N >= 1 and truncation >= -N", "qexp")
    coeffs = {n - N: Fraction(partition_power(24 * N, n)) for n in range(0, truncation + N + 1)}
    return ScalarQExpansion(coeffs, truncation, -N, Fraction(-12 * N))


def eta_product_power(N: int, truncation: int) -> ScalarQExpansion:
    """Delta^N from the pentagonal-number series prod (1 - q^j), computed independently."""
    L = truncation - N
    base = [0] * (max(L, 0) + 1)
    k = 0
    while True:
        done = True
        for kk in (k, -k) if k else (0,):
            g = kk * (3 * kk - 1) // 2
            if g <= L:
                base[g] += -1 if kk % 2 else 1
                done = False
        if done and k > 0:
            break
        k += 1
    # power 24N by repeated multiplication
    result = [1] + [0] * L if L >= 0 else []
    for _ in range(24 * N):
        result = [sum(result[i] * base[n - i] for i in range(n + 1)) for n in range(L + 1)]
    return ScalarQExpansion({n + N: Fraction(c) for n, c in enumerate(result)}, truncation, N, Fraction(12 * N))


@dataclass
class VVQExpansion:
    disc: DiscriminantForm
    weight: Fraction
    coefficients: dict[tuple[Fraction, tuple], Fraction]
    truncation: Fraction
    dual: bool = True
    valuation: Fraction = Fraction(0)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.weight = as_fraction(self.weight)
        self.truncation = as_fraction(self.truncation)
        clean = {}
        for (m, mu), c in self.coefficients.items():
            m, mu, c = as_fraction(m), self.disc.reduce(mu), as_fraction(c)
            if m > self.truncation:
                continue
            if frac_part(m - support_offset(self.disc, mu, self.dual)) != 0:
                raise SupportViolation(f"exponent {m} not supported on {list(mu)}")
            if c:
                clean[(m, mu)] = c
        self.coefficients = clean
        if clean:
            self.valuation = min(self.valuation, min(m for m, _ in clean))

    def support_offset(self, mu) -> Fraction:
        return support_offset(self.disc, mu, self.dual)

    def coefficient(self, m, mu) -> Fraction:
        m = as_fraction(m)
        if m > self.truncation:
            raise TruncationUnderflow(f"coefficient at {m} beyond truncation {self.truncation}")
        return self.coefficients.get((m, self.disc.reduce(mu)), Fraction(0))

    __call__ = coefficient

    def __add__(self, other: "VVQExpansion") -> "VVQExpansion":
        out = dict(self.coefficients)
        for k, c in other.coefficients.items():
            out[k] = out.get(k, Fraction(0)) + c
        return VVQExpansion(
            self.disc, self.weight, out, min(self.truncation, other.truncation), self.dual, min(self.valuation, other.valuation)
        )

    def scale(self, c) -> "VVQExpansion":
        c = as_fraction(c)
        return VVQExpansion(
            self.disc, self.weight, {k: c * v for k, v in self.coefficients.items()}, self.truncation, self.dual, self.valuation
        )

    def to_json(self) -> dict:
        entries = [
            {"m": format_rational(m), "mu": list(mu), "c": format_rational(c)}
            for (m, mu), c in sorted(self.coefficients.items(), key=lambda kv: (kv[0][0], kv[0][1]))
        ]
        return {
            "weight": format_rational(self.weight),
            "invariant_factors": list(self.disc.invariant_factors),
            "entries": entries,
            "truncation": format_rational(self.truncation),
        }

    @classmethod
    def from_json(cls, D: DiscriminantForm, data, dual: bool = True) -> "VVQExpansion":
        if isinstance(data, str):
            data = json.loads(data)
        coeffs = {
            (as_fraction(e["m"]), parse_element(e["mu"])): as_fraction(e["c"]) for e in data.get("entries", [])
        }
        return cls(D, as_fraction(data["weight"]), coeffs, as_fraction(data["truncation"]), dual)


def multiply(s: ScalarQExpansion, f: VVQExpansion, required=None) -> VVQExpansion:
    """Cauchy product of a scalar series with a vector-valued one."""
    trunc = min(Fraction(s.truncation) + f.valuation, f.truncation + s.valuation)
    if required is not None and as_fraction(required) > trunc:
        raise TruncationUnderflow(f"product is only determined up to {trunc}, {required} requested")
    out: dict = {}
    for (m, mu), c in f.coefficients.items():
        for n, x in s.coefficients.items():
            e = m + n
            if e <= trunc:
                out[(e, mu)] = out.get((e, mu), Fraction(0)) + x * c
    return VVQExpansion(f.disc, f.weight + s.weight, out, trunc, f.dual, f.valuation + s.valuation)


def principal_part(f: VVQExpansion) -> dict[tuple[Fraction, tuple], Fraction]:
    """All coefficients with m <= 0."""
    if f.truncation < 0:
        raise TruncationUnderflow("principal part needs truncation >= 0")
    return {k: c for k, c in sorted(f.coefficients.items()) if k[0] <= 0}


def reindex(f: VVQExpansion, target: DiscriminantForm, iso: dict, dual: bool | None = None) -> VVQExpansion:
    """Transport coefficients along an isometry iso: f.disc elements -> target elements."""
    out = {(m, iso[mu]): c for (m, mu), c in f.coefficients.items()}
    return VVQExpansion(target, f.weight, out, f.truncation, f.dual if dual is None else dual, f.valuation, dict(f.meta))
