"""Heegner divisor bookkeeping and relations in the Picard group.

Symbols H_{m,mu} and P_{m,mu} are indexed by m = -q(mu) mod 1 and are
identified under mu -> -mu.  H_{0,0} stands for -lambda.  Relations come from
principal parts of weakly holomorphic forms for the Weil representation of L
(support m = q(mu) mod 1), typically Delta^{-N} times a theta or Eisenstein
series transported to the discriminant form of L.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .arith import as_fraction, format_rational, frac_part, moebius
from .discform import DiscriminantForm, discriminant_form, parse_element
from .eisenstein import eisenstein_coefficient, eisenstein_qexp
from .errors import BadInput, ComputationError, PreconditionError
from .lattice import (
    IntegerLattice,
    direct_sum,
    find_primitive_vector,
    is_definite,
    make_named,
    orthogonal_complement,
    rescale,
    signature,
)
from .qexp import VVQExpansion, delta_inverse_power, multiply, principal_part, reindex
from .theta import theta_qexp


class UnsupportedSymbol(BadInput):
    module = "nlpic"


class EmptyPrincipalPart(ComputationError):
    module = "nlpic"


class NoCompatibleGenerator(ComputationError):
    module = "nlpic"


class HypothesisNotSatisfied(PreconditionError):
    module = "nlpic"


class NoMatchingLattice(PreconditionError):
    module = "nlpic"


@dataclass(frozen=True)
class HeegnerSymbol:
    kind: str
    m: Fraction
    mu: tuple
    flags: tuple = field(default=(), compare=False)
    nl_multiplicity: int = field(default=1, compare=False)

    def sort_key(self):
        return (self.kind, self.m, self.mu)

    def __str__(self):
        return f"{self.kind}_{{{format_rational(self.m)},{list(self.mu)}}}"

    def to_json(self) -> dict:
        out = {"kind": self.kind, "m": format_rational(self.m), "mu": list(self.mu)}
        if self.flags:
            out["flags"] = list(self.flags)
        if self.nl_multiplicity != 1:
            out["nl_multiplicity"] = self.nl_multiplicity
        return out


def is_supported(D: DiscriminantForm, m, mu) -> bool:
    m = as_fraction(m)
    return m >= 0 and frac_part(m + D.q(mu)) == 0


def symbol(D: DiscriminantForm, kind: str, m, mu, flags: Iterable[str] = ()) -> HeegnerSymbol:
    if kind not in ("H", "P"):
        raise UnsupportedSymbol(f"unknown symbol kind {kind!r}")
    m, mu = as_fraction(m), D.reduce(parse_element(mu))
    if m == 0:
        if kind == "P" or any(mu):
            raise UnsupportedSymbol(f"{kind}_{{0,{list(mu)}}} is not a divisor class")
    elif m < 0 or not is_supported(D, m, mu):
        raise UnsupportedSymbol(f"{kind}_{{{format_rational(m)},{list(mu)}}} is not supported")
    mu = D.canonical_pm(mu)
    mult = 2 if D.negate(mu) == mu else 1
    return HeegnerSymbol(kind, m, mu, tuple(flags), mult)


class DivisorClassExpr:
    """lambda_coeff * lambda + sum c * symbol, with zero coefficients removed."""

    def __init__(self, D: DiscriminantForm, lambda_coeff=0, terms: Mapping | None = None, meta: dict | None = None):
        self.disc = D
        self.lambda_coeff = as_fraction(lambda_coeff)
        self.terms: dict[HeegnerSymbol, Fraction] = {}
        self.meta = dict(meta or {})
        for s, c in (terms or {}).items():
            self._add(s, as_fraction(c))

    def _add(self, s: HeegnerSymbol, c: Fraction):
        if s.kind == "H" and s.m == 0:
            self.lambda_coeff -= c
            return
        # keep the first symbol seen so flags survive
        for old in self.terms:
            if old == s:
                s = old
                break
        v = self.terms.get(s, Fraction(0)) + c
        if v:
            self.terms[s] = v
        else:
            self.terms.pop(s, None)

    def coefficient(self, kind: str, m, mu) -> Fraction:
        return self.terms.get(symbol(self.disc, kind, m, mu), Fraction(0))

    def __add__(self, other: "DivisorClassExpr") -> "DivisorClassExpr":
        out = DivisorClassExpr(self.disc, self.lambda_coeff + other.lambda_coeff, self.terms, self.meta)
        for s, c in other.terms.items():
            out._add(s, c)
        return out

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "DivisorClassExpr":
        c = as_fraction(c)
        return DivisorClassExpr(self.disc, c * self.lambda_coeff, {s: c * v for s, v in self.terms.items()}, self.meta)

    def __eq__(self, other):
        return (
            isinstance(other, DivisorClassExpr)
            and self.lambda_coeff == other.lambda_coeff
            and self.terms == other.terms
        )

    def is_zero(self) -> bool:
        return self.lambda_coeff == 0 and not self.terms

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0].sort_key())

    def to_json(self, relation: bool = False) -> dict:
        out = {
            "lambda": format_rational(self.lambda_coeff),
            "terms": [dict(s.to_json(), c=format_rational(c)) for s, c in self.sorted_terms()],
        }
        if relation:
            out["relation"] = True
        if self.meta:
            out["meta"] = self.meta
        return out

    def __repr__(self):
        parts = [f"{format_rational(c)}*{s}" for s, c in self.sorted_terms()]
        if self.lambda_coeff:
            parts.append(f"{format_rational(self.lambda_coeff)}*lambda")
        return " + ".join(parts) or "0"


# -- Moebius inversion between H and P


def _square_divisors(D: DiscriminantForm, m: Fraction) -> list[int]:
    """s >= 1 with m/s^2 still on the exponent grid (1/level) Z."""
    n = m * D.level
    if n.denominator != 1:
        return [1]
    n = n.numerator
    return [s for s in range(1, math.isqrt(n) + 1) if n % (s * s) == 0]


def h_to_p(D: DiscriminantForm, s: HeegnerSymbol) -> DivisorClassExpr:
    """H_{m,mu} = sum over s > 0 and delta with s delta = mu of P_{m/s^2, delta}."""
    if s.kind != "H":
        raise UnsupportedSymbol("h_to_p expects an H symbol")
    if s.m == 0:
        return DivisorClassExpr(D, -1)
    out = DivisorClassExpr(D)
    for t in _square_divisors(D, s.m):
        mm = s.m / (t * t)
        for delta in D.elements():
            if D.scale(t, delta) == s.mu and is_supported(D, mm, delta):
                out._add(symbol(D, "P", mm, delta), Fraction(1))
    return out


def p_to_h(D: DiscriminantForm, s: HeegnerSymbol) -> DivisorClassExpr:
    """P_{m,delta} = sum over s > 0 of moebius(s) * sum_{s alpha = delta} H_{m/s^2, alpha}."""
    if s.kind != "P":
        raise UnsupportedSymbol("p_to_h expects a P symbol")
    out = DivisorClassExpr(D)
    for t in _square_divisors(D, s.m):
        mob = moebius(t)
        if not mob:
            continue
        mm = s.m / (t * t)
        for alpha in D.elements():
            if D.scale(t, alpha) == s.mu and is_supported(D, mm, alpha):
                out._add(symbol(D, "H", mm, alpha), Fraction(mob))
    return out


def to_h_basis(e: DivisorClassExpr) -> DivisorClassExpr:
    out = DivisorClassExpr(e.disc, e.lambda_coeff, meta=e.meta)
    for s, c in e.terms.items():
        out = out + (p_to_h(e.disc, s).scale(c) if s.kind == "P" else DivisorClassExpr(e.disc, 0, {s: c}))
    return out


def to_p_basis(e: DivisorClassExpr) -> DivisorClassExpr:
    out = DivisorClassExpr(e.disc, e.lambda_coeff, meta=e.meta)
    for s, c in e.terms.items():
        out = out + (h_to_p(e.disc, s).scale(c) if s.kind == "H" else DivisorClassExpr(e.disc, 0, {s: c}))
    return out


# -- relations


def relation_from_form(principal, D: DiscriminantForm | None = None) -> DivisorClassExpr:
    """The relation sum alpha_{-m,mu} H_{m,mu} = 0 with H_{0,0} = -lambda.

    ``principal`` is a VVQExpansion (its principal part is taken) or a map
    (m, mu) -> coefficient with m <= 0 and support m = q(mu) mod 1.
    """
    if isinstance(principal, VVQExpansion):
        D = principal.disc
        if principal.dual:
            raise BadInput("relations need a form with support m = q(mu) mod 1", "nlpic")
        principal = principal_part(principal)
    if D is None:
        raise BadInput("discriminant form required", "nlpic")
    pp = {(as_fraction(m), D.reduce(mu)): as_fraction(c) for (m, mu), c in principal.items() if c}
    if not pp:
        raise EmptyPrincipalPart("principal part is zero; no relation")
    out = DivisorClassExpr(D)
    dropped = []
    for (m, mu), c in sorted(pp.items()):
        if m > 0:
            continue
        if m == 0 and any(mu):
            dropped.append({"mu": list(mu), "c": format_rational(c)})
            continue
        out._add(symbol(D, "H", -m, mu), c)
    if dropped:
        out.meta["dropped_isotropic"] = dropped
    if out.is_zero() and not dropped:
        raise EmptyPrincipalPart("principal part has no nonpositive exponents")
    return out


def pairing(rel: DivisorClassExpr, g: VVQExpansion | None = None, coefficient=None) -> Fraction:
    """Constant term of <f, g> for the form f behind ``rel``.

    g is a holomorphic form for the dual Weil representation (support
    m = -q(mu)), given as an expansion or as a callable (m, mu) -> value.
    The pairing vanishes when rel is a true relation.
    """
    if coefficient is None:
        if g is None:
            raise BadInput("pairing needs a form", "nlpic")
        coefficient = g.coefficient
    h = to_h_basis(rel)
    D = h.disc
    total = -h.lambda_coeff * coefficient(Fraction(0), D.zero)
    for s, c in h.terms.items():
        total += c * coefficient(s.m, s.mu)
    return total


# -- transporting forms between discriminant forms


def find_isometry(D1: DiscriminantForm, D2: DiscriminantForm, sign: int = 1, fix: Mapping | None = None) -> dict | None:
    """A group isomorphism phi: D1 -> D2 with q2(phi x) = sign * q1(x), or None.

    ``fix`` pins images of given elements (for instance a chosen generator).
    """
    if D1.order != D2.order:
        return None
    targets = list(D2.elements())
    gens = [tuple(int(i == j) for j in range(len(D1.invariant_factors))) for i in range(len(D1.invariant_factors))]
    choices = []
    for g, d in zip(gens, D1.invariant_factors):
        want = frac_part(sign * D1.q(g))
        cand = [x for x in targets if D2.element_order(x) == d and D2.q(x) == want]
        choices.append(cand)
    elements1 = list(D1.elements())
    for images in itertools.product(*choices):
        phi = {}
        ok = True
        for a in elements1:
            img = D2.zero
            for coef, im in zip(a, images):
                img = D2.add(img, D2.scale(coef, im))
            if D2.q(img) != frac_part(sign * D1.q(a)):
                ok = False
                break
            phi[a] = img
        if ok and len(set(phi.values())) == D2.order:
            if fix and any(phi[D1.reduce(k)] != D2.reduce(v) for k, v in fix.items()):
                continue
            return phi
    return None


def transport(f: VVQExpansion, D: DiscriminantForm, sign: int = 1, fix: Mapping | None = None) -> VVQExpansion:
    """Move f onto D, as a form with support m = q_D(mu) mod 1."""
    phi = find_isometry(f.disc, D, sign, fix)
    if phi is None:
        raise NoMatchingLattice(f"discriminant forms {f.disc!r} and {D!r} are not isometric up to sign {sign}")
    g = reindex(f, D, phi, dual=False)
    g.meta["isometry"] = {str(list(k)): list(v) for k, v in phi.items()}
    return g


def partner_weight(L: IntegerLattice, N: int) -> Fraction:
    """Weight of the holomorphic form F with Delta^{-N} F of weight 2 - rank/2."""
    return Fraction(24 * N + 4 - L.rank, 2)


def theta_partner_form(L: IntegerLattice, K: IntegerLattice, N: int, fix: Mapping | None = None) -> VVQExpansion:
    """Theta series of a definite lattice K, transported onto A_L."""
    if Fraction(K.rank, 2) != partner_weight(L, N):
        raise NoMatchingLattice(f"rank {K.rank} does not give weight {partner_weight(L, N)}")
    th = theta_qexp(K, N)
    sign = 1 if is_definite(K) > 0 else -1
    g = transport(th, discriminant_form(L), sign, fix)
    g.meta["source"] = f"theta:{K.name or K.digest()}"
    return g


def eisenstein_partner_lattice(L: IntegerLattice, N: int) -> IntegerLattice:
    """U^c + R(-1) where R is the core summand of L, so that A has the form (A_L, -q_L)."""
    core = L.meta.get("core")
    if not core:
        raise NoMatchingLattice("the Eisenstein source needs a lattice with a recorded core summand")
    R = [[L.gram[i][j] for j in core] for i in core]
    for i in core:
        for j in range(L.rank):
            if j not in core and L.gram[i][j]:
                raise NoMatchingLattice("recorded core is not an orthogonal summand")
    r = 24 * N + 4 - L.rank
    extra = r - len(core)
    if extra < 0 or extra % 2:
        raise NoMatchingLattice(f"no partner of rank {r} around a core of rank {len(core)}")
    Rm = IntegerLattice([[-x for x in row] for row in R], "rescale", "core(-1)")
    parts = [make_named("U")] * (extra // 2) + [Rm]
    P = direct_sum(parts, name=f"U^{extra // 2}+core(-1)")
    P.meta["core"] = list(range(extra, r))
    if "d" in L.meta:
        P.meta["d"] = L.meta["d"]
    return P


def eisenstein_partner_form(L: IntegerLattice, N: int) -> VVQExpansion:
    P = eisenstein_partner_lattice(L, N)
    k = partner_weight(L, N)
    if k <= 2:
        raise NoMatchingLattice(f"partner weight {k} is too small for an Eisenstein series")
    E = eisenstein_qexp(P, k, N)
    # E has support -q_P = q_L
    g = transport(E, discriminant_form(L), -1)
    g.meta["source"] = "eisenstein"
    g.meta["partner"] = P.name
    return g


def relation_from_source(L: IntegerLattice, N: int, F: VVQExpansion) -> DivisorClassExpr:
    f = multiply(delta_inverse_power(N, 0), F, required=0)
    rel = relation_from_form(f)
    rel.meta["source"] = F.meta.get("source", "")
    rel.meta["N"] = N
    return rel


def dual_eisenstein(L: IntegerLattice, D: DiscriminantForm | None = None):
    """Coefficient callable of E_{k,L}, k = rank/2, memoized."""
    D = D or discriminant_form(L)
    k = Fraction(L.rank, 2)
    memo = {}

    def c(m, mu):
        key = (as_fraction(m), D.reduce(mu))
        if key not in memo:
            memo[key] = eisenstein_coefficient(L, k, key[0], key[1], D=D)
        return memo[key]

    return c


def pairing_gate(L: IntegerLattice, rel: DivisorClassExpr) -> Fraction:
    """Pair rel against the Eisenstein series of weight rank/2 for the dual representation."""
    return pairing(rel, coefficient=dual_eisenstein(L, rel.disc))


# -- definite lattices used as theta partners


def e8_complement(n: int) -> IntegerLattice:
    """Orthogonal complement in E8 of a primitive vector of norm n."""
    E8 = make_named("E8")
    v = find_primitive_vector(E8, n)
    K = orthogonal_complement(E8, v)
    return IntegerLattice(K.gram, "complement", f"E8perp({n})", meta=dict(K.meta))


def definite_lattice(name: str) -> IntegerLattice:
    """Named definite lattices: E6, E7, E8, A2, rank1(n), E8perp(n), sums with '+', and X(-1)."""
    name = name.strip()
    if "+" in name:
        parts = [definite_lattice(p) for p in name.split("+")]
        return direct_sum(parts, name=name)
    if name.endswith("(-1)"):
        return IntegerLattice([[-x for x in r] for r in definite_lattice(name[:-4]).gram], "rescale", name)
    if name.startswith("E8perp(") and name.endswith(")"):
        return e8_complement(int(name[7:-1]))
    L = make_named(name)
    if is_definite(L) == 0:
        raise BadInput(f"{name} is not definite", "nlpic")
    return L


def theta_catalog(rank: int, order: int) -> list[str]:
    """Candidate definite lattice names of a given rank, smallest pieces first."""
    base = ["A2", "E6", "E7", "E8"] + [f"rank1({2 * j})" for j in range(1, 11)]
    base += [f"E8perp({2 * j})" for j in range(1, max(2, order) + 1)]
    ranks = {"A2": 2, "E6": 6, "E7": 7, "E8": 8}
    def rk(nm):
        if nm.startswith("rank1"):
            return 1
        if nm.startswith("E8perp"):
            return 7
        return ranks[nm]
    out = [b for b in base if rk(b) == rank]
    out += [f"{a}+{b}" for a, b in itertools.combinations_with_replacement(base, 2) if rk(a) + rk(b) == rank]
    return out


def matching_theta_lattices(L: IntegerLattice, N: int, limit: int = 2) -> list[IntegerLattice]:
    """Positive-definite lattices K with (A_K, q_K) isometric to (A_L, q_L) and the partner rank."""
    D = discriminant_form(L)
    target = 24 * N + 4 - L.rank
    found, series = [], []
    for name in theta_catalog(target, D.order):
        try:
            K = definite_lattice(name)
        except ComputationError:
            continue
        DK = discriminant_form(K)
        if DK.order != D.order or find_isometry(DK, D, 1) is None:
            continue
        # isometric candidates have equal theta series; keep one per series
        th = transport(theta_qexp(K, N + 1), D, 1).coefficients
        if th in series:
            continue
        series.append(th)
        found.append(K)
        if len(found) >= limit:
            break
    return found


def theta_pairing(L: IntegerLattice, K: IntegerLattice, N: int) -> Fraction:
    """sum alpha_{-m,mu}(Delta^{-N} E_{k,L}) * theta_{m,mu}(K) with k = rank(L)/2."""
    D = discriminant_form(L)
    k = Fraction(L.rank, 2)
    E = eisenstein_qexp(L, k, N, D)
    f = multiply(delta_inverse_power(N, 0), E, required=0)
    th = transport(theta_qexp(K, N), D, 1)
    total = Fraction(0)
    for (m, mu), c in principal_part(f).items():
        total += c * th.coefficient(-m, mu)
    return total


# -- the Hodge class of the K3 family


def ell_star(L: IntegerLattice) -> tuple:
    """Class of ell / 2d in A for lambda_2d(d) and for U^3 + <2d>."""
    d = L.meta.get("d")
    core = L.meta.get("core")
    if not d or not core:
        raise BadInput("ell_star needs a lambda_2d-type lattice", "nlpic")
    x = [Fraction(0)] * L.rank
    x[core[0]] = Fraction(1, 2 * d)
    return discriminant_form(L).coordinates(x)


def m_delta(d: int, delta: int) -> tuple[Fraction, bool]:
    """The exponent index of delta and whether the isotropic convention m = 1 was applied."""
    if delta % (2 * d) == 0:
        return Fraction(1), False
    f = frac_part(Fraction(delta * delta, 4 * d))
    return (Fraction(1), True) if f == 0 else (f, False)


@dataclass
class HodgeClass:
    d: int
    method: str
    C: Fraction
    a: dict[int, Fraction]
    relation: DivisorClassExpr
    isotropic: list[int]
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "C": format_rational(self.C),
            "a": {str(k): format_rational(v) for k, v in sorted(self.a.items())},
            "relation": self.relation.to_json(relation=True),
        }
        if self.isotropic:
            out["isotropic_delta"] = self.isotropic
        out.update(self.meta)
        return out


def _hodge_from_form(d: int, L: IntegerLattice, F: VVQExpansion, method: str) -> HodgeClass:
    D = discriminant_form(L)
    e = ell_star(L)
    rel = relation_from_source(L, 1, F)
    C = 24 + F.coefficient(1, D.zero)
    a, iso = {}, []
    for delta in range(1, d + 1):
        mu = D.scale(delta, e)
        frac = frac_part(Fraction(delta * delta, 4 * d))
        # coefficient of q^{-frac}; isotropic delta gives the q^0 slot, dropped from the relation
        a[delta] = F.coefficient(1 - frac, mu)
        if frac == 0:
            iso.append(delta)
    return HodgeClass(d, method, C, a, rel, iso)


def hodge_via_theta(d: int) -> HodgeClass:
    """C and a_delta from the theta series of the E8-complement of a norm 2d vector."""
    if d < 1:
        raise BadInput("d must be positive", "nlpic")
    L = _lambda(d)
    K = e8_complement(2 * d)
    DK = discriminant_form(K)
    D = discriminant_form(L)
    e = ell_star(L)
    phi = find_isometry(DK, D, 1)
    if phi is None:
        raise NoCompatibleGenerator(f"no generator of A_K with q = -1/{4 * d}")
    inv = {v: k for k, v in phi.items()}
    F = theta_partner_form(L, K, 1, fix={inv[e]: e})
    h = _hodge_from_form(d, L, F, "theta")
    h.meta["generator"] = list(inv[e])
    h.meta["complement_of"] = K.meta.get("vector")
    return h


def hodge_via_eisenstein(d: int) -> HodgeClass:
    """C and a_delta from the weight 7/2 Eisenstein series of U^3 + <2d>."""
    if d < 1:
        raise BadInput("d must be positive", "nlpic")
    L = _lambda(d)
    P = eisenstein_partner_lattice(L, 1)
    E = eisenstein_qexp(P, Fraction(7, 2), 1)
    D = discriminant_form(L)
    # w/2d -> ell/2d, both generators
    wstar = ell_star(P)
    F = transport(E, D, -1, fix={wstar: ell_star(L)})
    F.meta["source"] = "eisenstein"
    return _hodge_from_form(d, L, F, "eisenstein")


def _lambda(d: int) -> IntegerLattice:
    from .lattice import lambda_2d

    return lambda_2d(d)


# -- generating sets


def _check_hypothesis(L: IntegerLattice):
    if L.hyperbolic_planes < 2 or L.rank < 5:
        raise HypothesisNotSatisfied(
            f"needs two hyperbolic planes and rank >= 5 (have {L.hyperbolic_planes} planes, rank {L.rank})"
        )
    sig = signature(L)
    if sig.b_plus != 2:
        raise HypothesisNotSatisfied(f"signature ({sig.b_plus},{sig.b_minus}) is not (2,n)")


def supported_symbols(D: DiscriminantForm, kind: str, upper, lower_strict=True) -> list[HeegnerSymbol]:
    """All canonical symbols with 0 < m <= upper."""
    upper = as_fraction(upper)
    seen = {}
    for mu in D.elements():
        key = D.canonical_pm(mu)
        if key in seen:
            continue
        off = frac_part(-D.q(key))
        m = off if off > 0 else Fraction(1)
        out = []
        while m <= upper:
            out.append(symbol(D, kind, m, key))
            m += 1
        seen[key] = out
    return sorted((s for v in seen.values() for s in v), key=HeegnerSymbol.sort_key)


def generating_set(L: IntegerLattice, flavor: str = "P", presentation: str = "auto") -> list[HeegnerSymbol]:
    """Finite generating set of Pic(X_L) tensor Q.

    flavor H: H_{m,mu} with 0 <= m <= rank/24.  flavor P: P_{m,mu} with
    0 < m <= floor(rank/24) + 1.  For lambda_2d(d) and flavor P the default
    presentation is {P_{m_delta, delta} : delta = 0..d}.
    """
    _check_hypothesis(L)
    D = discriminant_form(L)
    if flavor == "H":
        return [symbol(D, "H", 0, D.zero)] + supported_symbols(D, "H", Fraction(L.rank, 24))
    if flavor != "P":
        raise BadInput(f"unknown flavor {flavor!r}", "nlpic")
    d = L.meta.get("d")
    if presentation == "general" or d is None or L.meta.get("core") is None:
        return supported_symbols(D, "P", L.rank // 24 + 1)
    e = ell_star(L)
    out = []
    for delta in range(0, d + 1):
        m, flagged = m_delta(d, delta)
        flags = ("isotropic_fractional_part_zero",) if flagged else ()
        out.append(symbol(D, "P", m, D.scale(delta, e), flags))
    return out


def nl_discriminant(s: HeegnerSymbol, d: int) -> Fraction:
    """-|L| = 4 d Delta for the rank 2 lattice attached to P_{Delta,delta}."""
    return 4 * d * s.m
