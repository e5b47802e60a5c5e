"""Even integral lattices given by Gram matrices, and the integer linear
algebra (Smith form, kernels, exact diagonalization) built on them.

Root lattices use the Cartan matrices in Bourbaki numbering:

* ``A2``: 1 - 2
* ``E6``: chain 1-3-4-5-6, node 2 attached to 4
* ``E7``: chain 1-3-4-5-6-7, node 2 attached to 4
* ``E8``: chain 1-3-4-5-6-7-8, node 2 attached to 4
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import BadInput, ComputationError, PreconditionError

Matrix = list[list[int]]


class UnknownName(BadInput):
    module = "lattice"


class DegenerateLattice(PreconditionError):
    module = "lattice"


class IndefiniteLattice(PreconditionError):
    module = "lattice"


class NoVectorFound(ComputationError):
    module = "lattice"


# ---------------------------------------------------------------------------
# integer / rational matrix helpers

def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A, B):
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A, v):
    return [sum(a * b for a, b in zip(row, v)) for row in A]


def transpose(A):
    return [list(r) for r in zip(*A)]


def determinant(M) -> int:
    """Exact determinant (fraction-free Bareiss elimination)."""
    A = [list(r) for r in (M.gram if isinstance(M, IntegerLattice) else M)]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[-1][-1]


def rational_inverse(M) -> list[list[Fraction]]:
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            raise DegenerateLattice("singular matrix")
        A[c], A[piv] = A[piv], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def smith_normal_form(M) -> tuple[Matrix, list[int], Matrix]:
    """Return (U, diag, V) with U M V = diag(diag), U and V unimodular.

    The diagonal is nonnegative and each entry divides the next.
    """
    A = [list(r) for r in M]
    m, n = len(A), len(A[0]) if A else 0
    U, V = identity(m), identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for R in A:
            R[i], R[j] = R[j], R[i]
        for R in V:
            R[i], R[j] = R[j], R[i]

    def add_row(dst, src, f):  # row_dst += f row_src
        A[dst] = [a + f * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, f):
        for R in A:
            R[dst] += f * R[src]
        for R in V:
            R[dst] += f * R[src]

    def rquot(a, b):  # nearest-integer quotient keeps remainders small
        return round(Fraction(a, b))

    t = 0
    while t < min(m, n):
        while True:
            # the smallest entry of the remaining block as pivot avoids coefficient blow-up
            nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
            p = A[t][t]
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -rquot(A[i][t], p))
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -rquot(A[t][j], p))
            if any(A[i][t] for i in range(t + 1, m)) or any(A[t][j] for j in range(t + 1, n)):
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if t < m and t < n and A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    diag = [A[i][i] for i in range(min(m, n))]
    return U, diag, V


def integer_kernel(M) -> Matrix:
    """Basis (as rows) of {x in Z^n : M x = 0} for an integer matrix M."""
    A = [list(r) for r in M]
    n = len(A[0])
    V = identity(n)
    # column operations to echelon form; V tracks them
    row, col = 0, 0
    pivots = 0
    while row < len(A) and col < n:
        while True:
            nz = [j for j in range(col, n) if A[row][j]]
            if not nz:
                break
            j0 = min(nz, key=lambda j: abs(A[row][j]))
            for R in A:
                R[col], R[j0] = R[j0], R[col]
            for R in V:
                R[col], R[j0] = R[j0], R[col]
            clean = True
            for j in range(col + 1, n):
                if A[row][j]:
                    q = A[row][j] // A[row][col]
                    for R in A:
                        R[j] -= q * R[col]
                    for R in V:
                        R[j] -= q * R[col]
                    if A[row][j]:
                        clean = False
            if clean:
                break
        if any(A[row][j] for j in range(col, n)):
            col += 1
            pivots += 1
        row += 1
    return [[V[i][j] for i in range(n)] for j in range(pivots, n)]


def symmetric_diagonal(G) -> list[Fraction]:
    """Diagonal of a congruence diagonalization of a symmetric matrix over Q."""
    A = [[Fraction(x) for x in row] for row in G]
    n = len(A)
    out = []
    for i in range(n):
        if A[i][i] == 0:
            j = next((j for j in range(i + 1, n) if A[j][j] != 0), None)
            if j is not None:
                A[i], A[j] = A[j], A[i]
                for R in A:
                    R[i], R[j] = R[j], R[i]
            else:
                j = next((j for j in range(i + 1, n) if A[i][j] != 0), None)
                if j is None:
                    out.append(Fraction(0))
                    continue
                # x_i <- x_i + x_j
                A[i] = [a + b for a, b in zip(A[i], A[j])]
                for R in A:
                    R[i] += R[j]
        p = A[i][i]
        out.append(p)
        for j in range(i + 1, n):
            if A[j][i]:
                f = A[j][i] / p
                A[j] = [a - f * b for a, b in zip(A[j], A[i])]
                for R in A:
                    R[j] -= f * R[i]
    return out


def ldl(G) -> tuple[list[Fraction], list[list[Fraction]]]:
    """x^T G x = sum_i D[i] (x_i + sum_{j>i} U[i][j] x_j)^2 for positive-definite G."""
    n = len(G)
    A = [[Fraction(x) for x in row] for row in G]
    D = [Fraction(0)] * n
    U = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        p = A[i][i]
        if p <= 0:
            raise IndefiniteLattice("Gram matrix is not positive definite")
        D[i] = p
        for j in range(i + 1, n):
            U[i][j] = A[i][j] / p
        for j in range(i + 1, n):
            for l in range(i + 1, n):
                A[j][l] -= A[i][j] * A[i][l] / p
    return D, U


# ---------------------------------------------------------------------------
# lattices

@dataclass(frozen=True)
class Signature:
    b_plus: int
    b_minus: int

    def __iter__(self):
        return iter((self.b_plus, self.b_minus))


@dataclass(frozen=True, eq=False)
class IntegerLattice:
    gram: tuple[tuple[int, ...], ...]
    provenance: str = "from_file"
    name: str = ""
    hyperbolic_planes: int = 0  # number of split U summands, recorded by constructors
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        if n == 0 or any(len(row) != n for row in g):
            raise BadInput("Gram matrix must be square and nonempty", "lattice")
        for i in range(n):
            if g[i][i] % 2:
                raise BadInput("lattice is not even", "lattice")
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise BadInput("Gram matrix is not symmetric", "lattice")

    @property
    def rank(self) -> int:
        return len(self.gram)

    def __eq__(self, other):
        return isinstance(other, IntegerLattice) and self.gram == other.gram

    def __hash__(self):
        return hash(self.gram)

    def norm(self, x) -> Fraction:
        return sum(
            (Fraction(x[i]) * self.gram[i][j] * x[j] for i in range(self.rank) for j in range(self.rank) if x[i] and x[j]),
            Fraction(0),
        )

    def pair(self, x, y) -> Fraction:
        Gy = matvec(self.gram, y)
        return sum((Fraction(a) * b for a, b in zip(x, Gy)), Fraction(0))

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.gram).encode()).hexdigest()[:16]

    def to_json(self) -> dict:
        return {"gram": [list(r) for r in self.gram], "name": self.name, "provenance": self.provenance}

    def __repr__(self):
        label = self.name or f"rank {self.rank}"
        return f"IntegerLattice({label})"


def _cartan(n: int, edges: Sequence[tuple[int, int]]) -> Matrix:
    G = [[2 * int(i == j) for j in range(n)] for i in range(n)]
    for a, b in edges:
        G[a - 1][b - 1] = G[b - 1][a - 1] = -1
    return G


_E_EDGES = {
    6: [(1, 3), (3, 4), (4, 5), (5, 6), (2, 4)],
    7: [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (2, 4)],
    8: [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)],
}


def make_named(name: str, n: int | None = None) -> IntegerLattice:
    """Standard lattices: U, A2, E6, E7, E8 and rank1(n) = [[n]]."""
    key = name.strip()
    if key.startswith("rank1(") and key.endswith(")"):
        n = int(key[6:-1])
        key = "rank1"
    if key == "U":
        return IntegerLattice(((0, 1), (1, 0)), "named", "U", hyperbolic_planes=1)
    if key == "A2":
        return IntegerLattice(_cartan(2, [(1, 2)]), "named", "A2")
    if key in ("E6", "E7", "E8"):
        r = int(key[1])
        return IntegerLattice(_cartan(r, _E_EDGES[r]), "named", key)
    if key == "rank1":
        if n is None or n == 0 or n % 2:
            raise UnknownName("rank1(n) needs a nonzero even n")
        return IntegerLattice(((n,),), "named", f"rank1({n})")
    raise UnknownName(f"unknown lattice name {name!r}")


def direct_sum(parts: Sequence[IntegerLattice], name: str = "") -> IntegerLattice:
    n = sum(p.rank for p in parts)
    G = [[0] * n for _ in range(n)]
    off = 0
    for p in parts:
        for i in range(p.rank):
            for j in range(p.rank):
                G[off + i][off + j] = p.gram[i][j]
        off += p.rank
    label = name or " + ".join(p.name or "?" for p in parts)
    return IntegerLattice(G, "direct_sum", label, hyperbolic_planes=sum(p.hyperbolic_planes for p in parts))


def rescale(L: IntegerLattice, c: int) -> IntegerLattice:
    G = [[c * x for x in row] for row in L.gram]
    planes = L.hyperbolic_planes if c == -1 else 0
    return IntegerLattice(G, "rescale", f"{L.name}({c})" if L.name else "", hyperbolic_planes=planes)


def lambda_2d(d: int) -> IntegerLattice:
    """U + U + E8(-1) + E8(-1) + <-2d>; the last basis vector is ell."""
    if d < 1:
        raise BadInput("lambda_2d needs d >= 1", "lattice")
    U, E8m = make_named("U"), rescale(make_named("E8"), -1)
    L = direct_sum([U, U, E8m, E8m, make_named("rank1", -2 * d)], name=f"lambda_2d({d})")
    L.meta["d"] = d
    L.meta["core"] = [20]
    return L


def lambda_cubic() -> IntegerLattice:
    U, E8m = make_named("U"), rescale(make_named("E8"), -1)
    L = direct_sum([U, U, E8m, E8m, rescale(make_named("A2"), -1)], name="lambda_cubic")
    L.meta["core"] = [20, 21]
    return L


def lattice_f2() -> IntegerLattice:
    """U + <2> + E8(-1) + E8(-1) + <-2>, the lattice whose last coset carries the unigonal divisor."""
    U, E8m = make_named("U"), rescale(make_named("E8"), -1)
    L = direct_sum([U, make_named("rank1", 2), E8m, E8m, make_named("rank1", -2)], name="lattice_f2")
    L.meta["core"] = [2, 19]
    return L


def k3_weight_seven_halves(d: int) -> IntegerLattice:
    """U + U + U + <2d>, the signature (4,3) lattice of the weight 7/2 Eisenstein series."""
    U = make_named("U")
    L = direct_sum([U, U, U, make_named("rank1", 2 * d)], name=f"U3+<{2 * d}>")
    L.meta["d"] = d
    L.meta["core"] = [6]
    return L


def signature(L: IntegerLattice) -> Signature:
    diag = symmetric_diagonal(L.gram)
    if any(x == 0 for x in diag):
        raise DegenerateLattice("degenerate Gram matrix")
    return Signature(sum(1 for x in diag if x > 0), sum(1 for x in diag if x < 0))


def dual_gram(L: IntegerLattice) -> list[list[Fraction]]:
    if determinant(L.gram) == 0:
        raise DegenerateLattice("degenerate Gram matrix")
    return rational_inverse(L.gram)


def level(L: IntegerLattice) -> int:
    """Smallest N with N * <x,x>/2 integral on the dual lattice."""
    Gi = dual_gram(L)
    n = L.rank
    dens = [(Gi[i][i] / 2).denominator for i in range(n)]
    dens += [Gi[i][j].denominator for i in range(n) for j in range(i + 1, n)]
    return math.lcm(*dens)


def is_definite(L: IntegerLattice) -> int:
    """+1 for positive definite, -1 for negative definite, 0 otherwise."""
    sig = signature(L)
    if sig.b_minus == 0:
        return 1
    if sig.b_plus == 0:
        return -1
    return 0


def orthogonal_complement(L: IntegerLattice, v: Sequence[int]) -> IntegerLattice:
    """Sublattice of L orthogonal to v, with Gram matrix in an integral kernel basis."""
    if math.gcd(*v) != 1:
        raise BadInput("vector is not primitive", "lattice")
    row = matvec(L.gram, v)
    basis = integer_kernel([row])
    G = matmul(matmul(basis, [list(r) for r in L.gram]), transpose(basis))
    out = IntegerLattice(G, "complement", f"{L.name or 'L'}^perp")
    out.meta["basis"] = basis
    out.meta["vector"] = list(v)
    return out


def find_primitive_vector(L: IntegerLattice, norm: int) -> list[int]:
    """A primitive vector of the given norm in a definite lattice (first found, deterministic)."""
    from .enumeration import vectors_of_norm

    sgn = is_definite(L)
    if sgn == 0:
        raise IndefiniteLattice("find_primitive_vector needs a definite lattice")
    if norm == 0 or (norm > 0) != (sgn > 0):
        raise NoVectorFound(f"no vector of norm {norm} in a {'positive' if sgn > 0 else 'negative'} definite lattice")
    G = L.gram if sgn > 0 else tuple(tuple(-x for x in r) for r in L.gram)
    for x in vectors_of_norm(G, abs(norm)):
        if math.gcd(*x) == 1:
            return list(x)
    raise NoVectorFound(f"no primitive vector of norm {norm}")


_NAMED_BUILDERS = {
    "lambda_2d": lambda spec: lambda_2d(int(spec["d"])),
    "lambda_cubic": lambda spec: lambda_cubic(),
    "lattice_f2": lambda spec: lattice_f2(),
    "k3_weight_seven_halves": lambda spec: k3_weight_seven_halves(int(spec["d"])),
}


def from_json(spec) -> IntegerLattice:
    """Build a lattice from the JSON description {"name": ...} or {"gram": ...}."""
    if isinstance(spec, str):
        spec = json.loads(spec)
    if not isinstance(spec, dict):
        raise BadInput("lattice description must be a JSON object", "lattice")
    if "gram" in spec:
        try:
            return IntegerLattice(spec["gram"], "from_file", spec.get("name", ""))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, BadInput):
                raise
            raise BadInput(f"bad Gram matrix: {exc}", "lattice") from exc
    name = spec.get("name")
    if name is None:
        raise BadInput("lattice description needs 'name' or 'gram'", "lattice")
    if name in _NAMED_BUILDERS:
        try:
            return _NAMED_BUILDERS[name](spec)
        except KeyError as exc:
            raise BadInput(f"lattice {name} needs parameter {exc}", "lattice") from exc
    L = make_named(name, spec.get("n"))
    if spec.get("scale") is not None:
        L = rescale(L, int(spec["scale"]))
    return L
