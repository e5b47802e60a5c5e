"""Exact enumeration of lattice points in a shifted ellipsoid.

For a positive-definite integral Gram matrix G, a rational shift c and a
bound B, we visit every x in c + Z^n with x^T G x <= B.  Write the exact
LDL^T decomposition as x^T G x = sum D_i (x_i + sum_{j>i} U_ij x_j)^2 and
clear denominators: with e = den(c), H = lcm den(U), S = lcm den(D),

    S H^2 e^2 x^T G x = sum_i W_i Y_i^2,   Y_i = H X_i + sum_{j>i} A_ij X_j,

where X = e x is an integer vector, W_i = S D_i and A_ij = H U_ij.  Every
quantity in the search is then an integer, so bounds are exact.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import ComputationError
from .lattice import ldl, rational_inverse

DEFAULT_BUDGET = 10**9
_INT64_SAFE = 2**62


class EnumerationBudgetExceeded(ComputationError):
    module = "theta"


@dataclass(frozen=True)
class _Plan:
    n: int
    e: int
    H: int
    S: int
    W: tuple[int, ...]
    A: tuple[tuple[int, ...], ...]
    res: tuple[int, ...]  # X_i = res_i + e * t
    R: int
    scale: int  # S H^2 e^2


def predicted_points(G, bound) -> float:
    """Volume of {x : x^T G x <= bound}; a proxy for the number of lattice points."""
    n = len(G)
    det = abs(_det(G))
    vol_ball = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
    return vol_ball * float(bound) ** (n / 2) / math.sqrt(det)


def _det(G) -> int:
    from .lattice import determinant

    return determinant([list(r) for r in G])


def _plan(G, shift, bound) -> _Plan:
    n = len(G)
    shift = [Fraction(x) for x in shift] if shift is not None else [Fraction(0)] * n
    D, U = ldl(G)
    e = math.lcm(*(x.denominator for x in shift))
    H = math.lcm(*(U[i][j].denominator for i in range(n) for j in range(i + 1, n))) if n > 1 else 1
    S = math.lcm(*(d.denominator for d in D))
    W = tuple(int(S * d) for d in D)
    A = tuple(tuple(int(H * U[i][j]) if j > i else 0 for j in range(n)) for i in range(n))
    res = tuple(int(e * x) % e for x in shift)
    scale = S * H * H * e * e
    R = math.floor(Fraction(bound) * scale)
    return _Plan(n, e, H, S, W, A, res, R, scale)


def _coordinate_bound(G, shift, bound, e) -> int:
    Gi = rational_inverse(G)
    m = max(Gi[i][i] for i in range(len(G)))
    c = max((abs(Fraction(x)) for x in shift), default=0) if shift is not None else 0
    return e * (math.isqrt(math.ceil(Fraction(bound) * m)) + 2 + math.ceil(c))


def _fits_int64(plan: _Plan, xmax: int) -> bool:
    amax = max((abs(a) for row in plan.A for a in row), default=0)
    return (
        plan.R < _INT64_SAFE
        and (plan.n * amax + plan.H) * xmax < _INT64_SAFE
        and max(plan.W) * (plan.n * amax + plan.H) ** 2 * xmax * xmax < _INT64_SAFE * 4
        and plan.R < 2**31 * 16
    )


def _iterate(plan: _Plan) -> Iterator[tuple[tuple[int, ...], int]]:
    """Pure-Python depth-first search yielding (X, sum W_i Y_i^2)."""
    n, e, H, W, A, res = plan.n, plan.e, plan.H, plan.W, plan.A, plan.res
    X = [0] * n
    He = H * e

    def rec(i: int, rem: int, acc: int):
        a = sum(A[i][j] * X[j] for j in range(i + 1, n))
        b = math.isqrt(rem // W[i])
        base = a + H * res[i]
        lo = -((b + base) // He)  # ceil((-b - base)/He)
        hi = (b - base) // He
        for t in range(lo, hi + 1):
            X[i] = res[i] + e * t
            y = H * X[i] + a
            val = W[i] * y * y
            if val > rem:
                continue
            if i == 0:
                yield tuple(X), acc + val
            else:
                yield from rec(i - 1, rem - val, acc + val)

    yield from rec(n - 1, plan.R, 0)


try:
    import numba

    @numba.njit(cache=True)
    def _isqrt64(v):  # pragma: no cover - compiled
        s = np.int64(math.sqrt(float(v)))
        while s * s > v:
            s -= 1
        while (s + 1) * (s + 1) <= v:
            s += 1
        return s

    @numba.njit(cache=True)
    def _histogram_kernel(W, A, res, e, H, R):  # pragma: no cover - compiled
        n = W.shape[0]
        counts = np.zeros(R + 1, dtype=np.int64)
        X = np.zeros(n, dtype=np.int64)
        rem = np.zeros(n + 1, dtype=np.int64)
        acc = np.zeros(n + 1, dtype=np.int64)
        hi = np.zeros(n, dtype=np.int64)
        cur = np.zeros(n, dtype=np.int64)
        aval = np.zeros(n, dtype=np.int64)
        He = H * e
        rem[n] = R
        i = n - 1
        # enter level i
        entering = True
        while True:
            if entering:
                a = 0
                for j in range(i + 1, n):
                    a += A[i, j] * X[j]
                aval[i] = a
                b = _isqrt64(rem[i + 1] // W[i])
                base = a + H * res[i]
                lo = -((b + base) // He)
                hi[i] = (b - base) // He
                cur[i] = lo - 1
                entering = False
            cur[i] += 1
            if cur[i] > hi[i]:
                i += 1
                if i == n:
                    break
                continue
            X[i] = res[i] + e * cur[i]
            y = H * X[i] + aval[i]
            val = W[i] * y * y
            if val > rem[i + 1]:
                continue
            if i == 0:
                counts[acc[1] + val] += 1
            else:
                rem[i] = rem[i + 1] - val
                acc[i] = acc[i + 1] + val
                i -= 1
                entering = True
        return counts

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def norm_histogram(G, shift=None, bound=0, budget: int | None = DEFAULT_BUDGET) -> dict[Fraction, int]:
    """Counts of vectors in shift + Z^n by exact norm x^T G x, for norms <= bound.

    G must be positive definite.
    """
    n = len(G)
    if budget is not None and predicted_points(G, bound) > budget:
        raise EnumerationBudgetExceeded(
            f"predicted {predicted_points(G, bound):.3g} points exceeds budget {budget}"
        )
    plan = _plan(G, shift, bound)
    if plan.R < 0:
        return {}
    xmax = _coordinate_bound(G, shift, bound, plan.e)
    if HAVE_NUMBA and _fits_int64(plan, xmax) and plan.R <= 5 * 10**7:
        counts = _histogram_kernel(
            np.array(plan.W, dtype=np.int64),
            np.array(plan.A, dtype=np.int64).reshape(n, n),
            np.array(plan.res, dtype=np.int64),
            plan.e,
            plan.H,
            plan.R,
        )
        nz = np.nonzero(counts)[0]
        raw = {int(t): int(counts[t]) for t in nz}
    else:
        raw = Counter(t for _, t in _iterate(plan))
    return {Fraction(t, plan.scale): c for t, c in sorted(raw.items())}


def enumerate_vectors(G, shift=None, bound=0) -> Iterator[tuple[tuple[Fraction, ...], Fraction]]:
    """Yield (x, x^T G x) for all x in shift + Z^n with norm <= bound."""
    plan = _plan(G, shift, bound)
    if plan.R < 0:
        return
    for X, t in _iterate(plan):
        yield tuple(Fraction(v, plan.e) for v in X), Fraction(t, plan.scale)


def vectors_of_norm(G, norm) -> Iterator[tuple[int, ...]]:
    """Integer vectors with x^T G x == norm exactly (G positive definite)."""
    for x, t in enumerate_vectors(G, None, norm):
        if t == norm:
            yield tuple(int(v) for v in x)


def short_vectors(G, bound) -> list[tuple[tuple[int, ...], Fraction]]:
    return [(tuple(int(v) for v in x), t) for x, t in enumerate_vectors(G, None, bound)]


def brute_force_histogram(G, shift: Sequence, bound, box: int) -> dict[Fraction, int]:
    """Histogram by scanning the box |z_i| <= box; an independent oracle for small cases."""
    import itertools

    n = len(G)
    shift = [Fraction(x) for x in shift] if shift is not None else [Fraction(0)] * n
    out: Counter = Counter()
    for z in itertools.product(range(-box, box + 1), repeat=n):
        x = [s + v for s, v in zip(shift, z)]
        t = sum(x[i] * G[i][j] * x[j] for i in range(n) for j in range(n))
        if t <= bound:
            out[t] += 1
    return dict(sorted(out.items()))
