"""Small dense exact LP: two-phase tableau simplex over ``Fraction`` with Bland's rule."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ._rational import to_fraction


class LPError(ValueError):
    pass


@dataclass(frozen=True)
class LPResult:
    """``status`` is "optimal", "infeasible" or "unbounded".

    For optimal problems ``dual`` solves ``max <b, u> s.t. A^T u <= c``.
    """

    status: str
    x: tuple | None = None
    value: Fraction | None = None
    dual: tuple | None = None


def _pivot(T: list[list[Fraction]], r: int, c: int) -> None:
    inv = 1 / T[r][c]
    T[r] = [v * inv for v in T[r]]
    row = T[r]
    for i in range(len(T)):
        if i != r:
            f = T[i][c]
            if f != 0:
                T[i] = [a - f * b for a, b in zip(T[i], row)]


def _run(T, basis, cost_row: int, allowed: int) -> str:
    """Simplex iterations on tableau ``T`` with objective row ``cost_row``.

    Columns ``>= allowed`` never enter. Last column is the rhs.
    """
    m = len(basis)
    while True:
        obj = T[cost_row]
        enter = next((j for j in range(allowed) if obj[j] < 0), None)
        if enter is None:
            return "optimal"
        best = None
        leave = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return "unbounded"
        _pivot(T, leave, enter)
        basis[leave] = enter


def linprog_exact(c: Sequence, A_eq: Sequence[Sequence], b_eq: Sequence) -> LPResult:
    """Minimise ``c.x`` subject to ``A_eq x = b_eq``, ``x >= 0`` exactly."""
    c = [to_fraction(v) for v in c]
    A = [[to_fraction(v) for v in row] for row in A_eq]
    b = [to_fraction(v) for v in b_eq]
    m, n = len(A), len(c)
    if any(len(row) != n for row in A) or len(b) != m:
        raise LPError("inconsistent LP dimensions")
    signs = [1 if bi >= 0 else -1 for bi in b]
    # columns: n originals, m artificials, rhs; rows: m constraints, phase-2 cost, phase-1 cost
    T = []
    for i in range(m):
        row = [signs[i] * v for v in A[i]]
        row += [Fraction(int(i == k)) for k in range(m)]
        row.append(signs[i] * b[i])
        T.append(row)
    T.append(list(c) + [Fraction(0)] * m + [Fraction(0)])
    phase1 = [Fraction(0)] * (n + m + 1)
    for i in range(m):
        phase1 = [p - v for p, v in zip(phase1, T[i])]
    for k in range(m):
        phase1[n + k] = Fraction(0)
    T.append(phase1)
    basis = [n + i for i in range(m)]
    _run(T, basis, m + 1, n)
    if T[m + 1][-1] != 0:
        return LPResult("infeasible")
    # drive zero-level artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n:
            j = next((j for j in range(n) if T[i][j] != 0), None)
            if j is not None:
                _pivot(T, i, j)
                basis[i] = j
    status = _run(T, basis, m, n)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = T[i][-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    # reduced cost of artificial k is -u_k (in the sign-adjusted rows)
    dual = tuple(-T[m][n + k] * signs[k] for k in range(m))
    return LPResult("optimal", tuple(x), value, dual)
