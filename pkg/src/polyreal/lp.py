"""Exact rational simplex for feasibility of ``A y = b, y >= 0``.

Phase one only: artificial variables are driven out with Bland's rule, so
the method terminates on degenerate inputs. Infeasibility comes with a
Farkas vector ``u`` such that ``A^T u >= 0`` and ``b . u < 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass
class LPResult:
    feasible: bool
    solution: list[Fraction] | None = None
    farkas: list[Fraction] | None = None
    pivots: int = 0


def is_farkas_certificate(A, b, u) -> bool:
    """True iff ``A^T u >= 0`` and ``b . u < 0`` hold exactly."""
    m, n = len(A), len(A[0]) if A else 0
    if sum(b[i] * u[i] for i in range(m)) >= 0:
        return False
    return all(sum(A[i][j] * u[i] for i in range(m)) >= 0 for j in range(n))


def solve_feasibility(A: Sequence[Sequence], b: Sequence, max_pivots: int | None = None) -> LPResult:
    """Find ``y >= 0`` with ``A y = b`` over the rationals, or a Farkas certificate."""
    m = len(A)
    n = len(A[0]) if m else 0
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    if m == 0:
        return LPResult(True, [Fraction(0)] * n)
    # flip rows so b >= 0
    flip = [1] * m
    for i in range(m):
        if b[i] < 0:
            flip[i] = -1
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]
    width = n + m
    # tableau rows: [A | I | b]
    rows = [A[i] + [Fraction(int(i == k)) for k in range(m)] + [b[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    # phase-one cost: sum of artificials; reduced costs c_j - c_B B^-1 A_j
    cost = [-sum(rows[i][j] for i in range(m)) for j in range(n)] + [Fraction(0)] * m
    cost.append(-sum(b))
    pivots = 0
    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            a = rows[i][enter]
            if a > 0:
                ratio = rows[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            # cannot happen for a phase-one problem (objective bounded below by 0)
            raise RuntimeError("unbounded phase-one problem")
        piv_row = rows[leave]
        p = piv_row[enter]
        if p != 1:
            piv_row = [v / p for v in piv_row]
            rows[leave] = piv_row
        nz = [j for j, v in enumerate(piv_row) if v]
        for i in range(m):
            if i != leave:
                f = rows[i][enter]
                if f:
                    row = rows[i]
                    for j in nz:
                        row[j] -= f * piv_row[j]
        f = cost[enter]
        for j in nz:
            cost[j] -= f * piv_row[j]
        basis[leave] = enter
        pivots += 1
        if max_pivots is not None and pivots > max_pivots:
            raise RuntimeError(f"pivot limit {max_pivots} exceeded")
    objective = -cost[-1]
    if objective == 0:
        y = [Fraction(0)] * n
        for i, j in enumerate(basis):
            if j < n:
                y[j] = rows[i][-1]
        return LPResult(True, y, pivots=pivots)
    # reduced cost of artificial i is 1 - w_i; u = -w is the Farkas vector
    w = [1 - cost[n + i] for i in range(m)]
    u = [-w[i] * flip[i] for i in range(m)]
    return LPResult(False, farkas=u, pivots=pivots)
