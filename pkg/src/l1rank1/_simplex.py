"""Exact-arithmetic phase-1 simplex for box-constrained linear feasibility.

Solves: find v with  A v = b  and  -1 <= v_k <= 1,  entirely in rational
arithmetic, so feasibility verdicts are exact rather than tolerance-based.
Bland's least-index rule makes the pivoting finite on degenerate tableaus.

gmpy2.mpq is used for tableau arithmetic when available (about an order of
magnitude faster than Fraction on small numbers); inputs and outputs are
plain Fractions either way.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

try:
    from gmpy2 import mpq as _q
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _q = Fraction


def _to_fraction(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


def solve_box_feasibility(
    rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]
) -> Optional[list[Fraction]]:
    """Find v in [-1, 1]^m with rows . v = rhs, or None if infeasible.

    The box is shifted to p = v + 1 in [0, 2]; upper bounds become slack
    rows p_k + s_k = 2 and the equalities get one artificial variable each.
    Phase-1 minimizes the artificial sum; a zero optimum is (exact)
    feasibility and the v values are read off the final basis.
    """
    neq = len(rows)
    m = len(rows[0]) if neq else 0
    if any(len(r) != m for r in rows):
        raise ValueError("ragged constraint matrix")
    if m == 0:
        return [] if all(v == 0 for v in rhs) else None

    zero, one, two = _q(0), _q(1), _q(2)
    a_rows = [[_q(v) for v in r] for r in rows]
    # b for the shifted variable p = v + 1.
    b = [_q(rhs[i]) + sum(a_rows[i], zero) for i in range(neq)]

    # Columns: p_0..p_{m-1}, s_0..s_{m-1}, artificials a_0..a_{neq-1}.
    ncols = 2 * m + neq
    nrows = neq + m
    tableau: list[list] = []
    basis: list[int] = []

    for i in range(neq):
        flip = b[i] < zero
        row = [(-c if flip else c) for c in a_rows[i]]
        row += [zero] * m
        row += [one if k == i else zero for k in range(neq)]
        row.append(-b[i] if flip else b[i])
        tableau.append(row)
        basis.append(2 * m + i)
    for k in range(m):
        row = [zero] * ncols
        row[k] = one
        row[m + k] = one
        row.append(two)
        tableau.append(row)
        basis.append(m + k)

    # Phase-1 reduced costs: r_j = c_j - sum of artificial-basic rows.
    cost = [zero] * (ncols + 1)
    for j in range(2 * m, ncols):
        cost[j] = one
    for i in range(neq):
        for j in range(ncols + 1):
            cost[j] -= tableau[i][j]

    while True:
        enter = next((j for j in range(ncols) if cost[j] < zero), None)
        if enter is None:
            break
        # Ratio test with Bland's tie-break on the leaving basic index.
        leave = None
        best = None
        for i in range(nrows):
            coef = tableau[i][enter]
            if coef > zero:
                ratio = tableau[i][ncols] / coef
                if best is None or ratio < best or (
                    ratio == best and basis[i] < basis[leave]
                ):
                    best = ratio
                    leave = i
        if leave is None:
            # Phase-1 objective is bounded below by 0, so this cannot happen.
            raise RuntimeError("unbounded phase-1 tableau")
        _pivot(tableau, cost, leave, enter, nrows, ncols)
        basis[leave] = enter

    if -cost[ncols] != zero:  # residual artificial mass: infeasible
        return None

    p = [zero] * m
    for i in range(nrows):
        if basis[i] < m:
            p[basis[i]] = tableau[i][ncols]
    v = [_to_fraction(pk - one) for pk in p]

    # Exactness insurance: the basis reading must satisfy the original system.
    for i in range(neq):
        if sum((rows[i][k] * v[k] for k in range(m)), Fraction(0)) != rhs[i]:
            raise RuntimeError("simplex returned a non-solution")
    if any(abs(vk) > 1 for vk in v):
        raise RuntimeError("simplex returned an out-of-box value")
    return v


def _pivot(tableau, cost, leave: int, enter: int, nrows: int, ncols: int):
    pivot_row = tableau[leave]
    inv = 1 / pivot_row[enter]
    for j in range(ncols + 1):
        pivot_row[j] *= inv
    for row in tableau:
        if row is pivot_row:
            continue
        factor = row[enter]
        if factor != 0:
            for j in range(ncols + 1):
                row[j] -= factor * pivot_row[j]
    factor = cost[enter]
    if factor != 0:
        for j in range(ncols + 1):
            cost[j] -= factor * pivot_row[j]
