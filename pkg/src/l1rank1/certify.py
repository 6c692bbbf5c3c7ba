"""First-order stationarity certification, decided two independent ways.

A point x is stationary for f iff some symmetric matrix L with entries in
the sign intervals of the residual satisfies L x = 0.  That membership is
decided here both by the closed-form stationary-set description
(inner-product + box conditions, or x = +-u) and by exact LP feasibility
for an explicit witness.  The two tests are provably equivalent, so any
disagreement raises InvariantViolationError rather than returning a value.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ._simplex import solve_box_feasibility
from .alpha import build_step, eval_subdiff
from .core import (
    Instance,
    InvariantViolationError,
    Point,
    box_contains_zero,
    check_dimensions,
    objective,
    residual,
    sgn,
    sign_interval,
    subdiff_box,
)

Matrix = tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class Certificate:
    """Outcome of the stationarity tests at one point.

    ``stationary``, ``via_lemma2`` and the presence of ``witness`` always
    agree (enforced at construction time by ``certify``); ``is_global``
    means f(x) = 0.
    """

    stationary: bool
    via_lemma2: bool
    witness: Optional[Matrix]
    box_test_passed: bool
    is_global: bool


def stationary_lemma2(x: Point, u: Instance) -> bool:
    """Closed-form stationarity test.

    True iff x = +-u, or |x_i| <= |u_i| for all i with the sign-weighted sum
    sum_{u_i != 0} sgn(u_i) x_i equal to zero.  On that set x_i = 0 wherever
    u_i = 0, so the set-valued sign of u contributes nothing and the inner
    product is single-valued.
    """
    check_dimensions(x, u)
    if x.x == u.u or x.x == tuple(-v for v in u.u):
        return True
    if any(abs(xi) > abs(ui) for xi, ui in zip(x.x, u.u)):
        return False
    weighted = sum((sgn(ui) * xi for xi, ui in zip(x.x, u.u)), Fraction(0))
    return weighted == 0


def witness_lp(x: Point, u: Instance) -> Optional[Matrix]:
    """Search for a symmetric witness L with L x = 0, entrywise in its sign interval.

    Entries over nonzero residuals are forced to that residual's sign; the
    entries over zero residuals (upper triangle only, symmetry is structural)
    are free in [-1, 1].  Feasibility of the resulting n linear equations is
    decided by exact phase-1 simplex, so absence of a witness is a theorem
    about this point, not a numerical judgement.
    """
    n = check_dimensions(x, u)
    res = residual(x, u)

    free_index: dict[tuple[int, int], int] = {}
    for i in range(n):
        for j in range(i, n):
            if res[i, j] == 0:
                free_index[(i, j)] = len(free_index)
    m = len(free_index)

    # Row i of L x: forced entries contribute constants, free ones coefficients.
    rows = [[Fraction(0)] * m for _ in range(n)]
    rhs = [Fraction(0)] * n
    for i in range(n):
        for j in range(n):
            key = (i, j) if i <= j else (j, i)
            if key in free_index:
                rows[i][free_index[key]] += x.x[j]
            else:
                rhs[i] -= sgn(res[i, j]) * x.x[j]

    v = solve_box_feasibility(rows, rhs)
    if v is None:
        return None

    entries = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            key = (i, j) if i <= j else (j, i)
            if key in free_index:
                entries[i][j] = v[free_index[key]]
            else:
                entries[i][j] = sgn(res[i, j])
    return tuple(tuple(row) for row in entries)


def witness_is_valid(x: Point, u: Instance, w: Matrix) -> bool:
    """Check all three membership conditions exactly: symmetry, L x = 0, sign intervals."""
    n = check_dimensions(x, u)
    res = residual(x, u)
    for i in range(n):
        if sum((w[i][j] * x.x[j] for j in range(n)), Fraction(0)) != 0:
            return False
        for j in range(n):
            if w[i][j] != w[j][i]:
                return False
            if not sign_interval(res[i, j]).contains(w[i][j]):
                return False
    return True


def certify(x: Point, u: Instance) -> Certificate:
    """Run both stationarity tests plus the subdifferential box pre-test.

    The closed form and the LP cannot disagree; if they do, or if a witness
    exists while the box test excludes zero, certification aborts with
    InvariantViolationError carrying a diagnostic dump.
    """
    check_dimensions(x, u)
    via_lemma2 = stationary_lemma2(x, u)
    witness = witness_lp(x, u)
    box_ok = box_contains_zero(subdiff_box(x, u))

    if via_lemma2 != (witness is not None):
        raise InvariantViolationError(
            "closed-form and LP stationarity tests disagree: "
            f"closed_form={via_lemma2}, lp_witness={witness is not None}, "
            f"x={[str(v) for v in x.x]}, u={[str(v) for v in u.u]}"
        )
    if witness is not None and not witness_is_valid(x, u, witness):
        raise InvariantViolationError(
            f"LP produced an invalid witness at x={[str(v) for v in x.x]}, "
            f"u={[str(v) for v in u.u]}"
        )
    if not box_ok and via_lemma2:
        raise InvariantViolationError(
            "subdifferential box excludes zero at a point both tests call "
            f"stationary: x={[str(v) for v in x.x]}, u={[str(v) for v in u.u]}"
        )

    is_global = objective(x, u) == 0
    if is_global and not via_lemma2:
        raise InvariantViolationError(
            f"global minimum not certified stationary: x={[str(v) for v in x.x]}"
        )
    return Certificate(
        stationary=via_lemma2,
        via_lemma2=via_lemma2,
        witness=witness,
        box_test_passed=box_ok,
        is_global=is_global,
    )


def lemma1_check(x: Point, u: Instance) -> bool:
    """Stationarity implies f(x) = 0 or 0 in dalpha(0); True iff that holds at x."""
    if not certify(x, u).stationary:
        return True
    if objective(x, u) == 0:
        return True
    return eval_subdiff(build_step(x, u), 0).contains(0)
