"""The one-dimensional slice alpha(t) = |x*t - u|_1 and its subdifferential.

alpha is convex piecewise affine, so its subdifferential is a nondecreasing
step function of t.  It is single-valued off the breakpoints u_i/x_i (for
x_i != 0) and bridges the adjacent step values at each breakpoint.  The whole
structure is exact: breakpoints, step values and interval queries are all
rationals.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import (
    Instance,
    IntervalScalar,
    Point,
    RationalLike,
    check_dimensions,
    sgn,
    sign_interval,
)


@dataclass(frozen=True)
class StepFunction:
    """The nondecreasing, interval-valued step function t -> dalpha(t).

    ``jumps`` are the sorted distinct breakpoints; ``cell_values`` holds the
    (single) value on each open cell between consecutive breakpoints,
    including the two unbounded end cells, so
    ``len(cell_values) == len(jumps) + 1``.  ``jump_intervals[k]`` bridges
    ``cell_values[k]`` and ``cell_values[k+1]``.
    """

    jumps: tuple[Fraction, ...]
    cell_values: tuple[Fraction, ...]
    jump_intervals: tuple[IntervalScalar, ...]

    def __post_init__(self):
        if len(self.cell_values) != len(self.jumps) + 1:
            raise ValueError("need one cell value per open cell (jumps + 1)")
        if len(self.jump_intervals) != len(self.jumps):
            raise ValueError("need one interval per jump")


def alpha_value(x: Point, u: Instance, t: RationalLike) -> Fraction:
    """alpha(t) = |x*t - u|_1, exactly."""
    check_dimensions(x, u)
    t = Fraction(t)
    return sum((abs(xi * t - ui) for xi, ui in zip(x.x, u.u)), Fraction(0))


def _direct_value(x: Point, u: Instance, t: Fraction) -> Fraction:
    """sum_i sgn(x_i*t - u_i)*x_i; single-valued at any non-breakpoint t."""
    return sum((sgn(xi * t - ui) * xi for xi, ui in zip(x.x, u.u)), Fraction(0))


def direct_subdiff(x: Point, u: Instance, t: RationalLike) -> IntervalScalar:
    """dalpha(t) as the Minkowski sum of sign(x_i*t - u_i)*x_i terms.

    This is the defining formula, evaluated with no knowledge of the step
    structure; it is the cross-check oracle for ``eval_subdiff``.
    """
    check_dimensions(x, u)
    t = Fraction(t)
    acc = IntervalScalar.singleton(0)
    for xi, ui in zip(x.x, u.u):
        acc = acc + sign_interval(xi * t - ui).scale(xi)
    return acc


def build_step(x: Point, u: Instance) -> StepFunction:
    """Assemble the step function of dalpha for the pair (x, u).

    Breakpoints are the distinct ratios u_i/x_i over x_i != 0 (coincident
    ratios merge into a single jump).  Cell values come from direct
    evaluation at an interior rational point of each cell, midpoints between
    neighbors and +-1 beyond the extreme breakpoints, so there is a single
    evaluation code path shared with the cross-check oracle.
    """
    check_dimensions(x, u)
    jumps = sorted({ui / xi for xi, ui in zip(x.x, u.u) if xi != 0})

    probes: list[Fraction] = []
    if not jumps:
        probes.append(Fraction(0))
    else:
        probes.append(jumps[0] - 1)
        for a, b in zip(jumps, jumps[1:]):
            probes.append((a + b) / 2)
        probes.append(jumps[-1] + 1)

    cells = tuple(_direct_value(x, u, t) for t in probes)
    intervals = tuple(
        IntervalScalar(cells[k], cells[k + 1]) for k in range(len(jumps))
    )
    return StepFunction(tuple(jumps), cells, intervals)


def eval_subdiff(sf: StepFunction, t: RationalLike) -> IntervalScalar:
    """dalpha(t): the cell singleton off breakpoints, the bridge interval on them."""
    t = Fraction(t)
    k = bisect.bisect_left(sf.jumps, t)
    if k < len(sf.jumps) and sf.jumps[k] == t:
        return sf.jump_intervals[k]
    return IntervalScalar.singleton(sf.cell_values[k])


def zero_root_interval(
    sf: StepFunction,
) -> Optional[tuple[Optional[Fraction], Optional[Fraction]]]:
    """The closed interval {t : 0 in dalpha(t)}, or None when it is empty.

    Monotonicity makes the root set convex.  Unbounded ends are reported as
    None, so a step function that is identically zero returns (None, None).
    """
    m = len(sf.jumps)

    # Closed root pieces in left-to-right order: end cell / jump / cell / ...
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    found = False

    def note(piece_lo: Optional[Fraction], piece_hi: Optional[Fraction]):
        nonlocal lo, hi, found
        if not found:
            lo = piece_lo
            found = True
        hi = piece_hi

    if sf.cell_values[0] == 0:
        note(None, sf.jumps[0] if m else None)
    for k in range(m):
        if sf.jump_intervals[k].contains(0):
            note(sf.jumps[k], sf.jumps[k])
        if sf.cell_values[k + 1] == 0:
            note(sf.jumps[k], sf.jumps[k + 1] if k + 1 < m else None)

    if not found:
        return None
    return lo, hi
