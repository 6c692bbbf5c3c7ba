"""Exact rational building blocks for the rank-one l1 factorization objective.

The function under study is

    f(x) = 1/2 * sum_{i,j} |x_i*x_j - u_i*u_j|,   x in R^n,

for a fixed target vector u. Everything here runs in exact rational
arithmetic (`fractions.Fraction`); floating point only enters in the solver
and estimator layers, which certify their findings back through this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]


class DimensionMismatchError(ValueError):
    """Point and instance dimensions do not agree."""


class NotStationaryError(ValueError):
    """An operation that requires a first-order stationary point got a non-stationary one."""


class InvariantViolationError(RuntimeError):
    """Two provably-equivalent computations disagreed; this is a bug, not bad input."""


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ints, 'p/q' strings, floats (exact binary value) and Fractions."""
    return Fraction(value)


def as_rational_vector(values: Sequence[RationalLike]) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class Instance:
    """Problem data: the target vector u."""

    u: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "u", as_rational_vector(self.u))

    @property
    def n(self) -> int:
        return len(self.u)


@dataclass(frozen=True)
class Point:
    """A candidate x, evaluated and certified against a matching Instance."""

    x: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", as_rational_vector(self.x))

    @property
    def n(self) -> int:
        return len(self.x)


def check_dimensions(x: Point, u: Instance) -> int:
    if x.n != u.n:
        raise DimensionMismatchError(f"point has n={x.n}, instance has n={u.n}")
    return u.n


@dataclass(frozen=True)
class IntervalScalar:
    """A closed rational interval [lo, hi]; singletons have lo == hi.

    This is the value type of the set-valued sign map and of the partial
    subdifferentials, which are Minkowski sums of scaled sign intervals.
    """

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"interval endpoints out of order: [{self.lo}, {self.hi}]")

    @classmethod
    def singleton(cls, value: RationalLike) -> "IntervalScalar":
        v = Fraction(value)
        return cls(v, v)

    @property
    def is_singleton(self) -> bool:
        return self.lo == self.hi

    def contains(self, value: RationalLike) -> bool:
        v = Fraction(value)
        return self.lo <= v <= self.hi

    def __add__(self, other: "IntervalScalar") -> "IntervalScalar":
        return IntervalScalar(self.lo + other.lo, self.hi + other.hi)

    def scale(self, c: RationalLike) -> "IntervalScalar":
        """Pointwise product with a scalar; endpoints swap when c < 0."""
        c = Fraction(c)
        a, b = self.lo * c, self.hi * c
        return IntervalScalar(a, b) if a <= b else IntervalScalar(b, a)


ZERO_INTERVAL = IntervalScalar(Fraction(0), Fraction(0))
FULL_SIGN_INTERVAL = IntervalScalar(Fraction(-1), Fraction(1))


def sign_interval(t: RationalLike) -> IntervalScalar:
    """Set-valued sign: {t/|t|} for t != 0 and the full interval [-1, 1] at 0."""
    t = Fraction(t)
    if t > 0:
        return IntervalScalar.singleton(1)
    if t < 0:
        return IntervalScalar.singleton(-1)
    return FULL_SIGN_INTERVAL


def sgn(t: RationalLike) -> Fraction:
    """Single-valued sign: t/|t| for t != 0, and 0 at 0."""
    t = Fraction(t)
    if t > 0:
        return Fraction(1)
    if t < 0:
        return Fraction(-1)
    return Fraction(0)


@dataclass(frozen=True)
class ResidualMatrix:
    """The symmetric matrix with entries x_i*x_j - u_i*u_j."""

    entries: tuple[tuple[Fraction, ...], ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i][j]


@dataclass(frozen=True)
class IntervalMatrix:
    """Entrywise sign intervals of a residual matrix: the constraint set for witnesses."""

    entries: tuple[tuple[IntervalScalar, ...], ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> IntervalScalar:
        i, j = ij
        return self.entries[i][j]


def residual(x: Point, u: Instance) -> ResidualMatrix:
    """Exact residual matrix x x^T - u u^T."""
    n = check_dimensions(x, u)
    rows = tuple(
        tuple(x.x[i] * x.x[j] - u.u[i] * u.u[j] for j in range(n)) for i in range(n)
    )
    return ResidualMatrix(rows)


def sign_matrix(r: ResidualMatrix) -> IntervalMatrix:
    """Entrywise set-valued sign of the residual."""
    return IntervalMatrix(
        tuple(tuple(sign_interval(v) for v in row) for row in r.entries)
    )


def objective(x: Point, u: Instance) -> Fraction:
    """f(x) = 1/2 * sum_{i,j} |x_i*x_j - u_i*u_j|, exactly."""
    n = check_dimensions(x, u)
    total = Fraction(0)
    for i in range(n):
        for j in range(n):
            total += abs(x.x[i] * x.x[j] - u.u[i] * u.u[j])
    return total / 2


def l1_norm(values: Sequence[Fraction]) -> Fraction:
    return sum((abs(v) for v in values), Fraction(0))


def partial_subdiff(x: Point, u: Instance, i: int) -> IntervalScalar:
    """Partial subdifferential along coordinate i (0-based).

    Minkowski sum over j of sign(x_i*x_j - u_i*u_j) * x_j.  Set-valued terms
    with x_j = 0 contribute the singleton {0}, so the result is a singleton
    exactly when no zero residual meets a nonzero x_j.
    """
    n = check_dimensions(x, u)
    if not 0 <= i < n:
        raise IndexError(f"coordinate index {i} out of range for n={n}")
    acc = ZERO_INTERVAL
    for j in range(n):
        r = x.x[i] * x.x[j] - u.u[i] * u.u[j]
        acc = acc + sign_interval(r).scale(x.x[j])
    return acc


def subdiff_box(x: Point, u: Instance) -> tuple[IntervalScalar, ...]:
    """All n partial-subdifferential intervals.

    The subdifferential of f is contained in the product of these intervals,
    so 0 outside any of them rules out stationarity (necessary test only).
    """
    n = check_dimensions(x, u)
    return tuple(partial_subdiff(x, u, i) for i in range(n))


def box_contains_zero(box: Sequence[IntervalScalar]) -> bool:
    return all(iv.contains(0) for iv in box)


def reduce_support(x: Point, u: Instance) -> tuple[Point, Instance, tuple[int, ...]]:
    """Restrict (x, u) to the coordinates where u_i != 0.

    Returns the restricted point and instance plus the 0-based indices they
    came from.  Both outputs are empty when u = 0.
    """
    check_dimensions(x, u)
    keep = tuple(i for i in range(u.n) if u.u[i] != 0)
    reduced_x = Point(tuple(x.x[i] for i in keep))
    reduced_u = Instance(tuple(u.u[i] for i in keep))
    return reduced_x, reduced_u, keep
