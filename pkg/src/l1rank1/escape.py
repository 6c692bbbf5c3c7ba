"""Second-order machinery: escape directions and the exact decrease law.

At any first-order stationary x that is not a global minimizer, stepping
toward theta*u (theta = +-1) along w = theta*u - x scales the objective by
(1 - t^2) exactly.  That makes the second subderivative at most -2 f(x), so
no spurious point is second-order stationary.  This module computes the
direction, the exact curve, a numerical upper-bound estimator for the
second subderivative, and the bilinear-form identity used to rule out
stationarity of double-ratio configurations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .certify import certify
from .core import (
    Instance,
    InvariantViolationError,
    NotStationaryError,
    Point,
    RationalLike,
    as_rational_vector,
    check_dimensions,
    objective,
    residual,
    sgn,
)

Matrix = tuple[tuple[Fraction, ...], ...]


class CurvePoint(NamedTuple):
    t: Fraction
    f_value: Fraction
    predicted: Fraction


@dataclass(frozen=True)
class EscapeReport:
    """Descent evidence along w = theta*u - x at a certified stationary point."""

    theta: int
    w: tuple[Fraction, ...]
    curve: tuple[CurvePoint, ...]
    d2_estimate: float
    certified_spurious: bool


@dataclass(frozen=True)
class GammaConfig:
    """A double-ratio configuration: x_i = mu*u_i on one block, u_i/mu on the other.

    Requires mu > 1, a partition of the coordinates into two nonempty blocks,
    and a target u with no zero entries.
    """

    mu: Fraction
    block_mu: tuple[int, ...]
    block_inv: tuple[int, ...]
    u: Instance

    def __post_init__(self):
        object.__setattr__(self, "mu", Fraction(self.mu))
        object.__setattr__(self, "block_mu", tuple(self.block_mu))
        object.__setattr__(self, "block_inv", tuple(self.block_inv))
        if self.mu <= 1:
            raise ValueError(f"mu must exceed 1, got {self.mu}")
        if not self.block_mu or not self.block_inv:
            raise ValueError("both blocks must be nonempty")
        seen = set(self.block_mu) | set(self.block_inv)
        if len(self.block_mu) + len(self.block_inv) != len(seen):
            raise ValueError("blocks overlap")
        if seen != set(range(self.u.n)):
            raise ValueError("blocks must partition the coordinate set")
        if any(v == 0 for v in self.u.u):
            raise ValueError("configuration requires a target with no zeros")


def _direction(x: Point, u: Instance, theta: int) -> tuple[Fraction, ...]:
    if theta not in (1, -1):
        raise ValueError(f"theta must be +1 or -1, got {theta}")
    return tuple(theta * ui - xi for xi, ui in zip(x.x, u.u))


def escape_direction(x: Point, u: Instance, theta: int) -> tuple[Fraction, ...]:
    """w = theta*u - x.  Only defined at stationary points, where the decrease law holds."""
    check_dimensions(x, u)
    w = _direction(x, u, theta)
    if not certify(x, u).stationary:
        raise NotStationaryError("escape directions are only defined at stationary points")
    return w


def point_along(x: Point, w: Sequence[Fraction], t: RationalLike) -> Point:
    t = Fraction(t)
    return Point(tuple(xi + t * wi for xi, wi in zip(x.x, w)))


def decrease_curve(
    x: Point, u: Instance, theta: int, t_grid: Sequence[RationalLike]
) -> tuple[CurvePoint, ...]:
    """Sample f(x + t w) against the predicted (1 - t^2) f(x) on a grid in (0, 1].

    Both columns are exact rationals.  At points of the stationary polytope
    they agree exactly for every t in (0, 1]; at x = +-u the law reduces to
    the w = 0 case.
    """
    ts = [Fraction(t) for t in t_grid]
    if any(not 0 < t <= 1 for t in ts):
        raise ValueError("t grid must lie in (0, 1]")
    if not certify(x, u).stationary:
        raise NotStationaryError("the decrease law is only proven at stationary points")
    w = _direction(x, u, theta)
    f0 = objective(x, u)
    return tuple(
        CurvePoint(t, objective(point_along(x, w, t), u), (1 - t * t) * f0)
        for t in ts
    )


def ratio_check(x: Point, u: Instance, theta: int, t: RationalLike) -> bool:
    """Check (x_i + t w_i)(x_j + t w_j) / (u_i u_j) <= 1 for every pair with u_i u_j != 0.

    The bound is guaranteed at stationary points for t in (0, 1]; the check
    itself runs anywhere (no stationarity enforcement).
    """
    n = check_dimensions(x, u)
    t = Fraction(t)
    w = _direction(x, u, theta)
    stepped = [xi + t * wi for xi, wi in zip(x.x, w)]
    for i in range(n):
        for j in range(i, n):
            denom = u.u[i] * u.u[j]
            if denom != 0 and sgn(denom) * (stepped[i] * stepped[j] - denom) > 0:
                return False
    return True


def _objective_f64(xf: np.ndarray, uf: np.ndarray) -> float:
    r = np.outer(xf, xf) - np.outer(uf, uf)
    return 0.5 * float(np.abs(r).sum())


def second_subderivative_estimate(
    x: Point,
    u: Instance,
    w: Sequence[RationalLike],
    tau_count: int = 12,
    perturb_count: int = 8,
    seed: int = 0,
) -> float:
    """Upper-bound estimate of the second subderivative of f at x (with v = 0) along w.

    Minimizes the quotient  [f(x + tau w') - f(x)] / (tau^2 / 2)  over
    tau = 2^-k, k = 1..tau_count, and w' in {w} union perturbations
    w + delta with components of delta uniform in [-tau, tau], emulating the
    liminf's joint tau -> 0, w' -> w convergence.  The unperturbed quotients
    are computed in exact rational arithmetic (so along a certified escape
    direction the result is exactly -2 f(x)); perturbed ones use doubles.
    A negative value certifies a direction of second-order descent; a
    nonnegative one is inconclusive.

    Growing tau_count or perturb_count with the same seed minimizes over a
    superset, so the estimate never increases.
    """
    check_dimensions(x, u)
    w_exact = as_rational_vector(float(v) if isinstance(v, np.floating) else v for v in w)
    f0 = objective(x, u)

    best: Fraction | float | None = None
    for k in range(1, tau_count + 1):
        tau = Fraction(1, 2**k)
        ft = objective(point_along(x, w_exact, tau), u)
        quotient = (ft - f0) / (tau * tau / 2)
        if best is None or quotient < best:
            best = quotient

    if perturb_count > 0:
        xf = np.array([float(v) for v in x.x])
        uf = np.array([float(v) for v in u.u])
        wf = np.array([float(v) for v in w_exact])
        f0f = float(f0)
        for k in range(1, tau_count + 1):
            tau = 2.0**-k
            for j in range(perturb_count):
                rng = np.random.default_rng([seed, k, j])
                delta = tau * rng.uniform(-1.0, 1.0, size=len(wf))
                quotient = (_objective_f64(xf + tau * (wf + delta), uf) - f0f) / (
                    0.5 * tau * tau
                )
                if quotient < best:
                    best = quotient

    return float(best)


def escape_report(
    x: Point,
    u: Instance,
    theta: int,
    t_grid: Sequence[RationalLike],
    tau_count: int = 12,
    perturb_count: int = 0,
    seed: int = 0,
) -> EscapeReport:
    """Assemble the full descent report for one theta at a certified stationary point."""
    cert = certify(x, u)
    if not cert.stationary:
        raise NotStationaryError("escape reports require a stationary point")
    w = _direction(x, u, theta)
    curve = decrease_curve(x, u, theta, t_grid)
    d2 = second_subderivative_estimate(
        x, u, w, tau_count=tau_count, perturb_count=perturb_count, seed=seed
    )
    spurious = not cert.is_global
    if spurious and not d2 < 0:
        raise InvariantViolationError(
            f"spurious stationary point with nonnegative descent estimate {d2}"
        )
    return EscapeReport(
        theta=theta, w=w, curve=curve, d2_estimate=d2, certified_spurious=spurious
    )


def build_h(cfg: GammaConfig) -> tuple[Fraction, ...]:
    """The probe vector: -u_i*mu on the mu block, u_i/mu on the inverse block."""
    h = [Fraction(0)] * cfg.u.n
    for i in cfg.block_mu:
        h[i] = -cfg.u.u[i] * cfg.mu
    for i in cfg.block_inv:
        h[i] = cfg.u.u[i] / cfg.mu
    return tuple(h)


def gamma_point(cfg: GammaConfig) -> Point:
    """The configuration's x: mu*u_i on the mu block, u_i/mu on the inverse block."""
    x = [Fraction(0)] * cfg.u.n
    for i in cfg.block_mu:
        x[i] = cfg.mu * cfg.u.u[i]
    for i in cfg.block_inv:
        x[i] = cfg.u.u[i] / cfg.mu
    return Point(tuple(x))


def gamma(q: Sequence[Sequence[RationalLike]], x: Point, h: Sequence[Fraction]) -> Fraction:
    """The bilinear form h^T Q x + x^T Q h, exactly."""
    n = x.n
    if len(q) != n or any(len(row) != n for row in q) or len(h) != n:
        raise ValueError("gamma operands must share the point's dimension")
    total = Fraction(0)
    for i in range(n):
        for j in range(n):
            total += Fraction(q[i][j]) * (h[i] * x.x[j] + x.x[i] * h[j])
    return total


def selection_matrix(
    res_entries: Sequence[Sequence[Fraction]],
    fill: Optional[dict[tuple[int, int], RationalLike]] = None,
) -> Matrix:
    """Entrywise sign selection of a residual: sgn off zeros, ``fill`` on zeros.

    ``fill`` maps upper-triangle index pairs of zero entries to values in
    [-1, 1]; omitted pairs default to 0.  The result is symmetric.
    """
    n = len(res_entries)
    out = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            v = res_entries[i][j]
            if v != 0:
                chosen = sgn(v)
            elif fill is not None and (i, j) in fill:
                chosen = Fraction(fill[(i, j)])
                if abs(chosen) > 1:
                    raise ValueError("selection values must lie in [-1, 1]")
            else:
                chosen = Fraction(0)
            out[i][j] = out[j][i] = chosen
    return tuple(tuple(row) for row in out)


def gamma_identity(cfg: GammaConfig) -> tuple[Fraction, Fraction]:
    """Evaluate the bilinear form two ways and confirm the strict negativity.

    direct: gamma(sgn of the residual at the configuration point).
    closed_form: -2 mu^2 (sum_mu |u_i|)^2 - (2/mu^2) (sum_inv |u_i|)^2.
    These must coincide and be negative; the entries where the residual is
    zero (exactly the cross-block pairs) have identically-zero coefficients,
    so any selection on them gives the same value.
    """
    x = gamma_point(cfg)
    h = build_h(cfg)
    lam = selection_matrix(residual(x, cfg.u).entries)
    direct = gamma(lam, x, h)

    sum_mu = sum((abs(cfg.u.u[i]) for i in cfg.block_mu), Fraction(0))
    sum_inv = sum((abs(cfg.u.u[i]) for i in cfg.block_inv), Fraction(0))
    closed = -2 * cfg.mu**2 * sum_mu**2 - Fraction(2) / cfg.mu**2 * sum_inv**2

    if direct != closed or not direct < 0:
        raise InvariantViolationError(
            f"gamma identity failed: direct={direct}, closed={closed}, cfg={cfg}"
        )
    return direct, closed
