"""Seeded generators for rational test instances and stationary-set points.

The spurious part of the stationary set is the polytope
{x : <sgn(u), x> = 0, |x_i| <= |u_i|}; hitting it by rejection is hopeless
(it has measure zero), so points are built constructively: draw inside the
box, then absorb the sign-weighted sum into one pivot coordinate, shrinking
the rest first whenever the pivot lacks slack.  Everything stays rational,
so downstream certification is exact.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from .core import Instance, Point, sgn
from .escape import GammaConfig


def random_rational(
    rng: random.Random, max_num: int = 8, max_den: int = 8, nonzero: bool = False
) -> Fraction:
    while True:
        v = Fraction(rng.randint(-max_num, max_num), rng.randint(1, max_den))
        if v != 0 or not nonzero:
            return v


def random_instance(
    rng: random.Random, n: int, zero_prob: float = 0.0, nonzero: bool = False
) -> Instance:
    entries = []
    for _ in range(n):
        if zero_prob and rng.random() < zero_prob:
            entries.append(Fraction(0))
        else:
            entries.append(random_rational(rng, nonzero=nonzero))
    return Instance(tuple(entries))


def random_point(rng: random.Random, n: int) -> Point:
    return Point(tuple(random_rational(rng) for _ in range(n)))


def project_polytope(x: Point, u: Instance, pivot: Optional[int] = None) -> Point:
    """Map x onto {<sgn(u), y> = 0, |y_i| <= |u_i|} exactly.

    Coordinates are clamped into the box (and zeroed where u_i = 0), then the
    sign-weighted sum is absorbed into the pivot coordinate; when the pivot
    lacks slack, the remaining coordinates are scaled down until it fits.
    Returns the zero point when u = 0.
    """
    support = [i for i in range(u.n) if u.u[i] != 0]
    if not support:
        return Point((Fraction(0),) * u.n)
    if pivot is None:
        pivot = max(support, key=lambda i: abs(u.u[i]))
    elif pivot not in support:
        raise ValueError("pivot must have u_i != 0")

    y = []
    for i in range(u.n):
        lim = abs(u.u[i])
        y.append(min(max(x.x[i], -lim), lim))

    rest = sum((sgn(u.u[i]) * y[i] for i in support if i != pivot), Fraction(0))
    lim = abs(u.u[pivot])
    if abs(rest) > lim:
        scale = lim / abs(rest)
        for i in support:
            if i != pivot:
                y[i] *= scale
        rest = sgn(rest) * lim
    y[pivot] = -sgn(u.u[pivot]) * rest
    return Point(tuple(y))


def sample_polytope_point(rng: random.Random, u: Instance) -> Point:
    """A random exact point of the spurious stationary polytope of u.

    For u != 0 every point of the polytope is stationary with
    f = (sum |u_i|)^2 / 2 > 0, i.e. spurious.
    """
    draw = []
    for ui in u.u:
        if ui == 0:
            draw.append(Fraction(0))
        else:
            q = rng.randint(2, 12)
            draw.append(ui * Fraction(rng.randint(-q, q), q))
    support = [i for i in range(u.n) if u.u[i] != 0]
    pivot = rng.choice(support) if support else None
    return project_polytope(Point(tuple(draw)), u, pivot=pivot)


def random_gamma_config(
    rng: random.Random, n: int, max_num: int = 6, max_den: int = 6
) -> GammaConfig:
    """Random double-ratio configuration: zero-free u, mu in (1, 4], nonempty split."""
    u = Instance(
        tuple(random_rational(rng, max_num, max_den, nonzero=True) for _ in range(n))
    )
    mu = 1 + Fraction(rng.randint(1, 3 * max_den), max_den)
    indices = list(range(n))
    rng.shuffle(indices)
    cut = rng.randint(1, n - 1)
    return GammaConfig(
        mu=mu,
        block_mu=tuple(sorted(indices[:cut])),
        block_inv=tuple(sorted(indices[cut:])),
        u=u,
    )
