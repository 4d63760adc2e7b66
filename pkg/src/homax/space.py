"""Finite quasi-metric measure spaces and their ball families.

A space is a finite point set {0..n-1} with a symmetric positive
off-diagonal distance matrix and per-point positive masses.  The
quasi-triangle constant A0 and the doubling constant C_mu are computed
exactly by exhaustive enumeration at construction time.  Balls are open:
B(x, r) = {y : d(x, y) < r}.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateDistance,
    NonPositiveMass,
    NonPositiveRadius,
    NonSymmetric,
    NonZeroDiagonal,
)

__all__ = [
    "Ball",
    "QuasiMetricSpace",
    "build_space",
    "ball",
    "enumerate_balls",
    "lower_mass_bound",
]


@dataclass(frozen=True)
class Ball:
    center: int
    radius: float
    members: frozenset[int]


@dataclass(frozen=True)
class QuasiMetricSpace:
    dist: np.ndarray          # (n, n) symmetric, zero diagonal
    measure: np.ndarray       # (n,) positive masses
    base_point: int
    quasi_const: float        # A0, least quasi-triangle constant
    doubling_const: float     # C_mu, least doubling constant
    _balls: tuple[Ball, ...] = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def diameter(self) -> float:
        return float(self.dist.max())

    @property
    def total_mass(self) -> float:
        return float(self.measure.sum())

    def d(self, x: int, y: int) -> float:
        return float(self.dist[x, y])

    def mass(self, members) -> float:
        idx = sorted(members)
        return float(self.measure[idx].sum())


def _quasi_constant(dist: np.ndarray) -> float:
    # least A0 with d(x,y) <= A0 (d(x,z) + d(z,y)), clamped below at 1
    n = dist.shape[0]
    a0 = 1.0
    for x in range(n):
        for y in range(n):
            if x == y:
                continue
            dxy = dist[x, y]
            denom = dist[x, :] + dist[:, y]
            # z = x or z = y gives denom = d(x,y), ratio 1
            a0 = max(a0, float((dxy / denom).max()))
    return a0


def _radius_sweep(dist_row: np.ndarray, diameter: float) -> np.ndarray:
    """Radii realizing every distinct open ball around the given center.

    The distinct positive distances from the center, plus a sentinel
    exceeding the diameter (the "infinite radius" ball = all points).
    """
    pos = np.unique(dist_row[dist_row > 0])
    sentinel = (1.0 + 1e-9) * max(diameter, 1.0)
    if pos.size == 0:
        return np.array([sentinel])
    return np.append(pos, sentinel)


def _members(dist_row: np.ndarray, radius: float) -> frozenset[int]:
    return frozenset(np.nonzero(dist_row < radius)[0].tolist())


def _doubling_constant(dist: np.ndarray, measure: np.ndarray) -> float:
    """Least C with mu(B(x, 2r)) <= C mu(B(x, r)) over all centers and r > 0.

    The ratio is piecewise constant in r with breakpoints at the distances
    from x and at half those distances; each open interval is probed once.
    """
    n = dist.shape[0]
    diameter = float(dist.max())
    c_mu = 1.0
    for x in range(n):
        row = dist[x]
        pos = np.unique(row[row > 0])
        bps = np.unique(np.concatenate([pos, pos / 2.0])) if pos.size else np.array([])
        if bps.size == 0:
            continue
        probes = np.concatenate([
            [bps[0] / 2.0],
            (bps[:-1] + bps[1:]) / 2.0,
            [bps[-1] * 1.5],
            bps,  # left-continuous values at the breakpoints themselves
        ])
        for r in probes:
            if r <= 0:
                continue
            small = measure[row < r].sum()
            big = measure[row < 2.0 * r].sum()
            if small > 0:
                c_mu = max(c_mu, float(big / small))
    return c_mu


def build_space(distances, masses, base_point: int = 0) -> QuasiMetricSpace:
    """Validate the axioms and derive A0 and C_mu exhaustively."""
    dist = np.asarray(distances, dtype=float)
    measure = np.asarray(masses, dtype=float)
    n = dist.shape[0]
    if dist.shape != (n, n):
        raise NonSymmetric("distance matrix is not square")
    if measure.shape != (n,):
        raise NonPositiveMass("mass vector length does not match point count")
    if not np.array_equal(dist, dist.T):
        raise NonSymmetric("dist not symmetric")
    if np.any(np.diag(dist) != 0.0):
        raise NonZeroDiagonal("dist has nonzero diagonal entries")
    off = dist[~np.eye(n, dtype=bool)]
    if off.size and np.any(off <= 0.0):
        raise DegenerateDistance("zero or negative distance between distinct points")
    if np.any(measure <= 0.0) or not np.all(np.isfinite(measure)):
        raise NonPositiveMass("every point mass must be positive and finite")
    if not (0 <= base_point < n):
        raise IndexError(f"base point {base_point} out of range for {n} points")
    a0 = _quasi_constant(dist)
    c_mu = _doubling_constant(dist, measure)
    return QuasiMetricSpace(dist=dist, measure=measure, base_point=base_point,
                            quasi_const=a0, doubling_const=c_mu)


def ball(space: QuasiMetricSpace, center: int, radius: float) -> Ball:
    if radius <= 0:
        raise NonPositiveRadius(f"radius must be positive, got {radius}")
    return Ball(center=center, radius=float(radius),
                members=_members(space.dist[center], radius))


def enumerate_balls(space: QuasiMetricSpace) -> list[Ball]:
    """Every distinct member set realizable as an open ball, each once.

    Sweeps, for each center, the distinct distances from that center plus a
    sentinel radius exceeding the diameter.  Dedup is by member set; any sup
    over all balls equals the sup over this list.
    """
    if space._balls is not None:
        return list(space._balls)
    seen: dict[frozenset[int], Ball] = {}
    for x in range(space.n):
        for r in _radius_sweep(space.dist[x], space.diameter):
            m = _members(space.dist[x], float(r))
            if m not in seen:
                seen[m] = Ball(center=x, radius=float(r), members=m)
    balls = tuple(seen.values())
    object.__setattr__(space, "_balls", balls)
    return list(balls)


def lower_mass_bound(space: QuasiMetricSpace) -> float:
    """Largest C with mu(B(y,r))/mu(B(x,R)) >= C (r/R)^(log2 C_mu).

    Enumerated over all centers x, radii R from the sweep, y in B(x, R), and
    radii r < R from y's sweep.  Vacuous pairs give 1.
    """
    gamma = np.log2(space.doubling_const) if space.doubling_const > 1 else 0.0
    best = np.inf
    sweeps = [_radius_sweep(space.dist[x], space.diameter) for x in range(space.n)]
    for x in range(space.n):
        for R in sweeps[x]:
            mass_big = space.measure[space.dist[x] < R].sum()
            for y in np.nonzero(space.dist[x] < R)[0]:
                for r in sweeps[y]:
                    if not (0 < r < R):
                        continue
                    mass_small = space.measure[space.dist[y] < r].sum()
                    best = min(best, float(mass_small / mass_big) / (r / R) ** gamma)
    return 1.0 if not np.isfinite(best) else best
