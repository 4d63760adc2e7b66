"""Calderon-Zygmund stopping cubes at one height and across geometric levels.

Stopping cubes at height lambda are the maximal dyadic cubes whose weighted
fractional average v(Q)^(eta - m) prod_i int_Q f_i v dmu exceeds lambda;
their union is exactly the dyadic superlevel set.  On a finite space the
height must exceed the root average lambda_0, otherwise the root itself
would qualify and maximality degenerates.

Level decompositions take heights a^k; the sets E_j^k = Q_j^k minus the
next superlevel set are pairwise disjoint and carry a definite fraction of
the v-mass of their cube (the measured C_CZ and the ratio a control it).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import HeightBelowThreshold, RatioTooSmall
from .grid import Cube, DyadicGrid
from .maximal import dyadic_maximal_op
from .varexp import OperatorConfig, as_weight

__all__ = ["CubeDecomposition", "LevelSet", "cz_decompose", "cz_levels"]


@dataclass(frozen=True)
class LevelSet:
    k: int
    height: float
    cubes: tuple[Cube, ...]
    e_sets: tuple[frozenset[int], ...]   # E_j^k = Q_j^k \ next superlevel set


@dataclass(frozen=True)
class CubeDecomposition:
    height: float
    cubes: tuple[Cube, ...]
    averages: tuple[float, ...]
    c_cz: float                # max attained ratio average / height (1 if empty)
    analytic_ceiling: float    # parent-mass-ratio bound on C_CZ
    ratio_a: float | None = None
    levels: tuple[LevelSet, ...] = ()
    mass_bound: float | None = None   # 1 - (C_CZ / a)^(1/(m - eta))

    def to_json(self):
        out = {"height": self.height, "c_cz": self.c_cz,
               "analytic_ceiling": self.analytic_ceiling,
               "cubes": [{"k": q.k, "j": q.j, "members": sorted(q.members),
                          "average": a}
                         for q, a in zip(self.cubes, self.averages)]}
        if self.levels:
            out["ratio_a"] = self.ratio_a
            out["mass_bound"] = self.mass_bound
            out["levels"] = [{"k": lv.k, "height": lv.height,
                              "cubes": [{"k": q.k, "j": q.j,
                                         "members": sorted(q.members),
                                         "e_members": sorted(e)}
                                        for q, e in zip(lv.cubes, lv.e_sets)]}
                             for lv in self.levels]
        return out


def _cube_averages(grid: DyadicGrid, config: OperatorConfig, fvec, v) -> dict:
    avgs = {}
    for q in grid.all_cubes():
        idx = sorted(q.members)
        mu = grid.space.measure[idx]
        vmass = math.fsum((v[idx] * mu).tolist())
        val = vmass ** (config.eta - config.m)
        for f in fvec:
            val *= math.fsum((f[idx] * v[idx] * mu).tolist())
        avgs[q.key] = val
    return avgs


def _root_average(grid: DyadicGrid, avgs: dict) -> float:
    root = grid.generations[grid.k_max][0]
    return avgs[root.key]


def root_average(grid: DyadicGrid, config: OperatorConfig, fvec, v) -> float:
    """The decomposition's base height: the fractional average on the root."""
    return _root_average(grid, _cube_averages(grid, config, fvec, v))


def _stopping_cubes(grid: DyadicGrid, avgs: dict, lam: float) -> list[Cube]:
    """Maximal cubes with average > lam, by descent from the root."""
    out: list[Cube] = []
    stack = list(grid.generations[grid.k_max])
    while stack:
        q = stack.pop(0)
        if avgs[q.key] > lam:
            out.append(q)
        else:
            stack.extend(grid.children.get(q.key, ()))
    return out


def _parent_ratio_ceiling(grid: DyadicGrid, config: OperatorConfig, v) -> float:
    """(max v(parent)/v(cube))^(m - eta): the proof's two-sided bound on C_CZ."""
    best = 1.0
    mu = grid.space.measure
    for q in grid.all_cubes():
        if q.parent is None:
            continue
        vq = float((v[sorted(q.members)] * mu[sorted(q.members)]).sum())
        vp = float((v[sorted(q.parent.members)] * mu[sorted(q.parent.members)]).sum())
        best = max(best, vp / vq)
    return best ** (config.m - config.eta)


def cz_decompose(grid: DyadicGrid, config: OperatorConfig, fvec, v,
                 lam: float) -> CubeDecomposition:
    fv = [np.abs(np.asarray(f, dtype=float)) for f in fvec]
    vv = np.ones(grid.space.n) if v is None else as_weight(v)
    avgs = _cube_averages(grid, config, fv, vv)
    lam0 = _root_average(grid, avgs)
    if lam <= lam0:
        raise HeightBelowThreshold(
            f"height {lam} must exceed the root average {lam0} on a finite-measure space")
    cubes = _stopping_cubes(grid, avgs, lam)
    averages = tuple(avgs[q.key] for q in cubes)
    c_cz = max((a / lam for a in averages), default=1.0)
    return CubeDecomposition(height=lam, cubes=tuple(cubes), averages=averages,
                             c_cz=c_cz,
                             analytic_ceiling=_parent_ratio_ceiling(grid, config, vv))


def superlevel_set(grid: DyadicGrid, config: OperatorConfig, fvec, v, lam: float):
    """{x : weighted dyadic maximal > lam}, computed independently."""
    fv = [np.abs(np.asarray(f, dtype=float)) for f in fvec]
    mf = dyadic_maximal_op(grid, config, fv, v)
    return frozenset(np.nonzero(mf.values > lam)[0].tolist())


def cz_levels(grid: DyadicGrid, config: OperatorConfig, fvec, v, a: float,
              k_range=None) -> CubeDecomposition:
    """Stopping cubes at heights a^k plus the disjoint E-sets per level."""
    if a <= 1.0:
        raise RatioTooSmall(f"ratio a = {a} must exceed 1 (and the measured C_CZ)")
    fv = [np.abs(np.asarray(f, dtype=float)) for f in fvec]
    vv = np.ones(grid.space.n) if v is None else as_weight(v)
    avgs = _cube_averages(grid, config, fv, vv)
    lam0 = _root_average(grid, avgs)
    max_val = max(avgs.values())
    if k_range is None:
        k_lo = math.ceil(math.log(lam0, a)) + 1 if lam0 > 0 else 0
        k_hi = math.ceil(math.log(max_val, a)) if max_val > 0 else k_lo
        k_range = range(k_lo, max(k_lo, k_hi) + 1)
    per_level = {}
    c_cz = 1.0
    for k in k_range:
        lam = float(a) ** k
        if lam <= lam0:
            raise HeightBelowThreshold(
                f"level height a^{k} = {lam} does not exceed the root average {lam0}")
        cubes = _stopping_cubes(grid, avgs, lam)
        per_level[k] = (lam, cubes)
        for q in cubes:
            c_cz = max(c_cz, avgs[q.key] / lam)
    if a <= c_cz:
        raise RatioTooSmall(f"ratio a = {a} must exceed the measured C_CZ = {c_cz}")
    levels = []
    ks = sorted(per_level)
    for k in ks:
        lam, cubes = per_level[k]
        next_height = float(a) ** (k + 1)
        upper = frozenset().union(*(q.members for q in
                                    _stopping_cubes(grid, avgs, next_height))) \
            if _stopping_cubes(grid, avgs, next_height) else frozenset()
        e_sets = tuple(frozenset(q.members - upper) for q in cubes)
        levels.append(LevelSet(k=k, height=lam, cubes=tuple(cubes), e_sets=e_sets))
    base_cubes = per_level[ks[0]][1] if ks else []
    bound = 1.0 - (c_cz / a) ** (1.0 / (config.m - config.eta))
    return CubeDecomposition(height=float(a) ** ks[0] if ks else float("nan"),
                             cubes=tuple(base_cubes),
                             averages=tuple(avgs[q.key] for q in base_cubes),
                             c_cz=c_cz,
                             analytic_ceiling=_parent_ratio_ceiling(grid, config, vv),
                             ratio_a=float(a), levels=tuple(levels),
                             mass_bound=bound)
