"""Sawyer-type testing constants, classical and variable-exponent.

The variable constants C1 and C2 run over dyadic cubes with the
conventions u = v^{q(.)} and sigma = w^{-p'(.)}; for constant exponents C1
collapses to 1 and C2 to the classical Sawyer constant.  The classical
constants use the measure-weight convention sigma = w_src^(1 - p').
"""
from __future__ import annotations

import math

import numpy as np

from .errors import InvalidExponents, SigmaUndefined
from .grid import DyadicGrid
from .maximal import dyadic_maximal_op
from .space import enumerate_balls
from .varexp import ExponentField, OperatorConfig, as_weight, conjugate

__all__ = ["c1_constant", "c2_constant", "sawyer_constant", "multilinear_sawyer",
           "rh_constant", "theorem5_bound"]


def _sigma_from_norm_weight(omega: np.ndarray, p: ExponentField) -> np.ndarray:
    """sigma = omega^(-p'(x)); rejected where p(x) = 1 unless omega(x) = 1."""
    pc = conjugate(p).values
    s = np.empty_like(omega)
    for x in range(omega.size):
        if math.isfinite(pc[x]):
            s[x] = omega[x] ** (-pc[x])
        elif omega[x] == 1.0:
            s[x] = 1.0
        else:
            raise SigmaUndefined("sigma undefined: p(x) = 1 with omega(x) != 1")
    return s


def _set_mass(grid: DyadicGrid, members, density: np.ndarray) -> float:
    idx = sorted(members)
    return math.fsum((density[idx] * grid.space.measure[idx]).tolist())


def c1_constant(grid: DyadicGrid, omega, p: ExponentField, q: ExponentField) -> float:
    """sup over cubes Q and x in Q of sigma(Q)^(q_-(Q) - q(x)).

    q_-(Q) is the minimum of q over the cube, so cubes on which q is
    constant contribute 1 regardless of their sigma-mass.
    """
    w = as_weight(omega)
    sigma = _sigma_from_norm_weight(w, p)
    best = 0.0
    for cube in grid.distinct_cubes():
        sq = _set_mass(grid, cube.members, sigma)
        q_minus = q.restricted_min(cube.members)
        for x in cube.members:
            best = max(best, sq ** (q_minus - float(q.values[x])))
    return best


def c2_constant(grid: DyadicGrid, omega, v, p: ExponentField, q: ExponentField,
                eta: float = 0.0) -> float:
    """sup over cubes of the tested-maximal integral times sigma(Q)-powers.

    (sum_Q M_eta^D(sigma chi_Q)(x)^q(x) u(x) dmu)^(1/q_-)
      * max(sigma(Q)^(-1/p_-), sigma(Q)^(-1/p_+)),
    with u = v^{q(.)} and sigma = omega^{-p'(.)}.
    """
    w = as_weight(omega)
    vv = as_weight(v)
    sigma = _sigma_from_norm_weight(w, p)
    qv = q.values
    u = vv ** qv
    config = OperatorConfig(m=1, eta=eta, p_fields=(p,), q=q)
    mu = grid.space.measure
    best = 0.0
    for cube in grid.distinct_cubes():
        idx = sorted(cube.members)
        chi = np.zeros(grid.space.n)
        chi[idx] = 1.0
        mf = dyadic_maximal_op(grid, config, [sigma * chi]).values
        integral = math.fsum(
            (mf[i] ** qv[i]) * u[i] * mu[i] for i in range(grid.space.n)
            if mf[i] > 0.0)
        sq = _set_mass(grid, cube.members, sigma)
        tail = max(sq ** (-1.0 / p.p_minus), sq ** (-1.0 / p.p_plus))
        best = max(best, integral ** (1.0 / q.p_minus) * tail)
    return best


def sawyer_constant(grid: DyadicGrid, p: float, q: float, eta: float,
                    u, omega_src) -> float:
    """Classical two-weight Sawyer constant over dyadic cubes.

    sigma = omega_src^(1 - p'); the sup of
    (int_Q M_eta^D(sigma chi_Q)^q u dmu)^(1/q) / sigma(Q)^(1/p).
    """
    if not (1.0 < p <= q < math.inf):
        raise InvalidExponents(f"need 1 < p <= q < inf, got p={p}, q={q}")
    uu = as_weight(u)
    src = as_weight(omega_src)
    sigma = src ** (1.0 - p / (p - 1.0))
    n = grid.space.n
    pef = ExponentField.constant(p, n)
    qef = ExponentField.constant(q, n)
    config = OperatorConfig(m=1, eta=eta, p_fields=(pef,), q=qef)
    mu = grid.space.measure
    best = 0.0
    for cube in grid.distinct_cubes():
        idx = sorted(cube.members)
        chi = np.zeros(n)
        chi[idx] = 1.0
        mf = dyadic_maximal_op(grid, config, [sigma * chi]).values
        integral = math.fsum((mf[i] ** q) * uu[i] * mu[i]
                             for i in range(n) if mf[i] > 0.0)
        sq = _set_mass(grid, cube.members, sigma)
        best = max(best, integral ** (1.0 / q) / sq ** (1.0 / p))
    return best


def multilinear_sawyer(grid: DyadicGrid, p_vec, q: float, eta: float,
                       omegas, v) -> float:
    """Multilinear Sawyer constant with sigma_i = w_i^(1 - p_i')."""
    m = len(p_vec)
    if any(not (1.0 < p < math.inf) for p in p_vec):
        raise InvalidExponents("each p_i must lie in (1, inf)")
    if not (max(p_vec) <= q < math.inf):
        raise InvalidExponents(f"need q >= max p_i, got q={q}, p={p_vec}")
    vv = as_weight(v)
    sigmas = [as_weight(w) ** (1.0 - p / (p - 1.0)) for w, p in zip(omegas, p_vec)]
    n = grid.space.n
    config = OperatorConfig(m=m, eta=eta,
                            p_fields=tuple(ExponentField.constant(p, n) for p in p_vec),
                            q=ExponentField.constant(q, n))
    mu = grid.space.measure
    best = 0.0
    for cube in grid.distinct_cubes():
        idx = sorted(cube.members)
        chi = np.zeros(n)
        chi[idx] = 1.0
        mf = dyadic_maximal_op(grid, config, [s * chi for s in sigmas]).values
        integral = math.fsum((mf[i] ** q) * vv[i] * mu[i]
                             for i in range(n) if mf[i] > 0.0)
        denom = 1.0
        for s, p in zip(sigmas, p_vec):
            denom *= _set_mass(grid, cube.members, s) ** (1.0 / p)
        best = max(best, integral ** (1.0 / q) / denom)
    return best


def rh_constant(grid: DyadicGrid, p_vec, omegas, sweep_balls: bool = False) -> float:
    """Smallest C with prod_i (int_Q sigma_i)^(p/p_i) <= C int_Q prod sigma_i^(p/p_i)."""
    if any(not (1.0 < p < math.inf) for p in p_vec):
        raise InvalidExponents("each p_i must lie in (1, inf)")
    p = 1.0 / sum(1.0 / pi for pi in p_vec)
    sigmas = [as_weight(w) ** (1.0 - pi / (pi - 1.0)) for w, pi in zip(omegas, p_vec)]
    mu = grid.space.measure
    if sweep_balls:
        families = [b.members for b in enumerate_balls(grid.space)]
    else:
        families = [q.members for q in grid.distinct_cubes()]
    best = 0.0
    for members in families:
        idx = sorted(members)
        lhs = 1.0
        for s, pi in zip(sigmas, p_vec):
            lhs *= math.fsum((s[idx] * mu[idx]).tolist()) ** (p / pi)
        integrand = np.ones(len(idx))
        for s, pi in zip(sigmas, p_vec):
            integrand = integrand * s[idx] ** (p / pi)
        rhs = math.fsum((integrand * mu[idx]).tolist())
        best = max(best, lhs / rhs)
    return best


def theorem5_bound(c1: float, c2: float, p: ExponentField) -> float:
    """sum over theta in {1/p_-, 1/p_+} of (c2 + c1 c2)^theta."""
    if c1 < 0 or c2 < 0:
        raise InvalidExponents("testing constants must be nonnegative")
    if c2 == 0.0:
        return 0.0
    base = c2 + c1 * c2
    return base ** (1.0 / p.p_minus) + base ** (1.0 / p.p_plus)
