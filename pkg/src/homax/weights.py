"""Multiple weights and the variable multiple-weight constants.

The headline quantity is the sup over balls of

    mu(B)^(eta - m) * ||w chi_B||_{q(.)} * prod_i ||w_i^{-1} chi_B||_{p_i'(.)}

(the A_{p(.),q(.)} constant of the weight tuple), its dyadic-cube
restriction, the single-weight specialization, sampled A-infinity
diagnostics, and the factorization ratios of the component weights.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SigmaUndefined
from .grid import DyadicGrid
from .space import QuasiMetricSpace, enumerate_balls
from .varexp import ExponentField, OperatorConfig, as_weight, conjugate, luxemburg_norm

__all__ = ["MultiWeight", "ConstantReport", "apq_constant", "apq_dyadic_constant",
           "ap_constant", "a_infty_diagnostics", "default_subset_sampler",
           "verify_factorization"]


@dataclass(frozen=True)
class MultiWeight:
    """Component weights (w_1..w_m), their product, and the derived u, sigma_j.

    sigma_j = w_j^(-p_j'(x)) is ill-defined where p_j(x) = 1 (conjugate
    infinity) unless w_j(x) = 1, in which case sigma_j(x) := 1; any other
    weight value there is rejected.
    """

    components: tuple[np.ndarray, ...]
    config: OperatorConfig
    product: np.ndarray = field(default=None)
    u: np.ndarray = field(default=None)
    sigmas: tuple[np.ndarray, ...] = field(default=None)
    p_conjugates: tuple[np.ndarray, ...] = field(default=None)

    def __post_init__(self):
        comps = tuple(as_weight(w) for w in self.components)
        if len(comps) != self.config.m:
            raise SigmaUndefined(f"expected {self.config.m} weights, got {len(comps)}")
        object.__setattr__(self, "components", comps)
        prod = np.ones_like(comps[0])
        for w in comps:
            prod = prod * w
        object.__setattr__(self, "product", prod)
        qv = self.config.q.values
        u = np.where(np.isfinite(qv), prod ** np.where(np.isfinite(qv), qv, 1.0), prod)
        object.__setattr__(self, "u", u)
        pconj = tuple(conjugate(pf).values for pf in self.config.p_fields)
        object.__setattr__(self, "p_conjugates", pconj)
        sigmas = []
        for w, pc in zip(comps, pconj):
            s = np.empty_like(w)
            for x in range(w.size):
                if math.isfinite(pc[x]):
                    s[x] = w[x] ** (-pc[x])
                elif w[x] == 1.0:
                    s[x] = 1.0
                else:
                    raise SigmaUndefined(
                        "sigma_j undefined: p_j(x) = 1 with w_j(x) != 1")
            sigmas.append(s)
        object.__setattr__(self, "sigmas", tuple(sigmas))


@dataclass(frozen=True)
class ConstantReport:
    value: float
    argmax: frozenset[int] | None
    breakdown: dict

    def to_json(self):
        return {"value": self.value,
                "argmax": None if self.argmax is None else sorted(self.argmax),
                "breakdown": self.breakdown}


def _apq_factor(space: QuasiMetricSpace, members, config: OperatorConfig,
                w: MultiWeight) -> tuple[float, dict]:
    idx = sorted(members)
    mu = float(space.measure[idx].sum())
    chi = np.zeros(space.n)
    chi[idx] = 1.0
    norm_w = luxemburg_norm(w.product * chi, config.q, space)
    factors = [luxemburg_norm(chi / wi, conjugate(pf), space)
               for wi, pf in zip(w.components, config.p_fields)]
    value = mu ** (config.eta - config.m) * norm_w
    for f in factors:
        value *= f
    return value, {"mass": mu, "norm_w": norm_w, "norms_inv": factors}


def _sup_over(space, member_sets, config, w) -> ConstantReport:
    best, arg, brk = -math.inf, None, {}
    for members in member_sets:
        val, b = _apq_factor(space, members, config, w)
        if val > best:
            best, arg, brk = val, frozenset(members), b
    return ConstantReport(value=best, argmax=arg, breakdown=brk)


def apq_constant(space: QuasiMetricSpace, config: OperatorConfig,
                 w: MultiWeight) -> ConstantReport:
    """Exact sup over the complete enumerated ball family."""
    return _sup_over(space, [b.members for b in enumerate_balls(space)], config, w)


def apq_dyadic_constant(grid: DyadicGrid, config: OperatorConfig,
                        w: MultiWeight) -> ConstantReport:
    """Same sup restricted to the dyadic cubes of the grid."""
    return _sup_over(grid.space, [q.members for q in grid.distinct_cubes()],
                     config, w)


def ap_constant(space: QuasiMetricSpace, p: ExponentField, omega) -> ConstantReport:
    """A_{p(.)} constant: the m = 1, eta = 0, q = p specialization."""
    config = OperatorConfig(m=1, eta=0.0, p_fields=(p,), q=p)
    return apq_constant(space, config, MultiWeight(components=(as_weight(omega),),
                                                   config=config))


def default_subset_sampler(space: QuasiMetricSpace, per_ball: int = 8, seed: int = 0):
    """(ball, subset) pairs: all singletons of each ball plus random subsets."""
    rng = np.random.default_rng(seed)
    for b in enumerate_balls(space):
        idx = sorted(b.members)
        for y in idx:
            yield b.members, frozenset([y])
        if len(idx) > 1:
            for _ in range(per_ball):
                mask = rng.integers(0, 2, size=len(idx)).astype(bool)
                if not mask.any():
                    mask[rng.integers(0, len(idx))] = True
                yield b.members, frozenset(np.array(idx)[mask].tolist())


def a_infty_diagnostics(space: QuasiMetricSpace, omega, sampler=None,
                        grid_size: int = 41):
    """Tightest sampled constants for the two A-infinity characterizations.

    For exponents on a log sweep, minimizes C2 in
    mu(E)/mu(B) <= C2 (w(E)/w(B))^eps and C1 in
    w(E)/w(B) <= C1 (mu(E)/mu(B))^delta over the sampled (B, E) family.
    Returns (eps_best, c2_best, delta_best, c1_best); sampled families give
    lower bounds on the true sups.
    """
    w = as_weight(omega)
    pairs = []
    it = sampler if sampler is not None else default_subset_sampler(space)
    for bmem, emem in it:
        bi, ei = sorted(bmem), sorted(emem)
        mu_ratio = float(space.measure[ei].sum() / space.measure[bi].sum())
        w_ratio = float((w[ei] * space.measure[ei]).sum()
                        / (w[bi] * space.measure[bi]).sum())
        pairs.append((mu_ratio, w_ratio))
    exps = np.logspace(-2, 0, grid_size)   # sweep (0.01, 1]

    def tightest(ratios):
        # smallest C over the sweep; prefer the largest exponent on ties
        best_c, best_e = math.inf, exps[0]
        for e in exps:
            c = max(a / (b ** e) for a, b in ratios)
            if c < best_c - 1e-15 or (abs(c - best_c) <= 1e-12 and e > best_e):
                best_c, best_e = c, e
        return best_e, best_c

    eps_best, c2_best = tightest([(mu, wr) for mu, wr in pairs])
    delta_best, c1_best = tightest([(wr, mu) for mu, wr in pairs])
    return eps_best, c2_best, delta_best, c1_best


def _scaled_exponent(pf: ExponentField, m: int) -> ExponentField:
    return ExponentField(pf.values * m,
                         p_infty=None if pf.p_infty is None else pf.p_infty * m)


def verify_factorization(space: QuasiMetricSpace, config: OperatorConfig,
                         w: MultiWeight) -> dict:
    """Ratios [w_j^(-1/m)]^m_{A_{m p_j'}} / [w] and [w^(1/m)]^m_{A_{m q}} / [w]."""
    m = config.m
    apq = apq_constant(space, config, w).value
    component_ratios = []
    for wi, pf in zip(w.components, config.p_fields):
        mpj = _scaled_exponent(conjugate(pf), m)
        val = ap_constant(space, mpj, wi ** (-1.0 / m)).value
        component_ratios.append(val ** m / apq)
    mq = _scaled_exponent(config.q, m)
    prod_ratio = ap_constant(space, mq, w.product ** (1.0 / m)).value ** m / apq
    return {"apq": apq, "component_ratios": component_ratios,
            "product_ratio": prod_ratio}
