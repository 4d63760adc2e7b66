"""Variable exponents, the modular, Luxemburg/weak norms, and exponent algebra.

Functions and weights on a space are plain float arrays indexed like the
points.  Exponent fields take values in [1, inf] (numpy.inf allowed); the
modular of f is

    sum_{p(x) < inf} |f(x)|^p(x) mu(x)  +  max_{p(x) = inf} |f(x)|,

and the Luxemburg norm is the infimum of lambda > 0 with modular(f/lambda)
<= 1, computed by certified-bracket bisection on the decreasing map
lambda -> modular(f/lambda).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DeltaUndefined,
    ExponentBelowOne,
    InvalidConfig,
    NegativeInput,
    NonPositiveWeight,
    ZeroWeightMass,
)
from .space import QuasiMetricSpace

__all__ = [
    "ExponentField",
    "OperatorConfig",
    "conjugate",
    "modular",
    "luxemburg_norm",
    "weighted_norm",
    "weak_norm",
    "log_holder_diagnostics",
    "beta_delta",
    "weighted_average",
    "as_weight",
]

BISECT_REL_TOL = 1e-12
BISECT_MAX_ITER = 200


@dataclass(frozen=True)
class ExponentField:
    """Per-point exponent p(.) in [1, inf], with an optional LH-infinity limit."""

    values: np.ndarray
    p_infty: float | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if np.any(np.isnan(vals)) or np.any(vals < 1.0):
            raise ExponentBelowOne("exponent values must lie in [1, inf]")

    @property
    def p_minus(self) -> float:
        return float(self.values.min())

    @property
    def p_plus(self) -> float:
        """Max over finite values; inf only if every value is infinite."""
        finite = self.values[np.isfinite(self.values)]
        return float(finite.max()) if finite.size else math.inf

    @property
    def in_class_p(self) -> bool:
        return bool(self.p_minus > 1.0 and np.all(np.isfinite(self.values)))

    @property
    def in_class_p1(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    def restricted_min(self, members) -> float:
        idx = sorted(members)
        return float(self.values[idx].min())

    def restricted_max(self, members) -> float:
        idx = sorted(members)
        return float(self.values[idx].max())

    @staticmethod
    def constant(p: float, n: int, p_infty: float | None = None) -> "ExponentField":
        return ExponentField(np.full(n, float(p)), p_infty=p_infty)


def conjugate(p: ExponentField) -> ExponentField:
    """Pointwise p/(p-1); 1 maps to inf and inf maps to 1."""
    v = p.values
    out = np.empty_like(v)
    one = v == 1.0
    infty = np.isinf(v)
    rest = ~(one | infty)
    out[one] = np.inf
    out[infty] = 1.0
    out[rest] = v[rest] / (v[rest] - 1.0)
    p_inf = None
    if p.p_infty is not None:
        if p.p_infty == 1.0:
            p_inf = math.inf
        elif math.isinf(p.p_infty):
            p_inf = 1.0
        else:
            p_inf = p.p_infty / (p.p_infty - 1.0)
    return ExponentField(out, p_infty=p_inf)


def as_weight(values) -> np.ndarray:
    w = np.asarray(values, dtype=float)
    if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
        raise NonPositiveWeight("weight values must be positive and finite")
    return w


def modular(f, p: ExponentField, space: QuasiMetricSpace) -> float:
    """rho_{p(.)}(f): integral part on {p < inf} plus sup part on {p = inf}."""
    fv = np.abs(np.asarray(f, dtype=float))
    pv = p.values
    fin = np.isfinite(pv)
    # index-ascending compensated summation for reproducibility
    total = math.fsum(
        float(fv[i]) ** float(pv[i]) * float(space.measure[i])
        for i in range(fv.size)
        if fin[i] and fv[i] > 0.0
    )
    if np.any(~fin):
        sup_part = float(fv[~fin].max())
        total += sup_part
    return total


def luxemburg_norm(f, p: ExponentField, space: QuasiMetricSpace) -> float:
    fv = np.abs(np.asarray(f, dtype=float))
    fmax = float(fv.max(initial=0.0))
    if fmax == 0.0:
        return 0.0
    inv_pm = 0.0 if math.isinf(p.p_minus) else 1.0 / p.p_minus
    lo = fmax * min(float(space.measure.min()), 1.0) ** inv_pm / 2.0
    hi = fmax * max(1.0, space.total_mass) ** inv_pm
    while modular(fv / lo, p, space) <= 1.0:
        lo /= 2.0
    while modular(fv / hi, p, space) > 1.0:
        hi *= 2.0
    for _ in range(BISECT_MAX_ITER):
        if hi - lo <= BISECT_REL_TOL * hi:
            break
        mid = 0.5 * (lo + hi)
        if modular(fv / mid, p, space) <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi  # modular(f/hi) <= 1 at the returned value


def weighted_norm(f, p: ExponentField, omega, space: QuasiMetricSpace) -> float:
    """||f||_{L^{p(.)}(X, omega)} = ||omega f||_{p(.)}."""
    w = as_weight(omega)
    return luxemburg_norm(w * np.asarray(f, dtype=float), p, space)


def weak_norm(f, q: ExponentField, omega, space: QuasiMetricSpace) -> float:
    """sup_{t>0} t ||omega chi_{f > t}||_{q(.)}, exact by threshold sweep.

    The sup over t in a level interval is attained at its right endpoint v,
    where {f > t} = {f >= v}; sweeping the distinct positive values of f is
    exact on a finite space.
    """
    fv = np.asarray(f, dtype=float)
    if np.any(fv < 0.0):
        raise NegativeInput("weak norm is defined for nonnegative inputs")
    w = as_weight(omega)
    best = 0.0
    for v in np.unique(fv[fv > 0.0]):
        indicator = (fv >= v).astype(float)
        best = max(best, float(v) * luxemburg_norm(w * indicator, q, space))
    return best


def log_holder_diagnostics(p: ExponentField, space: QuasiMetricSpace):
    """Tightest local and at-infinity log-Holder constants.

    Returns (c0_local, c0_infty); the second is None when no p_infty was
    supplied.  Vacuous maxima are 0.
    """
    pv = p.values
    n = space.n
    c_local = 0.0
    for x in range(n):
        for y in range(x + 1, n):
            dxy = space.d(x, y)
            if 0.0 < dxy < 0.5:
                c_local = max(c_local, abs(pv[x] - pv[y]) * math.log(math.e + 1.0 / dxy))
    if p.p_infty is None:
        return c_local, None
    c_inf = 0.0
    for x in range(n):
        c_inf = max(c_inf,
                    abs(pv[x] - p.p_infty) * math.log(math.e + space.d(space.base_point, x)))
    return c_local, c_inf


def weighted_average(f, sigma, members, space: QuasiMetricSpace) -> float:
    idx = sorted(members)
    fv = np.asarray(f, dtype=float)[idx]
    sv = np.asarray(sigma, dtype=float)[idx]
    mv = space.measure[idx]
    denom = math.fsum((sv * mv).tolist())
    if denom <= 0.0:
        raise ZeroWeightMass("sigma-mass of the set is zero")
    return math.fsum((fv * sv * mv).tolist()) / denom


@dataclass(frozen=True)
class OperatorConfig:
    """Arity m, fractional order eta in [0, m), input exponents, target exponent.

    q is derived pointwise from 1/q = sum_i 1/p_i - eta when not supplied;
    points where the right side vanishes or goes negative get q = inf.
    """

    m: int
    eta: float
    p_fields: tuple[ExponentField, ...]
    q: ExponentField = field(default=None)

    def __post_init__(self):
        if self.m < 1 or len(self.p_fields) != self.m:
            raise InvalidConfig(f"expected {self.m} exponent fields, got {len(self.p_fields)}")
        if not (0.0 <= self.eta < self.m):
            raise InvalidConfig(f"eta must lie in [0, m), got {self.eta}")
        object.__setattr__(self, "p_fields", tuple(self.p_fields))
        if self.q is None:
            object.__setattr__(self, "q", self._derive_q())
        if self.q.p_minus < 1.0:
            raise InvalidConfig("target exponent q must be >= 1 everywhere")

    def _derive_q(self) -> ExponentField:
        inv = np.zeros_like(self.p_fields[0].values)
        for pf in self.p_fields:
            inv = inv + np.where(np.isinf(pf.values), 0.0, 1.0 / pf.values)
        inv = inv - self.eta
        if np.any(inv > 1.0):
            raise InvalidConfig("derived q drops below 1 at some point")
        q = np.where(inv > 0.0, 1.0 / np.where(inv > 0.0, inv, 1.0), np.inf)
        q_inf = None
        infs = [pf.p_infty for pf in self.p_fields]
        if all(v is not None for v in infs):
            s = sum((0.0 if math.isinf(v) else 1.0 / v) for v in infs) - self.eta
            q_inf = 1.0 / s if s > 0 else math.inf
        return ExponentField(q, p_infty=q_inf)

    @property
    def n(self) -> int:
        return self.p_fields[0].values.size


def beta_delta(members, config: OperatorConfig) -> tuple[float, float]:
    """(beta(E), delta(E)) with 1/beta = sum_i 1/(p_i)_-(E), 1/delta = 1/beta - eta."""
    if not members:
        raise DeltaUndefined("empty set")
    inv_beta = sum(1.0 / pf.restricted_min(members) for pf in config.p_fields)
    inv_delta = inv_beta - config.eta
    if inv_delta <= 0.0:
        raise DeltaUndefined(f"1/beta - eta = {inv_delta} is not positive")
    beta = 1.0 / inv_beta
    delta = 1.0 / inv_delta
    q_minus = config.q.restricted_min(members)
    assert delta <= q_minus + 1e-12, "delta(E) exceeds q_-(E)"
    return beta, delta
