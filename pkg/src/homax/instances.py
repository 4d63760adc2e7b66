"""Instance descriptors, JSON ingestion, and seeded random generators.

An instance bundles a finite doubling space, per-component exponent fields,
weights, and an operator configuration.  Descriptors are plain JSON with
top-level keys "space", "measure", "exponents", "weights", "config", "seed";
each field is either explicit data or a generator object realized
deterministically from the seed.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, SchemaError, ValidationError, HomaxError
from .space import QuasiMetricSpace, ball, build_space
from .varexp import ExponentField, OperatorConfig, log_holder_diagnostics

__all__ = ["InstanceSpec", "Instance", "load_instance", "parse_instance",
           "realize", "generate_corpus"]

_TOP_KEYS = ("space", "measure", "exponents", "weights", "config", "seed")


@dataclass(frozen=True)
class InstanceSpec:
    """Validated descriptor; realize() turns it into concrete arrays."""

    space: dict
    measure: object
    exponents: dict
    weights: object
    config: dict
    seed: int
    instance_id: str = "instance"

    @property
    def n(self) -> int:
        if "dist" in self.space:
            return len(self.space["dist"])
        kind, arg = next(iter(self.space.items()))
        if kind == "line":
            return int(arg)
        if kind == "grid":
            return int(arg[0]) * int(arg[1])
        if kind in ("tree", "random_graph"):
            return int(arg) if not isinstance(arg, dict) else int(arg["n"])
        raise SchemaError(f"space: unknown generator {kind!r}")


@dataclass(frozen=True)
class Instance:
    spec: InstanceSpec
    space: QuasiMetricSpace
    config: OperatorConfig
    weights: tuple[np.ndarray, ...]

    @property
    def instance_id(self) -> str:
        return self.spec.instance_id


def _require(cond: bool, message: str):
    if not cond:
        raise SchemaError(message)


def parse_instance(doc: dict, instance_id: str = "instance") -> InstanceSpec:
    """Validate a parsed JSON document against the instance schema."""
    _require(isinstance(doc, dict), "top level must be a JSON object")
    for key in _TOP_KEYS:
        _require(key in doc, f"missing field {key!r}")
    space = doc["space"]
    _require(isinstance(space, dict) and len(space) == 1,
             "space must be a one-key object")
    if "dist" in space:
        dist = space["dist"]
        _require(isinstance(dist, list) and dist and
                 all(isinstance(r, list) and len(r) == len(dist) for r in dist),
                 "dist must be a square matrix")
        arr = np.asarray(dist, dtype=float)
        if not np.allclose(arr, arr.T, rtol=0.0, atol=0.0):
            raise SchemaError("dist not symmetric")
    else:
        kind = next(iter(space))
        _require(kind in ("line", "grid", "tree", "random_graph"),
                 f"space: unknown generator {kind!r}")
    config = doc["config"]
    _require(isinstance(config, dict) and "m" in config and "eta" in config,
             "config must carry m and eta")
    m = config["m"]
    _require(isinstance(m, int) and m >= 1, "config.m must be a positive integer")
    exps = doc["exponents"]
    _require(isinstance(exps, dict), "exponents must be an object")
    for i in range(1, m + 1):
        _require(f"p{i}" in exps, f"exponents: missing p{i}")
    _require(isinstance(doc["seed"], int), "seed must be an integer")
    spec = InstanceSpec(space=space, measure=doc["measure"], exponents=exps,
                        weights=doc["weights"], config=config,
                        seed=doc["seed"], instance_id=instance_id)
    spec.n  # force generator-name validation
    return spec


def load_instance(path: str) -> InstanceSpec:
    """Read, parse, and schema-check an instance JSON file."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(str(exc)) from exc
    return parse_instance(doc, instance_id=str(path))


# ---------------------------------------------------------------- generators

def _line_distances(n: int) -> np.ndarray:
    idx = np.arange(n, dtype=float)
    return np.abs(np.subtract.outer(idx, idx))


def _grid_distances(rows: int, cols: int) -> np.ndarray:
    pts = [(i, j) for i in range(rows) for j in range(cols)]
    n = len(pts)
    d = np.zeros((n, n))
    for a in range(n):
        for b in range(n):
            d[a, b] = abs(pts[a][0] - pts[b][0]) + abs(pts[a][1] - pts[b][1])
    return d


def _shortest_paths(n: int, edges: list[tuple[int, int, float]]) -> np.ndarray:
    d = np.full((n, n), math.inf)
    np.fill_diagonal(d, 0.0)
    for a, b, w in edges:
        d[a, b] = min(d[a, b], w)
        d[b, a] = min(d[b, a], w)
    for k in range(n):  # Floyd-Warshall; n <= 200 throughout
        d = np.minimum(d, d[:, k:k + 1] + d[k:k + 1, :])
    if not np.all(np.isfinite(d)):
        raise ValidationError("generated graph is not connected")
    return d


def _tree_distances(n: int, rng: np.random.Generator) -> np.ndarray:
    edges = [(i, int(rng.integers(0, i)), float(rng.uniform(0.5, 1.5)))
             for i in range(1, n)]
    return _shortest_paths(n, edges)


def _random_graph_distances(n: int, rng: np.random.Generator) -> np.ndarray:
    edges = [(i, int(rng.integers(0, i)), float(rng.uniform(0.5, 1.5)))
             for i in range(1, n)]  # spanning tree keeps it connected
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < 0.25:
                edges.append((a, b, float(rng.uniform(0.5, 1.5))))
    return _shortest_paths(n, edges)


def _realize_space(space: dict, rng: np.random.Generator) -> np.ndarray:
    if "dist" in space:
        return np.asarray(space["dist"], dtype=float)
    kind, arg = next(iter(space.items()))
    if kind == "line":
        return _line_distances(int(arg))
    if kind == "grid":
        return _grid_distances(int(arg[0]), int(arg[1]))
    if kind == "tree":
        return _tree_distances(int(arg), rng)
    if kind == "random_graph":
        return _random_graph_distances(int(arg), rng)
    raise SchemaError(f"space: unknown generator {kind!r}")


def _realize_measure(measure, n: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(measure, list):
        arr = np.asarray(measure, dtype=float)
        _require(arr.size == n, "measure length does not match space size")
        return arr
    if measure == "uniform":
        return np.ones(n)
    if isinstance(measure, dict) and "lognormal" in measure:
        sigma = float(measure["lognormal"].get("sigma", 0.5)) \
            if isinstance(measure["lognormal"], dict) else float(measure["lognormal"])
        return np.exp(rng.normal(0.0, sigma, size=n))
    raise SchemaError(f"measure: unknown descriptor {measure!r}")


def _smooth_over_balls(values: np.ndarray, space: QuasiMetricSpace,
                       radius: float) -> np.ndarray:
    out = np.empty_like(values)
    for x in range(space.n):
        members = sorted(ball(space, x, radius).members)
        w = space.measure[members]
        out[x] = float(np.dot(values[members], w) / w.sum())
    return out


def _realize_exponent(desc, space: QuasiMetricSpace,
                      rng: np.random.Generator) -> ExponentField:
    n = space.n
    if isinstance(desc, list):
        arr = np.asarray(desc, dtype=float)
        _require(arr.size == n, "exponent length does not match space size")
        return ExponentField(arr)
    if isinstance(desc, (int, float)):
        return ExponentField.constant(float(desc), n)
    if isinstance(desc, dict) and "constant" in desc:
        return ExponentField.constant(float(desc["constant"]), n)
    if isinstance(desc, dict) and "smoothed_random" in desc:
        opts = desc["smoothed_random"]
        lo = float(opts.get("lo", 1.2))
        hi = float(opts.get("hi", 4.0))
        _require(1.0 <= lo <= hi, "smoothed_random needs 1 <= lo <= hi")
        radius = float(opts.get("radius", 0.5))
        ceiling = opts.get("lh_ceiling")
        vals = rng.uniform(lo, hi, size=n)
        vals = _smooth_over_balls(vals, space, radius)
        if ceiling is not None:
            while log_holder_diagnostics(ExponentField(vals), space)[0] > ceiling \
                    and radius <= space.diameter:
                radius *= 2.0
                vals = _smooth_over_balls(vals, space, radius)
        vals = np.clip(vals, lo, hi)
        return ExponentField(vals)
    raise SchemaError(f"exponents: unknown descriptor {desc!r}")


def _realize_weight(desc, space: QuasiMetricSpace,
                    rng: np.random.Generator) -> np.ndarray:
    n = space.n
    if isinstance(desc, list):
        arr = np.asarray(desc, dtype=float)
        _require(arr.size == n, "weight length does not match space size")
        return arr
    if desc == "unit":
        return np.ones(n)
    if isinstance(desc, dict) and "lognormal" in desc:
        sigma = float(desc["lognormal"].get("sigma", 0.4)) \
            if isinstance(desc["lognormal"], dict) else float(desc["lognormal"])
        return np.exp(rng.normal(0.0, sigma, size=n))
    if isinstance(desc, dict) and "power_distance" in desc:
        opts = desc["power_distance"]
        a = float(opts.get("a", 0.3))
        x0 = int(opts.get("x0", space.base_point))
        lo, hi = opts.get("clip", [0.2, 5.0])
        d = np.array([space.d(x, x0) for x in range(n)])
        return np.clip(np.where(d > 0.0, d, 1.0) ** a, float(lo), float(hi))
    raise SchemaError(f"weights: unknown descriptor {desc!r}")


def realize(spec: InstanceSpec) -> Instance:
    """Deterministically construct the concrete instance from its spec."""
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed & 0x7FFFFFFF]))
    dist = _realize_space(spec.space, rng)
    measure = _realize_measure(spec.measure, dist.shape[0], rng)
    space = build_space(dist, measure)
    m = int(spec.config["m"])
    eta = float(spec.config["eta"])
    p_fields = tuple(_realize_exponent(spec.exponents[f"p{i}"], space, rng)
                     for i in range(1, m + 1))
    q = (_realize_exponent(spec.exponents["q"], space, rng)
         if "q" in spec.exponents else None)
    config = OperatorConfig(m=m, eta=eta, p_fields=p_fields, q=q)
    wdesc = spec.weights
    if isinstance(wdesc, list) and len(wdesc) == m and \
            all(isinstance(w, (list, dict, str)) for w in wdesc):
        weights = tuple(_realize_weight(w, space, rng) for w in wdesc)
    else:
        weights = tuple(_realize_weight(wdesc, space, rng) for _ in range(m))
    return Instance(spec=spec, space=space, config=config, weights=weights)


# ------------------------------------------------------------------- corpus

_FAMILIES = {
    "line": lambda size: {"line": size},
    "grid": lambda size: {"grid": [max(2, size // 4), 4]},
    "tree": lambda size: {"tree": size},
    "random_graph": lambda size: {"random_graph": size},
}


def generate_corpus(descriptor, count: int, seed: int) -> list[InstanceSpec]:
    """A deterministic family of instance specs.

    descriptor: either a family name in {line, grid, tree, random_graph,
    mixed} or a full template dict whose "seed" is re-derived per instance.
    """
    if isinstance(descriptor, dict):
        specs = []
        for i in range(count):
            child = int(np.random.SeedSequence([seed, i]).generate_state(1)[0])
            doc = dict(descriptor)
            doc["seed"] = child
            specs.append(parse_instance(doc, instance_id=f"custom-{i:03d}"))
        return specs
    if descriptor == "mixed":
        names = list(_FAMILIES)
    elif descriptor in _FAMILIES:
        names = [descriptor]
    else:
        raise SchemaError(f"unknown corpus family {descriptor!r}")
    specs = []
    for i in range(count):
        name = names[i % len(names)]
        child = int(np.random.SeedSequence([seed, i]).generate_state(1)[0])
        rng = np.random.default_rng(child)
        size = int(rng.integers(6, 17))
        m = 1 if i % 3 else 2
        eta = 0.0 if i % 2 else 0.25 * m
        lo = 1.3 if m == 1 else 2.2  # keep the derived q at least 1.1
        exps = {f"p{j}": {"smoothed_random": {"lo": lo, "hi": 3.5}}
                for j in range(1, m + 1)}
        weights = [{"power_distance": {"a": 0.3, "clip": [0.5, 2.0]}}
                   if j % 2 else {"lognormal": {"sigma": 0.3}}
                   for j in range(m)]
        doc = {"space": _FAMILIES[name](size),
               "measure": "uniform" if i % 2 else {"lognormal": {"sigma": 0.4}},
               "exponents": exps,
               "weights": weights,
               "config": {"m": m, "eta": eta},
               "seed": child}
        specs.append(parse_instance(doc, instance_id=f"{name}-{i:03d}"))
    return specs
