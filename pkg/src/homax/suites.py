"""Experiment suites: per-instance property checks, CSV/JSON reports.

Each suite maps instances to verdict rows.  Failures inside one instance are
recorded in its row, never raised.  Rows are ordered by instance_id and CSV
output is byte-stable for a fixed (corpus, seed).
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .czd import cz_decompose, cz_levels
from .errors import HomaxError, UnknownSuite
from .grid import adjacent_grids, build_grid, verify_grid_axioms
from .instances import Instance, generate_corpus, realize
from .maximal import (averaging_op, dyadic_maximal_op, maximal_op,
                      one_third_compare, op_norm_lower)
from .space import enumerate_balls
from .testcond import (c1_constant, c2_constant, rh_constant, sawyer_constant,
                       theorem5_bound)
from .varexp import (ExponentField, conjugate, luxemburg_norm, modular,
                     weighted_norm)
from .weights import MultiWeight, apq_constant, apq_dyadic_constant, \
    verify_factorization

__all__ = ["CSV_COLUMNS", "SUITES", "ExperimentReport", "compute_metrics",
           "metrics_csv", "run_suite"]

CSV_COLUMNS = ["instance_id", "n", "m", "eta", "apq", "apq_dyadic", "c1", "c2",
               "sawyer", "rh", "opnorm_lower_strong", "opnorm_lower_weak",
               "bound_rhs", "ratio"]


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    if x != x:
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".12g")


def worker_count() -> int:
    """HOMAX_THREADS caps concurrency; 0 or unset means automatic."""
    raw = os.environ.get("HOMAX_THREADS", "0")
    try:
        cap = int(raw)
    except ValueError:
        cap = 0
    if cap <= 0:
        cap = os.cpu_count() or 1
    return max(1, cap)


def _map_instances(fn, instances):
    workers = min(worker_count(), max(1, len(instances)))
    if workers == 1:
        rows = [fn(inst) for inst in instances]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(fn, instances))
    return sorted(rows, key=lambda r: r["instance_id"])


def compute_metrics(inst: Instance, d0: float = 2.0) -> dict:
    """The full fixed-column metric row for one instance."""
    space, config = inst.space, inst.config
    grid = build_grid(space, d0, seed=0)
    w = MultiWeight(components=inst.weights, config=config)
    row = {"instance_id": inst.instance_id, "n": space.n, "m": config.m,
           "eta": config.eta}
    row["apq"] = apq_constant(space, config, w).value
    row["apq_dyadic"] = apq_dyadic_constant(grid, config, w).value
    if config.m == 1:
        p1 = config.p_fields[0]
        row["c1"] = c1_constant(grid, w.components[0], p1, config.q)
        row["c2"] = c2_constant(grid, w.components[0], w.product, p1, config.q,
                                eta=config.eta)
        if p1.in_class_p1 and p1.p_minus == p1.p_plus and \
                config.q.p_minus == config.q.p_plus and \
                p1.p_minus > 1.0 and math.isfinite(config.q.p_plus) and \
                p1.p_plus <= config.q.p_minus:
            u = w.product ** config.q.values
            src = w.components[0] ** p1.values
            row["sawyer"] = sawyer_constant(grid, p1.p_minus, config.q.p_minus,
                                            config.eta, u, src)
        else:
            row["sawyer"] = math.nan
        if p1.p_plus <= config.q.p_minus:
            row["bound_rhs"] = theorem5_bound(row["c1"], row["c2"], p1)
        else:
            row["bound_rhs"] = math.nan
    else:
        row["c1"] = row["c2"] = row["sawyer"] = row["bound_rhs"] = math.nan
    p_mins = [pf.p_minus for pf in config.p_fields]
    if all(1.0 < p < math.inf for p in p_mins):
        row["rh"] = rh_constant(grid, p_mins, w.components)
    else:
        row["rh"] = math.nan
    row["opnorm_lower_strong"] = op_norm_lower(space, config, w,
                                               mode="strong", budget=20)
    row["opnorm_lower_weak"] = op_norm_lower(space, config, w,
                                             mode="weak", budget=20)
    b = row["bound_rhs"]
    row["ratio"] = (row["opnorm_lower_strong"] / b
                    if b == b and b > 0.0 else math.nan)
    return row


def metrics_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in sorted(rows, key=lambda r: r["instance_id"]):
        writer.writerow([_fmt(row.get(c, math.nan)) for c in CSV_COLUMNS])
    return buf.getvalue()


# ------------------------------------------------------------------- suites

def _verdict(inst: Instance, checks: list[tuple[str, bool]]) -> dict:
    failed = [name for name, ok in checks if not ok]
    return {"instance_id": inst.instance_id, "status": "pass" if not failed
            else "fail", "failed_checks": failed}


def _guard(fn):
    def wrapped(inst: Instance):
        try:
            return fn(inst)
        except HomaxError as exc:
            return {"instance_id": inst.instance_id, "status": "error",
                    "failed_checks": [f"{type(exc).__name__}: {exc}"]}
        except (OverflowError, FloatingPointError) as exc:
            return {"instance_id": inst.instance_id, "status": "skipped",
                    "failed_checks": [f"overflow: {exc}"]}
    return wrapped


@_guard
def _suite_norms(inst: Instance) -> dict:
    space = inst.space
    p = inst.config.p_fields[0]
    pc = conjugate(p)
    rng = np.random.default_rng(inst.spec.seed)
    checks = []
    for t in range(20):
        f = rng.uniform(0.0, 3.0, size=space.n)
        g = rng.uniform(0.0, 3.0, size=space.n)
        lhs = float(np.dot(f * g, space.measure))
        rhs = 4.0 * luxemburg_norm(f, p, space) * luxemburg_norm(g, pc, space)
        checks.append((f"holder-{t}", lhs <= rhs * (1 + 1e-12)))
        nf = luxemburg_norm(f, p, space)
        if nf > 0.0:
            checks.append((f"unit-ball-{t}",
                           abs(modular(f / nf, p, space)) <= 1.0 + 1e-9))
        c = float(rng.uniform(0.5, 4.0))
        checks.append((f"homogeneity-{t}",
                       abs(luxemburg_norm(c * f, p, space) - c * nf)
                       <= 1e-10 * max(1.0, c * nf)))
    return _verdict(inst, checks)


@_guard
def _suite_grid(inst: Instance) -> dict:
    checks = []
    for i, grid in enumerate(adjacent_grids(inst.space, 2.0, 3)):
        rep = verify_grid_axioms(grid)
        checks.append((f"grid{i}-nested", rep.nested_or_disjoint))
        checks.append((f"grid{i}-partition", rep.partitions))
        checks.append((f"grid{i}-parent-child", rep.parent_child))
        checks.append((f"grid{i}-sandwich", rep.sandwich))
        checks.append((f"grid{i}-epsilon", rep.epsilon > 0.0))
    return _verdict(inst, checks)


@_guard
def _suite_weights(inst: Instance) -> dict:
    w = MultiWeight(components=inst.weights, config=inst.config)
    apq = apq_constant(inst.space, inst.config, w).value
    fac = verify_factorization(inst.space, inst.config, w)
    checks = [("apq-finite", math.isfinite(apq) and apq > 0.0),
              ("factor-ratios-finite",
               all(math.isfinite(r) for r in fac["component_ratios"])),
              ("product-ratio-finite", math.isfinite(fac["product_ratio"]))]
    return _verdict(inst, checks)


@_guard
def _suite_maximal(inst: Instance) -> dict:
    space, config = inst.space, inst.config
    rng = np.random.default_rng(inst.spec.seed)
    grids = adjacent_grids(space, 2.0, 3)
    checks = []
    for t in range(5):
        fvec = [rng.uniform(0.0, 2.0, size=space.n) for _ in range(config.m)]
        mx = maximal_op(space, config, fvec).values
        for b in enumerate_balls(space)[: 2 * space.n]:
            avg = averaging_op(space, b, config, fvec)
            checks.append((f"domination-{t}", bool(np.all(avg <= mx + 1e-12))))
        for i, g in enumerate(grids):
            dy = dyadic_maximal_op(g, config, fvec).values
            c_cube = _cube_comparison_constant(g, config)
            checks.append((f"one-third-{t}-{i}",
                           bool(np.all(dy <= c_cube * mx * (1 + 1e-9)))))
    return _verdict(inst, checks)


def _cube_comparison_constant(grid, config) -> float:
    """max over cubes of (mu(B(center, C_d d0^k)) / mu(Q))^(m - eta)."""
    from .space import ball
    best = 1.0
    for cube in grid.all_cubes():
        outer = ball(grid.space, cube.center,
                     grid.sandwich_outer * grid.d0 ** cube.k)
        ratio = grid.space.mass(outer.members) / grid.space.mass(cube.members)
        best = max(best, ratio ** (config.m - config.eta))
    return best


@_guard
def _suite_czd(inst: Instance) -> dict:
    space, config = inst.space, inst.config
    rng = np.random.default_rng(inst.spec.seed)
    grid = build_grid(space, 2.0, 0)
    v = np.ones(space.n)
    checks = []
    for t in range(5):
        fvec = [rng.uniform(0.1, 3.0, size=space.n) for _ in range(config.m)]
        dec = cz_decompose(grid, config, fvec, v,
                           2.0 * _root_avg(grid, config, fvec, v))
        checks.append((f"cz1-{t}", all(dec.height < a <= dec.c_cz * dec.height
                                       + 1e-12 for a in dec.averages)))
        checks.append((f"ceiling-{t}", dec.c_cz <= dec.analytic_ceiling + 1e-12))
        lv = cz_levels(grid, config, fvec, v, a=2.0 * max(dec.c_cz, 1.0) + 0.01)
        seen = set()
        disjoint = True
        for level in lv.levels:
            for e in level.e_sets:
                if seen & set(e):
                    disjoint = False
                seen |= set(e)
        checks.append((f"e-disjoint-{t}", disjoint))
    return _verdict(inst, checks)


def _root_avg(grid, config, fvec, v):
    from .czd import root_average
    return root_average(grid, config, fvec, v)


@_guard
def _suite_testcond(inst: Instance) -> dict:
    if inst.config.m != 1:
        return {"instance_id": inst.instance_id, "status": "skipped",
                "failed_checks": ["testing constants need m = 1"]}
    grid = build_grid(inst.space, 2.0, 0)
    p1 = inst.config.p_fields[0]
    w = MultiWeight(components=inst.weights, config=inst.config)
    c1 = c1_constant(grid, w.components[0], p1, inst.config.q)
    c2 = c2_constant(grid, w.components[0], w.product, p1, inst.config.q,
                     eta=inst.config.eta)
    checks = [("c1-at-least-one", c1 >= 1.0 - 1e-12),
              ("c2-finite", math.isfinite(c2) and c2 > 0.0)]
    return _verdict(inst, checks)


@_guard
def _suite_theorems(inst: Instance) -> dict:
    row = compute_metrics(inst)
    if not math.isfinite(row["apq"]):
        return {"instance_id": inst.instance_id, "status": "skipped",
                "failed_checks": ["apq overflow"], "row": row}
    checks = [("apq-finite", math.isfinite(row["apq"])),
              ("lower-bounds-positive", row["opnorm_lower_strong"] > 0.0
               and row["opnorm_lower_weak"] > 0.0)]
    if row["bound_rhs"] == row["bound_rhs"]:
        checks.append(("ratio-finite", math.isfinite(row["ratio"])))
    out = _verdict(inst, checks)
    out["row"] = row
    return out


SUITES = {"norms": _suite_norms, "grid": _suite_grid, "weights": _suite_weights,
          "maximal": _suite_maximal, "czd": _suite_czd,
          "testcond": _suite_testcond, "theorems": _suite_theorems}


@dataclass
class ExperimentReport:
    suite: str
    rows: list[dict]
    metric_rows: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r["status"] in ("pass", "skipped") for r in self.rows)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_json(self) -> dict:
        return {"suite": self.suite, "passed": self.passed,
                "rows": self.rows,
                "metrics": [{k: (None if isinstance(v, float) and v != v else v)
                             for k, v in row.items()}
                            for row in sorted(self.metric_rows,
                                              key=lambda r: r["instance_id"])]}

    def to_csv(self) -> str:
        if self.metric_rows:
            return metrics_csv(self.metric_rows)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["instance_id", "status", "failed_checks"])
        for r in sorted(self.rows, key=lambda x: x["instance_id"]):
            writer.writerow([r["instance_id"], r["status"],
                             ";".join(r["failed_checks"])])
        return buf.getvalue()


def run_suite(name: str, corpus=None, out: str | None = None,
              count: int = 8, seed: int = 0) -> ExperimentReport:
    """Execute a named suite over a corpus; optionally write CSV/JSON files."""
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; choose from "
                           f"{sorted(SUITES)}")
    if corpus is None:
        corpus = generate_corpus("mixed", count, seed)
    instances = [realize(spec) for spec in corpus]
    rows = _map_instances(SUITES[name], instances)
    metric_rows = [r.pop("row") for r in rows if "row" in r]
    report = ExperimentReport(suite=name, rows=rows, metric_rows=metric_rows)
    if out:
        with open(out + ".json", "w") as fh:
            json.dump(report.to_json(), fh, indent=2, sort_keys=True)
        with open(out + ".csv", "w") as fh:
            fh.write(report.to_csv())
    return report
