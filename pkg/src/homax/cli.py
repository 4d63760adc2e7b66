"""Command-line interface.

Subcommands: validate, grid, norm, maximal, weights, czd, testcond, suite.
Exit codes: 0 success, 1 failed assertion/validation, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .czd import cz_decompose, root_average
from .errors import HomaxError, ParseError, SchemaError, UnknownSuite, \
    ValidationError
from .grid import adjacent_grids, build_grid, dump_grid, verify_grid_axioms
from .instances import load_instance, realize
from .maximal import dyadic_maximal_op, maximal_op
from .suites import SUITES, compute_metrics, metrics_csv, run_suite
from .testcond import c1_constant, c2_constant, rh_constant, theorem5_bound
from .varexp import luxemburg_norm, log_holder_diagnostics
from .weights import MultiWeight, apq_constant, apq_dyadic_constant, \
    verify_factorization


def _emit(payload: dict, args) -> None:
    if args.format == "csv":
        lines = [",".join(str(k) for k in payload),
                 ",".join(_csv_cell(v) for v in payload.values())]
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(payload, indent=2, sort_keys=True, default=_json_cell) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return "nan" if v != v else format(v, ".12g")
    if isinstance(v, (list, dict)):
        return json.dumps(v, default=_json_cell).replace(",", ";")
    return str(v)


def _json_cell(v):
    if isinstance(v, float) and (v != v or math.isinf(v)):
        return str(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, frozenset):
        return sorted(v)
    raise TypeError(f"not serializable: {type(v)}")


def _load(args):
    inst = realize(load_instance(args.instance))
    return inst


def _random_inputs(inst, seed):
    rng = np.random.default_rng(seed)
    return [rng.uniform(0.1, 2.0, size=inst.space.n)
            for _ in range(inst.config.m)]


def _cmd_validate(args) -> int:
    inst = _load(args)
    diagnostics = [log_holder_diagnostics(pf, inst.space)
                   for pf in inst.config.p_fields]
    _emit({"instance_id": inst.instance_id, "n": inst.space.n,
           "quasi_const": inst.space.quasi_const,
           "doubling_const": inst.space.doubling_const,
           "diameter": inst.space.diameter,
           "total_mass": inst.space.total_mass,
           "log_holder_local": [d[0] for d in diagnostics],
           "log_holder_infty": [d[1] for d in diagnostics]}, args)
    return 0


def _cmd_grid(args) -> int:
    inst = _load(args)
    grids = adjacent_grids(inst.space, args.d0, args.grids)
    reports = [verify_grid_axioms(g) for g in grids]
    payload = {"instance_id": inst.instance_id,
               "grids": [{"seed": g.seed, "k_min": g.k_min, "k_max": g.k_max,
                          "sandwich_outer": g.sandwich_outer,
                          "sandwich_inner": g.sandwich_inner,
                          "epsilon": g.child_mass_ratio,
                          "axioms_ok": r.valid,
                          "dump": dump_grid(g)}
                         for g, r in zip(grids, reports)]}
    _emit(payload, args)
    return 0 if all(r.valid for r in reports) else 1


def _cmd_norm(args) -> int:
    inst = _load(args)
    fvec = _random_inputs(inst, args.seed)
    norms = [luxemburg_norm(f, pf, inst.space)
             for f, pf in zip(fvec, inst.config.p_fields)]
    wnorms = [luxemburg_norm(w * f, pf, inst.space)
              for f, w, pf in zip(fvec, inst.weights, inst.config.p_fields)]
    _emit({"instance_id": inst.instance_id, "seed": args.seed,
           "norms": norms, "weighted_norms": wnorms}, args)
    return 0


def _cmd_maximal(args) -> int:
    inst = _load(args)
    fvec = _random_inputs(inst, args.seed)
    mx = maximal_op(inst.space, inst.config, fvec)
    grid = build_grid(inst.space, args.d0, 0)
    dy = dyadic_maximal_op(grid, inst.config, fvec)
    _emit({"instance_id": inst.instance_id, "seed": args.seed,
           "maximal": mx.values.tolist(), "dyadic_maximal": dy.values.tolist()},
          args)
    return 0


def _cmd_weights(args) -> int:
    inst = _load(args)
    w = MultiWeight(components=inst.weights, config=inst.config)
    grid = build_grid(inst.space, args.d0, 0)
    apq = apq_constant(inst.space, inst.config, w)
    _emit({"instance_id": inst.instance_id,
           "apq": apq.value, "apq_argmax": sorted(apq.argmax),
           "apq_dyadic": apq_dyadic_constant(grid, inst.config, w).value,
           "factorization": verify_factorization(inst.space, inst.config, w)},
          args)
    return 0 if math.isfinite(apq.value) else 1


def _cmd_czd(args) -> int:
    inst = _load(args)
    grid = build_grid(inst.space, args.d0, 0)
    fvec = _random_inputs(inst, args.seed)
    v = np.ones(inst.space.n)
    lam = args.height if args.height is not None else \
        2.0 * root_average(grid, inst.config, fvec, v)
    dec = cz_decompose(grid, inst.config, fvec, v, lam)
    _emit({"instance_id": inst.instance_id, "seed": args.seed,
           **dec.to_json()}, args)
    return 0


def _cmd_testcond(args) -> int:
    inst = _load(args)
    if inst.config.m != 1:
        print("testcond requires m = 1 instances", file=sys.stderr)
        return 2
    grid = build_grid(inst.space, args.d0, 0)
    p1, q = inst.config.p_fields[0], inst.config.q
    w = MultiWeight(components=inst.weights, config=inst.config)
    c1 = c1_constant(grid, w.components[0], p1, q)
    c2 = c2_constant(grid, w.components[0], w.product, p1, q,
                     eta=inst.config.eta)
    payload = {"instance_id": inst.instance_id, "c1": c1, "c2": c2,
               "bound": theorem5_bound(c1, c2, p1)}
    _emit(payload, args)
    return 0


def _cmd_suite(args) -> int:
    corpus = None
    if args.corpus:
        from .instances import generate_corpus
        corpus = generate_corpus(args.corpus, args.count, args.seed)
    report = run_suite(args.name, corpus=corpus, out=args.out,
                       count=args.count, seed=args.seed)
    if not args.out:
        text = report.to_csv() if args.format == "csv" \
            else json.dumps(report.to_json(), indent=2, sort_keys=True,
                            default=_json_cell) + "\n"
        sys.stdout.write(text)
    return report.exit_code


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="homax",
                                  description="finite-space maximal-operator "
                                              "and weight-constant toolkit")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=["csv", "json"], default="json")
    common.add_argument("--grids", type=int, default=3)
    common.add_argument("--d0", type=float, default=2.0)
    sub = top.add_subparsers(dest="command", required=True)
    for name, fn in [("validate", _cmd_validate), ("grid", _cmd_grid),
                     ("norm", _cmd_norm), ("maximal", _cmd_maximal),
                     ("weights", _cmd_weights), ("czd", _cmd_czd),
                     ("testcond", _cmd_testcond)]:
        p = sub.add_parser(name, parents=[common])
        p.add_argument("instance", help="instance JSON file")
        if name == "czd":
            p.add_argument("--height", type=float, default=None)
        p.set_defaults(fn=fn)
    p = sub.add_parser("suite", parents=[common])
    p.add_argument("name", help=f"one of {sorted(SUITES)}")
    p.add_argument("--corpus", default=None,
                   help="corpus family (line/grid/tree/random_graph/mixed)")
    p.add_argument("--count", type=int, default=8)
    p.set_defaults(fn=_cmd_suite)
    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, SchemaError, UnknownSuite) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HomaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
