"""Finite spaces of homogeneous type, dyadic grids, variable-exponent norms,
multilinear fractional maximal operators, weight constants, and Sawyer-type
testing conditions — with an experiment harness for verifying the
quantitative inequalities that relate them."""

from .czd import CubeDecomposition, LevelSet, cz_decompose, cz_levels, \
    root_average, superlevel_set
from .errors import *  # noqa: F401,F403
from .grid import AxiomReport, Cube, DyadicGrid, adjacent_grids, build_grid, \
    dump_grid, verify_grid_axioms
from .instances import Instance, InstanceSpec, generate_corpus, load_instance, \
    parse_instance, realize
from .maximal import MaximalField, averaging_op, dyadic_maximal_op, \
    maximal_op, one_third_compare, op_norm_lower
from .space import Ball, QuasiMetricSpace, ball, build_space, enumerate_balls, \
    lower_mass_bound
from .suites import CSV_COLUMNS, SUITES, ExperimentReport, compute_metrics, \
    metrics_csv, run_suite
from .testcond import c1_constant, c2_constant, multilinear_sawyer, \
    rh_constant, sawyer_constant, theorem5_bound
from .varexp import ExponentField, OperatorConfig, beta_delta, conjugate, \
    log_holder_diagnostics, luxemburg_norm, modular, weak_norm, \
    weighted_average, weighted_norm
from .weights import ConstantReport, MultiWeight, a_infty_diagnostics, \
    ap_constant, apq_constant, apq_dyadic_constant, default_subset_sampler, \
    verify_factorization

__version__ = "0.1.0"
