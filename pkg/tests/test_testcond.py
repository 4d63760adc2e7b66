import math

import numpy as np
import pytest

from homax import (ExponentField, InvalidExponents, build_grid, build_space,
                   c1_constant, c2_constant, multilinear_sawyer, rh_constant,
                   sawyer_constant, theorem5_bound)


def line_grid(n, masses=None):
    idx = np.arange(n, dtype=float)
    sp = build_space(np.abs(np.subtract.outer(idx, idx)),
                     np.ones(n) if masses is None else np.asarray(masses, float))
    return build_grid(sp, 2.0, 0)


def test_c1_constant_exponent_collapses_to_one():
    grid = line_grid(8)
    rng = np.random.default_rng(1)
    omega = rng.uniform(0.5, 2.0, size=8)
    p = ExponentField.constant(2.0, 8)
    q = ExponentField.constant(2.0, 8)
    assert c1_constant(grid, omega, p, q) == 1.0


def test_c1_two_point_oracle():
    # q = (2, 2.5), unit weight: sigma = 1, q_- = 2
    p = ExponentField.constant(2.0, 2)
    q = ExponentField(np.array([2.0, 2.5]))
    grid = line_grid(2)
    # sigma(root) = 2; exponents q_- - q(x) in {0, -0.5};
    # singletons give 1^anything = 1 -> max(1, 2^-0.5) = 1
    assert c1_constant(grid, np.ones(2), p, q) == pytest.approx(1.0)
    grid_small = line_grid(2, masses=[0.25, 0.25])
    # sigma(root) = 0.5 -> 0.5^{-0.5} = sqrt(2)
    assert c1_constant(grid_small, np.ones(2), p, q) == pytest.approx(math.sqrt(2.0))


def test_c2_collapses_to_classical_sawyer_for_constant_exponents():
    rng = np.random.default_rng(2)
    for trial in range(5):
        n = 8
        grid = line_grid(n, masses=rng.uniform(0.5, 2.0, size=n))
        omega = rng.uniform(0.5, 2.0, size=n)
        v = rng.uniform(0.5, 2.0, size=n)
        p_val, q_val = 2.0, 2.5
        p = ExponentField.constant(p_val, n)
        q = ExponentField.constant(q_val, n)
        c2 = c2_constant(grid, omega, v, p, q)
        # measure-weight correspondence: u = v^q, source weight omega^p
        u = v ** q_val
        src = omega ** p_val
        classical = sawyer_constant(grid, p_val, q_val, 0.0, u, src)
        assert c2 == pytest.approx(classical, rel=1e-10)


def test_sawyer_exponent_validation():
    grid = line_grid(4)
    ones = np.ones(4)
    with pytest.raises(InvalidExponents):
        sawyer_constant(grid, 2.0, 1.5, 0.0, ones, ones)  # p > q
    with pytest.raises(InvalidExponents):
        sawyer_constant(grid, 1.0, 2.0, 0.0, ones, ones)  # p <= 1
    with pytest.raises(InvalidExponents):
        multilinear_sawyer(grid, [2.0, 3.0], 2.5, 0.0, [ones, ones], ones)


def test_rh_constant_at_least_one_and_unit_case():
    grid = line_grid(6)
    ones = np.ones(6)
    assert rh_constant(grid, [2.0, 3.0], [ones, ones]) == pytest.approx(1.0)
    rng = np.random.default_rng(3)
    w = [rng.uniform(0.5, 2.0, size=6) for _ in range(2)]
    val = rh_constant(grid, [2.0, 3.0], w)
    assert val >= 1.0 - 1e-12
    ball_val = rh_constant(grid, [2.0, 3.0], w, sweep_balls=True)
    assert ball_val >= 1.0 - 1e-12


def test_theorem5_bound_formula():
    p = ExponentField(np.array([1.5, 3.0]))
    c1, c2 = 2.0, 0.5
    base = c2 + c1 * c2
    expect = base ** (1 / 1.5) + base ** (1 / 3.0)
    assert theorem5_bound(c1, c2, p) == pytest.approx(expect)
    assert theorem5_bound(5.0, 0.0, p) == 0.0


def test_multilinear_sawyer_finite_on_random_weights():
    rng = np.random.default_rng(4)
    grid = line_grid(8)
    w = [rng.uniform(0.5, 2.0, size=8) for _ in range(2)]
    v = rng.uniform(0.5, 2.0, size=8)
    val = multilinear_sawyer(grid, [2.0, 2.5], 3.0, 0.5, w, v)
    assert math.isfinite(val) and val > 0.0
