import math

import numpy as np
import pytest

from homax import (ExponentField, MultiWeight, OperatorConfig, SigmaUndefined,
                   a_infty_diagnostics, ap_constant, apq_constant,
                   apq_dyadic_constant, build_grid, build_space,
                   verify_factorization)


def line_space(n, masses=None):
    idx = np.arange(n, dtype=float)
    return build_space(np.abs(np.subtract.outer(idx, idx)),
                       np.ones(n) if masses is None else masses)


def config_for(n, m=1, eta=0.0, p=2.0, q=None):
    return OperatorConfig(m=m, eta=eta,
                          p_fields=tuple(ExponentField.constant(p, n)
                                         for _ in range(m)),
                          q=None if q is None else ExponentField.constant(q, n))


def test_unit_weight_constant_is_one():
    sp = line_space(6)
    p = ExponentField.constant(2.0, 6)
    assert ap_constant(sp, p, np.ones(6)).value == pytest.approx(1.0, rel=1e-9)


def test_scaling_invariance():
    rng = np.random.default_rng(2)
    sp = line_space(8)
    cfg = config_for(8, m=2, eta=0.5, p=3.0)
    comps = tuple(rng.uniform(0.5, 2.0, size=8) for _ in range(2))
    base = apq_constant(sp, cfg, MultiWeight(components=comps, config=cfg)).value
    scaled = tuple(c * w for c, w in zip((3.0, 0.2), comps))
    again = apq_constant(sp, cfg, MultiWeight(components=scaled, config=cfg)).value
    assert again == pytest.approx(base, rel=1e-10)


def test_argmax_attains_reported_value():
    rng = np.random.default_rng(4)
    sp = line_space(7)
    cfg = config_for(7, p=2.5)
    w = MultiWeight(components=(rng.uniform(0.5, 2.0, size=7),), config=cfg)
    rep1 = apq_constant(sp, cfg, w)
    rep2 = apq_constant(sp, cfg, w)
    assert rep1.argmax == rep2.argmax
    assert rep1.value == rep2.value


def test_u_sigma_identities():
    rng = np.random.default_rng(5)
    n = 6
    cfg = config_for(n, m=2, eta=0.0, p=3.0)
    comps = tuple(rng.uniform(0.5, 2.0, size=n) for _ in range(2))
    w = MultiWeight(components=comps, config=cfg)
    prod = comps[0] * comps[1]
    assert np.allclose(w.u, prod ** cfg.q.values, rtol=1e-12)
    for wi, sig in zip(comps, w.sigmas):
        assert np.allclose(sig, wi ** (-1.5), rtol=1e-12)  # p'=3/2


def test_sigma_rejected_at_exponent_one_with_nonunit_weight():
    n = 4
    cfg = config_for(n, p=1.0)
    with pytest.raises(SigmaUndefined):
        MultiWeight(components=(np.full(n, 2.0),), config=cfg)
    # neutral weight value 1 is allowed
    w = MultiWeight(components=(np.ones(n),), config=cfg)
    assert np.allclose(w.sigmas[0], 1.0)


def test_dyadic_constant_vs_ball_constant_finite():
    rng = np.random.default_rng(6)
    sp = line_space(8, masses=rng.uniform(0.5, 2.0, size=8))
    grid = build_grid(sp, 2.0, 0)
    cfg = config_for(8, p=2.0)
    w = MultiWeight(components=(rng.uniform(0.5, 2.0, size=8),), config=cfg)
    ball_c = apq_constant(sp, cfg, w).value
    dyad_c = apq_dyadic_constant(grid, cfg, w).value
    assert math.isfinite(ball_c) and math.isfinite(dyad_c)
    assert dyad_c > 0.0 and ball_c > 0.0


def test_factorization_ratios_finite():
    rng = np.random.default_rng(7)
    sp = line_space(8)
    cfg = config_for(8, m=2, eta=0.0, p=3.0)
    comps = tuple(np.exp(rng.normal(0.0, 0.4, size=8)) for _ in range(2))
    w = MultiWeight(components=comps, config=cfg)
    out = verify_factorization(sp, cfg, w)
    assert math.isfinite(out["apq"])
    assert all(math.isfinite(r) and r > 0 for r in out["component_ratios"])
    assert math.isfinite(out["product_ratio"]) and out["product_ratio"] > 0


def test_a_infty_diagnostics_sane():
    rng = np.random.default_rng(8)
    sp = line_space(8)
    omega = np.exp(rng.normal(0.0, 0.3, size=8))
    eps, c2, delta, c1 = a_infty_diagnostics(sp, omega)
    assert 0.0 < eps <= 1.0
    assert math.isfinite(c2) and c2 > 0
    assert 0.0 < delta <= 1.0
    assert math.isfinite(c1) and c1 > 0
