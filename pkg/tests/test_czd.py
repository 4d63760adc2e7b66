import numpy as np
import pytest

from homax import (ExponentField, HeightBelowThreshold, OperatorConfig,
                   RatioTooSmall, build_grid, build_space, cz_decompose,
                   cz_levels, dyadic_maximal_op, root_average, superlevel_set)


def line_grid(n):
    idx = np.arange(n, dtype=float)
    sp = build_space(np.abs(np.subtract.outer(idx, idx)), np.ones(n))
    return build_grid(sp, 2.0, 0)


def config_for(n, m=1, eta=0.0, p=2.0):
    return OperatorConfig(m=m, eta=eta,
                          p_fields=tuple(ExponentField.constant(p, n)
                                         for _ in range(m)))


def spike_setup():
    n = 8
    grid = line_grid(n)
    cfg = config_for(n)
    f = np.zeros(n)
    f[0] = 8.0
    return grid, cfg, f, np.ones(n)


def test_single_stopping_cube():
    grid, cfg, f, v = spike_setup()
    dec = cz_decompose(grid, cfg, [f], v, 1.5)
    assert [sorted(q.members) for q in dec.cubes] == [[0, 1, 2, 3]]
    assert list(dec.averages) == [pytest.approx(2.0)]
    assert dec.c_cz == pytest.approx(4.0 / 3.0)
    assert dec.c_cz <= dec.analytic_ceiling


def test_two_sided_average_bound():
    grid, cfg, f, v = spike_setup()
    for lam in (1.1, 1.5, 2.5, 5.0):
        dec = cz_decompose(grid, cfg, [f], v, lam)
        for avg in dec.averages:
            assert lam < avg <= dec.c_cz * lam * (1 + 1e-12)


def test_maximality_parent_average_at_most_height():
    grid, cfg, f, v = spike_setup()
    dec = cz_decompose(grid, cfg, [f], v, 1.5)
    from homax.czd import _cube_averages
    avgs = _cube_averages(grid, cfg, [f], v)
    for q in dec.cubes:
        assert q.parent is not None
        assert avgs[q.parent.key] <= 1.5


def test_cover_identity_with_dyadic_superlevel():
    grid, cfg, f, v = spike_setup()
    for lam in (1.1, 1.5, 3.0):
        dec = cz_decompose(grid, cfg, [f], v, lam)
        union = set()
        for q in dec.cubes:
            union |= set(q.members)
        assert union == superlevel_set(grid, cfg, [f], v, lam)
        mx = dyadic_maximal_op(grid, cfg, [f], v=v).values
        assert union == {x for x in range(8) if mx[x] > lam}


def test_height_below_threshold():
    grid, cfg, f, v = spike_setup()
    assert root_average(grid, cfg, [f], v) == pytest.approx(1.0)
    with pytest.raises(HeightBelowThreshold):
        cz_decompose(grid, cfg, [f], v, 1.0)


def test_levels_disjoint_and_mass_bound():
    rng = np.random.default_rng(3)
    grid = line_grid(8)
    cfg = config_for(8)
    f = rng.uniform(0.1, 4.0, size=8)
    v = rng.uniform(0.5, 2.0, size=8)
    dec = cz_decompose(grid, cfg, [f], v,
                       1.5 * root_average(grid, cfg, [f], v))
    a = 2.0 * dec.c_cz + 0.01
    lv = cz_levels(grid, cfg, [f], v, a=a)
    seen = set()
    for level in lv.levels:
        for e in level.e_sets:
            assert not (seen & set(e))
            seen |= set(e)
        # lower mass bound per cube: (1 - (C_CZ/a)^(1/(m-eta))) v(Q) <= v(E)
        for q, e in zip(level.cubes, level.e_sets):
            vq = sum(v[i] * grid.space.measure[i] for i in sorted(q.members))
            ve = sum(v[i] * grid.space.measure[i] for i in sorted(e))
            assert ve >= lv.mass_bound * vq * (1 - 1e-12)
    with pytest.raises(RatioTooSmall):
        cz_levels(grid, cfg, [f], v, a=dec.c_cz * 0.5)


def test_bilinear_decomposition():
    n = 8
    grid = line_grid(n)
    cfg = config_for(n, m=2, eta=0.5, p=4.0)
    rng = np.random.default_rng(4)
    fvec = [rng.uniform(0.2, 3.0, size=n) for _ in range(2)]
    v = np.ones(n)
    lam = 1.4 * root_average(grid, cfg, fvec, v)
    dec = cz_decompose(grid, cfg, fvec, v, lam)
    for avg in dec.averages:
        assert lam < avg <= dec.c_cz * lam * (1 + 1e-12)
    assert dec.c_cz <= dec.analytic_ceiling * (1 + 1e-12)
