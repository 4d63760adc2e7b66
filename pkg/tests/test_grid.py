import numpy as np
import pytest

from homax import (InvalidScaleRatio, adjacent_grids, build_grid, build_space,
                   dump_grid, verify_grid_axioms)

GOLDEN_LINE8 = """0 0 0 0
0 1 1 1
0 2 2 2
0 3 3 3
0 4 4 4
0 5 5 5
0 6 6 6
0 7 7 7
1 0 0 0 1
1 1 2 2 3
1 2 4 4 5
1 3 6 6 7
2 0 0 0 1 2 3
2 1 4 4 5 6 7
3 0 0 0 1 2 3 4 5 6 7
4 0 0 0 1 2 3 4 5 6 7"""


def line_space(n):
    idx = np.arange(n, dtype=float)
    return build_space(np.abs(np.subtract.outer(idx, idx)), np.ones(n))


def random_space(seed, n=9):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0, 10, size=(n, 2))
    d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    return build_space(d, rng.uniform(0.5, 2.0, size=n))


def test_golden_dump_line8():
    grid = build_grid(line_space(8), 2.0, 0)
    assert dump_grid(grid) == GOLDEN_LINE8 + "\n"


def test_structure_root_and_singletons():
    grid = build_grid(line_space(8), 2.0, 0)
    root = grid.generations[grid.k_max]
    assert len(root) == 1 and root[0].members == frozenset(range(8))
    finest = grid.generations[grid.k_min]
    assert all(len(q.members) == 1 for q in finest)
    assert len(finest) == 8


def test_axioms_on_random_spaces():
    for seed in range(6):
        grid = build_grid(random_space(seed), 2.0, 0)
        rep = verify_grid_axioms(grid)
        assert rep.nested_or_disjoint
        assert rep.partitions
        assert rep.parent_child
        assert rep.sandwich
        assert rep.epsilon > 0.0
        assert grid.sandwich_inner > 0.0


def test_chain_is_increasing():
    grid = build_grid(random_space(11), 2.0, 0)
    for x in range(grid.space.n):
        chain = grid.chain(x)
        assert all(x in q.members for q in chain)
        for finer, coarser in zip(chain, chain[1:]):
            assert finer.members <= coarser.members


def test_adjacent_grids_are_distinct_objects_with_valid_axioms():
    grids = adjacent_grids(random_space(4), 2.0, 3)
    assert [g.seed for g in grids] == [0, 1, 2]
    for g in grids:
        assert verify_grid_axioms(g).valid


def test_invalid_scale_ratio():
    with pytest.raises(InvalidScaleRatio):
        build_grid(line_space(4), 1.0, 0)


def test_build_is_deterministic():
    a = dump_grid(build_grid(random_space(7), 2.0, 5))
    b = dump_grid(build_grid(random_space(7), 2.0, 5))
    assert a == b
