"""Dyadic grids on finite quasi-metric spaces (Christ-style greedy nets).

Generation k holds cubes at scale d0^k; k_max is a single root containing
all points and k_min is the first generation where every cube is a
singleton.  Descending one generation, each parent cube selects a maximal
d0^k-separated net from its members (greedy in seed-permuted index order,
parent center first) and every member joins the first net center in net
order within distance d0^k; nesting is therefore structural.

The five grid axioms (disjoint-or-nested, partition, parent/child links,
child mass ratio, ball sandwich) are verified by verify_grid_axioms.  The
sandwich constants are measured from the built grid: c_in is the largest
inner ratio with B(x_c(Q), c_in * d0^k) cap X inside Q for every cube, and
C_d the smallest outer ratio with Q inside B(x_c(Q), C_d * d0^k).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidScaleRatio
from .space import QuasiMetricSpace

__all__ = ["Cube", "DyadicGrid", "AxiomReport", "build_grid", "verify_grid_axioms",
           "adjacent_grids", "dump_grid"]


@dataclass(frozen=True)
class Cube:
    k: int
    j: int
    center: int
    members: frozenset[int]
    parent: "Cube | None" = field(default=None, repr=False, compare=False)

    @property
    def key(self) -> tuple[int, int]:
        return (self.k, self.j)


@dataclass(frozen=True)
class DyadicGrid:
    space: QuasiMetricSpace
    d0: float
    seed: int
    generations: dict[int, list[Cube]]
    children: dict[tuple[int, int], list[Cube]]
    sandwich_outer: float     # C_d
    sandwich_inner: float     # measured inner ratio c_in
    child_mass_ratio: float   # epsilon of axiom (4)

    @property
    def k_min(self) -> int:
        return min(self.generations)

    @property
    def k_max(self) -> int:
        return max(self.generations)

    def all_cubes(self):
        for k in sorted(self.generations):
            yield from self.generations[k]

    def distinct_cubes(self) -> list[Cube]:
        """One cube per distinct member set (coarsest representative)."""
        seen: dict[frozenset[int], Cube] = {}
        for k in sorted(self.generations, reverse=True):
            for q in self.generations[k]:
                seen.setdefault(q.members, q)
        return list(seen.values())

    def chain(self, x: int) -> list[Cube]:
        """The cubes containing point x, one per generation, finest first."""
        out = []
        for k in sorted(self.generations):
            for q in self.generations[k]:
                if x in q.members:
                    out.append(q)
                    break
        return out

    def mass(self, cube: Cube) -> float:
        return self.space.mass(cube.members)


def _permutation(n: int, seed: int) -> np.ndarray:
    if seed == 0:
        return np.arange(n)
    return np.random.default_rng(seed).permutation(n)


def _split(space: QuasiMetricSpace, parent_members: list[int], parent_center: int,
           scale: float, order: np.ndarray) -> list[tuple[int, list[int]]]:
    """Greedy net inside one parent cube plus first-fit assignment.

    Net centers are parent_center followed by members (in permuted order)
    at distance >= scale from all chosen centers.  Every member joins the
    first net center in net order strictly within the scale.
    """
    rank = {p: i for i, p in enumerate(order.tolist())}
    members = sorted(parent_members, key=lambda p: rank[p])
    net = [parent_center]
    for p in members:
        if p == parent_center:
            continue
        if all(space.d(p, c) >= scale for c in net):
            net.append(p)
    buckets: dict[int, list[int]] = {c: [] for c in net}
    for p in members:
        for c in net:
            if space.d(p, c) < scale:
                buckets[c].append(p)
                break
    return [(c, sorted(buckets[c])) for c in net if buckets[c]]


def build_grid(space: QuasiMetricSpace, d0: float = 2.0, seed: int = 0) -> DyadicGrid:
    if d0 <= 1.0:
        raise InvalidScaleRatio(f"scale ratio d0 must exceed 1, got {d0}")
    n = space.n
    order = _permutation(n, seed)
    diameter = space.diameter
    k_max = 0 if diameter <= 0 else math.ceil(math.log(diameter) / math.log(d0)) + 1
    root = Cube(k=k_max, j=0, center=int(order[0]), members=frozenset(range(n)))
    generations: dict[int, list[Cube]] = {k_max: [root]}
    children: dict[tuple[int, int], list[Cube]] = {}
    level = [root]
    k = k_max
    while any(len(q.members) > 1 for q in level):
        k -= 1
        scale = d0 ** k
        nxt: list[Cube] = []
        for parent in level:
            kids = []
            for center, mem in _split(space, sorted(parent.members), parent.center,
                                      scale, order):
                cube = Cube(k=k, j=len(nxt) + len(kids), center=center,
                            members=frozenset(mem), parent=parent)
                kids.append(cube)
            children[parent.key] = kids
            nxt.extend(kids)
        generations[k] = nxt
        level = nxt
    for q in level:
        children[q.key] = []
    outer, inner, eps = _measure_constants(space, d0, generations, children)
    return DyadicGrid(space=space, d0=d0, seed=seed, generations=generations,
                      children=children, sandwich_outer=outer,
                      sandwich_inner=inner, child_mass_ratio=eps)


def _measure_constants(space, d0, generations, children):
    outer = 0.0
    inner = math.inf
    eps = 1.0
    for k, cubes in generations.items():
        scale = d0 ** k
        for q in cubes:
            dists = [space.d(q.center, y) for y in q.members]
            outer = max(outer, max(dists) / scale)
            outside = [space.d(q.center, y) for y in range(space.n)
                       if y not in q.members]
            if outside:
                inner = min(inner, min(outside) / scale)
            for child in children.get(q.key, ()):
                eps = min(eps, space.mass(child.members) / space.mass(q.members))
    outer = max(outer * (1.0 + 1e-9), 0.0)
    if outer == 0.0:
        outer = 1.0  # single-point space: any small constant is admissible
    if not math.isfinite(inner):
        inner = 1.0
    else:
        inner *= 1.0 - 1e-9  # keep the strict inclusion safe under rounding
    return outer, inner, eps


@dataclass(frozen=True)
class AxiomReport:
    nested_or_disjoint: bool     # axiom (1)
    partitions: bool             # axiom (2)
    parent_child: bool           # axiom (3)
    sandwich: bool               # axiom (5), with the measured constants
    epsilon: float               # axiom (4), measured min child/parent mass ratio

    @property
    def valid(self) -> bool:
        return (self.nested_or_disjoint and self.partitions
                and self.parent_child and self.sandwich)


def verify_grid_axioms(grid: DyadicGrid) -> AxiomReport:
    space = grid.space
    all_points = frozenset(range(space.n))

    partitions = True
    for k, cubes in grid.generations.items():
        union: set[int] = set()
        total = 0
        for q in cubes:
            union |= q.members
            total += len(q.members)
        partitions &= (union == all_points and total == space.n)

    cubes = list(grid.all_cubes())
    nested = True
    for a in cubes:
        for b in cubes:
            inter = a.members & b.members
            if inter and not (a.members <= b.members or b.members <= a.members):
                nested = False

    parent_child = True
    for k in sorted(grid.generations):
        for q in grid.generations[k]:
            if k < grid.k_max:
                parent_child &= (q.parent is not None
                                 and q.parent.k == k + 1
                                 and q.members <= q.parent.members)
            if k > grid.k_min:
                kids = grid.children.get(q.key, [])
                parent_child &= len(kids) >= 1
                parent_child &= all(c.members <= q.members for c in kids)

    sandwich = True
    for k, gen in grid.generations.items():
        scale = grid.d0 ** k
        for q in gen:
            sandwich &= (q.center in q.members)
            inner_ball = {y for y in range(space.n)
                          if space.d(q.center, y) < grid.sandwich_inner * scale}
            outer_ball = {y for y in range(space.n)
                          if space.d(q.center, y) < grid.sandwich_outer * scale}
            sandwich &= inner_ball <= q.members <= outer_ball

    eps = grid.child_mass_ratio
    return AxiomReport(nested_or_disjoint=nested, partitions=partitions,
                       parent_child=parent_child, sandwich=sandwich, epsilon=eps)


def adjacent_grids(space: QuasiMetricSpace, d0: float = 2.0, count: int = 3) -> list[DyadicGrid]:
    """Grids with seeds 0..count-1 for the shifted-grid comparison."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return [build_grid(space, d0=d0, seed=s) for s in range(count)]


def dump_grid(grid: DyadicGrid) -> str:
    """One line per cube: `k j center member-indices...`, sorted by (k, min member)."""
    lines = []
    for k in sorted(grid.generations):
        for q in sorted(grid.generations[k], key=lambda c: min(c.members)):
            mem = " ".join(str(i) for i in sorted(q.members))
            lines.append(f"{q.k} {q.j} {q.center} {mem}")
    return "\n".join(lines) + "\n"
