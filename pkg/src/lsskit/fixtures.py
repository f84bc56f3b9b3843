"""Named finite spaces used across tests, benchmarks and the CLI.

All fixtures are ∞-metric spaces; ``scales`` carries the ball covers and, for
component fixtures, the component cover ``Comp``.
"""
from __future__ import annotations

import itertools
import random
import string
from dataclasses import dataclass, field

from lsskit.family import GroundSet, Scale
from lsskit.lss import INF, InfMetric, LssSpace, metric_lss


@dataclass(frozen=True)
class Fixture:
    name: str
    metric: InfMetric
    space: LssSpace
    scales: dict[str, Scale] = field(default_factory=dict)

    @property
    def ground(self) -> GroundSet:
        return self.space.ground


def _finish(name: str, labels, dist, radii=(1, 2), extra=None) -> Fixture:
    ground = GroundSet(tuple(labels))
    metric = InfMetric(ground, tuple(tuple(r) for r in dist))
    scales = {f"Balls{r}": metric.ball_cover(r) for r in radii}
    scales["Singletons"] = Scale.singletons(ground)
    if extra:
        scales.update(extra(ground))
    return Fixture(name, metric, metric_lss(metric), scales)


def path(n: int) -> Fixture:
    """``0 .. n-1`` with ``d(i, j) = |i - j|``."""
    if n < 1:
        raise ValueError("a path needs at least one point")
    dist = [[abs(i - j) for j in range(n)] for i in range(n)]
    return _finish(f"P{n}", [str(i) for i in range(n)], dist)


def components(sizes, labels=None) -> Fixture:
    """Groups at mutual distance ∞, distance 1 inside a group; labelled ``a1, a2, b1, ...``."""
    sizes = list(sizes)
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError("component sizes must be positive")
    if labels is None:
        if len(sizes) > 26:
            raise ValueError("at most 26 components can be auto-labelled")
        labels = [f"{string.ascii_lowercase[g]}{i + 1}" for g, s in enumerate(sizes) for i in range(s)]
    group = [g for g, s in enumerate(sizes) for _ in range(s)]
    n = len(group)
    dist = [[0 if i == j else (1 if group[i] == group[j] else INF) for j in range(n)] for i in range(n)]

    def comp(ground: GroundSet):
        masks = []
        start = 0
        for s in sizes:
            masks.append(((1 << s) - 1) << start)
            start += s
        return {"Comp": Scale(ground, tuple(masks))}

    name = "D" + "".join(str(s) for s in sizes)
    return _finish(name, labels, dist, radii=(1,), extra=comp)


def two_points() -> Fixture:
    """``D2``: points ``p`` and ``q`` at distance ∞."""
    f = components([1, 1], labels=["p", "q"])
    return Fixture("D2", f.metric, f.space, f.scales)


def grid(d: int, side: int = 5) -> Fixture:
    """``{0 .. side-1}^d`` with the sup metric; labels like ``0.3.1``."""
    if d < 1 or side < 1:
        raise ValueError("grid needs d >= 1 and side >= 1")
    pts = list(itertools.product(range(side), repeat=d))
    dist = [[max(abs(a - b) for a, b in zip(p, q)) for q in pts] for p in pts]
    return _finish(f"G{d}", [".".join(map(str, p)) for p in pts], dist)


def product(t: int, s: int = 2) -> Fixture:
    """``∏_{i=1..t} {0..s-1}^i`` with the sum over factors of the sup metric.

    A truncation of an infinite product without bounded scale measure: the
    1-ball at the origin needs ``1 + Σ (s^i - 1)`` single points to cover it.
    """
    if t < 1 or s < 2:
        raise ValueError("product needs t >= 1 and s >= 2")
    factors = [list(itertools.product(range(s), repeat=i)) for i in range(1, t + 1)]
    pts = list(itertools.product(*factors))

    def d(p, q):
        return sum(max(abs(a - b) for a, b in zip(u, v)) for u, v in zip(p, q))

    dist = [[d(p, q) for q in pts] for p in pts]
    labels = ["|".join("".join(map(str, u)) for u in p) for p in pts]
    return _finish(f"Prod{t}", labels, dist, radii=(1,))


def random_space(n: int = 6, seed: int = 0, sets: int = 3) -> Fixture:
    """Points ``0..n-1`` in random groups; inside a group, distances come from a random spanning path."""
    if n < 1:
        raise ValueError("need at least one point")
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    cuts = sorted(rng.sample(range(1, n), min(sets - 1, n - 1))) if n > 1 else []
    groups = [order[a:b] for a, b in zip([0] + cuts, cuts + [n])]
    dist = [[INF] * n for _ in range(n)]
    for g in groups:
        for i, x in enumerate(g):
            for j, y in enumerate(g):
                dist[x][y] = abs(i - j)
    return _finish(f"R{n}s{seed}", [str(i) for i in range(n)], dist, radii=(1,))


def P5() -> Fixture:
    return path(5)


def P25() -> Fixture:
    return path(25)


def D23() -> Fixture:
    return components([2, 3])


def D2() -> Fixture:
    return two_points()


GENERATORS = {"path": path, "components": components, "grid": grid, "product": product, "random": random_space}
