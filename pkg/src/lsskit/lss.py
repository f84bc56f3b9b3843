"""Finite large-scale structures represented by their bounded-set lattice.

A large scale structure on a finite set is determined by which subsets are
bounded: a family is uniformly bounded exactly when each of its elements with
two or more points is bounded.  The bounded sets are the least collection that
contains every singleton and every generator element and is closed under

(a) nonempty subsets -- the first axiom lets a family be replaced by anything
    refining it away from one-point sets;
(b) ``B1 ∪ B2`` whenever ``B1 ∩ B2`` is nonempty -- if ``B1 ∈ U`` and
    ``B2 ∈ V`` with both families uniformly bounded, ``B1 ∪ B2 ⊆ st(B1, V)``
    and the second axiom puts ``st(U, V)`` in the structure.

Closing under (b) merges overlapping sets until the inclusion-maximal bounded
sets are pairwise disjoint; they partition the ground set, and every bounded set
is a nonempty subset of exactly one of them.  Only that antichain is stored.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from lsskit import kernels
from lsskit.errors import InvalidScaleError, PreconditionError
from lsskit.family import (
    GroundSet,
    Scale,
    SetFamily,
    Subset,
    Verdict,
    _check_ground,
    iter_bits,
)

INF = math.inf


@dataclass(frozen=True, eq=False)
class LssSpace:
    ground: GroundSet
    generators: tuple[Scale, ...]
    blocks: tuple[int, ...]
    block_of: tuple[int, ...] = field(repr=False)

    @property
    def maximal_bounded(self) -> Scale:
        return Scale(self.ground, self.blocks)

    @property
    def size(self) -> int:
        return self.ground.size

    def is_bounded(self, mask: int) -> bool:
        """Nonempty subsets of one block are bounded; the empty set is too (vacuously)."""
        if not mask:
            return True
        b = self.blocks[self.block_of[(mask & -mask).bit_length() - 1]]
        return not mask & ~b

    def block_containing(self, mask: int) -> int | None:
        if not mask:
            return None
        i = self.block_of[(mask & -mask).bit_length() - 1]
        return i if not mask & ~self.blocks[i] else None

    def same_block(self, x: int, y: int) -> bool:
        return self.block_of[x] == self.block_of[y]

    def bounded_sets(self) -> Iterable[int]:
        """Every nonempty bounded set (exponential; meant for small oracles)."""
        for b in self.blocks:
            sub = b
            while sub:
                yield sub
                sub = (sub - 1) & b

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LssSpace):
            return NotImplemented
        return self.ground == other.ground and self.blocks == other.blocks

    def __hash__(self) -> int:
        return hash((self.ground, self.blocks))

    def __repr__(self) -> str:
        parts = ["{" + ",".join(self.ground.labels_of(b)) + "}" for b in self.blocks]
        return f"LssSpace(blocks=[{' '.join(parts)}])"


def _from_blocks(ground: GroundSet, generators: tuple[Scale, ...], blocks: Sequence[int]) -> LssSpace:
    block_of = [0] * ground.size
    for i, b in enumerate(blocks):
        for x in iter_bits(b):
            block_of[x] = i
    return LssSpace(ground, generators, tuple(blocks), tuple(block_of))


def build_lss(ground: GroundSet, generators: Sequence[SetFamily] = ()) -> LssSpace:
    """Least large scale structure in which every generator scale is uniformly bounded."""
    gens = []
    for k, g in enumerate(generators):
        _check_ground(ground, g.ground)
        if not isinstance(g, Scale):
            if not g.is_scale():
                raise InvalidScaleError(f"generator {k} is not a scale")
            g = g.as_scale()
        gens.append(g)
    seeds = [1 << i for i in range(ground.size)]
    for g in gens:
        seeds.extend(g.masks)
    blocks = kernels.merge_overlapping(seeds)
    return _from_blocks(ground, tuple(gens), blocks)


def discrete(ground: GroundSet) -> LssSpace:
    return build_lss(ground, [Scale.singletons(ground)])


def is_uniformly_bounded(family: SetFamily, space: LssSpace) -> Verdict:
    """Every element with two or more points lies in a maximal bounded set.

    The witness maps each nonempty element to the index of its block (``None``
    for empty elements); on failure it is the first offending element index.
    """
    _check_ground(family.ground, space.ground)
    mapping: list[int | None] = []
    for i, m in enumerate(family.masks):
        if not m:
            mapping.append(None)
            continue
        j = space.block_containing(m)
        if j is None:
            return Verdict(False, i)
        mapping.append(j)
    return Verdict(True, tuple(mapping))


def require_bounded(family: SetFamily, space: LssSpace, what: str = "family") -> None:
    from lsskit.errors import NotUniformlyBoundedError

    v = is_uniformly_bounded(family, space)
    if not v:
        el = space.ground.labels_of(family.masks[v.witness])
        raise NotUniformlyBoundedError(f"{what} element {v.witness} {el} is not bounded")


# ------------------------------------------------------------------ subspaces


def restrict_mask(mask: int, ids: Sequence[int]) -> int:
    """Re-index ``mask ∩ Y`` into the ground set of the subspace on ``ids``."""
    return kernels.compress(mask, list(ids))


def trace_family(family: SetFamily, Y: Subset, ground: GroundSet | None = None) -> SetFamily:
    """``{U ∩ Y}`` on the relabelled ground ``Y``, empty traces dropped."""
    ids = list(Y.ids)
    g = ground or GroundSet(tuple(family.ground.labels[i] for i in ids))
    masks = tuple(t for t in (restrict_mask(m, ids) for m in family.masks) if t)
    return SetFamily(g, masks)


def subspace(space: LssSpace, Y: Subset) -> LssSpace:
    """The subspace structure on ``Y``: traces of uniformly bounded families.

    A set is bounded in ``Y`` exactly when it is the trace of a parent bounded
    set, so the subspace blocks are the nonempty traces of the parent blocks.
    """
    _check_ground(space.ground, Y.ground)
    if not Y.mask:
        raise PreconditionError("subspace of the empty set")
    ids = list(Y.ids)
    ground = GroundSet(tuple(space.ground.labels[i] for i in ids))
    traces = trace_family(space.maximal_bounded, Y, ground)
    gen = Scale(ground, traces.masks)
    return build_lss(ground, [gen])


# ------------------------------------------------------------------ metrics


@dataclass(frozen=True)
class InfMetric:
    """A metric with values in ``{0, 1, 2, ...} ∪ {inf}``."""

    ground: GroundSet
    dist: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        n = self.ground.size
        rows = tuple(tuple(_dist_value(v) for v in row) for row in self.dist)
        object.__setattr__(self, "dist", rows)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError(f"distance matrix must be {n}x{n}")
        for x in range(n):
            if rows[x][x] != 0:
                raise ValueError(f"d({self.ground.labels[x]},itself) must be 0")
            for y in range(n):
                if rows[x][y] != rows[y][x]:
                    raise ValueError(f"distance not symmetric at ({x},{y})")
                if x != y and rows[x][y] == 0:
                    raise ValueError(f"distinct points {x},{y} at distance 0")
        for x in range(n):
            for y in range(n):
                dxy = rows[x][y]
                for z in range(n):
                    if dxy > rows[x][z] + rows[z][y]:
                        raise ValueError(f"triangle inequality fails for ({x},{z},{y})")

    @property
    def size(self) -> int:
        return self.ground.size

    def largest_finite(self) -> int:
        best = 0
        for row in self.dist:
            for v in row:
                if v != INF and v > best:
                    best = int(v)
        return best

    def ball(self, x: int, r: float) -> int:
        return sum(1 << y for y, v in enumerate(self.dist[x]) if v <= r)

    def ball_cover(self, r: float) -> Scale:
        return Scale(self.ground, tuple(self.ball(x, r) for x in range(self.size)))

    def diameter(self, mask: int) -> float:
        ids = list(iter_bits(mask))
        return max((self.dist[a][b] for a in ids for b in ids), default=0)


def _dist_value(v) -> float:
    if v is None or v == INF or (isinstance(v, str) and v.strip().lower() in ("inf", "∞")):
        return INF
    if isinstance(v, bool):
        raise ValueError("distance must be a natural number or inf")
    if isinstance(v, float):
        if not v.is_integer():
            raise ValueError(f"distance {v} is not a natural number")
        v = int(v)
    if not isinstance(v, int) or v < 0:
        raise ValueError(f"distance {v!r} is not a natural number or inf")
    return v


def metric_lss(metric: InfMetric) -> LssSpace:
    """Structure generated by the closed ``n``-ball covers, ``n = 1..D``.

    ``D`` is the largest finite distance; larger balls add no new bounded sets,
    because the ``D``-ball around a point already is its whole finite-distance
    component.
    """
    top = metric.largest_finite()
    gens = [metric.ball_cover(r) for r in range(1, top + 1)]
    return build_lss(metric.ground, gens)
