"""Coarse structures given by entourages, and their dictionary with large-scale structures.

A relation is stored as row bitmasks: bit ``y`` of ``rows[x]`` is set when
``(x, y)`` belongs to it.  On a finite set the union of all controlled sets is
controlled, so the closure has a single maximal controlled set; it contains
the diagonal and is closed under inverse and composition, i.e. it is an
equivalence relation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from lsskit import kernels
from lsskit.errors import GroundMismatchError, PreconditionError
from lsskit.family import GroundSet, Scale, Verdict, _check_ground, iter_bits
from lsskit.lss import LssSpace, build_lss
from lsskit.rational import positive, ratio_below

Triple = tuple[int, int, int]


@dataclass(frozen=True)
class Entourage:
    ground: GroundSet
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        rows = tuple(int(r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if len(rows) != self.ground.size:
            raise ValueError("one row per point is required")
        full = self.ground.full
        if any(r < 0 or r & ~full for r in rows):
            raise ValueError("relation mentions ids outside the ground set")

    @classmethod
    def from_pairs(cls, ground: GroundSet, pairs: Iterable[tuple[int, int]]) -> "Entourage":
        rows = [0] * ground.size
        for x, y in pairs:
            rows[x] |= 1 << y
        return cls(ground, tuple(rows))

    @classmethod
    def diagonal(cls, ground: GroundSet) -> "Entourage":
        return cls(ground, tuple(1 << x for x in range(ground.size)))

    @classmethod
    def squares(cls, ground: GroundSet, masks: Iterable[int]) -> "Entourage":
        """``⋃ B × B`` over the given sets."""
        rows = [0] * ground.size
        for b in masks:
            for x in iter_bits(b):
                rows[x] |= b
        return cls(ground, tuple(rows))

    @property
    def pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset((x, y) for x, r in enumerate(self.rows) for y in iter_bits(r))

    def __contains__(self, pair: tuple[int, int]) -> bool:
        x, y = pair
        return bool(self.rows[x] >> y & 1)

    def __le__(self, other: "Entourage") -> bool:
        _check_ground(self.ground, other.ground)
        return all(not a & ~b for a, b in zip(self.rows, other.rows))

    def __or__(self, other: "Entourage") -> "Entourage":
        _check_ground(self.ground, other.ground)
        return Entourage(self.ground, tuple(a | b for a, b in zip(self.rows, other.rows)))

    def inverse(self) -> "Entourage":
        rows = [0] * self.ground.size
        for x, r in enumerate(self.rows):
            for y in iter_bits(r):
                rows[y] |= 1 << x
        return Entourage(self.ground, tuple(rows))

    def compose(self, other: "Entourage") -> "Entourage":
        """``self ∘ other``: pairs ``(x, z)`` with ``(x, y)`` in ``self`` and ``(y, z)`` in ``other``."""
        _check_ground(self.ground, other.ground)
        return Entourage(self.ground, tuple(kernels.compose(list(self.rows), list(other.rows))))

    def slice(self, x: int) -> int:
        return self.rows[x]


@dataclass(frozen=True)
class CoarseSpace:
    ground: GroundSet
    generators: tuple[Entourage, ...]
    maximal: tuple[Entourage, ...]

    def is_controlled(self, e: Entourage) -> bool:
        return any(e <= m for m in self.maximal)


def _saturate(ground: GroundSet, generators: Sequence[Entourage]) -> Entourage:
    e = Entourage.diagonal(ground)
    for g in generators:
        e = e | g
    while True:
        nxt = e | e.inverse() | e.compose(e)
        if nxt == e:
            return e
        e = nxt


def coarse_closure(ground: GroundSet, generators: Sequence[Entourage] = ()) -> CoarseSpace:
    for g in generators:
        _check_ground(ground, g.ground)
    return CoarseSpace(ground, tuple(generators), (_saturate(ground, generators),))


def naive_closure(ground: GroundSet, generators: Sequence[Entourage] = (), max_rounds: int = 10_000) -> list[frozenset]:
    """Maximal controlled sets by applying every axiom literally to plain pair sets.

    Controlled sets are closed downward, so only the maximal relations are
    kept; each round adds inverses, pairwise unions and pairwise compositions
    and drops anything strictly inside another relation.  Cubic per
    composition and independent of the bitmask kernels; an oracle for tiny
    ground sets.
    """
    diag = frozenset((x, x) for x in range(ground.size))
    known: set[frozenset] = {diag} | {g.pairs for g in generators}
    for _ in range(max_rounds):
        new = set(known)
        for a in known:
            new.add(frozenset((y, x) for x, y in a))
            for b in known:
                new.add(a | b)
                new.add(frozenset((x, z) for x, y in a for y2, z in b if y == y2))
        new = {r for r in new if not any(r < o for o in new)}
        if new == known:
            return sorted(known, key=sorted)
        known = new
    raise RuntimeError("naive closure did not stabilise")


def lss_to_coarse(space: LssSpace) -> CoarseSpace:
    gen = Entourage.squares(space.ground, space.blocks)
    return coarse_closure(space.ground, [gen])


def coarse_to_lss(cs: CoarseSpace) -> LssSpace:
    """Bounded sets are those ``B`` with ``B × B`` controlled: the classes of the maximal relation."""
    (top,) = cs.maximal
    classes = sorted({top.rows[x] for x in range(cs.ground.size)}, key=lambda b: b & -b)
    return build_lss(cs.ground, [Scale(cs.ground, tuple(classes))])


def is_uniformly_locally_finite(cs: CoarseSpace) -> Verdict:
    """Always true when finite; the constant is the largest slice ``|T[x]|``."""
    return Verdict(True, max(r.bit_count() for m in cs.maximal for r in m.rows))


# ------------------------------------------------------------------ witnesses


@dataclass(frozen=True)
class SakoWitness:
    epsilon: Fraction
    T: Entourage
    S: Entourage
    A: frozenset[Triple]

    def __post_init__(self) -> None:
        object.__setattr__(self, "epsilon", positive(self.epsilon))
        object.__setattr__(self, "A", frozenset((int(x), int(y), int(l)) for x, y, l in self.A))
        _check_ground(self.T.ground, self.S.ground)

    @property
    def ground(self):
        return self.T.ground

    def slices(self) -> list[frozenset[tuple[int, int]]]:
        out: list[set] = [set() for _ in range(self.ground.size)]
        for x, y, l in self.A:
            out[x].add((y, l))
        return [frozenset(s) for s in out]


@dataclass(frozen=True)
class SakoViolation:
    kind: str  # "not-controlled", "missing-diagonal", "outside-S", "bad-level", "ratio"
    x: int = -1
    y: int = -1
    delta: int = 0
    inter: int = 0


def verify_sako_witness(cs: CoarseSpace, w: SakoWitness) -> Verdict:
    if w.ground != cs.ground:
        raise GroundMismatchError("witness and coarse space live on different ground sets")
    if not cs.is_controlled(w.T):
        raise PreconditionError("T is not controlled")
    if not cs.is_controlled(w.S):
        raise PreconditionError("S is not controlled")
    bad: list[SakoViolation] = []
    n = cs.ground.size
    for x in range(n):
        if (x, x, 1) not in w.A:
            bad.append(SakoViolation("missing-diagonal", x, x))
    for x, y, l in sorted(w.A):
        if not (0 <= x < n and 0 <= y < n) or (x, y) not in w.S:
            bad.append(SakoViolation("outside-S", x, y))
        elif l < 1:
            bad.append(SakoViolation("bad-level", x, y))
    sl = w.slices()
    for x in range(n):
        for y in iter_bits(w.T.rows[x]):
            if y == x:
                continue
            d, c = len(sl[x] ^ sl[y]), len(sl[x] & sl[y])
            if not ratio_below(d, c, w.epsilon):
                bad.append(SakoViolation("ratio", x, y, d, c))
    return Verdict(not bad, tuple(bad))


def witness_lss_to_sako(space: LssSpace, w, verified_only: bool = True) -> SakoWitness:
    """``T = ⋃ U×U`` over the test scale, ``S = ⋃ V×V`` over the support, ``A = ⋃ {x} × A_x``."""
    from lsskit.propa import verify_witness

    if verified_only and not verify_witness(space, w):
        raise PreconditionError("witness does not verify")
    T = Entourage.squares(space.ground, w.test.masks)
    S = Entourage.squares(space.ground, w.support.masks)
    A = frozenset((x, z, l) for x, a in enumerate(w.sets) for z, l in a)
    return SakoWitness(w.epsilon, T, S, A)


def pair_scale(T: Entourage) -> Scale:
    """``{{x, y} : (x, y) ∈ T, x ≠ y}`` plus every singleton."""
    ground = T.ground
    masks = [1 << x for x in range(ground.size)]
    seen = set()
    for x, r in enumerate(T.rows):
        for y in iter_bits(r):
            if x != y:
                m = (1 << x) | (1 << y)
                if m not in seen:
                    seen.add(m)
                    masks.append(m)
    return Scale(ground, tuple(masks))


def witness_sako_to_lss(cs: CoarseSpace, w: SakoWitness, verified_only: bool = True):
    """``V_x`` = points used by the slice ``A_x``; test scale = pairs of ``T``.

    Each ``V_x × V_x`` sits inside ``S⁻¹ ∘ S``, which is checked.
    """
    from lsskit.propa import PropertyAWitness

    if verified_only and not verify_sako_witness(cs, w):
        raise PreconditionError("witness does not verify")
    sl = w.slices()
    n = cs.ground.size
    vx = [sum(1 << y for y in {y for y, _ in sl[x]}) for x in range(n)]
    if verified_only and not Entourage.squares(cs.ground, vx) <= w.S.inverse().compose(w.S):
        raise AssertionError("support squares escape S⁻¹∘S")
    # the diagonal condition already puts x in V_x; singletons are added defensively
    support = Scale(cs.ground, tuple(v for v in vx if v) + tuple(1 << x for x in range(n)))
    return PropertyAWitness(w.epsilon, pair_scale(w.T), support, tuple(sl))

