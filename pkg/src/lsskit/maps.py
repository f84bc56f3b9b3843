"""Maps between finite large-scale spaces.

Every quantifier "for every uniformly bounded family" below collapses to the
maximal bounded sets: a uniformly bounded family refines the blocks away from
one-point elements, images and preimages preserve that refinement, and one-point
sets never break boundedness.  So a condition checked on the blocks holds for
every uniformly bounded family, and the blocks themselves are such a family.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from lsskit.errors import GroundMismatchError, PreconditionError, RouteDisagreement
from lsskit.family import Scale, SetFamily, Verdict, _check_ground, iter_bits, star_mask
from lsskit.lss import LssSpace


@dataclass(frozen=True, eq=False)
class SpaceMap:
    source: LssSpace
    target: LssSpace
    table: tuple[int, ...]

    def __post_init__(self) -> None:
        table = tuple(int(t) for t in self.table)
        object.__setattr__(self, "table", table)
        if len(table) != self.source.size:
            raise ValueError(f"map table has {len(table)} entries for {self.source.size} points")
        for x, y in enumerate(table):
            if not 0 <= y < self.target.size:
                raise ValueError(f"image of {x} is out of range: {y}")

    @classmethod
    def identity(cls, space: LssSpace) -> "SpaceMap":
        return cls(space, space, tuple(range(space.size)))

    @classmethod
    def from_labels(cls, source: LssSpace, target: LssSpace, table: dict[str, str]) -> "SpaceMap":
        missing = [x for x in source.ground.labels if x not in table]
        if missing:
            raise ValueError(f"map is not total: no image for {missing}")
        return cls(source, target, tuple(target.ground.id_of(table[x]) for x in source.ground.labels))

    def __call__(self, x: int) -> int:
        return self.table[x]

    def image(self, mask: int) -> int:
        out = 0
        for x in iter_bits(mask):
            out |= 1 << self.table[x]
        return out

    def preimage(self, mask: int) -> int:
        return sum(1 << x for x, y in enumerate(self.table) if mask >> y & 1)

    def fiber_sizes(self) -> list[int]:
        sizes = [0] * self.target.size
        for y in self.table:
            sizes[y] += 1
        return sizes

    def is_surjective(self) -> bool:
        return len(set(self.table)) == self.target.size

    def is_injective(self) -> bool:
        return len(set(self.table)) == len(self.table)

    def then(self, after: "SpaceMap") -> "SpaceMap":
        """``after ∘ self``."""
        if after.source != self.target:
            raise GroundMismatchError("composition across different spaces")
        return SpaceMap(self.source, after.target, tuple(after.table[y] for y in self.table))

    def labels(self) -> dict[str, str]:
        s, t = self.source.ground.labels, self.target.ground.labels
        return {s[x]: t[y] for x, y in enumerate(self.table)}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SpaceMap):
            return NotImplemented
        return (self.source, self.target, self.table) == (other.source, other.target, other.table)

    def __hash__(self) -> int:
        return hash((self.source, self.target, self.table))


def image_family(f: SpaceMap, family: SetFamily) -> SetFamily:
    _check_ground(family.ground, f.source.ground)
    return SetFamily(f.target.ground, tuple(f.image(m) for m in family.masks))


def preimage_family(f: SpaceMap, family: SetFamily) -> SetFamily:
    _check_ground(family.ground, f.target.ground)
    return SetFamily(f.source.ground, tuple(f.preimage(m) for m in family.masks))


def image_scale(f: SpaceMap, family: SetFamily) -> Scale:
    """``f(U)`` made into a scale of the target: empties dropped, missing points added as singletons."""
    img = [m for m in image_family(f, family).masks if m]
    missing = f.target.ground.full & ~_union(img)
    img.extend(1 << y for y in iter_bits(missing))
    return Scale(f.target.ground, tuple(img))


def preimage_scale(f: SpaceMap, family: SetFamily) -> Scale:
    """``f⁻¹(V)`` with empty preimages dropped (a cover of the source whenever ``V`` covers the target)."""
    pre = [m for m in preimage_family(f, family).masks if m]
    missing = f.source.ground.full & ~_union(pre)
    pre.extend(1 << x for x in iter_bits(missing))
    return Scale(f.source.ground, tuple(pre))


def _union(masks: Sequence[int]) -> int:
    u = 0
    for m in masks:
        u |= m
    return u


# ------------------------------------------------------------------ classification


def is_bornologous(f: SpaceMap) -> Verdict:
    """Each source block maps into one target block; witness on failure is the block mask."""
    for b in f.source.blocks:
        if not f.target.is_bounded(f.image(b)):
            return Verdict(False, b)
    return Verdict(True, None)


def is_coarse_embedding(f: SpaceMap) -> Verdict:
    """The preimage of each target block is bounded; witness on failure is the target block."""
    for c in f.target.blocks:
        if not f.source.is_bounded(f.preimage(c)):
            return Verdict(False, c)
    return Verdict(True, None)


def is_coarsely_surjective(f: SpaceMap) -> Verdict:
    """``star(f(X), blocks of Y) = Y``; the witness scale is the singleton cover when ``f`` is onto."""
    img = f.image(f.source.ground.full)
    if img == f.target.ground.full:
        return Verdict(True, Scale.singletons(f.target.ground))
    if star_mask(img, f.target.blocks) == f.target.ground.full:
        return Verdict(True, f.target.maximal_bounded)
    missed = next(c for c in f.target.blocks if not c & img)
    return Verdict(False, missed)


def are_close(f: SpaceMap, g: SpaceMap) -> Verdict:
    """``{f(x), g(x)}`` bounded for every ``x``; witness on failure is the offending ``x``."""
    if f.source != g.source or f.target != g.target:
        raise GroundMismatchError("closeness needs maps with the same source and target")
    for x in range(f.source.size):
        if not f.target.same_block(f.table[x], g.table[x]):
            return Verdict(False, x)
    return Verdict(True, f.target.maximal_bounded)


def construct_coarse_inverse(f: SpaceMap) -> SpaceMap:
    """Send ``y`` to the smallest ``x`` with ``f(x) = y``, else to the smallest ``x`` whose image shares ``y``'s block.

    Preferring exact preimages makes the inverse of a bijection exact.

    Raises ``PreconditionError`` unless ``f`` is bornologous, a coarse embedding
    and coarsely surjective; the result is re-checked before it is returned.
    """
    for name, check in (
        ("bornologous", is_bornologous),
        ("a coarse embedding", is_coarse_embedding),
        ("coarsely surjective", is_coarsely_surjective),
    ):
        if not check(f):
            raise PreconditionError(f"map is not {name}")
    Y = f.target
    first_in_block: dict[int, int] = {}
    first_hit: dict[int, int] = {}
    for x, y in enumerate(f.table):
        first_in_block.setdefault(Y.block_of[y], x)
        first_hit.setdefault(y, x)
    table = tuple(first_hit.get(y, first_in_block[Y.block_of[y]]) for y in range(Y.size))
    g = SpaceMap(Y, f.source, table)
    if not (is_bornologous(g) and are_close(g.then(f), SpaceMap.identity(Y))
            and are_close(f.then(g), SpaceMap.identity(f.source))):
        raise RouteDisagreement("constructed coarse inverse fails its own checks")
    return g


@dataclass(frozen=True)
class MapReport:
    bornologous: Verdict
    coarse_embedding: Verdict
    coarsely_surjective: Verdict
    equivalence: bool
    inverse: SpaceMap | None = None
    closeness: tuple[Verdict, Verdict] | None = None
    routes: dict[str, bool] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.equivalence


def _inverse_route(f: SpaceMap) -> tuple[bool, SpaceMap | None, tuple[Verdict, Verdict] | None]:
    # Def. route: look for g directly.  Any candidate works as well as the
    # block-representative choice, so try that one without trusting the other route.
    if not is_bornologous(f):
        return False, None, None
    Y, X = f.target, f.source
    rep: dict[int, int] = {}
    for x, y in enumerate(f.table):
        rep.setdefault(Y.block_of[y], x)
    if len(rep) != len(Y.blocks):
        return False, None, None
    g = SpaceMap(Y, X, tuple(rep[Y.block_of[y]] for y in range(Y.size)))
    fg = are_close(g.then(f), SpaceMap.identity(Y))
    gf = are_close(f.then(g), SpaceMap.identity(X))
    ok = bool(is_bornologous(g) and fg and gf)
    return ok, (g if ok else None), (fg, gf)


def is_coarse_equivalence(f: SpaceMap) -> MapReport:
    """Decide equivalence by both routes and insist that they agree."""
    born = is_bornologous(f)
    emb = is_coarse_embedding(f)
    surj = is_coarsely_surjective(f)
    by_properties = bool(born and emb and surj)
    by_inverse, g, closeness = _inverse_route(f)
    if by_properties != by_inverse:
        raise RouteDisagreement(
            f"inverse route says {by_inverse}, embedding+surjectivity says {by_properties}"
        )
    return MapReport(
        bornologous=born,
        coarse_embedding=emb,
        coarsely_surjective=surj,
        equivalence=by_properties,
        inverse=g,
        closeness=closeness,
        routes={"inverse": by_inverse, "embedding+surjective": by_properties},
    )


def require_equivalence(f: SpaceMap) -> MapReport:
    report = is_coarse_equivalence(f)
    if not report.equivalence:
        raise PreconditionError("map is not a coarse equivalence")
    return report
