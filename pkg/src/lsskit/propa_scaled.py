"""Property A at a scale ``U``: the elements of ``U`` play the role of points.

A scaled witness assigns to each base element ``U_i`` a finite set ``A_i`` of
``(base index, level)`` pairs.  It is valid when ``(i, 1)`` is in ``A_i``, each
index used by ``A_i`` names a base element meeting ``st(U_i, W)``, and
``|A_i Δ A_j| < eps |A_i ∩ A_j|`` whenever some element of ``V`` meets both
``U_i`` and ``U_j``.  ``V`` may not be the cover by single points.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from lsskit.errors import PreconditionError
from lsskit.family import (
    Scale,
    SetFamily,
    Verdict,
    _check_ground,
    family_stars,
    horizon_mask,
    iter_bits,
    star_mask,
)
from lsskit.limits import OracleLimits
from lsskit.lss import LssSpace, require_bounded
from lsskit.nets import min_cover_indices
from lsskit.propa import PropertyAWitness, Violation, near_pairs
from lsskit.rational import positive, ratio_below

Pair = tuple[int, int]


@dataclass(frozen=True)
class ScaledPropertyAWitness:
    base: Scale
    epsilon: Fraction
    queried: Scale
    horizon: Scale
    sets: tuple[frozenset[Pair], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "epsilon", positive(self.epsilon))
        object.__setattr__(self, "sets", tuple(frozenset((int(i), int(l)) for i, l in s) for s in self.sets))
        _check_ground(self.base.ground, self.queried.ground)
        _check_ground(self.base.ground, self.horizon.ground)
        if len(self.sets) != len(self.base):
            raise ValueError(f"need one set per base element: got {len(self.sets)} for {len(self.base)}")

    @property
    def ground(self):
        return self.base.ground

    def at(self, epsilon) -> "ScaledPropertyAWitness":
        return ScaledPropertyAWitness(self.base, positive(epsilon), self.queried, self.horizon, self.sets)

    def with_queried(self, queried: Scale) -> "ScaledPropertyAWitness":
        return ScaledPropertyAWitness(self.base, self.epsilon, queried, self.horizon, self.sets)


def trigger_pairs(base: SetFamily, queried: SetFamily) -> list[tuple[int, int]]:
    """Index pairs ``i < j`` whose horizons against ``queried`` intersect."""
    hors = [horizon_mask(m, queried.masks) for m in base.masks]
    return [(i, j) for i in range(len(hors)) for j in range(i + 1, len(hors)) if hors[i] & hors[j]]


def verify_scaled_witness(space: LssSpace, w: ScaledPropertyAWitness, allow_trivial_queried: bool = False) -> Verdict:
    _check_ground(space.ground, w.ground)
    if w.queried.is_trivial() and not allow_trivial_queried:
        raise PreconditionError("the queried scale may not be the cover by single points")
    require_bounded(w.base, space, "base scale")
    require_bounded(w.queried, space, "queried scale")
    require_bounded(w.horizon, space, "horizon scale")
    bad: list[Violation] = []
    nb = len(w.base)
    for i, a in enumerate(w.sets):
        if (i, 1) not in a:
            bad.append(Violation("missing-base", i))
        reach = star_mask(w.base.masks[i], w.horizon.masks)
        for j, l in sorted(a):
            if l < 1:
                bad.append(Violation("bad-level", i, pair=(j, l)))
            elif not 0 <= j < nb or not w.base.masks[j] & reach:
                bad.append(Violation("outside-support", i, pair=(j, l)))
    for i, j in trigger_pairs(w.base, w.queried):
        a, b = w.sets[i], w.sets[j]
        d, c = len(a ^ b), len(a & b)
        if not ratio_below(d, c, w.epsilon):
            bad.append(Violation("ratio", i, j, d, c))
    return Verdict(not bad, tuple(bad))


def block_constant_witness(space: LssSpace, base: Scale, queried: Scale, epsilon) -> ScaledPropertyAWitness:
    """``A_i`` = the base elements in ``U_i``'s block at level 1; valid at every tolerance."""
    require_bounded(base, space, "base scale")
    sets = []
    for m in base.masks:
        blk = space.blocks[space.block_of[(m & -m).bit_length() - 1]]
        sets.append(frozenset((j, 1) for j, o in enumerate(base.masks) if not o & ~blk))
    return ScaledPropertyAWitness(base, positive(epsilon), queried, space.maximal_bounded, tuple(sets))


# ------------------------------------------------------------------ trivial base


def _singleton_points(base: Scale) -> list[int]:
    pts = [(m & -m).bit_length() - 1 for m in base.masks]
    if not base.is_trivial() or sorted(pts) != list(range(base.ground.size)):
        raise PreconditionError("base scale must be the cover by single points")
    return pts


@dataclass(frozen=True)
class Reduction:
    witness: PropertyAWitness
    # the condition-3 trigger on point pairs, and the near pairs of the plain test scale
    scaled_trigger: tuple[tuple[int, int], ...]
    plain_trigger: tuple[tuple[int, int], ...]

    @property
    def triggers_agree(self) -> bool:
        return self.scaled_trigger == self.plain_trigger


def reduce_trivial_base(w: ScaledPropertyAWitness) -> Reduction:
    """Read a witness over the singleton base as a plain witness.

    Horizons of single points against ``V`` meet exactly when one element of
    ``V`` holds both points, which is ``y ∈ st(x, V)``; so the plain test scale
    is ``V`` itself and the support scale is ``W``.  Both trigger sets are
    recorded for comparison.
    """
    pts = _singleton_points(w.base)
    order = sorted(range(len(pts)), key=lambda i: pts[i])
    sets = tuple(frozenset((pts[j], l) for j, l in w.sets[i]) for i in order)
    plain = PropertyAWitness(w.epsilon, w.queried, w.horizon, sets)
    scaled = sorted(tuple(sorted((pts[i], pts[j]))) for i, j in trigger_pairs(w.base, w.queried))
    near = sorted(near_pairs(w.queried))
    return Reduction(plain, tuple(scaled), tuple(near))


def lift_plain_witness(w: PropertyAWitness) -> ScaledPropertyAWitness:
    """The same sets over the singleton base, queried at the test scale."""
    base = Scale.singletons(w.ground)
    return ScaledPropertyAWitness(base, w.epsilon, w.test, w.support, w.sets)


# ------------------------------------------------------------------ transfer


@dataclass(frozen=True)
class ScaledTransfer:
    witness: ScaledPropertyAWitness
    verdict: Verdict
    m: int
    n: int
    budget: Fraction
    image_covers: tuple[tuple[int, ...], ...]
    preimage_covers: tuple[tuple[int, ...], ...]
    # per trigger pair (i, j): |A Δ A|, 2m(n+1) max|B Δ B|, |A ∩ A|, max|B ∩ B| over chosen pairs
    counts: tuple[tuple[int, int, int, int], ...] = field(default=(), repr=False)

    def difference_bound_holds(self) -> bool:
        return all(d <= bound for d, bound, _, _ in self.counts)

    def overlap_ratio_holds(self, factor: Fraction) -> bool:
        """``|A ∩ A| >= factor * |B ∩ B|`` on every measured pair."""
        return all(c >= factor * bc for _, _, c, bc in self.counts)


def transfer_scaled_witness(
    f,
    target: ScaledPropertyAWitness,
    base_x: Scale,
    epsilon,
    queried_x: Scale,
    limits: OracleLimits | None = None,
    allow_trivial_queried: bool = False,
) -> ScaledTransfer:
    """Pull a scaled witness on ``Y`` back to ``X`` at base ``base_x``.

    ``m`` bounds the covers of each ``f(U_X)`` by ``U_Y`` and ``n`` those of each
    ``f⁻¹(U_Y)`` by ``U_X`` (lex-smallest exact covers).  The target must verify
    at ``eps / (2 m² (n+1))`` with queried scale ``st(f(V_X), f(U_X))``.  For a
    base element ``U_X`` the candidates are the chosen covers of every ``U_Y``
    used by ``⋃ B`` over the cover of ``f(U_X)``, and ``(U', l)`` is kept when
    some ``U_Y`` meeting ``f(U')`` carries level ``l`` in that union.  Under the
    identity this reproduces ``B``.

    The result is re-verified rather than trusted: the ``(U_X, 1)`` terms can
    differ between two base elements even when the ``B`` sets agree, so the
    verdict may be false.
    """
    from lsskit.maps import image_family, image_scale, preimage_scale, require_equivalence

    eps = positive(epsilon)
    require_equivalence(f)
    X, Y = f.source, f.target
    _check_ground(target.ground, Y.ground)
    _check_ground(base_x.ground, X.ground)
    _check_ground(queried_x.ground, X.ground)
    require_bounded(base_x, X, "source base scale")
    uy = target.base
    image_covers = tuple(min_cover_indices(f.image(u), uy.masks, limits) for u in base_x.masks)
    pre_covers = tuple(min_cover_indices(f.preimage(v), base_x.masks, limits) for v in uy.masks)
    m = max((len(c) for c in image_covers), default=1)
    n = max((len(c) for c in pre_covers), default=0)
    budget = eps / (2 * m * m * (n + 1))
    fu = image_scale(f, base_x)
    queried_y = Scale(Y.ground, family_stars(image_scale(f, queried_x).masks, fu.masks))
    checked = target.at(budget).with_queried(queried_y)
    if not verify_scaled_witness(Y, checked, allow_trivial_queried):
        raise PreconditionError(f"target witness does not verify at {budget} on the induced queried scale")

    img_hor = [horizon_mask(f.image(u), uy.masks) for u in base_x.masks]
    sets = []
    for i in range(len(base_x)):
        pool: set[Pair] = set()
        for j in image_covers[i]:
            pool |= target.sets[j]
        used = {y for y, _ in pool}
        cands = sorted({c for y in used for c in pre_covers[y]})
        a = {(i, 1)}
        for c in cands:
            for y, l in pool:
                if img_hor[c] >> y & 1:
                    a.add((c, l))
        sets.append(frozenset(a))
    wy_star = SetFamily(Y.ground, family_stars(target.horizon.masks, uy.masks))
    horizon_x = preimage_scale(f, wy_star)
    w = ScaledPropertyAWitness(base_x, eps, queried_x, horizon_x, tuple(sets))
    verdict = verify_scaled_witness(X, w, allow_trivial_queried)

    counts = []
    for i, j in trigger_pairs(base_x, queried_x):
        pairs = [(k, l) for k in image_covers[i] for l in image_covers[j]]
        bd = max(len(target.sets[k] ^ target.sets[l]) for k, l in pairs)
        bc = max(len(target.sets[k] & target.sets[l]) for k, l in pairs)
        counts.append((len(w.sets[i] ^ w.sets[j]), 2 * m * (n + 1) * bd, len(w.sets[i] & w.sets[j]), bc))
    return ScaledTransfer(w, verdict, m, n, budget, image_covers, pre_covers, tuple(counts))
