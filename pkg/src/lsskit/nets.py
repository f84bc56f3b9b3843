"""U-nets and bounded scale measure constants.

Three constants are computed exactly for a base scale ``U`` and a queried
scale ``V``:

* ``u(V)``: the largest ``U``-net of any element of ``V`` (mode ``all-nets``),
* ``n(V)``: the largest over ``V`` of the smallest ``U``-net (``exists-net``),
* ``k(V)``: the largest over ``V`` of the fewest ``U`` elements covering it
  (``covering``).

``check_bsm`` queries the maximal bounded sets.  Any uniformly bounded ``V``
refines them away from one-point elements, a one-point element has constant 1
in every mode, and every mode is monotone under passing to a subset of the
queried element (nets of a subset extend to nets of the superset; covers
restrict).  So the block constant dominates every uniformly bounded ``V``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from lsskit import kernels
from lsskit.errors import InvalidScaleError, OracleLimitExceeded, PreconditionError
from lsskit.family import Scale, SetFamily, Subset, _check_ground, family_stars, iter_bits, mask_of, star_mask
from lsskit.limits import OracleLimits, current
from lsskit.lss import LssSpace, require_bounded

ALL_NETS = "all-nets"
EXISTS_NET = "exists-net"
COVERING = "covering"
MODES = (ALL_NETS, EXISTS_NET, COVERING)


@dataclass(frozen=True)
class ProximityGraph:
    """``x ~ y`` iff ``x != y`` and some element of the scale holds both."""

    scale: SetFamily
    adjacency: tuple[int, ...]

    @classmethod
    def of(cls, scale: SetFamily) -> "ProximityGraph":
        adj = tuple(star_mask(1 << x, scale.masks) & ~(1 << x) for x in range(scale.ground.size))
        return cls(scale, adj)

    @property
    def ground(self):
        return self.scale.ground

    def adjacent(self, x: int, y: int) -> bool:
        return bool(self.adjacency[x] >> y & 1)

    def is_independent(self, mask: int) -> bool:
        return all(not self.adjacency[x] & mask for x in iter_bits(mask))

    def is_net(self, members: int, within: int) -> bool:
        if members & ~within or not self.is_independent(members):
            return False
        dominated = members
        for b in iter_bits(members):
            dominated |= self.adjacency[b]
        return not within & ~dominated


@dataclass(frozen=True)
class Net:
    within: Subset
    scale: SetFamily
    members: Subset

    def __len__(self) -> int:
        return len(self.members)

    @property
    def ids(self) -> tuple[int, ...]:
        return self.members.ids


def greedy_net(ambient: Subset, scale: SetFamily) -> Net:
    """Scan ``ambient`` by ascending id, keeping each point not adjacent to a kept one."""
    _check_ground(ambient.ground, scale.ground)
    g = ProximityGraph.of(scale)
    chosen = blocked = 0
    for x in iter_bits(ambient.mask):
        if not blocked >> x & 1:
            chosen |= 1 << x
            blocked |= g.adjacency[x] | 1 << x
    return Net(ambient, scale, Subset(ambient.ground, chosen))


def _net_masks(within: int, graph: ProximityGraph, limits: OracleLimits) -> list[int]:
    size = within.bit_count()
    if size > limits.net_ambient:
        raise OracleLimitExceeded("net ambient set", size, limits.net_ambient)
    positions = list(iter_bits(within))
    adj = [kernels.compress(graph.adjacency[p], positions) for p in positions]
    local = kernels.maximal_independent_sets(adj, len(positions))
    nets = [kernels.expand(m, positions) for m in local]
    nets.sort(key=lambda m: tuple(iter_bits(m)))
    return nets


def enumerate_nets(ambient: Subset, scale: SetFamily, limits: OracleLimits | None = None) -> list[Net]:
    """Every ``U``-net of ``ambient``, ordered by their ascending id tuples."""
    _check_ground(ambient.ground, scale.ground)
    lim = current(limits)
    graph = ProximityGraph.of(scale)
    return [Net(ambient, scale, Subset(ambient.ground, m))
            for m in _net_masks(ambient.mask, graph, lim)]


# ------------------------------------------------------------------ certificates


@dataclass(frozen=True)
class BsmCertificate:
    base: Scale
    queried: Scale
    mode: str
    bound: int
    # nets as id tuples, covers as base-index tuples; one per queried element
    witnesses: tuple[tuple[int, ...], ...]
    constants: tuple[int, ...]
    space: LssSpace | None = None

    @property
    def ground(self):
        return self.base.ground

    def witness_sets(self) -> list[int]:
        """Witnesses as masks: nets directly, covers as unions of base elements."""
        if self.mode == COVERING:
            return [mask_of(()) | _union(self.base.masks[i] for i in w) for w in self.witnesses]
        return [mask_of(w) for w in self.witnesses]


def _union(masks) -> int:
    u = 0
    for m in masks:
        u |= m
    return u


def _check_pair(queried: SetFamily, base: SetFamily) -> None:
    _check_ground(queried.ground, base.ground)
    if not isinstance(base, Scale) and not base.is_scale():
        raise InvalidScaleError("base family must cover the ground set")


def _net_extremum(queried: Scale, base: Scale, mode: str, limits: OracleLimits | None) -> BsmCertificate:
    _check_pair(queried, base)
    lim = current(limits)
    graph = ProximityGraph.of(base)
    cache: dict[int, tuple[int, ...]] = {}
    witnesses, constants = [], []
    for v in queried.masks:
        if v not in cache:
            nets = _net_masks(v, graph, lim)
            pick = max if mode == ALL_NETS else min
            # first net (in id-tuple order) attaining the extremum
            best = pick(nets, key=lambda m: m.bit_count())
            cache[v] = tuple(iter_bits(best))
        witnesses.append(cache[v])
        constants.append(len(cache[v]))
    return BsmCertificate(base, queried, mode, max(constants, default=0), tuple(witnesses), tuple(constants))


def net_bound_all(queried: Scale, base: Scale, limits: OracleLimits | None = None) -> BsmCertificate:
    """``u(V)``: the largest net of any queried element; witness is a largest net per element."""
    return _net_extremum(queried, base, ALL_NETS, limits)


def net_bound_exists(queried: Scale, base: Scale, limits: OracleLimits | None = None) -> BsmCertificate:
    """``n(V)``: the largest over queried elements of the smallest net."""
    return _net_extremum(queried, base, EXISTS_NET, limits)


def min_cover_indices(target: int, base: Sequence[int], limits: OracleLimits | None = None) -> tuple[int, ...]:
    """Lexicographically smallest minimum cover of ``target`` by ``base`` (indices).

    Base elements with identical traces on ``target`` are collapsed onto their
    first index first; a later duplicate can never appear in the lex-smallest cover.
    """
    lim = current(limits)
    size = target.bit_count()
    if size > lim.cover_target:
        raise OracleLimitExceeded("cover target", size, lim.cover_target)
    seen: dict[int, int] = {}
    for i, m in enumerate(base):
        t = m & target
        if t and t not in seen:
            seen[t] = i
    if len(seen) > lim.cover_base:
        raise OracleLimitExceeded("cover candidates", len(seen), lim.cover_base)
    order = sorted(seen.items(), key=lambda kv: kv[1])
    picked = kernels.min_cover(target, [t for t, _ in order])
    if picked is None:
        raise PreconditionError("base family does not cover the queried set")
    return tuple(order[j][1] for j in picked)


def covering_number(queried: Scale, base: SetFamily, limits: OracleLimits | None = None) -> BsmCertificate:
    """``k(V)``: the largest over queried elements of the fewest base elements covering it."""
    _check_ground(queried.ground, base.ground)
    cache: dict[int, tuple[int, ...]] = {}
    witnesses, constants = [], []
    for v in queried.masks:
        if v not in cache:
            cache[v] = min_cover_indices(v, base.masks, limits)
        witnesses.append(cache[v])
        constants.append(len(cache[v]))
    b = base if isinstance(base, Scale) else Scale(base.ground, base.masks)
    return BsmCertificate(b, queried, COVERING, max(constants, default=0), tuple(witnesses), tuple(constants))


_BY_MODE = {ALL_NETS: net_bound_all, EXISTS_NET: net_bound_exists, COVERING: covering_number}


def compute(queried: Scale, base: Scale, mode: str, limits: OracleLimits | None = None) -> BsmCertificate:
    if mode not in _BY_MODE:
        raise ValueError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    return _BY_MODE[mode](queried, base, limits)


def check_bsm(space: LssSpace, base: Scale, mode: str, limits: OracleLimits | None = None) -> BsmCertificate:
    """Evaluate ``mode`` at ``base`` against the maximal bounded sets of ``space``."""
    require_bounded(base, space, "base scale")
    cert = compute(space.maximal_bounded, base, mode, limits)
    return BsmCertificate(cert.base, cert.queried, cert.mode, cert.bound, cert.witnesses, cert.constants, space)


def star_cover_from_net(net_ids: Sequence[int], base: SetFamily) -> list[int]:
    """For each net point ``b``, the star of the first base element holding ``b``.

    These are elements of ``st(U, U)``; when the points form a ``U``-net of
    ``V`` their union contains ``V``.
    """
    out = []
    for b in net_ids:
        first = next(m for m in base.masks if m >> b & 1)
        out.append(star_mask(first, base.masks))
    return out


def recheck(cert: BsmCertificate, limits: OracleLimits | None = None) -> bool:
    """Recompute a certificate from its scales and compare every field."""
    fresh = compute(cert.queried, cert.base, cert.mode, limits)
    return (fresh.bound, fresh.witnesses, fresh.constants) == (cert.bound, cert.witnesses, cert.constants)


# ------------------------------------------------------------------ transfer


def _pull_back(h, cert: BsmCertificate, limits: OracleLimits | None) -> BsmCertificate:
    """A certificate on ``h.source`` from one on ``h.target``, for a coarse equivalence ``h``.

    All-nets and covering keep their mode at ``h⁻¹(U)``: a ``h⁻¹(U)``-net maps
    injectively onto a ``U``-independent set, and preimages of a cover still
    cover.  Exists-net becomes covering at ``h⁻¹(st(U, U))``: a maximal net
    ``N`` of ``V`` gives ``V ⊆ ⋃ st(b, U)`` over ``b ∈ N``, and each ``st(b, U)``
    sits inside an element of ``st(U, U)``.
    """
    from lsskit.maps import preimage_scale

    if cert.mode == EXISTS_NET:
        doubled = SetFamily(cert.base.ground, family_stars(cert.base.masks, cert.base.masks))
        return check_bsm(h.source, preimage_scale(h, doubled), COVERING, limits)
    return check_bsm(h.source, preimage_scale(h, cert.base), cert.mode, limits)


def bsm_transfer(f, cert: BsmCertificate, limits: OracleLimits | None = None) -> BsmCertificate:
    """Move a certificate across a coarse equivalence ``f: X -> Y``; the bound never grows.

    From ``X``: when ``f`` is onto, forward at ``f(U)`` in the same mode
    (exists-net also needs ``f`` injective), since an ``f(U)``-net lifts to a
    ``U``-independent set and images of a cover cover the image.  Otherwise
    pull back along the constructed coarse inverse.  From ``Y``: pull back
    along ``f``.
    """
    from lsskit.maps import image_scale, require_equivalence

    report = require_equivalence(f)
    if cert.space is None:
        raise PreconditionError("certificate does not record its space")
    if cert.space == f.source:
        if f.is_surjective() and (cert.mode != EXISTS_NET or f.is_injective()):
            return check_bsm(f.target, image_scale(f, cert.base), cert.mode, limits)
        return _pull_back(report.inverse, cert, limits)
    if cert.space == f.target:
        return _pull_back(f, cert, limits)
    raise PreconditionError("certificate lives on neither side of the map")
