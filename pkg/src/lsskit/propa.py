"""Property A witnesses on finite large-scale spaces.

A witness fixes a tolerance ``eps``, a test scale ``U``, a support scale ``V``
and a finite set ``A_x`` of ``(point, level)`` pairs per point.  It is valid
when ``(x, 1)`` is in ``A_x``, every point used by ``A_x`` lies in
``st(x, V)``, and ``|A_x Δ A_y| < eps |A_x ∩ A_y|`` whenever ``y ∈ st(x, U)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from lsskit import kernels
from lsskit.errors import OracleLimitExceeded, PreconditionError
from lsskit.family import (
    Scale,
    SetFamily,
    Verdict,
    _check_ground,
    family_stars,
    iter_bits,
    multiplicity,
    point_star,
    refines,
    tower,
)
from lsskit.limits import OracleLimits, current
from lsskit.lss import LssSpace, require_bounded
from lsskit.rational import positive, ratio, ratio_below

Pair = tuple[int, int]


@dataclass(frozen=True)
class PropertyAWitness:
    epsilon: Fraction
    test: Scale
    support: Scale
    sets: tuple[frozenset[Pair], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "epsilon", positive(self.epsilon))
        object.__setattr__(self, "sets", tuple(frozenset((int(z), int(l)) for z, l in s) for s in self.sets))
        _check_ground(self.test.ground, self.support.ground)
        if len(self.sets) != self.test.ground.size:
            raise ValueError(f"need one set per point: got {len(self.sets)} for {self.test.ground.size}")

    @property
    def ground(self):
        return self.test.ground

    def at(self, epsilon) -> "PropertyAWitness":
        return PropertyAWitness(positive(epsilon), self.test, self.support, self.sets)

    def max_level(self) -> int:
        return max((l for s in self.sets for _, l in s), default=0)


@dataclass(frozen=True)
class Violation:
    kind: str  # "missing-base", "outside-support", "bad-level", "ratio"
    x: int
    y: int | None = None
    delta: int = 0
    inter: int = 0
    pair: Pair | None = None


def near_pairs(test: SetFamily) -> Iterable[tuple[int, int]]:
    """Unordered pairs ``x < y`` with ``y ∈ st(x, test)``."""
    for x in range(test.ground.size):
        st = point_star(x, test.masks)
        for y in iter_bits(st >> (x + 1)):
            yield x, x + 1 + y


def verify_witness(space: LssSpace, w: PropertyAWitness) -> Verdict:
    """All three conditions; the witness on failure lists every violation."""
    _check_ground(space.ground, w.ground)
    require_bounded(w.test, space, "test scale")
    require_bounded(w.support, space, "support scale")
    bad: list[Violation] = []
    for x, a in enumerate(w.sets):
        if (x, 1) not in a:
            bad.append(Violation("missing-base", x))
        st = point_star(x, w.support.masks)
        for z, l in sorted(a):
            if l < 1:
                bad.append(Violation("bad-level", x, pair=(z, l)))
            elif not 0 <= z < space.size or not st >> z & 1:
                bad.append(Violation("outside-support", x, pair=(z, l)))
    for x, y in near_pairs(w.test):
        a, b = w.sets[x], w.sets[y]
        d, i = len(a ^ b), len(a & b)
        if not ratio_below(d, i, w.epsilon):
            bad.append(Violation("ratio", x, y, d, i))
    return Verdict(not bad, tuple(bad))


def max_ratio(sets: Sequence[frozenset], test: SetFamily) -> Fraction | None:
    """Largest ``|A_x Δ A_y| / |A_x ∩ A_y|`` over near pairs; ``None`` if some ratio is infinite."""
    best = Fraction(0)
    for x, y in near_pairs(test):
        r = ratio(len(sets[x] ^ sets[y]), len(sets[x] & sets[y]))
        if r is None:
            return None
        best = max(best, r)
    return best


def trivial_witness(ground_scale: Scale, epsilon=1) -> PropertyAWitness:
    """``A_x = {(x, 1)}`` tested and supported on singletons."""
    s = Scale.singletons(ground_scale.ground)
    return PropertyAWitness(positive(epsilon), s, s, tuple(frozenset({(x, 1)}) for x in range(s.ground.size)))


# ------------------------------------------------------------------ geometry


def has_bounded_geometry(space: LssSpace) -> Verdict:
    """Always true on a finite space; the constant is the largest block size."""
    return Verdict(True, max(b.bit_count() for b in space.blocks))


# ------------------------------------------------------------------ search


SEARCH_FOUND, SEARCH_EXHAUSTED = "found", "exhausted"


@dataclass(frozen=True)
class SearchResult:
    status: str
    witness: PropertyAWitness | None = None
    nodes_limit: int = 0

    def __bool__(self) -> bool:
        return self.status == SEARCH_FOUND


def search_witness(
    space: LssSpace,
    epsilon,
    test: Scale,
    support: Scale,
    max_level: int = 1,
    limits: OracleLimits | None = None,
) -> SearchResult:
    """Backtracking search over ``A_x ⊆ st(x, V) × {1..max_level}`` containing ``(x, 1)``.

    Candidates per point are tried by (size, encoding) ascending, points by id.
    Exhaustion rules out this support and level budget only.
    """
    eps = positive(epsilon)
    lim = current(limits)
    _check_ground(space.ground, test.ground)
    require_bounded(test, space, "test scale")
    require_bounded(support, space, "support scale")
    n = space.size
    if n > lim.witness_points:
        raise OracleLimitExceeded("witness search points", n, lim.witness_points)
    if not 1 <= max_level <= lim.witness_levels:
        raise OracleLimitExceeded("witness search levels", max_level, lim.witness_levels)
    L = max_level

    def bit(z: int, l: int) -> int:
        return 1 << (z * L + l - 1)

    cands: list[list[int]] = []
    for x in range(n):
        free = [bit(z, l) for z in iter_bits(point_star(x, support.masks)) for l in range(1, L + 1)]
        free.remove(bit(x, 1))
        if len(free) + 1 > lim.witness_bits_per_point:
            raise OracleLimitExceeded("witness candidate bits", len(free) + 1, lim.witness_bits_per_point)
        row = []
        for r in range(len(free) + 1):
            for combo in itertools.combinations(free, r):
                row.append(bit(x, 1) | sum(combo))
        row.sort(key=lambda m: (m.bit_count(), m))
        cands.append(row)
    nbrs = [[y for y in iter_bits(point_star(x, test.masks)) if y < x] for x in range(n)]
    status, choice = kernels.witness_search(cands, nbrs, eps.numerator, eps.denominator, lim.witness_nodes)
    if status == kernels.BUDGET:
        raise OracleLimitExceeded("witness search nodes", lim.witness_nodes + 1, lim.witness_nodes)
    if status == kernels.EXHAUSTED:
        return SearchResult(SEARCH_EXHAUSTED, None, lim.witness_nodes)
    sets = tuple(frozenset((b // L, b % L + 1) for b in iter_bits(m)) for m in choice)
    w = PropertyAWitness(eps, test, support, sets)
    if not verify_witness(space, w):
        raise AssertionError("search produced a witness that fails verification")
    return SearchResult(SEARCH_FOUND, w, lim.witness_nodes)


# ------------------------------------------------------------------ asymptotic dimension


@dataclass(frozen=True)
class AsdimCertificate:
    n: int
    # (scale, coarsening) pairs
    coarsenings: tuple[tuple[Scale, Scale], ...]

    def coarsening_of(self, scale: SetFamily) -> Scale | None:
        key = frozenset(scale.masks)
        for s, c in self.coarsenings:
            if frozenset(s.masks) == key:
                return c
        return None


def _drop_dominated(sets: list[int]) -> list[int]:
    uniq = sorted(set(sets), key=lambda m: (-m.bit_count(), m))
    kept: list[int] = []
    for m in uniq:
        if not any(not m & ~k for k in kept):
            kept.append(m)
    kept.sort(key=lambda m: (m & -m, m))
    return kept


def find_coarsening(space: LssSpace, scale: SetFamily, n: int) -> Scale:
    """A uniformly bounded coarsening of ``scale`` with multiplicity at most ``n + 1``.

    Repeatedly merges, at the first point of excess multiplicity, the two sets
    through it whose union is smallest.  Sets through one point share its block,
    so every merge stays bounded; in the worst case the blocks come out.
    """
    if n < 0:
        raise ValueError("dimension bound must be >= 0")
    require_bounded(scale, space, "scale")
    sets = _drop_dominated([m for m in scale.masks if m])
    ground = space.ground
    while True:
        counts = [0] * ground.size
        for m in sets:
            for x in iter_bits(m):
                counts[x] += 1
        over = [x for x in range(ground.size) if counts[x] > n + 1]
        if not over:
            break
        x = max(over, key=lambda p: (counts[p], -p))
        through = [i for i, m in enumerate(sets) if m >> x & 1]
        i, j = min(itertools.combinations(through, 2),
                   key=lambda ij: ((sets[ij[0]] | sets[ij[1]]).bit_count(), ij))
        merged = sets[i] | sets[j]
        sets = _drop_dominated([m for k, m in enumerate(sets) if k not in (i, j)] + [merged])
    return Scale(ground, tuple(sets))


def verify_asdim_certificate(space: LssSpace, cert: AsdimCertificate) -> Verdict:
    for idx, (s, c) in enumerate(cert.coarsenings):
        if not refines(s, c):
            return Verdict(False, (idx, "not a coarsening"))
        try:
            require_bounded(c, space)
        except ValueError:
            return Verdict(False, (idx, "not uniformly bounded"))
        if multiplicity(c) > cert.n + 1:
            return Verdict(False, (idx, "multiplicity"))
    return Verdict(True, None)


def check_asdim_at_most(space: LssSpace, n: int, scales: Sequence[SetFamily] | None = None) -> Verdict:
    """Coarsen each generator (or each given scale) to multiplicity ``<= n + 1``."""
    targets = list(scales) if scales is not None else list(space.generators) or [space.maximal_bounded]
    pairs = []
    for s in targets:
        c = find_coarsening(space, s, n)
        pairs.append((s if isinstance(s, Scale) else s.as_scale(), c))
    cert = AsdimCertificate(n, tuple(pairs))
    v = verify_asdim_certificate(space, cert)
    if not v:
        return Verdict(False, v.witness)
    return Verdict(True, cert)


# ------------------------------------------------------------------ asdim construction


def tower_height(k: int, epsilon) -> int:
    """Smallest ``n >= 2`` with ``(4k + 6) / (n - 1) < eps``."""
    eps = positive(epsilon)
    if k < 0:
        raise ValueError("dimension bound must be >= 0")
    # (4k+6) < eps (n-1)  <=>  n - 1 > (4k+6)/eps
    n = int((4 * k + 6) / eps) + 2
    while n > 2 and Fraction(4 * k + 6, n - 2) < eps:
        n -= 1
    return max(n, 2)


def tower_scale(test: Scale, n: int) -> Scale:
    """``{st(x, st^n(U))}_x``: the scale a coarsening must dominate for height ``n``."""
    top = tower(test.masks, n)[n]
    return Scale(test.ground, tuple(point_star(x, top) for x in range(test.ground.size)))


def certify_for_tower(space: LssSpace, k: int, epsilon, test: Scale) -> Verdict:
    """``check_asdim_at_most`` run on the tower scale the constructor will ask for."""
    return check_asdim_at_most(space, k, [tower_scale(test, tower_height(k, epsilon))])


def construct_witness_asdim(space: LssSpace, cert: AsdimCertificate, epsilon, test: Scale) -> PropertyAWitness:
    """Witness from a dimension certificate; not verified here.

    ``A_x = {(x,1)} ∪ {(z_V, m) : st(x, st^m U) meets V but does not contain it}``
    for ``V`` in the coarsening and ``1 <= m <= n``, with ``z_V = min V``.
    """
    eps = positive(epsilon)
    require_bounded(test, space, "test scale")
    k = cert.n
    n = tower_height(k, eps)
    levels = tower(test.masks, n)
    top = tower_scale(test, n)
    cover = cert.coarsening_of(top)
    if cover is None:
        raise PreconditionError(f"certificate has no coarsening of the height-{n} tower scale")
    if not refines(top, cover):
        raise PreconditionError("certificate entry does not coarsen the tower scale")
    reps = [(v, (v & -v).bit_length() - 1) for v in cover.masks]
    sets = []
    for x in range(space.size):
        a = {(x, 1)}
        for m in range(1, n + 1):
            st = point_star(x, levels[m])
            for v, z in reps:
                if v & st and v & ~st:
                    a.add((z, m))
        sets.append(frozenset(a))
    support = Scale(space.ground, family_stars(top.masks, cover.masks))
    return PropertyAWitness(eps, test, support, tuple(sets))


# ------------------------------------------------------------------ transfer


@dataclass(frozen=True)
class WitnessTransfer:
    witness: PropertyAWitness
    verdict: Verdict
    fiber_bound: int
    budget: Fraction
    # per near pair of X: (|A Δ A|, N |B Δ B|, |A ∩ A|, |B ∩ B|)
    counts: tuple[tuple[int, int, int, int], ...] = field(default=(), repr=False)


def transfer_witness(f, target: PropertyAWitness, epsilon, test: Scale | None = None) -> WitnessTransfer:
    """Pull a witness on ``Y`` back along ``f``: ``A_x = {(z, l) : (f(z), l) ∈ B_f(x)}``.

    ``target`` must verify on ``Y`` at ``eps / N`` with ``N`` the largest fiber
    size.  The X-side test scale defaults to ``f⁻¹`` of the target's.
    """
    from lsskit.maps import image_family, preimage_scale, require_equivalence

    eps = positive(epsilon)
    require_equivalence(f)
    X, Y = f.source, f.target
    _check_ground(target.ground, Y.ground)
    N = max(f.fiber_sizes())
    budget = eps / N
    if not verify_witness(Y, target.at(budget)):
        raise PreconditionError(f"target witness does not verify at eps/N = {budget}")
    if test is None:
        test = preimage_scale(f, target.test)
    elif not refines(image_family(f, test), target.test):
        raise PreconditionError("target test scale does not coarsen the image of the source test scale")
    by_y: dict[int, list[int]] = {}
    for z, y in enumerate(f.table):
        by_y.setdefault(y, []).append(z)
    sets = []
    for x in range(X.size):
        b = target.sets[f.table[x]]
        sets.append(frozenset((z, l) for (y, l) in b for z in by_y.get(y, ())))
    w = PropertyAWitness(eps, test, preimage_scale(f, target.support), tuple(sets))
    counts = []
    for x, y in near_pairs(test):
        bx, by = target.sets[f.table[x]], target.sets[f.table[y]]
        counts.append((len(w.sets[x] ^ w.sets[y]), N * len(bx ^ by), len(w.sets[x] & w.sets[y]), len(bx & by)))
    return WitnessTransfer(w, verify_witness(X, w), N, budget, tuple(counts))
