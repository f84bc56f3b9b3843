"""Pure-Python kernels over integer bitmasks.

Every function here has a compiled twin in ``_ckernels.pyx`` with the same
signature and the same output.  The compiled versions only accept masks that
fit in 64 bits; :mod:`lsskit.kernels` routes wider inputs here.
"""
from __future__ import annotations

BACKEND = "python"

FOUND, EXHAUSTED, BUDGET = 0, 1, 2


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def maximal_independent_sets(adj: list[int], n: int) -> list[int]:
    """All maximal independent sets of the graph on vertices ``0..n-1``.

    ``adj[v]`` is the neighbour mask of ``v`` (irreflexive, symmetric).
    Bron-Kerbosch with pivoting, run on the complement graph.
    """
    full = (1 << n) - 1
    non = [full & ~adj[v] & ~(1 << v) for v in range(n)]
    out: list[int] = []

    def expand(r: int, p: int, x: int) -> None:
        if not p and not x:
            out.append(r)
            return
        best, pivot = -1, 0
        for u in _bits(p | x):
            c = (p & non[u]).bit_count()
            if c > best:
                best, pivot = c, u
        for v in _bits(p & ~non[pivot]):
            bit = 1 << v
            expand(r | bit, p & non[v], x & non[v])
            p &= ~bit
            x |= bit

    if n:
        expand(0, full, 0)
    else:
        out.append(0)
    return out


class _Cover:
    """Exact cover search state: ``hit[e]`` is the mask of set indices containing element ``e``."""

    def __init__(self, masks: list[int], width: int):
        self.masks = masks
        self.hit = [0] * width
        for j, m in enumerate(masks):
            for e in _bits(m):
                self.hit[e] |= 1 << j

    def independent_bound(self, uncovered: int, avail: int) -> int:
        # elements pairwise sharing no available set each need their own set
        bound = 0
        u = uncovered
        masks, hit = self.masks, self.hit
        while u:
            e = (u & -u).bit_length() - 1
            reach = 1 << e
            for j in _bits(hit[e] & avail):
                reach |= masks[j]
            bound += 1
            u &= ~reach
        return bound

    def feasible(self, uncovered: int, avail: int, r: int) -> bool:
        if not uncovered:
            return True
        if r <= 0:
            return False
        hit = self.hit
        best, best_cnt = 0, -1
        for e in _bits(uncovered):
            h = hit[e] & avail
            c = h.bit_count()
            if c == 0:
                return False
            if best_cnt < 0 or c < best_cnt:
                best, best_cnt = h, c
                if c == 1:
                    break
        if self.independent_bound(uncovered, avail) > r:
            return False
        masks = self.masks
        for j in _bits(best):
            if self.feasible(uncovered & ~masks[j], avail & ~(1 << j), r - 1):
                return True
            # any cover using j was explored in this branch
            avail &= ~(1 << j)
        return False


def _greedy_size(target: int, masks: list[int]) -> int:
    unc, size = target, 0
    while unc:
        j = max(range(len(masks)), key=lambda i: ((masks[i] & unc).bit_count(), -i))
        if not masks[j] & unc:
            return -1
        unc &= ~masks[j]
        size += 1
    return size


def min_cover(target: int, masks: list[int]) -> list[int] | None:
    """Lexicographically smallest minimum-cardinality cover of ``target``.

    Returns indices into ``masks`` in ascending order, or ``None`` when the
    union of ``masks`` misses part of ``target``.
    """
    if not target:
        return []
    m = len(masks)
    union = 0
    for mk in masks:
        union |= mk
    if target & ~union:
        return None
    st = _Cover(masks, max(target.bit_length(), union.bit_length()))
    everything = (1 << m) - 1
    upper = _greedy_size(target, masks)
    k = max(1, st.independent_bound(target, everything))
    while k < upper and not st.feasible(target, everything, k):
        k += 1
    chosen: list[int] = []
    unc, pos = target, 0
    for slot in range(k):
        rest = k - slot - 1
        for j in range(pos, m):
            if not masks[j] & unc:
                continue
            tail = everything & ~((1 << (j + 1)) - 1)
            if st.feasible(unc & ~masks[j], tail, rest):
                chosen.append(j)
                unc &= ~masks[j]
                pos = j + 1
                break
    return chosen


def merge_overlapping(masks: list[int]) -> list[int]:
    """Close a collection of sets under union of overlapping pairs.

    The result is the inclusion-maximal antichain (pairwise disjoint), sorted by
    lowest member.
    """
    blocks: list[int] = []
    for mk in masks:
        if not mk:
            continue
        merged = mk
        changed = True
        while changed:
            changed = False
            keep = []
            for b in blocks:
                if b & merged:
                    merged |= b
                    changed = True
                else:
                    keep.append(b)
            blocks = keep
        blocks.append(merged)
    blocks.sort(key=lambda b: b & -b)
    return blocks


def witness_search(
    cands: list[list[int]], nbrs: list[list[int]], p: int, q: int, node_limit: int
) -> tuple[int, list[int] | None]:
    """Backtracking search for one mask per vertex.

    Constraint for each ``y in nbrs[x]`` (always ``y < x``):
    ``q * |c_x ^ c_y| < p * |c_x & c_y|``.  Candidates are tried in list order.
    Returns ``(FOUND, choice)``, ``(EXHAUSTED, None)`` or ``(BUDGET, None)``.
    """
    n = len(cands)
    choice = [0] * n
    pos = [0] * (n + 1)
    nodes = 0
    x = 0
    while 0 <= x < n:
        placed = False
        row = cands[x]
        while pos[x] < len(row):
            c = row[pos[x]]
            pos[x] += 1
            nodes += 1
            if nodes > node_limit:
                return BUDGET, None
            for y in nbrs[x]:
                o = choice[y]
                if q * (c ^ o).bit_count() >= p * (c & o).bit_count():
                    break
            else:
                choice[x] = c
                placed = True
                break
        if placed:
            x += 1
            pos[x] = 0
        else:
            pos[x] = 0
            x -= 1
    if x < 0:
        return EXHAUSTED, None
    return FOUND, choice


def compose(first: list[int], second: list[int]) -> list[int]:
    """Relation product ``first ∘ second`` on row bitmasks: ``(x,z)`` iff ``x first y second z``."""
    out = []
    for row in first:
        acc = 0
        for y in _bits(row):
            acc |= second[y]
        out.append(acc)
    return out
