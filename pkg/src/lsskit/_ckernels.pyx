# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels over 64-bit masks; same contracts as ``_pykernels``."""
from libc.stdlib cimport malloc, free
from libc.stdint cimport uint64_t

BACKEND = "cython"

FOUND, EXHAUSTED, BUDGET = 0, 1, 2


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


cdef inline int popc(uint64_t x) nogil:
    return __builtin_popcountll(x)


cdef inline int lowidx(uint64_t x) nogil:
    return __builtin_ctzll(x)


cdef inline uint64_t fullmask(int n) nogil:
    if n >= 64:
        return <uint64_t>0xFFFFFFFFFFFFFFFF
    return ((<uint64_t>1) << n) - 1


# ---------------------------------------------------------------- MIS

cdef struct MisCtx:
    uint64_t* non
    uint64_t* out
    int count
    int cap


cdef int _mis_expand(MisCtx* ctx, uint64_t r, uint64_t p, uint64_t x) nogil:
    cdef uint64_t px, cand, bit, tmp
    cdef int best, c, u, v
    cdef uint64_t* grown
    cdef int i
    if p == 0 and x == 0:
        if ctx.count == ctx.cap:
            grown = <uint64_t*>malloc(2 * ctx.cap * sizeof(uint64_t))
            if grown == NULL:
                return -1
            for i in range(ctx.count):
                grown[i] = ctx.out[i]
            free(ctx.out)
            ctx.out = grown
            ctx.cap *= 2
        ctx.out[ctx.count] = r
        ctx.count += 1
        return 0
    best = -1
    u = 0
    px = p | x
    while px:
        v = lowidx(px)
        px &= px - 1
        c = popc(p & ctx.non[v])
        if c > best:
            best = c
            u = v
    cand = p & ~ctx.non[u]
    while cand:
        v = lowidx(cand)
        cand &= cand - 1
        bit = (<uint64_t>1) << v
        if _mis_expand(ctx, r | bit, p & ctx.non[v], x & ctx.non[v]) < 0:
            return -1
        p &= ~bit
        x |= bit
    return 0


def maximal_independent_sets(list adj, int n):
    if n == 0:
        return [0]
    cdef MisCtx ctx
    cdef uint64_t full = fullmask(n)
    cdef int v, rc
    ctx.non = <uint64_t*>malloc(n * sizeof(uint64_t))
    ctx.cap = 64
    ctx.count = 0
    ctx.out = <uint64_t*>malloc(ctx.cap * sizeof(uint64_t))
    if ctx.non == NULL or ctx.out == NULL:
        free(ctx.non)
        free(ctx.out)
        raise MemoryError()
    try:
        for v in range(n):
            ctx.non[v] = full & ~(<uint64_t>adj[v]) & ~((<uint64_t>1) << v)
        with nogil:
            rc = _mis_expand(&ctx, 0, full, 0)
        if rc < 0:
            raise MemoryError()
        return [ctx.out[v] for v in range(ctx.count)]
    finally:
        free(ctx.non)
        free(ctx.out)


# ---------------------------------------------------------------- set cover

cdef struct CoverCtx:
    uint64_t* masks
    uint64_t* hit
    int m


cdef int _independent_bound(CoverCtx* c, uint64_t uncovered, uint64_t avail) nogil:
    cdef int bound = 0
    cdef int e, j
    cdef uint64_t reach, a
    while uncovered:
        e = lowidx(uncovered)
        reach = (<uint64_t>1) << e
        a = c.hit[e] & avail
        while a:
            j = lowidx(a)
            a &= a - 1
            reach |= c.masks[j]
        bound += 1
        uncovered &= ~reach
    return bound


cdef bint _feasible(CoverCtx* c, uint64_t uncovered, uint64_t avail, int r) nogil:
    cdef uint64_t u, h, best = 0
    cdef int e, j, cnt, best_cnt = -1
    if uncovered == 0:
        return True
    if r <= 0:
        return False
    u = uncovered
    while u:
        e = lowidx(u)
        u &= u - 1
        h = c.hit[e] & avail
        cnt = popc(h)
        if cnt == 0:
            return False
        if best_cnt < 0 or cnt < best_cnt:
            best_cnt = cnt
            best = h
            if cnt == 1:
                break
    if _independent_bound(c, uncovered, avail) > r:
        return False
    while best:
        j = lowidx(best)
        best &= best - 1
        if _feasible(c, uncovered & ~c.masks[j], avail & ~((<uint64_t>1) << j), r - 1):
            return True
        avail &= ~((<uint64_t>1) << j)
    return False


cdef int _greedy_size(uint64_t target, uint64_t* masks, int m) nogil:
    cdef uint64_t unc = target
    cdef int size = 0
    cdef int j, best, c, bc
    while unc:
        best = -1
        bc = 0
        for j in range(m):
            c = popc(masks[j] & unc)
            if c > bc:
                bc = c
                best = j
        if best < 0:
            return -1
        unc &= ~masks[best]
        size += 1
    return size


def min_cover(uint64_t target, list masks):
    cdef int m = len(masks)
    cdef CoverCtx ctx
    cdef uint64_t union = 0, everything, unc, tail, bits
    cdef int j, k, upper, slot, rest, pos, e
    if target == 0:
        return []
    if m > 64:
        raise ValueError("compiled cover kernel takes at most 64 sets")
    ctx.m = m
    ctx.masks = <uint64_t*>malloc((m if m > 0 else 1) * sizeof(uint64_t))
    ctx.hit = <uint64_t*>malloc(64 * sizeof(uint64_t))
    if ctx.masks == NULL or ctx.hit == NULL:
        free(ctx.masks)
        free(ctx.hit)
        raise MemoryError()
    try:
        for e in range(64):
            ctx.hit[e] = 0
        for j in range(m):
            ctx.masks[j] = <uint64_t>masks[j]
            union |= ctx.masks[j]
            bits = ctx.masks[j]
            while bits:
                e = lowidx(bits)
                bits &= bits - 1
                ctx.hit[e] |= (<uint64_t>1) << j
        if target & ~union:
            return None
        everything = fullmask(m)
        with nogil:
            upper = _greedy_size(target, ctx.masks, m)
            k = _independent_bound(&ctx, target, everything)
            if k < 1:
                k = 1
            while k < upper and not _feasible(&ctx, target, everything, k):
                k += 1
        chosen = []
        unc = target
        pos = 0
        for slot in range(k):
            rest = k - slot - 1
            for j in range(pos, m):
                if not (ctx.masks[j] & unc):
                    continue
                tail = everything & ~fullmask(j + 1)
                if _feasible(&ctx, unc & ~ctx.masks[j], tail, rest):
                    chosen.append(j)
                    unc &= ~ctx.masks[j]
                    pos = j + 1
                    break
        return chosen
    finally:
        free(ctx.masks)
        free(ctx.hit)


# ---------------------------------------------------------------- overlap closure

def merge_overlapping(list masks):
    cdef int n = len(masks)
    cdef uint64_t* blocks = <uint64_t*>malloc((n if n > 0 else 1) * sizeof(uint64_t))
    cdef int nb = 0, i, w
    cdef uint64_t merged
    cdef bint changed
    if blocks == NULL:
        raise MemoryError()
    try:
        for item in masks:
            merged = <uint64_t>item
            if merged == 0:
                continue
            changed = True
            while changed:
                changed = False
                w = 0
                for i in range(nb):
                    if blocks[i] & merged:
                        merged |= blocks[i]
                        changed = True
                    else:
                        blocks[w] = blocks[i]
                        w += 1
                nb = w
            blocks[nb] = merged
            nb += 1
        out = [blocks[i] for i in range(nb)]
        out.sort(key=lambda b: b & -b)
        return out
    finally:
        free(blocks)


# ---------------------------------------------------------------- witness search

def witness_search(list cands, list nbrs, long long p, long long q, long long node_limit):
    cdef int n = len(cands)
    cdef int x, y, i, t, total = 0, ntotal = 0
    cdef long long nodes = 0
    cdef uint64_t c, o
    cdef bint placed, ok
    if n == 0:
        return FOUND, []
    for x in range(n):
        total += len(cands[x])
        ntotal += len(nbrs[x])
    cdef uint64_t* cand = <uint64_t*>malloc((total if total else 1) * sizeof(uint64_t))
    cdef int* cstart = <int*>malloc((n + 1) * sizeof(int))
    cdef int* nb = <int*>malloc((ntotal if ntotal else 1) * sizeof(int))
    cdef int* nstart = <int*>malloc((n + 1) * sizeof(int))
    cdef uint64_t* choice = <uint64_t*>malloc(n * sizeof(uint64_t))
    cdef int* pos = <int*>malloc((n + 1) * sizeof(int))
    if not (cand and cstart and nb and nstart and choice and pos):
        free(cand); free(cstart); free(nb); free(nstart); free(choice); free(pos)
        raise MemoryError()
    try:
        t = 0
        i = 0
        for x in range(n):
            cstart[x] = t
            for item in cands[x]:
                cand[t] = <uint64_t>item
                t += 1
            nstart[x] = i
            for item in nbrs[x]:
                nb[i] = <int>item
                i += 1
            pos[x] = 0
            choice[x] = 0
        cstart[n] = t
        nstart[n] = i
        pos[n] = 0
        x = 0
        with nogil:
            while 0 <= x < n:
                placed = False
                while cstart[x] + pos[x] < cstart[x + 1]:
                    c = cand[cstart[x] + pos[x]]
                    pos[x] += 1
                    nodes += 1
                    if nodes > node_limit:
                        x = -2
                        break
                    ok = True
                    for i in range(nstart[x], nstart[x + 1]):
                        o = choice[nb[i]]
                        if q * popc(c ^ o) >= p * popc(c & o):
                            ok = False
                            break
                    if ok:
                        choice[x] = c
                        placed = True
                        break
                if x == -2:
                    break
                if placed:
                    x += 1
                    pos[x] = 0
                else:
                    pos[x] = 0
                    x -= 1
        if x == -2:
            return BUDGET, None
        if x < 0:
            return EXHAUSTED, None
        return FOUND, [choice[i] for i in range(n)]
    finally:
        free(cand); free(cstart); free(nb); free(nstart); free(choice); free(pos)


# ---------------------------------------------------------------- relations

def compose(list first, list second):
    cdef int n = len(second)
    cdef uint64_t* sec = <uint64_t*>malloc((n if n else 1) * sizeof(uint64_t))
    cdef uint64_t row, acc
    cdef int y
    if sec == NULL:
        raise MemoryError()
    try:
        for y in range(n):
            sec[y] = <uint64_t>second[y]
        out = []
        for item in first:
            row = <uint64_t>item
            acc = 0
            while row:
                y = lowidx(row)
                row &= row - 1
                acc |= sec[y]
            out.append(acc)
        return out
    finally:
        free(sec)
