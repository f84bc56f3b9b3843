import os
import random
import subprocess
import sys

import pytest
from hypothesis import given, settings

import oracles
from gen import seeds
from lsskit import _pykernels, kernels

IMPLS = kernels.backends()
needs_compiled = pytest.mark.skipif("cython" not in IMPLS, reason="compiled kernels not built")


def test_python_backend_always_present():
    assert "python" in IMPLS


def test_pure_python_switch():
    env = dict(os.environ, LSSKIT_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from lsskit import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


@needs_compiled
def test_compiled_backend_selected_by_default():
    assert kernels.BACKEND == "cython"


def _graph(rng, n):
    adj = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.4:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return adj


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_maximal_independent_sets_agree(seed):
    rng = random.Random(seed)
    n = rng.randint(0, 9)
    adj = _graph(rng, n)
    results = [kernels.maximal_independent_sets(adj, n, impl=m) for m in IMPLS.values()]
    assert all(r == results[0] for r in results)
    scale = [{i, j} for i in range(n) for j in range(i + 1, n) if adj[i] >> j & 1]
    want = {frozenset(s) for s in oracles.nets(set(range(n)), scale)}
    assert {frozenset(kernels.bits(m)) for m in results[0]} == want


@settings(max_examples=300, deadline=None)
@given(seeds)
def test_min_cover_agrees(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 10)
    masks = [rng.getrandbits(n) | (1 << rng.randrange(n)) for _ in range(rng.randint(1, 12))]
    target = (1 << n) - 1
    union = 0
    for m in masks:
        union |= m
    target &= union
    results = [kernels.min_cover(target, masks, impl=m) for m in IMPLS.values()]
    assert all(r == results[0] for r in results)
    sets = [set(kernels.bits(m)) for m in masks]
    assert tuple(results[0]) == oracles.min_cover(set(kernels.bits(target)), sets)


def test_min_cover_infeasible():
    for impl in IMPLS.values():
        assert kernels.min_cover(0b111, [0b001, 0b010], impl=impl) is None


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_merge_overlapping_agrees(seed):
    rng = random.Random(seed)
    masks = [rng.getrandbits(12) & rng.getrandbits(12) for _ in range(rng.randint(0, 10))]
    results = [kernels.merge_overlapping(masks, impl=m) for m in IMPLS.values()]
    assert all(r == results[0] for r in results)
    for a in results[0]:
        for b in results[0]:
            assert a == b or not a & b


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_compose_agrees(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 12)
    a = [rng.getrandbits(n) for _ in range(n)]
    b = [rng.getrandbits(n) for _ in range(n)]
    results = [kernels.compose(a, b, impl=m) for m in IMPLS.values()]
    assert all(r == results[0] for r in results)
    for x in range(n):
        want = {z for y in range(n) if a[x] >> y & 1 for z in range(n) if b[y] >> z & 1}
        assert set(kernels.bits(results[0][x])) == want


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_witness_search_agrees(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 5)
    width = n + 2
    cands = []
    for x in range(n):
        row = sorted({rng.getrandbits(width) | 1 << x for _ in range(rng.randint(1, 6))},
                     key=lambda c: (c.bit_count(), c))
        cands.append(row)
    nbrs = [[y for y in range(x) if rng.random() < 0.5] for x in range(n)]
    p, q = rng.randint(1, 4), rng.randint(1, 4)
    results = [kernels.witness_search(cands, nbrs, p, q, 100_000, impl=m) for m in IMPLS.values()]
    assert all(r == results[0] for r in results)
    status, choice = results[0]
    if status == _pykernels.FOUND:
        for x in range(n):
            for y in nbrs[x]:
                c, o = choice[x], choice[y]
                assert q * (c ^ o).bit_count() < p * (c & o).bit_count()


def test_witness_search_budget():
    cands = [[1, 3, 5, 7]] * 4
    for impl in IMPLS.values():
        status, _ = kernels.witness_search(cands, [[], [0], [1], [2]], 1, 1000, 3, impl=impl)
        assert status == _pykernels.BUDGET


def test_wide_inputs_fall_back_to_python():
    wide = [1 << 70, 1 << 70 | 1]
    assert kernels.merge_overlapping(wide) == [1 << 70 | 1]
