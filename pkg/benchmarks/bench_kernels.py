"""Time the compiled and pure-Python kernels on the same inputs.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
from __future__ import annotations

import argparse
import random
import timeit

from lsskit import kernels
from lsskit.fixtures import grid


def _random_graph(rng: random.Random, n: int, p: float) -> list[int]:
    adj = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return adj


def _cases(seed: int = 7):
    rng = random.Random(seed)
    g2 = grid(2)
    balls1 = list(g2.scales["Balls1"].masks)
    ball2 = g2.scales["Balls2"].masks[12]
    pos = kernels.bits(ball2)
    local = [kernels.compress(m, pos) for m in balls1 if m & ball2]
    yield "min_cover (G2 centre ball)", "min_cover", ((1 << len(pos)) - 1, local)

    sets = [rng.getrandbits(40) & rng.getrandbits(40) & rng.getrandbits(40) for _ in range(50)]
    full = 0
    for m in sets:
        full |= m
    yield "min_cover (random 40x50)", "min_cover", (full, sets)

    adj = _random_graph(rng, 20, 0.3)
    yield "maximal_independent_sets (n=20)", "maximal_independent_sets", (adj, 20)

    masks = [rng.getrandbits(60) & rng.getrandbits(60) & rng.getrandbits(60) for _ in range(200)]
    yield "merge_overlapping (200 sets)", "merge_overlapping", (masks,)

    rows = [rng.getrandbits(60) & rng.getrandbits(60) for _ in range(60)]
    yield "compose (60x60)", "compose", (rows, rows)

    # a path of 8 points; candidates are every mask containing the point's own bit
    n, width = 8, 10
    cands = [[c for c in range(1 << width) if c >> x & 1] for x in range(n)]
    cands = [sorted(r, key=lambda c: (c.bit_count(), c)) for r in cands]
    nbrs = [[x - 1] if x else [] for x in range(n)]
    yield "witness_search (path, eps=1/3)", "witness_search", (cands, nbrs, 1, 3, 10_000_000)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    impls = kernels.backends()
    if "cython" not in impls:
        print("compiled kernels are not built; only the Python timings are shown")
    print(f"{'kernel':36} " + " ".join(f"{k:>12}" for k in impls) + "     speedup")
    for label, name, call_args in _cases():
        times = {}
        results = {}
        for key, mod in impls.items():
            fn = getattr(mod, name)
            results[key] = fn(*call_args)
            number = 1
            times[key] = min(timeit.repeat(lambda: fn(*call_args), number=number, repeat=args.repeat))
        same = len({repr(r) for r in results.values()}) == 1
        speed = f"{times['python'] / times['cython']:8.1f}x" if "cython" in times and times["cython"] else ""
        row = " ".join(f"{times[k] * 1e6:10.1f}us" for k in impls)
        print(f"{label:36} {row} {speed}{'' if same else '  MISMATCH'}")


if __name__ == "__main__":
    main()
