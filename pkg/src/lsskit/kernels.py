"""Kernel dispatch: compiled core when available, pure Python otherwise.

Set ``LSSKIT_PURE_PYTHON=1`` to force the fallback.  Inputs wider than 64 bits
(or cover instances with more than 64 candidate sets) always run in Python.
"""
from __future__ import annotations

import os

from lsskit import _pykernels

_compiled = None
if not os.environ.get("LSSKIT_PURE_PYTHON"):
    try:
        from lsskit import _ckernels as _compiled  # type: ignore[no-redef]
    except ImportError:  # pragma: no cover - depends on the build
        _compiled = None

BACKEND = _compiled.BACKEND if _compiled is not None else _pykernels.BACKEND
FOUND, EXHAUSTED, BUDGET = _pykernels.FOUND, _pykernels.EXHAUSTED, _pykernels.BUDGET

_WORD = 64


def backends() -> dict[str, object]:
    """Modules implementing the kernel contract, keyed by name."""
    found: dict[str, object] = {"python": _pykernels}
    if _compiled is not None:
        found["cython"] = _compiled
    return found


def _pick(width: int, impl=None):
    if impl is not None:
        return impl
    if _compiled is not None and width <= _WORD:
        return _compiled
    return _pykernels


def bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def compress(mask: int, positions: list[int]) -> int:
    """Re-index ``mask`` so that bit ``positions[i]`` becomes bit ``i``."""
    out = 0
    for i, p in enumerate(positions):
        if mask >> p & 1:
            out |= 1 << i
    return out


def expand(mask: int, positions: list[int]) -> int:
    out = 0
    for i, p in enumerate(positions):
        if mask >> i & 1:
            out |= 1 << p
    return out


def maximal_independent_sets(adj: list[int], n: int, impl=None) -> list[int]:
    return _pick(n, impl).maximal_independent_sets(list(adj), n)


def min_cover(target: int, masks: list[int], impl=None) -> list[int] | None:
    """Lexicographically smallest minimum cover of ``target`` by ``masks`` (indices)."""
    if not target:
        return []
    positions = bits(target)
    local = [compress(m, positions) for m in masks]
    tgt = (1 << len(positions)) - 1
    width = max(len(positions), len(masks))
    return _pick(width, impl).min_cover(tgt, local)


def merge_overlapping(masks: list[int], impl=None) -> list[int]:
    width = max((m.bit_length() for m in masks), default=0)
    return _pick(width, impl).merge_overlapping(list(masks))


def witness_search(cands, nbrs, p: int, q: int, node_limit: int, impl=None):
    width = max((c.bit_length() for row in cands for c in row), default=0)
    if max(p, q) > 1 << 40:
        # products with popcounts must stay inside a signed 64-bit word
        width = _WORD + 1
    return _pick(width, impl).witness_search(
        [list(r) for r in cands], [list(r) for r in nbrs], p, q, node_limit
    )


def compose(first: list[int], second: list[int], impl=None) -> list[int]:
    width = max(len(second), max((r.bit_length() for r in second), default=0))
    return _pick(width, impl).compose(list(first), list(second))
