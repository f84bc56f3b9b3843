"""Set-family combinatorics over a finite ground set.

Subsets are integer bitmasks over element ids.  Families are immutable and keep
duplicate elements at stable indices, so operations that answer "which
elements" (``horizon``, ``refines``) report indices rather than sets.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Iterator, Sequence

from lsskit.errors import GroundMismatchError, InvalidScaleError


@dataclass(frozen=True)
class Verdict:
    """A boolean answer together with the object that justifies it."""

    ok: bool
    witness: Any = None

    def __bool__(self) -> bool:
        return self.ok


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(ids: Iterable[int]) -> int:
    m = 0
    for i in ids:
        m |= 1 << i
    return m


@dataclass(frozen=True)
class GroundSet:
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        labels = tuple(str(x) for x in self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise ValueError("a ground set needs at least one element")
        if len(set(labels)) != len(labels):
            seen: set[str] = set()
            dup = next(x for x in labels if x in seen or seen.add(x))
            raise ValueError(f"duplicate label {dup!r}")
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})

    @classmethod
    def of_size(cls, n: int) -> "GroundSet":
        return cls(tuple(str(i) for i in range(n)))

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def full(self) -> int:
        return (1 << len(self.labels)) - 1

    def id_of(self, label: str) -> int:
        try:
            return self._index[label]  # type: ignore[attr-defined]
        except KeyError:
            raise KeyError(f"unknown label {label!r}") from None

    def has_label(self, label: str) -> bool:
        return label in self._index  # type: ignore[attr-defined]

    def mask_of_labels(self, labels: Iterable[str]) -> int:
        return mask_of(self.id_of(x) for x in labels)

    def labels_of(self, mask: int) -> list[str]:
        return [self.labels[i] for i in iter_bits(mask)]

    def subset(self, ids: Iterable[int] = ()) -> "Subset":
        return Subset(self, mask_of(ids))

    def subset_of_labels(self, labels: Iterable[str]) -> "Subset":
        return Subset(self, self.mask_of_labels(labels))

    def everything(self) -> "Subset":
        return Subset(self, self.full)


@dataclass(frozen=True)
class Subset:
    ground: GroundSet
    mask: int

    def __post_init__(self) -> None:
        if self.mask < 0 or self.mask & ~self.ground.full:
            raise ValueError(f"mask {self.mask:#x} has ids outside the ground set")

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.mask)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, x: int) -> bool:
        return bool(self.mask >> x & 1)

    def _other(self, other: "Subset") -> int:
        _check_ground(self.ground, other.ground)
        return other.mask

    def __or__(self, other: "Subset") -> "Subset":
        return Subset(self.ground, self.mask | self._other(other))

    def __and__(self, other: "Subset") -> "Subset":
        return Subset(self.ground, self.mask & self._other(other))

    def __sub__(self, other: "Subset") -> "Subset":
        return Subset(self.ground, self.mask & ~self._other(other))

    def __le__(self, other: "Subset") -> bool:
        return not self.mask & ~self._other(other)

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(iter_bits(self.mask))

    def labels(self) -> list[str]:
        return self.ground.labels_of(self.mask)

    def __repr__(self) -> str:
        return "{" + ", ".join(self.labels()) + "}"


def _check_ground(a: GroundSet, b: GroundSet) -> None:
    if a is not b and a != b:
        raise GroundMismatchError("operands live on different ground sets")


@dataclass(frozen=True)
class SetFamily:
    """An indexed sequence of subsets of one ground set."""

    ground: GroundSet
    masks: tuple[int, ...]

    def __post_init__(self) -> None:
        masks = tuple(int(m) for m in self.masks)
        object.__setattr__(self, "masks", masks)
        full = self.ground.full
        for i, m in enumerate(masks):
            if m < 0 or m & ~full:
                raise ValueError(f"element {i} has ids outside the ground set")

    @classmethod
    def from_ids(cls, ground: GroundSet, elements: Iterable[Iterable[int]]):
        return cls(ground, tuple(mask_of(e) for e in elements))

    @classmethod
    def from_labels(cls, ground: GroundSet, elements: Iterable[Iterable[str]]):
        return cls(ground, tuple(ground.mask_of_labels(e) for e in elements))

    @classmethod
    def from_subsets(cls, ground: GroundSet, elements: Iterable[Subset]):
        masks = []
        for s in elements:
            _check_ground(ground, s.ground)
            masks.append(s.mask)
        return cls(ground, tuple(masks))

    def __len__(self) -> int:
        return len(self.masks)

    def __getitem__(self, i: int) -> Subset:
        return Subset(self.ground, self.masks[i])

    def element(self, i: int) -> Subset:
        return self[i]

    def __iter__(self) -> Iterator[Subset]:
        return (Subset(self.ground, m) for m in self.masks)

    @property
    def union(self) -> int:
        u = 0
        for m in self.masks:
            u |= m
        return u

    def as_ids(self) -> list[tuple[int, ...]]:
        return [tuple(iter_bits(m)) for m in self.masks]

    def as_labels(self) -> list[list[str]]:
        return [self.ground.labels_of(m) for m in self.masks]

    def is_scale(self) -> bool:
        return self.union == self.ground.full and all(self.masks)

    def as_scale(self) -> "Scale":
        return Scale(self.ground, self.masks)

    def __repr__(self) -> str:
        inner = ", ".join(repr(s) for s in self)
        return f"{type(self).__name__}[{inner}]"


class Scale(SetFamily):
    """A family that covers the ground set with nonempty elements."""

    def __post_init__(self) -> None:
        super().__post_init__()
        for i, m in enumerate(self.masks):
            if not m:
                raise InvalidScaleError(f"scale element {i} is empty")
        missing = self.ground.full & ~self.union
        if missing:
            raise InvalidScaleError(
                f"scale misses {', '.join(self.ground.labels_of(missing))}"
            )

    @classmethod
    def singletons(cls, ground: GroundSet) -> "Scale":
        return cls(ground, tuple(1 << i for i in range(ground.size)))

    @classmethod
    def whole(cls, ground: GroundSet) -> "Scale":
        return cls(ground, (ground.full,))

    def is_trivial(self) -> bool:
        """True when every element is a single point (the singleton cover up to order/repeats)."""
        return all(m & (m - 1) == 0 for m in self.masks)


# ------------------------------------------------------------------ mask level


def star_mask(target: int, masks: Sequence[int]) -> int:
    out = 0
    if not target:
        return 0
    for m in masks:
        if m & target:
            out |= m
    return out


def point_star(x: int, masks: Sequence[int]) -> int:
    return star_mask(1 << x, masks)


def family_stars(inner: Sequence[int], against: Sequence[int]) -> tuple[int, ...]:
    return tuple(star_mask(m, against) for m in inner)


def tower(base: Sequence[int], n: int) -> list[tuple[int, ...]]:
    """``[st^0, st^1, ..., st^n]`` of a scale, as mask tuples."""
    levels = [tuple(base)]
    for _ in range(n):
        levels.append(family_stars(base, levels[-1]))
    return levels


# ------------------------------------------------------------------ operations


def star(target: Subset, family: SetFamily) -> Subset:
    """Union of the elements of ``family`` that meet ``target``."""
    _check_ground(target.ground, family.ground)
    return Subset(family.ground, star_mask(target.mask, family.masks))


def star_family(inner: SetFamily, against: SetFamily) -> SetFamily:
    """Element ``i`` of the result is ``star(inner[i], against)``."""
    _check_ground(inner.ground, against.ground)
    masks = family_stars(inner.masks, against.masks)
    if isinstance(inner, Scale) and isinstance(against, Scale):
        return Scale(inner.ground, masks)
    return SetFamily(inner.ground, masks)


def iterated_star(base: Scale, n: int) -> Scale:
    """``st^0 = base`` and ``st^n = star_family(base, st^(n-1))``."""
    if n < 0:
        raise ValueError("tower height must be >= 0")
    return Scale(base.ground, tower(base.masks, n)[-1])


def horizon(target: Subset, scale: SetFamily) -> frozenset[int]:
    """Indices of the elements of ``scale`` that meet ``target``."""
    _check_ground(target.ground, scale.ground)
    t = target.mask
    return frozenset(i for i, m in enumerate(scale.masks) if m & t)


def horizon_mask(target: int, masks: Sequence[int]) -> int:
    """Horizon as a bitmask over element indices."""
    out = 0
    for i, m in enumerate(masks):
        if m & target:
            out |= 1 << i
    return out


def refines(fine: SetFamily, coarse: SetFamily) -> Verdict:
    """Whether every element of ``fine`` sits inside some element of ``coarse``.

    On success the witness is a tuple mapping each fine index to the first coarse
    index containing it; on failure it is the first offending fine index.
    """
    _check_ground(fine.ground, coarse.ground)
    mapping = []
    for i, m in enumerate(fine.masks):
        for j, c in enumerate(coarse.masks):
            if not m & ~c:
                mapping.append(j)
                break
        else:
            return Verdict(False, i)
    return Verdict(True, tuple(mapping))


def trivial_extension(family: SetFamily) -> Scale:
    """Drop empty elements and append every singleton after the original indices."""
    kept = tuple(m for m in family.masks if m)
    singles = tuple(1 << i for i in range(family.ground.size))
    return Scale(family.ground, kept + singles)


def multiplicity(family: SetFamily) -> int:
    """Largest number of elements containing a single point."""
    best = 0
    for x in range(family.ground.size):
        bit = 1 << x
        c = sum(1 for m in family.masks if m & bit)
        best = max(best, c)
    return best
