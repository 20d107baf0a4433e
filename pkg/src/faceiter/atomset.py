"""Fixed-capacity sets of atoms backed by a single Python integer.

Atoms are numbered ``1..n`` at the public surface and stored as bits
``0..n-1``.  Python integers are arbitrary-precision word vectors, so the
hot operations (meet, join, subset check) are single C-level bitwise
operations regardless of ``n``.
"""
from __future__ import annotations

from typing import Iterable, Iterator, Sequence

from .errors import InputError

WORD_BITS = 64


class AtomSet:
    """Immutable subset of ``{1, ..., capacity}``."""

    __slots__ = ("capacity", "mask")

    def __init__(self, capacity: int, mask: int = 0):
        if capacity < 0:
            raise InputError(f"capacity must be non-negative, got {capacity}")
        if mask < 0 or mask >> capacity:
            raise InputError(f"mask has bits outside 1..{capacity}")
        object.__setattr__(self, "capacity", capacity)
        object.__setattr__(self, "mask", mask)

    def __setattr__(self, name, value):
        raise AttributeError("AtomSet is immutable")

    def __reduce__(self):
        return (AtomSet, (self.capacity, self.mask))

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "AtomSet":
        mask = 0
        for i in indices:
            if not isinstance(i, int) or isinstance(i, bool):
                raise InputError(f"atom index {i!r} is not an integer")
            if i < 1 or i > n:
                raise InputError(f"atom index {i} out of range 1..{n}")
            mask |= 1 << (i - 1)
        return cls(n, mask)

    @classmethod
    def empty(cls, n: int) -> "AtomSet":
        return cls(n, 0)

    @classmethod
    def full(cls, n: int) -> "AtomSet":
        return cls(n, (1 << n) - 1)

    def _check(self, other: "AtomSet") -> None:
        if not isinstance(other, AtomSet):
            raise TypeError(f"expected AtomSet, got {type(other).__name__}")
        if other.capacity != self.capacity:
            raise InputError(
                f"capacity mismatch: {self.capacity} vs {other.capacity}"
            )

    def intersection(self, other: "AtomSet") -> "AtomSet":
        self._check(other)
        return AtomSet(self.capacity, self.mask & other.mask)

    def union(self, other: "AtomSet") -> "AtomSet":
        self._check(other)
        return AtomSet(self.capacity, self.mask | other.mask)

    def is_subset(self, other: "AtomSet") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def is_subset_of_any(self, sets: Iterable["AtomSet"]) -> bool:
        for y in sets:
            self._check(y)
            if self.mask & ~y.mask == 0:
                return True
        return False

    __and__ = intersection
    __or__ = union
    __le__ = is_subset

    def __lt__(self, other: "AtomSet") -> bool:
        return self.is_subset(other) and self.mask != other.mask

    def __eq__(self, other) -> bool:
        if not isinstance(other, AtomSet):
            return NotImplemented
        return self.capacity == other.capacity and self.mask == other.mask

    def __hash__(self) -> int:
        return hash((self.capacity, self.mask))

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        return self.mask != 0

    def __contains__(self, atom: int) -> bool:
        return 1 <= atom <= self.capacity and bool(self.mask >> (atom - 1) & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices())

    def indices(self) -> tuple[int, ...]:
        """Sorted 1-based atom indices."""
        return mask_indices(self.mask)

    def sort_key(self) -> tuple[int, ...]:
        """Lexicographic order by atom indices (the canonical order everywhere)."""
        return self.indices()

    def words(self) -> list[int]:
        """The set as little-endian 64-bit words; padding above ``capacity`` is zero."""
        nwords = max(1, -(-self.capacity // WORD_BITS))
        full = (1 << WORD_BITS) - 1
        return [(self.mask >> (WORD_BITS * k)) & full for k in range(nwords)]

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self.indices())) + "}"


def mask_indices(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length())
        mask ^= low
    return tuple(out)


def lex_sorted(sets: Sequence[AtomSet]) -> list[AtomSet]:
    return sorted(sets, key=AtomSet.sort_key)
