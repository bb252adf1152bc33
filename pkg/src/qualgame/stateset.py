"""Immutable bitset over a fixed universe of state indices."""

from __future__ import annotations

from typing import Iterable, Iterator


class StateSet:
    """Subset of ``{0, ..., n-1}`` stored as an integer bit mask.

    Supports the usual set algebra (``|``, ``&``, ``-``, ``^``), ``~`` for the
    complement within the universe, and ``<=`` for inclusion.  Instances are
    hashable and never mutated.
    """

    __slots__ = ("_n", "_mask")

    def __init__(self, n: int, mask: int = 0):
        if n < 0:
            raise ValueError("universe size must be nonnegative")
        full = (1 << n) - 1
        if mask & ~full:
            raise ValueError("mask has bits outside the universe")
        object.__setattr__(self, "_n", n)
        object.__setattr__(self, "_mask", mask)

    def __setattr__(self, name, value):
        raise AttributeError("StateSet is immutable")

    @classmethod
    def empty(cls, n: int) -> StateSet:
        return cls(n, 0)

    @classmethod
    def full(cls, n: int) -> StateSet:
        return cls(n, (1 << n) - 1)

    @classmethod
    def of(cls, n: int, indices: Iterable[int]) -> StateSet:
        mask = 0
        for i in indices:
            if not 0 <= i < n:
                raise IndexError(f"state index {i} outside universe of size {n}")
            mask |= 1 << i
        return cls(n, mask)

    @property
    def n(self) -> int:
        return self._n

    @property
    def mask(self) -> int:
        return self._mask

    def _check(self, other: StateSet) -> None:
        if not isinstance(other, StateSet):
            raise TypeError(f"expected StateSet, got {type(other).__name__}")
        if other._n != self._n:
            raise ValueError("state sets over different universes")

    def __or__(self, other: StateSet) -> StateSet:
        self._check(other)
        return StateSet(self._n, self._mask | other._mask)

    def __and__(self, other: StateSet) -> StateSet:
        self._check(other)
        return StateSet(self._n, self._mask & other._mask)

    def __sub__(self, other: StateSet) -> StateSet:
        self._check(other)
        return StateSet(self._n, self._mask & ~other._mask)

    def __xor__(self, other: StateSet) -> StateSet:
        self._check(other)
        return StateSet(self._n, self._mask ^ other._mask)

    def __invert__(self) -> StateSet:
        return StateSet(self._n, ((1 << self._n) - 1) & ~self._mask)

    def __le__(self, other: StateSet) -> bool:
        self._check(other)
        return self._mask & ~other._mask == 0

    def __ge__(self, other: StateSet) -> bool:
        return other <= self

    def __lt__(self, other: StateSet) -> bool:
        return self <= other and self._mask != other._mask

    def __gt__(self, other: StateSet) -> bool:
        return other < self

    def __eq__(self, other) -> bool:
        if not isinstance(other, StateSet):
            return NotImplemented
        return self._n == other._n and self._mask == other._mask

    def __hash__(self) -> int:
        return hash((self._n, self._mask))

    def __contains__(self, i: int) -> bool:
        return 0 <= i < self._n and (self._mask >> i) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        m = self._mask
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def __len__(self) -> int:
        return bin(self._mask).count("1")

    def __bool__(self) -> bool:
        return self._mask != 0

    def isdisjoint(self, other: StateSet) -> bool:
        self._check(other)
        return self._mask & other._mask == 0

    def __repr__(self) -> str:
        return f"StateSet({self._n}, {{{', '.join(map(str, self))}}})"
