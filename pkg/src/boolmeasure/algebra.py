"""Finite Boolean set algebras over a fixed universe of atoms.

An element is a bitmask over the atom universe, so the algebra is the full
powerset lattice and every Boolean operation is a bitwise operation on masks.
All types here are immutable values and safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

#: Operations that enumerate all 2**n elements refuse universes above this.
ENUMERATION_LIMIT = 24

#: Hard cap for any universe; masks stay inside one machine word's worth of bits.
HARD_ATOM_LIMIT = 63


@dataclass(frozen=True, slots=True)
class AtomUniverse:
    """Universe of ``atom_count`` atoms, indexed ``0 .. atom_count - 1``."""

    atom_count: int

    def __post_init__(self) -> None:
        if not isinstance(self.atom_count, int) or isinstance(self.atom_count, bool):
            raise ValueError("atom_count must be an integer")
        if not 1 <= self.atom_count <= HARD_ATOM_LIMIT:
            raise ValueError(
                f"atom_count must be in 1..{HARD_ATOM_LIMIT}, got {self.atom_count}"
            )

    @property
    def full_mask(self) -> int:
        return (1 << self.atom_count) - 1

    def element(self, bits: int) -> "Element":
        return Element(self, bits)

    def zero(self) -> "Element":
        return Element(self, 0)

    def one(self) -> "Element":
        return Element(self, self.full_mask)

    def atom(self, index: int) -> "Element":
        if not 0 <= index < self.atom_count:
            raise ValueError(f"atom index {index} out of range")
        return Element(self, 1 << index)

    def from_atoms(self, indices: Iterable[int]) -> "Element":
        bits = 0
        for i in indices:
            if not 0 <= i < self.atom_count:
                raise ValueError(f"atom index {i} out of range")
            bits |= 1 << i
        return Element(self, bits)


@dataclass(frozen=True, slots=True)
class Element:
    """Algebra element; a value type, equal iff universe and bits agree."""

    universe: AtomUniverse
    bits: int

    def __post_init__(self) -> None:
        if not isinstance(self.bits, int) or isinstance(self.bits, bool):
            raise ValueError("bits must be an integer mask")
        if not 0 <= self.bits <= self.universe.full_mask:
            raise ValueError(
                f"mask 0x{self.bits:x} does not fit a universe of "
                f"{self.universe.atom_count} atoms"
            )

    def _same_universe(self, other: "Element") -> "Element":
        if not isinstance(other, Element):
            raise TypeError(f"expected Element, got {type(other).__name__}")
        if other.universe != self.universe:
            raise ValueError("elements live in different universes")
        return other

    def join(self, other: "Element") -> "Element":
        return Element(self.universe, self.bits | self._same_universe(other).bits)

    def meet(self, other: "Element") -> "Element":
        return Element(self.universe, self.bits & self._same_universe(other).bits)

    def complement(self) -> "Element":
        return Element(self.universe, self.bits ^ self.universe.full_mask)

    def difference(self, other: "Element") -> "Element":
        return Element(self.universe, self.bits & ~self._same_universe(other).bits)

    __or__ = join
    __and__ = meet
    __sub__ = difference

    def __le__(self, other: "Element") -> bool:
        return self.bits & self._same_universe(other).bits == self.bits

    @property
    def is_zero(self) -> bool:
        return self.bits == 0

    @property
    def popcount(self) -> int:
        return bin(self.bits).count("1")

    def atoms(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def contains_atom(self, index: int) -> bool:
        return bool(self.bits >> index & 1)

    def __repr__(self) -> str:
        inner = ",".join(map(str, self.atoms()))
        return f"Element({{{inner}}}/{self.universe.atom_count})"


def _common_universe(elems: Sequence[Element]) -> AtomUniverse | None:
    universe = None
    for e in elems:
        if universe is None:
            universe = e.universe
        elif e.universe != universe:
            raise ValueError("elements live in different universes")
    return universe


def enumerate_elements(
    universe: AtomUniverse,
    predicate: Callable[[Element], bool] | None = None,
) -> Iterator[Element]:
    """All elements of the universe in ascending mask order, optionally filtered."""
    if universe.atom_count > ENUMERATION_LIMIT:
        raise ValueError(
            f"enumeration requires atom_count <= {ENUMERATION_LIMIT}, "
            f"got {universe.atom_count}"
        )
    for bits in range(1 << universe.atom_count):
        e = Element(universe, bits)
        if predicate is None or predicate(e):
            yield e


def is_antichain(
    sets: Sequence[Element],
) -> tuple[bool, tuple[Element, Element] | None]:
    """Whether all pairs meet to zero; returns a violating pair otherwise.

    Antichains live in the nonzero part of the algebra, so zero members and
    duplicates are rejected outright.
    """
    elems = list(sets)
    _common_universe(elems)
    if any(e.is_zero for e in elems):
        raise ValueError("antichains cannot contain the zero element")
    if len({e.bits for e in elems}) != len(elems):
        raise ValueError("antichains cannot contain duplicate elements")
    for i in range(len(elems)):
        bi = elems[i].bits
        for j in range(i + 1, len(elems)):
            if bi & elems[j].bits:
                return False, (elems[i], elems[j])
    return True, None


def inclusion_minimal(family: Iterable[Element]) -> list[Element]:
    """Inclusion-minimal members of a family, in ascending (popcount, bits) order."""
    minimal: list[Element] = []
    for e in sorted(family, key=lambda e: (e.popcount, e.bits)):
        eb = e.bits
        if not any(m.bits & eb == m.bits for m in minimal):
            minimal.append(e)
    return minimal


def max_antichain_size(within: Iterable[Element]) -> tuple[int, list[Element]]:
    """Exact maximum size of a pairwise-disjoint subfamily, with a witness.

    Any packing can replace a member by an inclusion-minimal member below it,
    so the search runs over minimal members only.  Branch and bound: greedy
    incumbent first, candidates in descending popcount order, pruned by the
    capacity bound free_atoms // smallest_remaining_popcount.  Exact, never
    heuristic.  Empty input gives (0, []).
    """
    family = sorted(set(within), key=lambda e: e.bits)
    if not family:
        return 0, []
    universe = _common_universe(family)
    assert universe is not None
    if any(e.is_zero for e in family):
        raise ValueError("families must consist of nonzero elements")

    minimal = inclusion_minimal(family)

    incumbent: list[Element] = []
    used = 0
    for e in minimal:  # already sorted ascending by popcount: packs tightly
        if not e.bits & used:
            incumbent.append(e)
            used |= e.bits

    order = sorted(minimal, key=lambda e: (-e.popcount, e.bits))
    masks = [e.bits for e in order]
    n = len(order)
    suffix_min_pop = [1 << 62] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix_min_pop[i] = min(suffix_min_pop[i + 1], order[i].popcount)

    best = list(incumbent)

    def descend(start: int, free: int, chosen: list[Element]) -> None:
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        free_atoms = bin(free).count("1")
        for j in range(start, n):
            if len(chosen) + free_atoms // suffix_min_pop[j] <= len(best):
                return
            mj = masks[j]
            if mj & free == mj:
                chosen.append(order[j])
                descend(j + 1, free & ~mj, chosen)
                chosen.pop()

    descend(0, universe.full_mask, [])
    return len(best), sorted(best, key=lambda e: e.bits)
