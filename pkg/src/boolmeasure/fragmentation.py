"""Fragmentations of finite Boolean set algebras and the Balcar-Jech submeasure.

A fragmentation is an increasing chain C_1 <= ... <= C_N of upward-closed
subsets of the nonzero elements whose union exhausts them.  It is stored as
the map sending each nonzero element to the least level containing it, so
C_n = {a : level(a) <= n} and C_N covers everything.

A fragmentation is *graded* when a union lying in C_n forces one of the parts
into C_{n+1}.  Gradedness is what makes the Balcar-Jech submeasure
construction subadditive: writing U_n for the complement of C_n, it is
exactly the statement U_{n+1} v U_{n+1} <= U_n, where X v Y is the set of
pairwise unions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .algebra import (
    ENUMERATION_LIMIT,
    AtomUniverse,
    Element,
    max_antichain_size,
)
from .measure import AxiomReport, Measure, measure_value_table
from .rng import SplitMix64

_MAX_REPORTED = 50


class NotGradedError(ValueError):
    """Raised when a construction requires gradedness and the input lacks it."""

    def __init__(self, witness: tuple[int, Element, Element]) -> None:
        n, a, b = witness
        super().__init__(
            f"fragmentation is not graded: the union of {a!r} and {b!r} has "
            f"level {n} but neither part has level <= {n + 1}"
        )
        self.witness = witness


@dataclass(frozen=True)
class Fragmentation:
    """Level map of a fragmentation: element -> least level containing it."""

    universe: AtomUniverse
    depth: int
    level: dict[Element, int]

    def __post_init__(self) -> None:
        if not isinstance(self.depth, int) or self.depth < 1:
            raise ValueError("depth must be a positive integer")
        levels = dict(self.level)
        object.__setattr__(self, "level", levels)
        for e, n in levels.items():
            if not isinstance(e, Element) or e.universe != self.universe:
                raise ValueError("level map keys must be elements of the universe")
            if e.is_zero:
                raise ValueError("the zero element has no level")
            if not isinstance(n, int) or not 1 <= n <= self.depth:
                raise ValueError(f"level {n!r} outside 1..{self.depth}")

    def level_of(self, a: Element) -> int:
        try:
            return self.level[a]
        except KeyError:
            raise ValueError(f"{a!r} is not covered by the fragmentation") from None

    def members_at_most(self, n: int) -> list[Element]:
        """The level set C_n, sorted by mask."""
        return sorted(
            (e for e, lvl in self.level.items() if lvl <= n), key=lambda e: e.bits
        )


@dataclass(frozen=True)
class FragmentationReport:
    """All coverage and upward-closure violations found by ``validate``."""

    ok: bool
    coverage_violations: tuple[Element, ...]
    closure_violations: tuple[tuple[Element, Element], ...]


def validate(
    frag: Fragmentation, samples: int = 20000, seed: int = 0
) -> FragmentationReport:
    """Check coverage of every nonzero element and upward closure of levels.

    Exhaustive up to the enumeration limit; above it the same checks run on a
    deterministic random sample of elements and subset pairs.
    """
    memo = getattr(frag, "_validate_memo", None)
    if memo is not None:
        return memo

    universe = frag.universe
    atoms = universe.atom_count
    level_by_bits = {e.bits: n for e, n in frag.level.items()}
    coverage: list[Element] = []
    closure: list[tuple[Element, Element]] = []

    if atoms <= ENUMERATION_LIMIT:
        for mask in range(1, universe.full_mask + 1):
            if mask not in level_by_bits:
                coverage.append(Element(universe, mask))
        for mask in sorted(level_by_bits):
            nb = level_by_bits[mask]
            sub = (mask - 1) & mask
            while sub:
                na = level_by_bits.get(sub)
                if na is not None and nb > na:
                    closure.append((Element(universe, sub), Element(universe, mask)))
                sub = (sub - 1) & mask
    else:
        rng = SplitMix64(seed)
        keys = sorted(level_by_bits)
        for _ in range(samples):
            mask = 1 + rng.below(universe.full_mask)
            if mask not in level_by_bits:
                coverage.append(Element(universe, mask))
        for _ in range(samples):
            mask = keys[rng.below(len(keys))]
            if mask.bit_count() < 2:
                continue
            sub = mask & rng.next_u64()
            if sub in (0, mask):
                continue
            na = level_by_bits.get(sub)
            if na is not None and level_by_bits[mask] > na:
                closure.append((Element(universe, sub), Element(universe, mask)))

    report = FragmentationReport(
        not coverage and not closure,
        tuple(coverage[:_MAX_REPORTED]),
        tuple(closure[:_MAX_REPORTED]),
    )
    if samples == 20000 and seed == 0:
        object.__setattr__(frag, "_validate_memo", report)
    return report


def _require_valid(frag: Fragmentation) -> None:
    report = validate(frag)
    if not report.ok:
        raise ValueError(
            f"invalid fragmentation: {len(report.coverage_violations)} coverage and "
            f"{len(report.closure_violations)} upward-closure violations"
        )


def is_graded(
    frag: Fragmentation,
) -> tuple[bool, tuple[int, Element, Element] | None]:
    """Whether every union in C_n has a part in C_{n+1}; witness otherwise.

    The top level is capped: C_{N+1} is taken to be C_N, the whole nonzero
    algebra, so only unions at levels n <= N - 2 can fail.

    Only disjoint two-part splits are checked, which is complete: for an
    overlapping union c = a | b, the disjoint split c = a | (b - a) yields a
    part in C_{n+1}, and upward closure lifts b - a to b; if instead b <= a,
    then a = c is itself in C_n <= C_{n+1}.
    """
    memo = getattr(frag, "_graded_memo", None)
    if memo is not None:
        return memo
    _require_valid(frag)
    universe = frag.universe
    if universe.atom_count > ENUMERATION_LIMIT:
        raise ValueError("gradedness check requires an enumerable universe")
    level_by_bits = {e.bits: n for e, n in frag.level.items()}
    result: tuple[bool, tuple[int, Element, Element] | None] = (True, None)
    for mask in sorted(level_by_bits):
        n = level_by_bits[mask]
        if n >= frag.depth - 1:
            continue
        sub = (mask - 1) & mask
        while sub:
            rest = mask ^ sub
            if sub < rest:  # each unordered split once
                if level_by_bits[sub] > n + 1 and level_by_bits[rest] > n + 1:
                    result = (
                        False,
                        (n, Element(universe, sub), Element(universe, rest)),
                    )
                    break
            sub = (sub - 1) & mask
        if not result[0]:
            break
    object.__setattr__(frag, "_graded_memo", result)
    return result


def antichain_bounds(frag: Fragmentation) -> list[int]:
    """Exact maximum antichain size K_n of every level set C_1 .. C_N."""
    _require_valid(frag)
    return [
        max_antichain_size(frag.members_at_most(n))[0]
        for n in range(1, frag.depth + 1)
    ]


def from_measure(measure: Measure) -> Fragmentation:
    """The dyadic fragmentation of a strictly positive measure.

    level(a) is the least n with m(a) >= 1/2**n; the depth is the level of
    the lightest atom.
    """
    if not measure.strictly_positive:
        raise ValueError(
            "dyadic fragmentations require a strictly positive measure: "
            "a null element would never reach any level"
        )
    universe = measure.universe
    table = measure_value_table(measure)
    levels: dict[Element, int] = {}
    depth = 1
    for mask in range(1, universe.full_mask + 1):
        v = table[mask]
        n = 1
        while v.numerator << n < v.denominator:  # v < 1/2**n
            n += 1
        levels[Element(universe, mask)] = n
        if n > depth:
            depth = n
    return Fragmentation(universe, depth, levels)


@dataclass(frozen=True)
class SubmeasureTable:
    """Submeasure values for every element of the universe."""

    universe: AtomUniverse
    values: dict[Element, Fraction]

    def value(self, a: Element) -> Fraction:
        try:
            return self.values[a]
        except KeyError:
            raise ValueError(f"{a!r} has no table entry") from None

    def items_sorted(self) -> Iterator[tuple[Element, Fraction]]:
        for e in sorted(self.values, key=lambda e: e.bits):
            yield e, self.values[e]


def balcar_jech_submeasure(frag: Fragmentation) -> SubmeasureTable:
    """Submeasure of a graded fragmentation via optimal level decompositions.

    With U_n the complement of C_n, an element a is assigned the least
    r = sum of 1/2**n_i over strictly increasing levels 0 < n_1 < ... < n_k
    such that a is a union of pieces x_i in U_{n_i}; elements with no such
    decomposition get 1, and zero gets 0 (it lies in every U_n).  Since the
    U_n are downward closed, pieces can be confined to the uncovered
    remainder, which gives the exact dynamic program below: states are
    (remaining subset, smallest usable level), costs are integer multiples of
    1/2**N.  Gradedness is required - without it the result need not be
    subadditive - and non-graded input is refused.
    """
    _require_valid(frag)
    graded, witness = is_graded(frag)
    if not graded:
        assert witness is not None
        raise NotGradedError(witness)

    universe = frag.universe
    atoms = universe.atom_count
    if atoms > ENUMERATION_LIMIT:
        raise ValueError("submeasure tables require an enumerable universe")
    depth = frag.depth
    size = 1 << atoms
    level_arr = [0] * size
    for e, n in frag.level.items():
        level_arr[e.bits] = n

    INF = 1 << 62
    f_next = [INF] * size
    f_next[0] = 0
    for n in range(depth, 0, -1):
        w = 1 << (depth - n)  # cost of level n, scaled by 2**depth
        f_cur = list(f_next)
        for mask in range(1, size):
            best = f_cur[mask]
            sub = mask
            while sub:
                if level_arr[sub] > n:  # piece lies in U_n
                    cand = w + f_next[mask ^ sub]
                    if cand < best:
                        best = cand
                sub = (sub - 1) & mask
            f_cur[mask] = best
        f_next = f_cur

    den = 1 << depth
    values = {universe.zero(): Fraction(0)}
    for mask in range(1, size):
        cost = f_next[mask]
        values[Element(universe, mask)] = (
            Fraction(cost, den) if cost < INF else Fraction(1)
        )
    return SubmeasureTable(universe, values)


def check_submeasure_axioms(table: SubmeasureTable) -> AxiomReport:
    """Exhaustive submeasure axiom check: normalization and positivity,
    monotonicity, and subadditivity over every pair of elements."""
    universe = table.universe
    atoms = universe.atom_count
    size = 1 << atoms
    violations: list[str] = []

    def report(msg: str) -> None:
        if len(violations) < _MAX_REPORTED:
            violations.append(msg)
        elif len(violations) == _MAX_REPORTED:
            violations.append("... further violations truncated")

    vals: list[Fraction | None] = [None] * size
    for e, v in table.values.items():
        vals[e.bits] = v
    for mask in range(size):
        if vals[mask] is None:
            report(f"missing table entry for mask 0x{mask:x}")
    if any(v is None for v in vals):
        return AxiomReport(False, tuple(violations))

    # All values share one denominator, so the pair sweeps run on integers.
    den = 1
    for v in vals:
        den = math.lcm(den, v.denominator)
    iv = [int(v * den) for v in vals]

    if iv[0] != 0:
        report(f"value at zero is {vals[0]}, expected 0")
    for mask in range(1, size):
        if iv[mask] <= 0:
            report(f"value {vals[mask]} at nonzero mask 0x{mask:x} is not positive")
    if iv[size - 1] > den:
        report(f"value at the top is {vals[size - 1]}, expected <= 1")
    for mask in range(1, size):
        m = mask
        while m:
            low = m & -m
            if iv[mask ^ low] > iv[mask]:
                report(f"monotonicity fails at 0x{mask ^ low:x} <= 0x{mask:x}")
            m ^= low
    for a in range(size):
        va = iv[a]
        for b in range(size):
            if iv[a | b] > va + iv[b]:
                report(
                    f"subadditivity fails at 0x{a:x}, 0x{b:x}: "
                    f"{vals[a | b]} > {vals[a]} + {vals[b]}"
                )
                break
    return AxiomReport(not violations, tuple(violations))
