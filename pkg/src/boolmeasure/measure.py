"""Atom-weighted probability measures on finite Boolean set algebras."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import ENUMERATION_LIMIT, AtomUniverse, Element


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of an exhaustive axiom check; violations are readable strings."""

    ok: bool
    violations: tuple[str, ...]


_MAX_REPORTED = 50


def _coerce(w) -> Fraction:
    if isinstance(w, Fraction):
        return w
    if isinstance(w, int) and not isinstance(w, bool):
        return Fraction(w)
    raise ValueError(f"weights must be exact rationals, got {type(w).__name__}")


@dataclass(frozen=True)
class Measure:
    """Finitely additive probability measure given by nonnegative atom weights.

    The induced value of an element is the sum of the weights of its atoms,
    so additivity on disjoint elements holds by construction; the constructor
    enforces nonnegativity and an exact total of 1.
    """

    universe: AtomUniverse
    weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        ws = tuple(_coerce(w) for w in self.weights)
        object.__setattr__(self, "weights", ws)
        if len(ws) != self.universe.atom_count:
            raise ValueError("exactly one weight per atom is required")
        if any(w < 0 for w in ws):
            raise ValueError("weights must be nonnegative")
        if sum(ws) != 1:
            raise ValueError("weights must sum to exactly 1")

    @property
    def strictly_positive(self) -> bool:
        return all(w > 0 for w in self.weights)

    def value(self, a: Element) -> Fraction:
        if a.universe != self.universe:
            raise ValueError("element from a different universe")
        total = Fraction(0)
        for i in a.atoms():
            total += self.weights[i]
        return total


def measure_value_table(measure: Measure) -> list[Fraction]:
    """Values of every element, indexed by bitmask, built in one pass."""
    n = measure.universe.atom_count
    if n > ENUMERATION_LIMIT:
        raise ValueError("value tables require an enumerable universe")
    table = [Fraction(0)] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        table[mask] = table[mask ^ low] + measure.weights[low.bit_length() - 1]
    return table


def check_measure_axioms(
    measure: Measure, require_strictly_positive: bool = False
) -> AxiomReport:
    """Exhaustive oracle for the finite measure axioms.

    Checks normalization (value 0 at zero, 1 at the top), nonnegativity,
    monotonicity under inclusion, and additivity on every disjoint pair,
    over all elements of the universe.
    """
    n = measure.universe.atom_count
    table = measure_value_table(measure)
    full = (1 << n) - 1
    violations: list[str] = []

    def report(msg: str) -> None:
        if len(violations) < _MAX_REPORTED:
            violations.append(msg)
        elif len(violations) == _MAX_REPORTED:
            violations.append("... further violations truncated")

    if table[0] != 0:
        report(f"value at zero is {table[0]}, expected 0")
    if table[full] != 1:
        report(f"value at the top is {table[full]}, expected 1")
    for mask in range(1, full + 1):
        if table[mask] < 0:
            report(f"negative value {table[mask]} at mask 0x{mask:x}")
        if require_strictly_positive and table[mask] <= 0:
            report(f"value {table[mask]} at nonzero mask 0x{mask:x} is not positive")
    for mask in range(full + 1):
        rest = full ^ mask
        sub = rest
        while sub:
            union = mask | sub
            if table[union] != table[mask] + table[sub]:
                report(
                    f"additivity fails at 0x{mask:x} | 0x{sub:x}: "
                    f"{table[union]} != {table[mask]} + {table[sub]}"
                )
            if table[union] < table[mask]:
                report(f"monotonicity fails at 0x{mask:x} <= 0x{union:x}")
            sub = (sub - 1) & rest
    return AxiomReport(not violations, tuple(violations))
