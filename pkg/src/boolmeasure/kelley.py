"""Intersection numbers, Kelley measures, and measures built from fragmentations.

For a family C of nonzero elements, a finite sequence s = (c_1, ..., c_n)
drawn from C (repeats allowed) has kappa_s = k/n, where k is the size of the
largest subfamily with nonempty meet; the intersection number kappa(C) is the
infimum of kappa_s over all such sequences.  On an atomic algebra a subfamily
has nonempty meet exactly when some atom lies in every member, so k is the
largest atom multiplicity of the sequence.

Kelley's theorem pairs kappa(C) with a finitely additive measure m satisfying
m(c) >= kappa(C) for all c in C.  Both directions come out of one exact LP,
maximize t subject to m(c) >= t for c in C and total weight 1: the optimal
atom weights are the measure, and scaling an optimal dual vector to a common
denominator produces a sequence whose kappa_s equals the LP value exactly, so
the infimum is attained and certified rather than approximated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .algebra import AtomUniverse, Element, _common_universe, inclusion_minimal
from .fragmentation import Fragmentation, validate
from .lp import EQUAL, LESS_EQUAL, OPTIMAL, LinearProgram, constraint, solve
from .measure import Measure

#: Witness sequences longer than this are not materialized (their kappa_s
#: still is, exactly, from the dual weights).
WITNESS_LENGTH_CAP = 10_000

_INITIAL_ROWS = 32
_ROWS_PER_ROUND = 16


@dataclass(frozen=True)
class SequenceKappa:
    """kappa_s of one sequence: largest intersecting subfamily size over length."""

    sequence: tuple[Element, ...]
    n: int
    k: int
    kappa_s: Fraction


@dataclass(frozen=True)
class KappaResult:
    """Intersection number with both certificates.

    ``kelley_measure`` satisfies m(c) >= kappa for every input set;
    ``optimal_weights`` is a probability distribution on the family whose
    scaled copies form ``witness_sequence``, a sequence achieving
    kappa_s = kappa exactly.  When the common denominator exceeds the length
    cap, the sequence is omitted and ``witness_capped`` is set, but
    ``witness_kappa_s`` is still the exact kappa_s of that sequence.
    """

    kappa: Fraction
    kelley_measure: Measure
    optimal_weights: dict[Element, Fraction]
    witness_sequence: tuple[Element, ...] | None
    witness_kappa_s: Fraction
    witness_capped: bool


def kappa_of_sequence(s: Sequence[Element]) -> SequenceKappa:
    """kappa_s = k/n for a nonempty sequence of nonzero elements."""
    seq = tuple(s)
    if not seq:
        raise ValueError("kappa_s is undefined for the empty sequence")
    universe = _common_universe(seq)
    assert universe is not None
    if any(c.is_zero for c in seq):
        raise ValueError("sequences must consist of nonzero elements")
    counts = [0] * universe.atom_count
    for c in seq:
        for i in c.atoms():
            counts[i] += 1
    k = max(counts)
    return SequenceKappa(seq, len(seq), k, Fraction(k, len(seq)))


def _kelley_lp(universe: AtomUniverse, members: Sequence[Element]) -> LinearProgram:
    # variables: one weight per atom, then t; maximize t
    atoms = universe.atom_count
    objective = [Fraction(0)] * atoms + [Fraction(1)]
    rows = []
    for c in members:  # t - m(c) <= 0
        coeffs = [Fraction(0)] * (atoms + 1)
        for i in c.atoms():
            coeffs[i] = Fraction(-1)
        coeffs[atoms] = Fraction(1)
        rows.append(constraint(coeffs, LESS_EQUAL, 0))
    rows.append(
        constraint([Fraction(1)] * atoms + [Fraction(0)], EQUAL, 1)
    )
    return LinearProgram(tuple(objective), tuple(rows), (True,) * (atoms + 1))


def intersection_number(family: Iterable[Element]) -> KappaResult:
    """Exact intersection number of a family of nonzero elements.

    Constraints for sets above another member are implied by monotonicity, so
    the LP runs over the inclusion-minimal members, activated lazily: solve,
    find members whose measure falls below the current optimum, add them,
    repeat.  The final primal is checked against the whole family and the
    final dual (zero on never-activated sets) stays feasible, so the returned
    pair is a self-certifying optimum of the full program.
    """
    members = sorted(set(family), key=lambda e: e.bits)
    if not members:
        raise ValueError("the intersection number of an empty family is undefined")
    universe = _common_universe(members)
    assert universe is not None
    if any(c.is_zero for c in members):
        raise ValueError("families must consist of nonzero elements")
    atoms = universe.atom_count

    minimal = inclusion_minimal(members)
    active = list(minimal[:_INITIAL_ROWS])
    active_bits = {c.bits for c in active}
    while True:
        outcome = solve(_kelley_lp(universe, active))
        if outcome.status != OPTIMAL:
            raise RuntimeError("internal: the kappa program is always solvable")
        assert outcome.value is not None and outcome.primal is not None
        kappa = outcome.value
        weights = outcome.primal[:atoms]
        violated: list[tuple[Fraction, int, Element]] = []
        for c in minimal:
            if c.bits in active_bits:
                continue
            val = sum((weights[i] for i in c.atoms()), Fraction(0))
            if val < kappa:
                violated.append((val, c.bits, c))
        if not violated:
            break
        violated.sort(key=lambda t: (t[0], t[1]))
        for _, _, c in violated[:_ROWS_PER_ROUND]:
            active.append(c)
            active_bits.add(c.bits)

    kelley_measure = Measure(universe, tuple(weights))
    assert outcome.dual is not None
    set_weights: dict[Element, Fraction] = {c: Fraction(0) for c in members}
    for idx, c in enumerate(active):
        set_weights[c] = outcome.dual[idx]

    if any(w < 0 for w in set_weights.values()):
        raise RuntimeError("internal: negative dual weight")
    if sum(set_weights.values()) != 1:
        raise RuntimeError("internal: dual weights do not form a distribution")
    coverage = [Fraction(0)] * atoms
    for c, w in set_weights.items():
        if w:
            for i in c.atoms():
                coverage[i] += w
    witness_kappa_s = max(coverage)
    if witness_kappa_s != kappa:
        raise RuntimeError("internal: dual scaling does not attain kappa")
    for c in members:
        if kelley_measure.value(c) < kappa:
            raise RuntimeError("internal: Kelley measure misses the kappa bound")
    if kappa <= 0:
        raise RuntimeError("internal: kappa of a finite nonzero family is positive")

    denom = 1
    for w in set_weights.values():
        if w:
            denom = math.lcm(denom, w.denominator)
    if denom > WITNESS_LENGTH_CAP:
        witness: tuple[Element, ...] | None = None
        capped = True
    else:
        seq: list[Element] = []
        for c in sorted(set_weights, key=lambda e: e.bits):
            reps = set_weights[c] * denom
            seq.extend([c] * int(reps))
        witness = tuple(seq)
        capped = False
        if kappa_of_sequence(witness).kappa_s != kappa:
            raise RuntimeError("internal: materialized witness misses kappa")

    return KappaResult(
        kappa, kelley_measure, set_weights, witness, witness_kappa_s, capped
    )


def measure_from_fragmentation(frag: Fragmentation) -> Measure:
    """Strictly positive measure from a fragmentation's level measures.

    Each level set C_n gets its Kelley measure m_n; the combination
    (sum of m_n / 2**n) / (1 - 2**-N) is an exact probability measure, and it
    is strictly positive because every nonzero element sits in some C_n where
    m_n is at least the (positive) intersection number of that level.  An
    empty level contributes the uniform measure, keeping the total exact.
    """
    report = validate(frag)
    if not report.ok:
        raise ValueError(
            f"invalid fragmentation: {len(report.coverage_violations)} coverage and "
            f"{len(report.closure_violations)} upward-closure violations"
        )
    universe = frag.universe
    atoms = universe.atom_count
    acc = [Fraction(0)] * atoms
    uniform = Fraction(1, atoms)
    for n in range(1, frag.depth + 1):
        level_members = frag.members_at_most(n)
        if level_members:
            result = intersection_number(level_members)
            level_weights: Sequence[Fraction] = result.kelley_measure.weights
        else:
            level_weights = [uniform] * atoms
        factor = Fraction(1, 1 << n)
        for i in range(atoms):
            acc[i] += level_weights[i] * factor
    scale = 1 - Fraction(1, 1 << frag.depth)
    combined = Measure(universe, tuple(w / scale for w in acc))
    if not combined.strictly_positive:
        raise RuntimeError("internal: combined level measures must be positive")
    return combined
