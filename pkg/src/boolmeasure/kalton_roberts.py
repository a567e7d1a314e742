"""Kalton-Roberts combinatorics: triple families, Hall matchings, and the
positive-intersection-number bound for graded fragmentations.

Given an antichain bound K for a level set, choose k as the largest integer
with k/m < 1/(30*K**2) and p >= k as the largest with p/m < 1/K; then
p/k >= 20K >= 15m/p, which is the hypothesis of the triple-family lemma: a
uniformly random family of m three-point subsets of {1..p} is, with
probability at least 1 - Pi > 3/4, *good*, meaning every index set I with
|I| <= k has |union of A_i| > |I|.  Good families admit injective choice
functions on all such I (Hall), and feeding those back yields the bound
kappa(C_n) >= 1/(30*K**2) with K the antichain bound two levels up.

Family indices are 1-based throughout (the index set is M = {1, ..., m}),
matching the usual combinatorial convention; so are the ground points P.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Collection, Iterable, Sequence

from .algebra import Element, _common_universe
from .fragmentation import Fragmentation, NotGradedError, is_graded, max_antichain_size
from .kelley import intersection_number
from .rng import SplitMix64


@dataclass(frozen=True)
class KrParams:
    """Verified parameter choice (k, p) for index count m and antichain bound K."""

    m: int
    K: int
    k: int
    p: int


def choose_params(m: int, K: int) -> KrParams:
    """Largest k with k/m < 1/(30K^2) and largest p >= k with p/m < 1/K.

    Requires m >= 100*K**2.  That premise gives k >= 3 because
    3/m <= 3/(100K^2) < 1/(30K^2) (the inequality actually used is 90 < 100).
    The two chains p/k >= 20K and 15m/p <= 20K are re-verified exactly, so
    the lemma hypothesis p/k >= 15m/p holds by construction.
    """
    if K < 1:
        raise ValueError("the antichain bound K must be at least 1")
    if m < 100 * K * K:
        raise ValueError(f"m must be at least 100*K**2 = {100 * K * K}, got {m}")

    def largest_below(bound: Fraction) -> int:
        # largest integer strictly below a positive rational
        return (bound.numerator - 1) // bound.denominator

    k = largest_below(Fraction(m, 30 * K * K))
    p = largest_below(Fraction(m, K))
    if k < 3 or p < k or p > m:
        raise RuntimeError("internal: parameter scan broke its own guarantees")
    if not Fraction(k, m) < Fraction(1, 30 * K * K) <= Fraction(k + 1, m):
        raise RuntimeError("internal: k is not maximal")
    if not Fraction(p, m) < Fraction(1, K) <= Fraction(p + 1, m):
        raise RuntimeError("internal: p is not maximal")
    if Fraction(p, k) < 20 * K or 15 * Fraction(m, p) > 20 * K:
        raise RuntimeError("internal: chained parameter inequalities failed")
    if Fraction(p, k) < 15 * Fraction(m, p):
        raise RuntimeError("internal: lemma hypothesis failed")
    return KrParams(m, K, k, p)


@dataclass(frozen=True)
class PiBound:
    """Exact bad-family probability bound Pi with its comparison flags."""

    value: Fraction
    geometric_sum: Fraction
    hypothesis_holds: bool
    below_geometric: bool
    below_one: bool


def pi_bound(m: int, p: int, k: int) -> PiBound:
    """Pi = sum over n = 3..k of C(m,n) * C(p,n) * n**(3n) / p**(3n), exactly.

    Under the hypothesis p/k >= 15 m/p every summand is below (1/2)**n, so
    Pi < 1/4 - (1/2)**k < 1; the flags record both comparisons.
    """
    if not 3 <= k <= p <= m:
        raise ValueError("parameters must satisfy 3 <= k <= p <= m")
    total = Fraction(0)
    for n in range(3, k + 1):
        total += Fraction(
            math.comb(m, n) * math.comb(p, n) * n ** (3 * n), p ** (3 * n)
        )
    geometric = Fraction(1, 4) - Fraction(1, 1 << k)
    hypothesis = Fraction(p, k) >= 15 * Fraction(m, p)
    return PiBound(total, geometric, hypothesis, total < geometric, total < 1)


@dataclass(frozen=True)
class ThreeFamily:
    """Indexed family of m three-point subsets of {1..p}; index i is 1-based."""

    m: int
    p: int
    sets: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        if len(self.sets) != self.m:
            raise ValueError("exactly m member sets are required")
        for s in self.sets:
            if len(s) != 3 or not all(1 <= e <= self.p for e in s):
                raise ValueError("members must be 3-point subsets of 1..p")

    def set_of(self, index: int) -> frozenset[int]:
        if not 1 <= index <= self.m:
            raise ValueError(f"index {index} outside 1..{self.m}")
        return self.sets[index - 1]


def _unrank_3subset(rank: int, p: int) -> frozenset[int]:
    # combinatorial number system: rank = C(c3,3)+C(c2,2)+C(c1,1), c3>c2>c1>=0
    out = []
    r = rank
    for j in (3, 2, 1):
        v = j - 1
        while math.comb(v + 1, j) <= r:
            v += 1
        out.append(v + 1)  # 1-based ground point
        r -= math.comb(v, j)
    return frozenset(out)


def sample_three_family(m: int, p: int, seed: int) -> ThreeFamily:
    """m independent uniform draws from the C(p,3) three-point subsets of {1..p}."""
    if p < 3:
        raise ValueError("sampling requires p >= 3")
    if m < 1:
        raise ValueError("sampling requires m >= 1")
    rng = SplitMix64(seed)
    total = math.comb(p, 3)
    sets = tuple(_unrank_3subset(rng.below(total), p) for _ in range(m))
    return ThreeFamily(m, p, sets)


@dataclass(frozen=True)
class FamilyVerdict:
    """good, or bad with a 1-based witness I whose union is no larger than I."""

    good: bool
    witness: tuple[int, ...] | None
    witness_union_size: int | None


def verify_family(family: ThreeFamily, k: int) -> FamilyVerdict:
    """Exact decision: does some I with |I| <= k have |union of A_i| <= |I|?

    A family is bad iff some J, a union of member triples with |J| <= k,
    satisfies #{i : A_i <= J} >= |J|.  Why this is equivalent: a bad witness I
    yields J = union of its triples with |J| <= |I| <= k, every i in I counts
    toward J, and J is a union of the triples it contains; conversely |J| of
    the indices counted by such a J form a bad I.  The search walks unions of
    triples depth-first, pruning unions larger than k.  Index sets of size
    one or two are never bad (a triple has 3 > 1 points; two distinct triples
    cover at least 3 > 2), so only k >= 3 requires any search.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if k < 3:
        return FamilyVerdict(True, None, None)

    masks: list[int] = []
    for s in family.sets:
        mask = 0
        for e in s:
            mask |= 1 << (e - 1)
        masks.append(mask)
    distinct: dict[int, list[int]] = {}
    for i, mask in enumerate(masks):
        distinct.setdefault(mask, []).append(i + 1)
    triples = sorted(distinct)

    seen: set[int] = set()
    stack = sorted(triples, reverse=True)  # pop() explores low masks first
    while stack:
        union = stack.pop()
        if union in seen:
            continue
        seen.add(union)
        size = bin(union).count("1")
        count = 0
        for t, idxs in distinct.items():
            if t & union == t:
                count += len(idxs)
        if count >= size:
            witness: list[int] = []
            for i, mask in enumerate(masks):
                if mask & union == mask:
                    witness.append(i + 1)
                    if len(witness) == size:
                        break
            got = 0
            for i in witness:
                got |= masks[i - 1]
            union_size = bin(got).count("1")
            if union_size > len(witness):
                raise RuntimeError("internal: bad witness failed its own recheck")
            return FamilyVerdict(False, tuple(witness), union_size)
        for t in triples:
            if t & union != t:
                bigger = union | t
                if bin(bigger).count("1") <= k and bigger not in seen:
                    stack.append(bigger)
    return FamilyVerdict(True, None, None)


def kr_search(
    params: KrParams, seed: int, max_attempts: int = 64
) -> tuple[ThreeFamily, int]:
    """Sample-and-verify until a good family appears; returns (family, attempts).

    Pi < 1/4 under the verified parameters, so each attempt succeeds with
    probability above 3/4 and the expected attempt count is below 4/3.
    """
    if max_attempts < 1:
        raise ValueError("max_attempts must be at least 1")
    rng = SplitMix64(seed)
    for attempt in range(1, max_attempts + 1):
        family = sample_three_family(params.m, params.p, rng.next_u64())
        if verify_family(family, params.k).good:
            return family, attempt
    pi = pi_bound(params.m, params.p, params.k).value
    raise ValueError(
        f"no good family in {max_attempts} attempts (bad probability <= "
        f"{pi.numerator}/{pi.denominator} per attempt)"
    )


@dataclass(frozen=True)
class SdrResult:
    """Distinct representatives (1-based index -> element), or a Hall violator."""

    representatives: dict[int, int] | None
    violator: tuple[int, ...] | None
    violator_union: frozenset[int] | None


def hall_sdr(family: Sequence[Collection[int]]) -> SdrResult:
    """System of distinct representatives via augmenting-path matching.

    Hall's marriage theorem: an SDR exists iff every index set I has
    |union of A_i| >= |I|.  On failure the alternating-reachability set from
    an unmatched index is returned; its union is exactly one smaller than it,
    a certified violator (re-checked before returning).
    """
    sets = [sorted(s) for s in family]
    match: dict[int, int] = {}  # element -> 0-based set index

    def augment(i: int, banned: set[int]) -> bool:
        for e in sets[i]:
            if e in banned:
                continue
            banned.add(e)
            if e not in match or augment(match[e], banned):
                match[e] = i
                return True
        return False

    matched_sets: set[int] = set()
    for i in range(len(sets)):
        if augment(i, set()):
            matched_sets.add(i)
    matched_sets = set(match.values())

    if len(matched_sets) == len(sets):
        reps = {match[e] + 1: e for e in match}
        return SdrResult(dict(sorted(reps.items())), None, None)

    root = next(i for i in range(len(sets)) if i not in matched_sets)
    reach_sets = {root}
    reach_elems: set[int] = set()
    queue = [root]
    while queue:
        i = queue.pop(0)
        for e in sets[i]:
            if e not in reach_elems:
                reach_elems.add(e)
                j = match.get(e)
                if j is None:
                    raise RuntimeError("internal: augmenting path missed by matching")
                if j not in reach_sets:
                    reach_sets.add(j)
                    queue.append(j)
    violator = tuple(sorted(i + 1 for i in reach_sets))
    union: set[int] = set()
    for i in violator:
        union.update(sets[i - 1])
    if len(union) >= len(violator):
        raise RuntimeError("internal: Hall violator failed its own recheck")
    return SdrResult(None, violator, frozenset(union))


def partial_sdr_for_bounded_sets(
    family: ThreeFamily, k: int, indices: Iterable[int]
) -> dict[int, int]:
    """Injective choice f_I on a subfamily of a good family, |I| <= k.

    Goodness gives |union| > |I'| >= Hall's condition for every subset of I,
    so the matching always completes.
    """
    chosen = sorted(set(indices))
    if len(chosen) > k:
        raise ValueError(f"|I| = {len(chosen)} exceeds k = {k}")
    if not verify_family(family, k).good:
        raise ValueError("the family is bad; injective choices are not guaranteed")
    result = hall_sdr([family.set_of(i) for i in chosen])
    if result.representatives is None:
        raise RuntimeError("internal: a good family must satisfy Hall's condition")
    return {chosen[pos - 1]: e for pos, e in result.representatives.items()}


def coverage_witness(c_list: Sequence[Element]) -> tuple[int, tuple[int, ...]]:
    """Atom covered by the most members, with the 1-based index set J covering it.

    The partition cell b_J determined by J contains that atom, so it is
    nonempty by construction.  Ties break to the lowest atom index.
    """
    members = list(c_list)
    if not members:
        raise ValueError("coverage requires a nonempty list")
    universe = _common_universe(members)
    assert universe is not None
    if any(c.is_zero for c in members):
        raise ValueError("members must be nonzero")
    counts = [0] * universe.atom_count
    for c in members:
        for i in c.atoms():
            counts[i] += 1
    best_atom = max(range(universe.atom_count), key=lambda i: (counts[i], -i))
    J = tuple(
        i + 1 for i, c in enumerate(members) if c.contains_atom(best_atom)
    )
    return best_atom, J


@dataclass(frozen=True)
class Theorem41Report:
    """Intersection-number bound check for one level of a graded fragmentation."""

    level: int
    bound_level: int
    antichain_bound: int
    kappa: Fraction
    bound: Fraction
    holds: bool
    witness_atom: int
    witness_size: int
    sequence_length: int


def check_theorem41(
    frag: Fragmentation,
    n: int,
    c_list: Sequence[Element],
    bounds: Sequence[int] | None = None,
) -> Theorem41Report:
    """Check kappa(c_list) >= 1/(30*K**2) with K the antichain bound of
    C_{min(n+2, N)} (levels past the depth clamp to the top level).

    ``bounds`` may carry precomputed antichain bounds K_1..K_N; otherwise the
    needed one is computed here by exact search.  The report also records the
    coverage witness of the input repeated to length at least 100*K**2
    (repeating a sequence leaves kappa_s unchanged).
    """
    graded, witness = is_graded(frag)
    if not graded:
        assert witness is not None
        raise NotGradedError(witness)
    if not 1 <= n <= frag.depth:
        raise ValueError(f"level {n} outside 1..{frag.depth}")
    members = list(c_list)
    if not members:
        raise ValueError("c_list must be nonempty")
    for c in members:
        if frag.level_of(c) > n:
            raise ValueError(f"{c!r} is not in level set {n}")

    bound_level = min(n + 2, frag.depth)
    if bounds is not None:
        if len(bounds) != frag.depth:
            raise ValueError("bounds must carry one entry per level")
        K = bounds[bound_level - 1]
    else:
        K, _ = max_antichain_size(frag.members_at_most(bound_level))
    if K < 1:
        raise ValueError("the bound level has an empty level set")
    bound = Fraction(1, 30 * K * K)

    kappa = intersection_number(members).kappa
    holds = kappa >= bound

    reps = -(-100 * K * K // len(members))  # ceil
    repeated = members * reps
    atom, J = coverage_witness(repeated)
    return Theorem41Report(
        n, bound_level, K, kappa, bound, holds, atom, len(J), len(repeated)
    )
