"""Exact linear programming over rationals.

Two-phase primal simplex with Bland's anti-cycling rule, all arithmetic in
``fractions.Fraction``.  An ``optimal`` outcome is certified before being
returned: the primal and dual vectors are re-checked by substitution
(feasibility on both sides plus exactly equal objective values), which pins
strong duality and therefore exact complementary slackness.

Dual convention for ``maximize c.x``: a ``<=`` row has dual >= 0, a ``>=``
row has dual <= 0, an ``=`` row has a free dual, and the dual vector is
indexed by the caller's original constraint list.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

LESS_EQUAL = "<="
EQUAL = "="
GREATER_EQUAL = ">="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    raise TypeError(f"exact rational required, got {type(x).__name__}")


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    relation: str
    rhs: Fraction

    def __post_init__(self) -> None:
        if self.relation not in (LESS_EQUAL, EQUAL, GREATER_EQUAL):
            raise ValueError(f"unknown relation {self.relation!r}")


def constraint(coeffs: Iterable, relation: str, rhs) -> Constraint:
    return Constraint(tuple(_frac(c) for c in coeffs), relation, _frac(rhs))


@dataclass(frozen=True)
class LinearProgram:
    """Maximize ``objective . x`` subject to the constraints.

    ``nonneg[j]`` flags variable j as ``x_j >= 0``; unflagged variables are free.
    """

    objective: tuple[Fraction, ...]
    constraints: tuple[Constraint, ...]
    nonneg: tuple[bool, ...]

    def __post_init__(self) -> None:
        width = len(self.objective)
        if len(self.nonneg) != width:
            raise ValueError("nonneg flags must match objective width")
        for con in self.constraints:
            if len(con.coeffs) != width:
                raise ValueError("constraint width differs from objective width")


def linear_program(
    objective: Iterable,
    constraints: Iterable,
    nonneg: Iterable[bool] | None = None,
) -> LinearProgram:
    obj = tuple(_frac(c) for c in objective)
    cons = tuple(
        c if isinstance(c, Constraint) else constraint(*c) for c in constraints
    )
    flags = (True,) * len(obj) if nonneg is None else tuple(bool(f) for f in nonneg)
    return LinearProgram(obj, cons, flags)


@dataclass(frozen=True)
class LpOutcome:
    status: str
    value: Fraction | None
    primal: tuple[Fraction, ...] | None
    dual: tuple[Fraction, ...] | None


def _pivot(T: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    pr = T[row]
    pv = pr[col]
    if pv != 1:
        for idx in range(len(pr)):
            if pr[idx]:
                pr[idx] /= pv
    for r in range(len(T)):
        if r == row:
            continue
        tr = T[r]
        f = tr[col]
        if f:
            for idx in range(len(pr)):
                if pr[idx]:
                    tr[idx] -= f * pr[idx]
    basis[row] = col


def _simplex(
    T: list[list[Fraction]],
    basis: list[int],
    costs: list[Fraction],
    blocked: frozenset[int],
) -> str:
    m = len(T)
    ncols = len(T[0]) - 1
    while True:
        cb = [costs[b] for b in basis]
        entering = -1
        for j in range(ncols):  # Bland: smallest improving column index
            if j in blocked:
                continue
            rc = costs[j]
            for r in range(m):
                a = T[r][j]
                if a:
                    rc -= cb[r] * a
            if rc > 0:
                entering = j
                break
        if entering < 0:
            return OPTIMAL
        leaving = -1
        best = None
        for r in range(m):
            a = T[r][entering]
            if a > 0:
                ratio = T[r][-1] / a
                if (
                    best is None
                    or ratio < best
                    or (ratio == best and basis[r] < basis[leaving])
                ):
                    best = ratio
                    leaving = r
        if leaving < 0:
            return UNBOUNDED
        _pivot(T, basis, leaving, entering)


def _expel_artificials(
    T: list[list[Fraction]], basis: list[int], artificial: frozenset[int]
) -> None:
    # After a zero-valued phase 1, basic artificials sit at rhs 0; pivot them
    # out on any non-artificial column (the zero rhs keeps feasibility for any
    # pivot sign).  A row with no such column is redundant and stays inert:
    # all its non-artificial entries are zero, so later pivots never change it.
    for r in range(len(T)):
        if basis[r] in artificial:
            row = T[r]
            for j in range(len(row) - 1):
                if j not in artificial and row[j]:
                    _pivot(T, basis, r, j)
                    break


def _basis_duals(
    original_columns: list[list[Fraction]], basis: list[int], costs: list[Fraction]
) -> list[Fraction]:
    """Solve y^T B = c_B^T exactly for the final basis B."""
    m = len(original_columns)
    rows = [
        [original_columns[r][basis[k]] for r in range(m)] + [costs[basis[k]]]
        for k in range(m)
    ]
    # Gaussian elimination; the basis matrix of a terminal tableau is invertible.
    for col in range(m):
        piv = next((r for r in range(col, m) if rows[r][col]), None)
        if piv is None:
            raise RuntimeError("internal: singular basis matrix")
        rows[col], rows[piv] = rows[piv], rows[col]
        pr = rows[col]
        pv = pr[col]
        if pv != 1:
            for idx in range(col, m + 1):
                if pr[idx]:
                    pr[idx] /= pv
        for r in range(m):
            if r != col and rows[r][col]:
                f = rows[r][col]
                for idx in range(col, m + 1):
                    if pr[idx]:
                        rows[r][idx] -= f * pr[idx]
    return [rows[r][m] for r in range(m)]


def _verify_certificates(
    lp: LinearProgram,
    primal: Sequence[Fraction],
    dual: Sequence[Fraction],
    value: Fraction,
) -> None:
    nvars = len(lp.objective)
    for j in range(nvars):
        if lp.nonneg[j] and primal[j] < 0:
            raise RuntimeError("internal: primal certificate violates a sign bound")
    for i, con in enumerate(lp.constraints):
        lhs = sum(
            (con.coeffs[j] * primal[j] for j in range(nvars) if con.coeffs[j]), _ZERO
        )
        if con.relation == LESS_EQUAL and lhs > con.rhs:
            raise RuntimeError("internal: primal certificate infeasible")
        if con.relation == GREATER_EQUAL and lhs < con.rhs:
            raise RuntimeError("internal: primal certificate infeasible")
        if con.relation == EQUAL and lhs != con.rhs:
            raise RuntimeError("internal: primal certificate infeasible")
        if con.relation == LESS_EQUAL and dual[i] < 0:
            raise RuntimeError("internal: dual certificate violates a sign condition")
        if con.relation == GREATER_EQUAL and dual[i] > 0:
            raise RuntimeError("internal: dual certificate violates a sign condition")
    for j in range(nvars):
        reduced = (
            sum(
                (
                    dual[i] * con.coeffs[j]
                    for i, con in enumerate(lp.constraints)
                    if con.coeffs[j]
                ),
                _ZERO,
            )
            - lp.objective[j]
        )
        if lp.nonneg[j]:
            if reduced < 0:
                raise RuntimeError("internal: dual certificate infeasible")
        elif reduced != 0:
            raise RuntimeError("internal: dual certificate infeasible")
    primal_value = sum(
        (lp.objective[j] * primal[j] for j in range(nvars) if lp.objective[j]), _ZERO
    )
    dual_value = sum(
        (dual[i] * con.rhs for i, con in enumerate(lp.constraints) if con.rhs), _ZERO
    )
    if primal_value != value or dual_value != value:
        raise RuntimeError("internal: strong duality certificate failed")


def solve(lp: LinearProgram) -> LpOutcome:
    """Exact optimum with verified primal and dual certificates.

    Returns status ``optimal`` with value, primal, and dual; or ``infeasible``
    / ``unbounded`` with the vectors absent.
    """
    nvars = len(lp.objective)
    m = len(lp.constraints)

    # Column layout: expanded decision variables (free vars split into x+ - x-),
    # then slacks, surpluses, artificials.
    col_var: list[tuple[int, int]] = []
    for j in range(nvars):
        col_var.append((j, 1))
        if not lp.nonneg[j]:
            col_var.append((j, -1))
    ndec = len(col_var)

    flipped = [con.rhs < 0 for con in lp.constraints]
    relations: list[str] = []
    row_coeffs: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for i, con in enumerate(lp.constraints):
        sign = -1 if flipped[i] else 1
        row_coeffs.append([sign * con.coeffs[v] * s for (v, s) in col_var])
        rel = con.relation
        if flipped[i] and rel != EQUAL:
            rel = GREATER_EQUAL if rel == LESS_EQUAL else LESS_EQUAL
        relations.append(rel)
        rhs.append(sign * con.rhs)

    nslack = sum(1 for r in relations if r == LESS_EQUAL)
    nsurp = sum(1 for r in relations if r == GREATER_EQUAL)
    nart = sum(1 for r in relations if r in (GREATER_EQUAL, EQUAL))
    ncols = ndec + nslack + nsurp + nart
    artificial = frozenset(range(ndec + nslack + nsurp, ncols))

    T: list[list[Fraction]] = []
    basis: list[int] = []
    si = ndec
    ui = ndec + nslack
    ai = ndec + nslack + nsurp
    for i in range(m):
        row = row_coeffs[i] + [_ZERO] * (ncols - ndec) + [rhs[i]]
        if relations[i] == LESS_EQUAL:
            row[si] = _ONE
            basis.append(si)
            si += 1
        elif relations[i] == GREATER_EQUAL:
            row[ui] = -_ONE
            row[ai] = _ONE
            basis.append(ai)
            ui += 1
            ai += 1
        else:
            row[ai] = _ONE
            basis.append(ai)
            ai += 1
        T.append(row)

    original_columns = [row[:ncols] for row in T]

    if artificial:
        costs1 = [_ZERO] * ncols
        for j in artificial:
            costs1[j] = -_ONE
        status = _simplex(T, basis, costs1, blocked=frozenset())
        if status != OPTIMAL:  # phase-1 objective is bounded above by zero
            raise RuntimeError("internal: phase 1 reported unbounded")
        value1 = sum((costs1[basis[r]] * T[r][-1] for r in range(m)), _ZERO)
        if value1 != 0:
            return LpOutcome(INFEASIBLE, None, None, None)
        _expel_artificials(T, basis, artificial)

    costs2 = [_ZERO] * ncols
    for c, (v, s) in enumerate(col_var):
        costs2[c] = s * lp.objective[v]
    status = _simplex(T, basis, costs2, blocked=artificial)
    if status == UNBOUNDED:
        return LpOutcome(UNBOUNDED, None, None, None)

    x_std = [_ZERO] * ncols
    for r in range(m):
        x_std[basis[r]] = T[r][-1]
    primal = [_ZERO] * nvars
    for c, (v, s) in enumerate(col_var):
        if x_std[c]:
            primal[v] += x_std[c] if s == 1 else -x_std[c]
    value = sum(
        (lp.objective[j] * primal[j] for j in range(nvars) if lp.objective[j]), _ZERO
    )

    y = _basis_duals(original_columns, basis, costs2)
    dual = [-y[i] if flipped[i] else y[i] for i in range(m)]

    _verify_certificates(lp, primal, dual, value)
    return LpOutcome(OPTIMAL, value, tuple(primal), tuple(dual))
