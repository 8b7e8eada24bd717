"""Exact rational LP feasibility via a sparse phase-1 simplex.

Finds x >= 0 with A x = b in Fraction arithmetic, or reports infeasibility
with a certificate vector y satisfying y.A <= 0 and y.b > 0.  Pivots follow
the lowest-index rule on both the entering column and the leaving row, so the
procedure terminates and is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)

SparseCol = Mapping[int, Fraction]  # row index -> coefficient


@dataclass
class FeasibilityResult:
    feasible: bool
    solution: dict[int, Fraction] | None  # column index -> value (feasible case)
    farkas: dict[int, Fraction] | None  # row index -> multiplier (infeasible case)


def solve_feasibility(
    columns: Sequence[SparseCol], rhs: Mapping[int, Fraction], n_rows: int
) -> FeasibilityResult:
    """Phase-1 simplex on {x >= 0 : sum_j columns[j] * x_j = rhs}."""
    n_cols = len(columns)
    # rows as sparse dicts over column indices; artificial j gets index n_cols + i
    rows: list[dict[int, Fraction]] = []
    b: list[Fraction] = []
    for i in range(n_rows):
        bi = Fraction(rhs.get(i, 0))
        row: dict[int, Fraction] = {}
        for j, col in enumerate(columns):
            a = col.get(i)
            if a:
                row[j] = Fraction(a)
        if bi < 0:
            bi = -bi
            row = {j: -a for j, a in row.items()}
            row[n_cols + i] = ONE
            rows.append(row)
            b.append(bi)
        else:
            row[n_cols + i] = ONE
            rows.append(row)
            b.append(bi)
    basis = [n_cols + i for i in range(n_rows)]
    # reduced-cost row for minimizing the artificial sum: obj[j] = c_j - z_j
    obj: dict[int, Fraction] = {}
    for row in rows:
        for j, a in row.items():
            if j < n_cols:
                obj[j] = obj.get(j, ZERO) - a
    obj = {j: v for j, v in obj.items() if v}
    obj_value = sum(b, ZERO)

    while True:
        entering = None
        for j in sorted(obj):
            if j < n_cols and obj[j] < 0:
                entering = j
                break
        if entering is None:
            break
        leaving = None
        best = None
        for i, row in enumerate(rows):
            a = row.get(entering)
            if a and a > 0:
                ratio = b[i] / a
                key = (ratio, basis[i])
                if best is None or key < best:
                    best = key
                    leaving = i
        if leaving is None:
            # the artificial objective is bounded below by 0, so this cannot
            # happen for well-formed input; guard anyway
            raise RuntimeError("phase-1 simplex became unbounded")
        pivot = rows[leaving][entering]
        prow = {j: a / pivot for j, a in rows[leaving].items()}
        pb = b[leaving] / pivot
        rows[leaving] = prow
        b[leaving] = pb
        basis[leaving] = entering
        for i, row in enumerate(rows):
            if i == leaving:
                continue
            factor = row.get(entering)
            if not factor:
                continue
            for j, a in prow.items():
                new = row.get(j, ZERO) - factor * a
                if new:
                    row[j] = new
                else:
                    row.pop(j, None)
            b[i] -= factor * pb
        factor = obj.get(entering)
        if factor:
            for j, a in prow.items():
                new = obj.get(j, ZERO) - factor * a
                if new:
                    obj[j] = new
                else:
                    obj.pop(j, None)
            obj_value += factor * pb

    if obj_value == 0:
        solution: dict[int, Fraction] = {}
        for i, j in enumerate(basis):
            if j < n_cols and b[i]:
                solution[j] = b[i]
        return FeasibilityResult(feasible=True, solution=solution, farkas=None)
    # infeasible: dual multipliers from the reduced costs at artificial columns
    farkas: dict[int, Fraction] = {}
    for i in range(n_rows):
        y = ONE - obj.get(n_cols + i, ZERO)
        # undo the sign flip applied to rows with negative rhs
        if rhs.get(i, ZERO) < 0:
            y = -y
        if y:
            farkas[i] = y
    return FeasibilityResult(feasible=False, solution=None, farkas=farkas)
