"""The chained no-signaling polytope as an explicit constraint system:
exact extremality certificates and full vertex enumeration.

Membership is cut out by 2n row-normalization equalities, 2n marginal-
consistency (no-signaling) equalities, and 8n cell nonnegativity
inequalities in R^(8n).  The equality system has rank 4n, so the
polytope has dimension 4n, and a member is a vertex exactly when its
equalities plus *active* nonnegativity rows reach full rank 8n.

Vertex enumeration walks all ways of zeroing 4n cells (at most 3 per
row — a fully zeroed row cannot sum to 1), solves the equality system
restricted to the remaining cells, and keeps the nonnegative solutions.
Every vertex is found this way: its active system has rank 8n, so some
4n of its zero cells extend the equality rows to a basis, making the
restricted square system uniquely solvable.  The bulk filtering runs in
floating point (the restricted matrices have integer determinants, so
singularity detection at threshold 1/2 is exact); each surviving
candidate is then re-solved and verified in exact rational arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

import numpy as np

from . import exactlin
from .core import (
    CapacityError,
    DistributionMatrix,
    InvariantViolationError,
    Scenario,
    _setting_rows,
    require_member,
)

Kind = Literal["equality", "nonnegativity"]


@dataclass(frozen=True)
class ConstraintRow:
    """One constraint: ``coeffs . x = bound`` for equalities, or
    ``coeffs . x <= bound`` for nonnegativity rows (which are stored as
    ``-x_cell <= 0``)."""

    coeffs: tuple[Fraction, ...]
    bound: Fraction
    kind: Kind
    label: str


@dataclass(frozen=True)
class ConstraintSystem:
    scenario: Scenario
    rows: tuple[ConstraintRow, ...]

    def equalities(self) -> tuple[ConstraintRow, ...]:
        return tuple(r for r in self.rows if r.kind == "equality")

    def nonnegativities(self) -> tuple[ConstraintRow, ...]:
        return tuple(r for r in self.rows if r.kind == "nonnegativity")


def build_constraints(scenario: Scenario) -> ConstraintSystem:
    """The full constraint description of the no-signaling polytope.

    Row order: 2n normalizations, then no-signaling rows for Alice's
    settings and Bob's settings in ascending order, then one
    nonnegativity row per cell in row-major cell order.
    """
    ncells = scenario.num_cells
    labels = scenario.row_labels()
    rows: list[ConstraintRow] = []
    zero, one = Fraction(0), Fraction(1)
    for r in range(scenario.num_rows):
        coeffs = [zero] * ncells
        for c in range(4):
            coeffs[4 * r + c] = one
        rows.append(ConstraintRow(tuple(coeffs), one, "equality", f"normalization {labels[r]}"))
    alice, bob = _setting_rows(scenario)
    for side, items in (("a", alice), ("b", bob)):
        cols = (0, 1) if side == "a" else (0, 2)
        for setting, (first, second) in items:
            coeffs = [zero] * ncells
            for c in cols:
                coeffs[4 * first + c] += one
                coeffs[4 * second + c] -= one
            rows.append(
                ConstraintRow(
                    tuple(coeffs),
                    zero,
                    "equality",
                    f"no-signaling {side}{setting}",
                )
            )
    from .core import COLUMNS  # local import to avoid a cycle at module load

    for r in range(scenario.num_rows):
        for c in range(4):
            coeffs = [zero] * ncells
            coeffs[4 * r + c] = -one
            rows.append(
                ConstraintRow(
                    tuple(coeffs),
                    zero,
                    "nonnegativity",
                    f"cell ({labels[r]}, {COLUMNS[c]})",
                )
            )
    return ConstraintSystem(scenario, tuple(rows))


def rank_exact(rows: Sequence[Sequence[Fraction]]) -> int:
    """Exact rank of a coefficient matrix (thin wrapper for callers that
    assemble their own active systems)."""
    return exactlin.rank(rows)


def active_rows(
    system: ConstraintSystem, dm: DistributionMatrix
) -> list[ConstraintRow]:
    """All equality rows plus the nonnegativity rows tight at ``dm``."""
    cells = [v for row in dm.entries for v in row]
    active = list(system.equalities())
    for row in system.nonnegativities():
        value = sum((c * x for c, x in zip(row.coeffs, cells)), Fraction(0))
        if value == row.bound:
            active.append(row)
    return active


def is_extremal(dm: DistributionMatrix) -> bool:
    """Whether a polytope member is a vertex: active rank equals 8n."""
    require_member(dm, context="is_extremal")
    system = build_constraints(dm.scenario)
    rows = [r.coeffs for r in active_rows(system, dm)]
    return exactlin.rank(rows) == dm.scenario.num_cells


# ---------------------------------------------------------------------------
# Vertex enumeration
# ---------------------------------------------------------------------------


def _equality_matrix(scenario: Scenario) -> tuple[list[list[Fraction]], list[Fraction]]:
    system = build_constraints(scenario)
    eqs = system.equalities()
    return [list(r.coeffs) for r in eqs], [r.bound for r in eqs]


def _iter_zero_pattern_chunks(scenario: Scenario, chunk_size: int):
    """Yield arrays of zero-cell index rows: all ways to choose 4n zero
    cells with at most 3 per row, streamed in bounded-size chunks."""
    nrows = scenario.num_rows
    target = 4 * scenario.n
    per_row_options: list[list[tuple[int, ...]]] = []
    for r in range(nrows):
        base = range(4 * r, 4 * r + 4)
        options = []
        for size in range(4):
            options.extend(itertools.combinations(base, size))
        per_row_options.append(options)
    chosen: list[tuple[int, ...]] = []
    buffer: list[tuple[int, ...]] = []

    def walk(row: int, remaining: int):
        if row == nrows:
            if remaining == 0:
                buffer.append(tuple(itertools.chain.from_iterable(chosen)))
                if len(buffer) >= chunk_size:
                    yield np.asarray(buffer, dtype=np.int64)
                    buffer.clear()
            return
        max_rest = 3 * (nrows - row - 1)
        for option in per_row_options[row]:
            size = len(option)
            if size > remaining or remaining - size > max_rest:
                continue
            chosen.append(option)
            yield from walk(row + 1, remaining - size)
            chosen.pop()

    yield from walk(0, target)
    if buffer:
        yield np.asarray(buffer, dtype=np.int64)


def _float_feasible_candidates(
    scenario: Scenario, chunk_size: int = 50_000
) -> list[tuple[np.ndarray, np.ndarray]]:
    """(kept-cell index row, float solution) for every zero pattern whose
    restricted equality system is uniquely solvable with solution
    entrywise above -1e-6."""
    e_rows, e_rhs = _equality_matrix(scenario)
    E = np.asarray([[float(v) for v in row] for row in e_rows])
    rhs = np.asarray([float(v) for v in e_rhs])
    ncells = scenario.num_cells
    survivors: list[tuple[np.ndarray, np.ndarray]] = []
    for zeros in _iter_zero_pattern_chunks(scenario, chunk_size):
        batch = len(zeros)
        mask = np.ones((batch, ncells), dtype=bool)
        mask[np.arange(batch)[:, None], zeros] = False
        kept = np.nonzero(mask)[1].reshape(batch, ncells // 2)
        mats = E[:, kept].transpose(1, 0, 2)
        dets = np.linalg.det(mats)
        solvable = np.abs(dets) > 0.5  # integer determinants
        if not solvable.any():
            continue
        sols = np.linalg.solve(mats[solvable], rhs)
        feasible = (sols >= -1e-6).all(axis=1)
        for k_row, sol in zip(kept[solvable][feasible], sols[feasible]):
            survivors.append((k_row, sol))
    return survivors


def enumerate_vertices(
    scenario: Scenario, *, slow: bool = False
) -> tuple[DistributionMatrix, ...]:
    """All vertices of the chained no-signaling polytope, exactly.

    n=2 finishes in well under a second; n=3 visits about two million
    candidate zero patterns and must be requested explicitly with
    ``slow=True``.  Larger n is out of reach of this enumeration.
    """
    if scenario.n > 3:
        raise CapacityError(
            f"vertex enumeration supports n in {{2, 3}}, got n={scenario.n}"
        )
    if scenario.n == 3 and not slow:
        raise CapacityError(
            "n=3 enumeration takes minutes; pass slow=True to run it"
        )
    e_rows, e_rhs = _equality_matrix(scenario)
    ncells = scenario.num_cells
    seen_float: set[bytes] = set()
    unique_candidates: list[np.ndarray] = []
    for kept, sol in _float_feasible_candidates(scenario):
        full = np.zeros(ncells)
        full[kept] = sol
        key = np.round(full, 6).tobytes()
        if key not in seen_float:
            seen_float.add(key)
            unique_candidates.append(kept)
    vertices: dict[tuple, DistributionMatrix] = {}
    for kept in unique_candidates:
        kept_list = [int(k) for k in kept]
        matrix = [[row[k] for k in kept_list] for row in e_rows]
        sol = exactlin.solve_square(matrix, e_rhs)
        if sol is None:
            continue  # float filter let a singular system through
        if any(v < 0 for v in sol):
            continue  # exactly infeasible despite passing the float screen
        cells = [Fraction(0)] * ncells
        for k, v in zip(kept_list, sol):
            cells[k] = v
        entries = tuple(
            tuple(cells[4 * r : 4 * r + 4]) for r in range(scenario.num_rows)
        )
        dm = DistributionMatrix(scenario, entries)
        key = tuple(v for row in entries for v in row)
        if key not in vertices:
            vertices[key] = dm
    ordered = sorted(vertices.items(), key=lambda kv: kv[0])
    for _, dm in ordered:
        if not is_extremal(dm):
            raise InvariantViolationError(
                "enumeration produced a non-extremal member"
            )
    return tuple(dm for _, dm in ordered)
