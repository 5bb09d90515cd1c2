"""Exact rational linear algebra: rank, square solves, affine projection,
and a dense-tableau simplex with Bland's rule.

Everything takes and returns :class:`fractions.Fraction`; internally the
computations run on ``gmpy2.mpq`` when available (a drop-in rational type
that is considerably faster), falling back to ``Fraction`` otherwise.
Bland's anti-cycling rule makes every simplex run terminate, which keeps
feasibility answers exact yes/no decisions rather than numerical guesses.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .core import InvariantViolationError

try:  # pragma: no cover - exercised implicitly by every test run
    from gmpy2 import mpq as QQ
except ImportError:  # pragma: no cover
    QQ = Fraction

_QQ0 = QQ(0)
_QQ1 = QQ(1)


def _to_qq_matrix(rows: Sequence[Sequence[Fraction]]) -> list[list]:
    return [[QQ(v) for v in row] for row in rows]


def _to_fractions(values) -> list[Fraction]:
    # Building from plain ints matters: Fraction(mpq) keeps mpz components,
    # which gmpy2 then refuses to coerce back on a later round trip.
    return [Fraction(int(v.numerator), int(v.denominator)) for v in values]


# ---------------------------------------------------------------------------
# Gaussian elimination
# ---------------------------------------------------------------------------


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Exact rank of a matrix given as a sequence of rows."""
    m = _to_qq_matrix(rows)
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = _QQ1 / m[r][col]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [v - f * w for v, w in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def solve_square(
    matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]
) -> Optional[list[Fraction]]:
    """Solve a square system exactly; ``None`` if the matrix is singular."""
    n = len(matrix)
    if any(len(row) != n for row in matrix) or len(rhs) != n:
        raise InvariantViolationError("solve_square requires a square system")
    aug = [[QQ(v) for v in row] + [QQ(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = _QQ1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [v - f * w for v, w in zip(aug[i], aug[col])]
    return _to_fractions(row[-1] for row in aug)


def reduce_system(
    rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]
) -> Optional[tuple[list[list[Fraction]], list[Fraction]]]:
    """Row-reduce ``rows * x = rhs`` to an equivalent independent system.

    Returns ``None`` when the system is inconsistent.  The reduced system
    has full row rank and the same solution set as the input.
    """
    if not rows:
        return [], []
    aug = [[QQ(v) for v in row] + [QQ(b)] for row, b in zip(rows, rhs)]
    ncols = len(rows[0])
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(aug)) if aug[i][col] != 0), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = _QQ1 / aug[r][col]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [v - f * w for v, w in zip(aug[i], aug[r])]
        r += 1
        if r == len(aug):
            break
    for row in aug[r:]:
        if row[-1] != 0:
            return None
    kept = aug[:r]
    return (
        [_to_fractions(row[:-1]) for row in kept],
        _to_fractions(row[-1] for row in kept),
    )


def project_onto_affine(
    rows: Sequence[Sequence[Fraction]],
    rhs: Sequence[Fraction],
    point: Sequence[Fraction],
) -> list[Fraction]:
    """Exact least-squares projection of ``point`` onto ``{x : rows x = rhs}``.

    Computes ``x - E^T (E E^T)^{-1} (E x - rhs)`` after reducing ``E`` to
    full row rank, which is the unique minimum-Euclidean-adjustment point
    satisfying the equalities.
    """
    reduced = reduce_system(rows, rhs)
    if reduced is None:
        raise InvariantViolationError("projection target system is inconsistent")
    e_rows, e_rhs = reduced
    if not e_rows:
        return list(point)
    E = [[QQ(v) for v in row] for row in e_rows]
    x = [QQ(v) for v in point]
    residual = [
        sum((ev * xv for ev, xv in zip(row, x)), _QQ0) - QQ(b)
        for row, b in zip(E, e_rhs)
    ]
    gram = [
        [sum((u * v for u, v in zip(ri, rj)), _QQ0) for rj in E]
        for ri in E
    ]
    y = solve_square(gram, _to_fractions(residual))
    if y is None:
        raise InvariantViolationError("reduced system lost full row rank")
    yq = [QQ(v) for v in y]
    adjusted = list(x)
    for row, yv in zip(E, yq):
        for k, ev in enumerate(row):
            if ev != 0:
                adjusted[k] -= ev * yv
    return _to_fractions(adjusted)


# ---------------------------------------------------------------------------
# Simplex (Bland's rule)
# ---------------------------------------------------------------------------


def _pivot(tableau: list[list], z: list, basis: list[int], prow: int, pcol: int) -> None:
    piv = tableau[prow][pcol]
    inv = _QQ1 / piv
    tableau[prow] = [v * inv for v in tableau[prow]]
    prow_vals = tableau[prow]
    for i, row in enumerate(tableau):
        if i != prow and row[pcol] != 0:
            f = row[pcol]
            tableau[i] = [v - f * w for v, w in zip(row, prow_vals)]
    if z[pcol] != 0:
        f = z[pcol]
        z[:] = [v - f * w for v, w in zip(z, prow_vals)]
    basis[prow] = pcol


def _run(tableau: list[list], z: list, basis: list[int], ncols: int) -> None:
    """Minimize until no negative reduced cost remains (Bland's rule)."""
    while True:
        pcol = next((j for j in range(ncols) if z[j] < 0), None)
        if pcol is None:
            return
        prow = None
        best_ratio = None
        for i, row in enumerate(tableau):
            coeff = row[pcol]
            if coeff > 0:
                ratio = row[-1] / coeff
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[prow])
                ):
                    best_ratio = ratio
                    prow = i
        if prow is None:
            raise InvariantViolationError("linear program is unbounded")
        _pivot(tableau, z, basis, prow, pcol)


def _phase1(
    rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]
) -> Optional[tuple[list[list], list[int], int]]:
    """Find a basic feasible solution of ``rows x = rhs, x >= 0``.

    Returns ``(tableau, basis, nvars)`` with all artificial columns
    removed, or ``None`` when the system is infeasible.
    """
    reduced = reduce_system(rows, rhs)
    if reduced is None:
        return None
    e_rows, e_rhs = reduced
    m = len(e_rows)
    nvars = len(rows[0]) if rows else 0
    if m == 0:
        # No constraints beyond x >= 0: the origin is a basic solution.
        return [], [], nvars
    tableau = []
    for row, b in zip(e_rows, e_rhs):
        coeffs = [QQ(v) for v in row]
        bq = QQ(b)
        if bq < 0:
            coeffs = [-v for v in coeffs]
            bq = -bq
        tableau.append(coeffs + [_QQ0] * m + [bq])
    for i in range(m):
        tableau[i][nvars + i] = _QQ1
    basis = [nvars + i for i in range(m)]
    z = [_QQ0] * (nvars + m + 1)
    for i in range(m):
        z = [zv - tv for zv, tv in zip(z, tableau[i])]
    for j in range(nvars, nvars + m):
        z[j] += _QQ1
    _run(tableau, z, basis, nvars + m)
    if -z[-1] != 0:  # minimum of the artificial sum
        return None
    # Pivot any zero-level artificial out of the basis; the pre-reduction
    # to full row rank guarantees a real column is available.
    for i in range(m):
        if basis[i] >= nvars:
            pcol = next((j for j in range(nvars) if tableau[i][j] != 0), None)
            if pcol is None:
                raise InvariantViolationError(
                    "redundant row survived system reduction"
                )
            _pivot(tableau, z, basis, i, pcol)
    tableau = [row[:nvars] + [row[-1]] for row in tableau]
    return tableau, basis, nvars


def _extract(tableau: list[list], basis: list[int], nvars: int) -> list[Fraction]:
    x = [Fraction(0)] * nvars
    for i, j in enumerate(basis):
        v = tableau[i][-1]
        x[j] = Fraction(int(v.numerator), int(v.denominator))
    return x


def simplex_feasible(
    rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]
) -> Optional[list[Fraction]]:
    """One exact solution of ``rows x = rhs, x >= 0``, or ``None``."""
    result = _phase1(rows, rhs)
    if result is None:
        return None
    tableau, basis, nvars = result
    return _extract(tableau, basis, nvars)


def simplex_minimize(
    costs: Sequence[Fraction],
    rows: Sequence[Sequence[Fraction]],
    rhs: Sequence[Fraction],
) -> Optional[tuple[Fraction, list[Fraction]]]:
    """Exactly minimize ``costs . x`` subject to ``rows x = rhs, x >= 0``.

    Returns ``(optimal value, optimizer)``, or ``None`` when infeasible.
    """
    result = _phase1(rows, rhs)
    if result is None:
        return None
    tableau, basis, nvars = result
    if len(costs) != nvars:
        raise InvariantViolationError("cost vector length mismatch")
    z = [QQ(c) for c in costs] + [_QQ0]
    for i, j in enumerate(basis):
        if z[j] != 0:
            f = z[j]  # basic column j is a unit column with its 1 in row i
            z = [zv - f * tv for zv, tv in zip(z, tableau[i])]
    _run(tableau, z, basis, nvars)
    x = _extract(tableau, basis, nvars)
    value = sum((c * v for c, v in zip(costs, x)), Fraction(0))
    return value, x
