"""CHSH facets of the n=2 no-signaling polytope and vertex decompositions.

Each of the 8 PR boxes sits above one CHSH facet of the local polytope;
the facet inequality, the relabeling that maps the box onto PR box 1,
and the 8 local deterministic boxes saturating the inequality together
form a :class:`ChshSymmetry`.  A no-signaling matrix can violate at most
one of the 8 inequalities, and when it does it decomposes *uniquely* as
one PR box plus the 8 saturating deterministic boxes — the weights can
be read directly off individual matrix cells, which is what
:func:`decompose_222` does.

The module also carries the two exact replacement identities used to
rewrite mixtures of nonlocal vertices into local ones (uniform PR pairs
and the 1-to-3 cast-out of a non-saturating deterministic box against
two copies of PR box 1), the 8 single-cell rewrites of the CHSH
functional whose value on any no-signaling matrix equals one quarter of
the violation, and a variance-minimizing convex weighting of those 8
rewrites for estimating the violation from finite samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exactlin
from .core import (
    ANTICORRELATED,
    CORRELATED,
    Decomposition,
    DistributionMatrix,
    InconsistentInputError,
    InvariantViolationError,
    LocalDeterministic,
    NonConvergenceError,
    NotApplicableError,
    PreconditionError,
    Relabeling,
    SettingsDistribution,
    all_relabelings,
    apply_relabeling,
    catalog_222,
    ld_box,
    mix,
    pr_box,
    relabeling_cell_map,
    require_member,
)

#: Catalog indices of the deterministic boxes saturating CHSH symmetry 1.
SATURATING_SET_1 = frozenset({1, 4, 5, 8, 9, 12, 14, 15})

#: Weight read-off cells for a matrix in canonical (symmetry-1) frame:
#: LD catalog index -> the single (row, column) cell carrying its weight.
READOFF_CELLS = {
    14: (0, 1),
    15: (0, 2),
    12: (1, 1),
    9: (1, 2),
    1: (2, 0),
    4: (2, 3),
    5: (3, 1),
    8: (3, 2),
}

#: Uniform-pair identities: (1, k) -> the 4 LD indices with
#: 1/2 PR_1 + 1/2 PR_k = 1/4 (D_i + D_j + D_k + D_l).
PAIR_TABLE = {
    (1, 2): (1, 2, 3, 4),
    (1, 3): (1, 4, 9, 12),
    (1, 4): (5, 8, 14, 15),
    (1, 5): (1, 4, 5, 8),
    (1, 6): (9, 12, 14, 15),
    (1, 7): (1, 4, 14, 15),
    (1, 8): (5, 8, 9, 12),
}

#: Cast-out identities: d -> the 3 LD indices with D_d + 2 PR_1 = sum.
CASTOUT_TABLE = {
    2: (5, 12, 14),
    3: (8, 9, 15),
    6: (1, 12, 14),
    7: (4, 9, 15),
    10: (4, 5, 14),
    11: (1, 8, 15),
    13: (4, 5, 9),
    16: (1, 8, 12),
}

#: The 8 single-cell rewrites of the quarter-violation, in canonical
#: frame: (positive cell, the 3 negative cells), rows in canonical order.
#: The first entry is the classical coincidence-count expression
#: P(++|a1b1) - P(+0|a1b2) - P(0+|a2b1) - P(++|a2b2).
VARIANT_CELLS = (
    ((0, 0), ((2, 0), (3, 1), (1, 2))),
    ((0, 3), ((2, 3), (3, 2), (1, 1))),
    ((3, 0), ((2, 0), (1, 2), (0, 1))),
    ((3, 3), ((2, 3), (1, 1), (0, 2))),
    ((1, 0), ((2, 0), (3, 1), (0, 2))),
    ((1, 3), ((2, 3), (3, 2), (0, 1))),
    ((2, 1), ((3, 1), (1, 1), (0, 2))),
    ((2, 2), ((3, 2), (1, 2), (0, 1))),
)


@dataclass(frozen=True)
class ChshSymmetry:
    """One of the 8 CHSH facet symmetries of the n=2 polytope.

    ``canonicalizer`` is a relabeling mapping PR box ``index`` onto PR
    box 1 (so it maps a matrix violating this symmetry into the frame
    where all canonical-frame identities apply).  ``saturating_set``
    holds the catalog indices of the 8 deterministic boxes reaching
    value 2 on this symmetry's functional.
    """

    index: int
    canonicalizer: Relabeling
    saturating_set: frozenset[int]
    #: canonical-frame LD catalog index -> original-frame catalog index
    ld_pullback: tuple[int, ...]

    def pull_back_ld(self, canonical_index: int) -> int:
        return self.ld_pullback[canonical_index - 1]


_SYMMETRIES: tuple[ChshSymmetry, ...] | None = None
_LD_MATRIX_INDEX: dict[DistributionMatrix, int] = {}
_PR_MATRIX_INDEX: dict[DistributionMatrix, int] = {}


def _matrix_indexes() -> tuple[dict, dict]:
    global _LD_MATRIX_INDEX, _PR_MATRIX_INDEX
    if not _LD_MATRIX_INDEX:
        prs, lds = catalog_222()
        _PR_MATRIX_INDEX = {box.matrix(): k + 1 for k, box in enumerate(prs)}
        _LD_MATRIX_INDEX = {box.matrix(): k + 1 for k, box in enumerate(lds)}
    return _PR_MATRIX_INDEX, _LD_MATRIX_INDEX


def ld_index_of(matrix: DistributionMatrix) -> int | None:
    """Catalog index of the deterministic box with this matrix, if any."""
    return _matrix_indexes()[1].get(matrix)


def pr_index_of(matrix: DistributionMatrix) -> int | None:
    """Catalog index of the PR box with this matrix, if any."""
    return _matrix_indexes()[0].get(matrix)


def chsh_symmetries() -> tuple[ChshSymmetry, ...]:
    """All 8 CHSH symmetries, index 1 first."""
    global _SYMMETRIES
    if _SYMMETRIES is None:
        pr_idx, ld_idx = _matrix_indexes()
        pr1 = pr_box(1).matrix()
        syms = []
        for k in range(1, 9):
            target = pr_box(k).matrix()
            canonicalizer = next(
                r for r in all_relabelings() if apply_relabeling(target, r) == pr1
            )
            inverse = canonicalizer.inverse()
            pullback = tuple(
                ld_idx[apply_relabeling(ld_box(i).matrix(), inverse)]
                for i in range(1, 17)
            )
            saturating = frozenset(pullback[i - 1] for i in SATURATING_SET_1)
            syms.append(ChshSymmetry(k, canonicalizer, saturating, pullback))
        _SYMMETRIES = tuple(syms)
    return _SYMMETRIES


def chsh_symmetry(index: int) -> ChshSymmetry:
    if not 1 <= index <= 8:
        raise PreconditionError(f"CHSH symmetry index must be 1..8, got {index}")
    return chsh_symmetries()[index - 1]


def row_correlators(dm: DistributionMatrix) -> tuple[Fraction, ...]:
    """Per-row correlators E = P(++) - P(+0) - P(0+) + P(00)."""
    return tuple(row[0] - row[1] - row[2] + row[3] for row in dm.entries)


def chsh_value(dm: DistributionMatrix, sym: ChshSymmetry) -> Fraction:
    """Value of the symmetry's CHSH functional; local matrices stay <= 2.

    The sign of each row's correlator matches the row type of the
    symmetry's PR box, which is exactly the assignment maximizing the
    functional (the PR box reaches 4).
    """
    if dm.scenario.n != 2:
        raise PreconditionError("CHSH functionals are defined for n=2 only")
    signs = tuple(
        1 if t == CORRELATED else -1 for t in pr_box(sym.index).row_types
    )
    return sum(
        (s * e for s, e in zip(signs, row_correlators(dm))), Fraction(0)
    )


def all_chsh_values(dm: DistributionMatrix) -> tuple[Fraction, ...]:
    return tuple(chsh_value(dm, sym) for sym in chsh_symmetries())


def violated_symmetry(dm: DistributionMatrix) -> ChshSymmetry | None:
    """The unique symmetry with value > 2, or ``None`` when local.

    No-signaling matrices can violate at most one CHSH symmetry; two
    simultaneous violations mean the input was not a polytope member.
    """
    require_member(dm, context="violated_symmetry")
    hits = [
        sym for sym in chsh_symmetries() if chsh_value(dm, sym) > 2
    ]
    if len(hits) > 1:
        raise InvariantViolationError(
            f"matrix violates {len(hits)} CHSH symmetries at once"
        )
    return hits[0] if hits else None


def is_local_222(dm: DistributionMatrix) -> bool:
    return violated_symmetry(dm) is None


# ---------------------------------------------------------------------------
# Decomposition of a violating matrix: weights read off single cells
# ---------------------------------------------------------------------------


def _readoff_terms(
    dm: DistributionMatrix, sym: ChshSymmetry
) -> tuple[list[tuple[LocalDeterministic, Fraction]], tuple, Fraction]:
    """Read PR/LD weights off the canonical-frame cells of ``dm``.

    Returns ``(ld_terms, pr_term, pr_weight)`` in the *original* frame.
    Raises :class:`PreconditionError` if any read-off weight is negative
    (possible only for inputs outside the polytope).
    """
    canonical = apply_relabeling(dm, sym.canonicalizer)
    weights = {
        i: canonical.entries[r][c] for i, (r, c) in READOFF_CELLS.items()
    }
    pr_weight = Fraction(1) - sum(weights.values())
    if pr_weight < 0 or any(w < 0 for w in weights.values()):
        raise PreconditionError(
            "cell read-off produced a negative weight; the input is too far "
            "outside the no-signaling polytope to decompose"
        )
    ld_terms = [
        (ld_box(sym.pull_back_ld(i)), w)
        for i, w in sorted(weights.items())
        if w > 0
    ]
    pr_term = (pr_box(sym.index), pr_weight)
    return ld_terms, pr_term, pr_weight


def readoff_222(
    dm: DistributionMatrix,
) -> tuple[Decomposition, Fraction]:
    """Tolerant cell read-off for matrices that may sit slightly off the
    polytope (e.g. tables of rounded experimental frequencies).

    Picks the symmetry with the largest functional value (which must
    exceed 2), reads the weights off the corresponding cells, and
    returns the decomposition together with the total-variation residual
    between its mixture and the input — exactly 0 for polytope members.
    """
    if dm.scenario.n != 2:
        raise PreconditionError("cell read-off is defined for n=2 only")
    values = all_chsh_values(dm)
    best = max(range(8), key=lambda k: values[k])
    if values[best] <= 2:
        raise NotApplicableError(
            "matrix violates no CHSH symmetry; the PR-plus-saturating-LD "
            "decomposition applies to nonlocal matrices only"
        )
    sym = chsh_symmetries()[best]
    ld_terms, pr_term, pr_weight = _readoff_terms(dm, sym)
    dec = Decomposition(
        dm.scenario, pr_term if pr_weight > 0 else None, tuple(ld_terms)
    )
    reconstructed = dec.mixture()
    residual = sum(
        (
            abs(a - b)
            for ra, rb in zip(reconstructed.entries, dm.entries)
            for a, b in zip(ra, rb)
        ),
        Fraction(0),
    ) / 2
    return dec, residual


def decompose_222(dm: DistributionMatrix) -> Decomposition:
    """Unique decomposition of a CHSH-violating matrix into its PR box
    plus the 8 saturating deterministic boxes, by exact cell read-off.

    The PR weight is half the violation: value = 2 + 2 * pr_weight.
    """
    require_member(dm, context="decompose_222")
    sym = violated_symmetry(dm)
    if sym is None:
        raise NotApplicableError(
            "matrix violates no CHSH symmetry; use decompose_local_222"
        )
    dec, residual = readoff_222(dm)
    if residual != 0:
        raise InconsistentInputError(
            f"read-off weights do not reconstruct the input "
            f"(total-variation residual {residual}); the matrix is not a "
            f"no-signaling polytope member"
        )
    return dec


def decompose_local_222(dm: DistributionMatrix) -> Decomposition:
    """Some exact convex decomposition of a local matrix into at most 9
    deterministic boxes, found by exact linear-feasibility search."""
    require_member(dm, context="decompose_local_222")
    _, lds = catalog_222()
    columns = [box.matrix() for box in lds]
    rows = []
    rhs = []
    for r in range(4):
        for c in range(4):
            rows.append([m.entries[r][c] for m in columns])
            rhs.append(dm.entries[r][c])
    rows.append([Fraction(1)] * 16)
    rhs.append(Fraction(1))
    solution = exactlin.simplex_feasible(rows, rhs)
    if solution is None:
        raise NotApplicableError(
            "matrix admits no local decomposition (it violates a CHSH "
            "symmetry); use decompose_222"
        )
    terms = tuple(
        (lds[i], w) for i, w in enumerate(solution) if w > 0
    )
    return Decomposition(dm.scenario, None, terms)


# ---------------------------------------------------------------------------
# Replacement identities
# ---------------------------------------------------------------------------


def pair_replacement(i: int, j: int) -> tuple[int, int, int, int]:
    """The 4 LD catalog indices with 1/2 PR_i + 1/2 PR_j = 1/4 their sum.

    Defined for any two *distinct* PR boxes; pairs not involving PR box 1
    are resolved by conjugating the stored PR-1 identities with the
    relabeling that canonicalizes PR box ``i``.
    """
    if not (1 <= i <= 8 and 1 <= j <= 8):
        raise PreconditionError("PR box indices must be in 1..8")
    if i == j:
        raise PreconditionError(
            "uniform-pair replacement needs two distinct PR boxes"
        )
    sym = chsh_symmetry(i)
    target = apply_relabeling(pr_box(j).matrix(), sym.canonicalizer)
    partner = pr_index_of(target)
    if partner is None or partner == 1:
        raise InvariantViolationError("canonicalizer failed to map a PR box")
    base = PAIR_TABLE[(1, partner)]
    return tuple(sorted(sym.pull_back_ld(t) for t in base))


def castout_replacement(d: int) -> tuple[int, int, int]:
    """The 3 LD catalog indices with D_d + 2 PR_1 = their sum.

    Defined exactly for the 8 deterministic boxes *outside* the
    symmetry-1 saturating set.
    """
    if not 1 <= d <= 16:
        raise PreconditionError("LD catalog index must be in 1..16")
    if d in SATURATING_SET_1:
        raise PreconditionError(
            f"D_{d} saturates CHSH symmetry 1; the cast-out identity only "
            f"rewrites the 8 non-saturating boxes"
        )
    return CASTOUT_TABLE[d]


# ---------------------------------------------------------------------------
# Single-cell rewrites of the violation and their optimal weighting
# ---------------------------------------------------------------------------


def variant_eberhard_values(
    dm: DistributionMatrix, sym: ChshSymmetry
) -> tuple[Fraction, ...]:
    """The 8 single-cell rewrites of (value - 2)/4, evaluated on ``dm``.

    Each rewrite has the form  positive cell - three negative cells  in
    the symmetry's canonical frame; on any no-signaling matrix all 8
    agree and equal one quarter of the CHSH violation (half the PR
    weight when the matrix is nonlocal).
    """
    if dm.scenario.n != 2:
        raise PreconditionError("the rewrites are defined for n=2 only")
    canonical = apply_relabeling(dm, sym.canonicalizer)
    values = []
    for plus, minuses in VARIANT_CELLS:
        v = canonical.entries[plus[0]][plus[1]]
        for r, c in minuses:
            v -= canonical.entries[r][c]
        values.append(v)
    return tuple(values)


def _variant_signed_cells(
    sym: ChshSymmetry,
) -> tuple[tuple[tuple[tuple[int, int], int], ...], ...]:
    """Per variant, the original-frame (cell, sign) pairs it reads."""
    cmap = relabeling_cell_map(sym.canonicalizer)
    out = []
    for plus, minuses in VARIANT_CELLS:
        cells = [(cmap[plus], 1)]
        cells.extend((cmap[m], -1) for m in minuses)
        out.append(tuple(cells))
    return tuple(out)


def _estimator_quadratic(
    expected: DistributionMatrix, settings: SettingsDistribution
) -> np.ndarray:
    """Matrix M of the second moment  E[T^2] = c^T M c  of the sampled
    single-trial estimator under weights ``c`` over the 8 rewrites."""
    sym = violated_symmetry(expected)
    if sym is None:
        raise NotApplicableError(
            "estimator weights are defined for CHSH-violating matrices"
        )
    if settings.scenario != expected.scenario:
        raise PreconditionError("settings distribution scenario mismatch")
    if any(p <= 0 for p in settings.probs):
        raise PreconditionError(
            "estimator weights need every setting pair sampled with "
            "positive probability"
        )
    signed = _variant_signed_cells(sym)
    M = np.zeros((8, 8))
    for row in range(4):
        for col in range(4):
            s = np.zeros(8)
            for v, cells in enumerate(signed):
                for cell, sign in cells:
                    if cell == (row, col):
                        s[v] += sign
            if not s.any():
                continue
            alpha = float(expected.entries[row][col] / settings.probs[row])
            M += alpha * np.outer(s, s)
    return M


def _project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, len(v) + 1)
    cond = u - css / ks > 0
    rho = np.nonzero(cond)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def estimator_objective(
    expected: DistributionMatrix,
    settings: SettingsDistribution,
    weights,
) -> float:
    """Second moment of the single-trial violation estimator under the
    given convex weighting of the 8 rewrites (its variance up to the
    constant square of the mean)."""
    M = _estimator_quadratic(expected, settings)
    c = np.asarray([float(w) for w in weights])
    return float(c @ M @ c)


def estimator_weights(
    expected: DistributionMatrix,
    settings: SettingsDistribution,
    *,
    tolerance: float = 1e-10,
    max_iterations: int = 200_000,
) -> tuple[float, ...]:
    """Convex weights over the 8 rewrites minimizing estimator variance.

    Every convex weighting yields the same expectation (one quarter of
    the CHSH violation), so minimizing the second moment minimizes the
    variance.  Solved by projected gradient descent on the simplex with
    backtracking line search, stopping when an accepted step improves
    the objective by less than ``tolerance``.
    """
    M = _estimator_quadratic(expected, settings)
    c = np.full(8, 1.0 / 8.0)
    f = float(c @ M @ c)
    step = 1.0
    for _ in range(max_iterations):
        grad = 2.0 * (M @ c)
        while True:
            candidate = _project_simplex(c - step * grad)
            f_new = float(candidate @ M @ candidate)
            if f_new <= f or step < 1e-18:
                break
            step *= 0.5
        moved = float(np.abs(candidate - c).max())
        improvement = f - f_new
        c, f = candidate, f_new
        step *= 1.3
        if improvement < tolerance and moved < 1e-12:
            return tuple(float(v) for v in c)
    raise NonConvergenceError(
        "projected gradient did not converge", best=tuple(float(v) for v in c)
    )


# ---------------------------------------------------------------------------
# Convenience reconstruction check used by callers mixing replacements
# ---------------------------------------------------------------------------


def uniform_pair_mixture(i: int, j: int) -> DistributionMatrix:
    """The matrix 1/2 PR_i + 1/2 PR_j."""
    return mix([(pr_box(i), Fraction(1, 2)), (pr_box(j), Fraction(1, 2))])


def castout_mixture(d: int) -> DistributionMatrix:
    """The matrix 1/3 D_d + 2/3 PR_1."""
    return mix([(ld_box(d), Fraction(1, 3)), (pr_box(1), Fraction(2, 3))])
