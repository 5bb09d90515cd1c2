"""Chained-scenario machinery: generalized PR boxes, support mismatches,
read-off decompositions, and the merge/replacement constructions that
rewrite mixtures of nonlocal vertices locally.

The chained polytope's nonlocal vertices are the generalized PR boxes
(:class:`~bellpoly.core.GeneralizedPRBox`).  For a box ``g`` the linear
functional summing a matrix's probability over ``g``'s zero cells plays
the CHSH role: it is at least 1 on every local matrix and 0 on ``g``
itself.  A matrix taking a value below 1 does so for exactly one box,
and it decomposes as that box plus deterministic boxes whose weights sit
in single matrix cells — the same read-off picture as for n=2.

The deterministic boxes appearing in the read-off are g's *one-mismatch*
companions: strategies that agree with g's support everywhere except in
a single cell.  Two further exact constructions are provided:

* :func:`domino_merge` rewrites the uniform mixture of two distinct
  generalized PR boxes as a uniform mixture of 4 deterministic boxes,
  by propagating outcome patterns column-to-column around the chain.
* :func:`mismatch_replacement` rewrites one deterministic box with
  2m+1 >= 3 support mismatches against 2m copies of ``g`` as 2m+1
  deterministic boxes, each with exactly one mismatch.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    ANTICORRELATED,
    CORRELATED,
    COLUMNS,
    Decomposition,
    DistributionMatrix,
    GeneralizedPRBox,
    InconsistentInputError,
    InvariantViolationError,
    LocalDeterministic,
    NotApplicableError,
    PLUS,
    PreconditionError,
    Scenario,
    ZERO,
    enumerate_gprs,
    require_member,
)


def _flip(letter: str) -> str:
    return ZERO if letter == PLUS else PLUS


@dataclass(frozen=True)
class MismatchCell:
    """A single cell where a deterministic box lands in a generalized PR
    box's zero region: canonical row index plus outcome column label."""

    row: int
    outcome: str

    def __post_init__(self) -> None:
        if self.outcome not in COLUMNS:
            raise PreconditionError(f"outcome must be one of {COLUMNS}")

    @property
    def column(self) -> int:
        return COLUMNS.index(self.outcome)


def support_mismatch_count(g: GeneralizedPRBox, d: LocalDeterministic) -> int:
    """Number of rows where ``d``'s outcome falls outside ``g``'s support.

    Always odd: flipping any single setting letter of ``d`` changes the
    alignment of exactly the two rows measuring it, so the count's parity
    is an invariant of ``g``; the all-aligned count would be 0, but the
    odd number of anticorrelated rows makes full alignment impossible
    with even parity — the invariant parity is odd.
    """
    if g.scenario != d.scenario:
        raise PreconditionError("box scenarios differ")
    count = 0
    for r, (i, j) in enumerate(g.scenario.setting_pairs()):
        if d.outcome_column(i, j) in g.zero_columns(r):
            count += 1
    return count


# ---------------------------------------------------------------------------
# The chain as a cycle of setting "columns"
# ---------------------------------------------------------------------------
#
# Writing the settings in the order a1, b1, a2, b2, ..., an, bn, the
# measured pairs are exactly the adjacent (cyclic) column pairs, and the
# canonical row order lists them by left column: row j joins columns j
# and j+1 (mod 2n).  Even columns are Alice settings, odd are Bob's.


def _column_letters(d: LocalDeterministic) -> list[str]:
    """d's outcome letters in column order a1, b1, a2, b2, ..., an, bn."""
    letters = []
    for i in range(d.scenario.n):
        letters.append(d.a_assign[i])
        letters.append(d.b_assign[i])
    return letters


def _box_from_columns(scenario: Scenario, letters) -> LocalDeterministic:
    return LocalDeterministic(
        scenario,
        tuple(letters[2 * i] for i in range(scenario.n)),
        tuple(letters[2 * i + 1] for i in range(scenario.n)),
    )


def one_support_mismatches(
    g: GeneralizedPRBox,
) -> dict[MismatchCell, LocalDeterministic]:
    """The 4n deterministic boxes with exactly one support mismatch
    against ``g``, keyed by the cell where the mismatch sits.

    For a fixed zero cell the box is unique: the cell pins both letters
    of one measured pair, and g's correlation pattern propagates the
    remaining letters around the chain (correlated rows copy the letter
    across, anticorrelated rows flip it).  The odd anticorrelated count
    makes the propagation consistent exactly when one row is mismatched.
    """
    size = 2 * g.scenario.n
    out: dict[MismatchCell, LocalDeterministic] = {}
    for r in range(size):
        for col in g.zero_columns(r):
            a_letter, b_letter = COLUMNS[col][0], COLUMNS[col][1]
            letters: list[str | None] = [None] * size
            if r % 2 == 0:  # even column = Alice setting on the left
                letters[r] = a_letter
                letters[(r + 1) % size] = b_letter
            else:
                letters[r] = b_letter
                letters[(r + 1) % size] = a_letter
            for step in range(1, size):
                edge = (r + step) % size
                src = edge
                dst = (edge + 1) % size
                propagated = (
                    letters[src]
                    if g.row_types[edge] == CORRELATED
                    else _flip(letters[src])
                )
                if letters[dst] is None:
                    letters[dst] = propagated
                elif letters[dst] != propagated:
                    raise InvariantViolationError(
                        "mismatch propagation around the chain is inconsistent"
                    )
            box = _box_from_columns(g.scenario, letters)
            if support_mismatch_count(g, box) != 1:
                raise InvariantViolationError(
                    "constructed box does not have exactly one mismatch"
                )
            out[MismatchCell(r, COLUMNS[col])] = box
    return out


# ---------------------------------------------------------------------------
# Chained functional, identification, and read-off decomposition
# ---------------------------------------------------------------------------


def chained_value(dm: DistributionMatrix, g: GeneralizedPRBox) -> Fraction:
    """Total probability ``dm`` places in ``g``'s zero cells.

    At least 1 on every local matrix; equal to 0 on ``g`` itself.  For
    n=2 and g = PR box k this is (4 - CHSH_k) / 2.
    """
    if dm.scenario != g.scenario:
        raise PreconditionError("matrix and box scenarios differ")
    return sum(
        (dm.entries[r][c] for r, c in g.zero_cells()), Fraction(0)
    )


def canonical_gpr(scenario: Scenario) -> GeneralizedPRBox:
    """The reference box: every row correlated except the last (a1bn)."""
    types = [CORRELATED] * scenario.num_rows
    types[-1] = ANTICORRELATED
    return GeneralizedPRBox(scenario, tuple(types))


def identify_gpr(dm: DistributionMatrix) -> GeneralizedPRBox | None:
    """The unique generalized PR box whose functional drops below 1 on
    ``dm``, or ``None`` when the matrix is local.

    A no-signaling matrix can be nonlocal toward at most one box; two
    simultaneous sub-1 values mean the input was not a polytope member.
    """
    require_member(dm, context="identify_gpr")
    hits = [
        g for g in enumerate_gprs(dm.scenario) if chained_value(dm, g) < 1
    ]
    if len(hits) > 1:
        raise InvariantViolationError(
            f"matrix is nonlocal toward {len(hits)} generalized PR boxes"
        )
    return hits[0] if hits else None


def is_local_chained(dm: DistributionMatrix) -> bool:
    return identify_gpr(dm) is None


def decompose_chained(dm: DistributionMatrix) -> Decomposition:
    """Read-off decomposition of a matrix nonlocal toward some box ``g``:
    ``g`` plus one-mismatch deterministic boxes, the weight of each box
    being the matrix entry in its mismatch cell.

    The box weight is 1 minus the functional value, so the local weight
    of the decomposition *equals* the functional value — no local model
    can do better, which is why the bound is tight.
    """
    g = identify_gpr(dm)
    if g is None:
        raise NotApplicableError(
            "matrix is local: no generalized PR box functional falls below 1"
        )
    companions = one_support_mismatches(g)
    ld_terms = []
    total = Fraction(0)
    for cell, box in companions.items():
        w = dm.entries[cell.row][cell.column]
        total += w
        if w > 0:
            ld_terms.append((box, w))
    g_weight = Fraction(1) - total
    if g_weight <= 0:
        raise InvariantViolationError(
            "functional below 1 must leave positive box weight"
        )
    dec = Decomposition(dm.scenario, (g, g_weight), tuple(ld_terms))
    if dec.mixture() != dm:
        raise InconsistentInputError(
            "read-off weights do not reconstruct the input; the matrix is "
            "not a no-signaling polytope member"
        )
    return dec


def tightness_witness(dm: DistributionMatrix) -> tuple[Fraction, Decomposition]:
    """The maximal local weight achievable for ``dm`` and a decomposition
    achieving it: exactly the chained functional value of the violated
    box, witnessed by the read-off decomposition."""
    g = identify_gpr(dm)
    if g is None:
        raise NotApplicableError(
            "matrix is local: its maximal local weight is trivially 1"
        )
    dec = decompose_chained(dm)
    weight = dec.local_weight
    if weight != chained_value(dm, g):
        raise InvariantViolationError(
            "local weight of the read-off decomposition must equal the "
            "functional value"
        )
    return weight, dec


# ---------------------------------------------------------------------------
# Merging two generalized PR boxes into deterministic boxes
# ---------------------------------------------------------------------------

_UNLIKE = "U"

#: Column patterns: the outcome letters of the 4 output boxes at one
#: setting column.
_PATTERNS = ("++00", "00++", "+0+0", "0+0+")

#: Pattern propagation across a row boundary, by boundary label.
_PATTERN_STEP = {
    CORRELATED: {p: p for p in _PATTERNS},
    ANTICORRELATED: {"++00": "00++", "00++": "++00", "+0+0": "0+0+", "0+0+": "+0+0"},
    _UNLIKE: {"++00": "+0+0", "00++": "+0+0", "+0+0": "++00", "0+0+": "++00"},
}


def domino_merge(
    g_a: GeneralizedPRBox, g_b: GeneralizedPRBox
) -> tuple[LocalDeterministic, ...]:
    """4 deterministic boxes whose uniform mixture is (g_a + g_b) / 2.

    Label every row boundary between adjacent setting columns by whether
    the two boxes agree there (their common letter) or disagree (``U``);
    the disagreement count is even and positive.  Seeding the column
    right of the first disagreement with the pattern ``++00`` and
    propagating the patterns column by column around the chain fills a
    table whose 4 rows are the output boxes.  In each row the two boxes'
    halves of probability recombine: across agreeing boundaries two of
    the output boxes track each correlation branch, and across
    disagreeing boundaries the pattern regroups so that every output box
    stays deterministic.
    """
    if g_a.scenario != g_b.scenario:
        raise PreconditionError("box scenarios differ")
    if g_a == g_b:
        raise PreconditionError("merging requires two distinct boxes")
    size = 2 * g_a.scenario.n
    labels = [
        ta if ta == tb else _UNLIKE
        for ta, tb in zip(g_a.row_types, g_b.row_types)
    ]
    unlike = labels.count(_UNLIKE)
    if unlike == 0 or unlike % 2 != 0:
        raise InvariantViolationError(
            "distinct boxes must disagree on a positive even number of rows"
        )
    first = labels.index(_UNLIKE)
    patterns: list[str | None] = [None] * size
    seed_col = (first + 1) % size
    patterns[seed_col] = "++00"
    for step in range(1, size):
        col = (seed_col + step) % size
        boundary = (first + step) % size
        patterns[col] = _PATTERN_STEP[labels[boundary]][patterns[(seed_col + step - 1) % size]]
    if _PATTERN_STEP[_UNLIKE][patterns[first]] != patterns[seed_col]:
        raise InvariantViolationError(
            "pattern propagation failed to close around the chain"
        )
    boxes = tuple(
        _box_from_columns(g_a.scenario, [patterns[c][t] for c in range(size)])
        for t in range(4)
    )
    return boxes


# ---------------------------------------------------------------------------
# Replacing a many-mismatch deterministic box
# ---------------------------------------------------------------------------


def mismatch_replacement(
    g: GeneralizedPRBox, d: LocalDeterministic
) -> tuple[LocalDeterministic, ...]:
    """2m+1 one-mismatch boxes with  d + 2m g = their sum  (as matrices),
    for a deterministic box ``d`` having 2m+1 >= 3 support mismatches.

    The boxes are built in a table with 2m+1 rows: the first column
    holds m+1 copies of d's a1 letter and m flipped copies; moving right
    column by column, d's letter for the column is copied with each
    row's current flip status, which toggles for every row — except one
    alternating "exception" row that resets to unflipped — whenever the
    crossed row boundary is one of d's mismatch rows.
    """
    if g.scenario != d.scenario:
        raise PreconditionError("box scenarios differ")
    count = support_mismatch_count(g, d)
    if count == 1:
        raise PreconditionError(
            "box already has a single mismatch; nothing to replace"
        )
    if count % 2 != 1:
        raise InvariantViolationError("mismatch count must be odd")
    m = (count - 1) // 2
    size = 2 * g.scenario.n
    marked = [
        r
        for r, (i, j) in enumerate(g.scenario.setting_pairs())
        if d.outcome_column(i, j) in g.zero_columns(r)
    ]
    marked_rank = {line: k for k, line in enumerate(marked, start=1)}
    letters_of_d = _column_letters(d)
    nrows = count
    flipped = [False] * nrows  # construction-table rows, 0-based
    flipped[m + 1 :] = [True] * m
    table = [[letters_of_d[0] if not flipped[t] else _flip(letters_of_d[0])]
             for t in range(nrows)]
    for col in range(1, size):
        boundary = col - 1
        if boundary in marked_rank:
            k = marked_rank[boundary]
            if k % 2 == 1:
                exception = (m + 1) - (k - 1) // 2  # 1-based table row
            else:
                exception = (m + 1) + k // 2
            for t in range(nrows):
                flipped[t] = False if t == exception - 1 else not flipped[t]
        base = letters_of_d[col]
        for t in range(nrows):
            table[t].append(_flip(base) if flipped[t] else base)
    boxes = tuple(_box_from_columns(g.scenario, row) for row in table)
    for box in boxes:
        if support_mismatch_count(g, box) != 1:
            raise InvariantViolationError(
                "replacement produced a box without exactly one mismatch"
            )
    return boxes
