"""Core types for no-signaling distribution matrices.

A bipartite Bell scenario with binary outcomes is recorded here as a
*distribution matrix*: one row per measured setting pair, one column per
joint outcome (``++``, ``+0``, ``0+``, ``00``), every entry an exact
rational probability.  The chained scenario with ``n`` settings per side
measures the 2n pairs

    a1b1, a2b1, a2b2, a3b2, ..., anb(n-1), anbn, a1bn

which is the fixed row order used throughout this package ("canonical
row order").  For ``n = 2`` this is a1b1, a2b1, a2b2, a1b2.

The extreme points of the no-signaling polytope come in two families:
local deterministic boxes (an outcome assignment per setting) and
generalized PR boxes (each row either perfectly correlated or perfectly
anticorrelated, with an odd number of anticorrelated rows).  Both are
modelled as small frozen value types that can render their induced
distribution matrix.

All arithmetic is over :class:`fractions.Fraction`; nothing in this
module rounds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


class BellError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(BellError, ValueError):
    """Input has the wrong dimensions, labels, or value types."""


class CapacityError(BellError):
    """Requested computation exceeds the supported problem size."""


class NormalizationError(BellError, ValueError):
    """Weights or probabilities do not form a distribution."""


class PreconditionError(BellError, ValueError):
    """Arguments violate a documented precondition of the operation."""


class NotApplicableError(BellError):
    """The operation requires a nonlocal input but received a local one."""


class InconsistentInputError(BellError):
    """A reconstruction identity failed, so the input was not as claimed."""


class InvariantViolationError(BellError):
    """An internal invariant failed; indicates a bug or corrupt input."""


class NonConvergenceError(BellError):
    """An iterative solver hit its iteration cap before reaching tolerance.

    The partially converged result is attached as ``best``.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


# ---------------------------------------------------------------------------
# Outcome / row-type alphabets
# ---------------------------------------------------------------------------

PLUS = "+"
ZERO = "0"
OUTCOMES = (PLUS, ZERO)

#: Column labels in fixed order: Alice outcome first, Bob outcome second.
COLUMNS = ("++", "+0", "0+", "00")

#: Column index for a pair of outcome letters (alice, bob).
COLUMN_INDEX = {
    (PLUS, PLUS): 0,
    (PLUS, ZERO): 1,
    (ZERO, PLUS): 2,
    (ZERO, ZERO): 3,
}

CORRELATED = "C"
ANTICORRELATED = "A"

#: Row of conditional probabilities for a perfectly correlated setting pair.
CORRELATED_ROW = (Fraction(1, 2), Fraction(0), Fraction(0), Fraction(1, 2))
#: Row for a perfectly anticorrelated setting pair.
ANTICORRELATED_ROW = (Fraction(0), Fraction(1, 2), Fraction(1, 2), Fraction(0))

RationalLike = Union[Fraction, int, str, float]


def as_fraction(value: RationalLike) -> Fraction:
    """Coerce ``value`` to an exact :class:`Fraction`.

    Decimal strings convert exactly (``"0.0000743"`` becomes
    743/10000000), as do ``"p/q"`` strings and integers.  Floats convert
    via their exact binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ShapeError(f"expected a rational value, got {value!r}")
    if isinstance(value, (int, str)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ShapeError(f"cannot parse rational value {value!r}: {exc}") from exc
    if isinstance(value, float):
        return Fraction(value)
    raise ShapeError(f"expected a rational value, got {type(value).__name__}")


# ---------------------------------------------------------------------------
# Scenario
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    """A chained bipartite scenario with ``n`` binary settings per side."""

    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 2:
            raise ShapeError(f"scenario requires an integer n >= 2, got {self.n!r}")

    @property
    def num_rows(self) -> int:
        return 2 * self.n

    @property
    def num_cells(self) -> int:
        return 8 * self.n

    def setting_pairs(self) -> tuple[tuple[int, int], ...]:
        """Measured (alice, bob) setting pairs, 1-based, in canonical row order."""
        pairs = [(1, 1)]
        for i in range(2, self.n + 1):
            pairs.append((i, i - 1))
            pairs.append((i, i))
        pairs.append((1, self.n))
        return tuple(pairs)

    def row_labels(self) -> tuple[str, ...]:
        return tuple(f"a{i}b{j}" for i, j in self.setting_pairs())

    def row_index(self, alice: int, bob: int) -> int:
        """Canonical row index of the pair (a_alice, b_bob)."""
        try:
            return self.setting_pairs().index((alice, bob))
        except ValueError:
            raise ShapeError(
                f"setting pair (a{alice}, b{bob}) is not measured in the "
                f"chained scenario with n={self.n}"
            ) from None


SCENARIO_222 = Scenario(2)


# ---------------------------------------------------------------------------
# Distribution matrices
# ---------------------------------------------------------------------------


def _freeze_entries(scenario: Scenario, entries) -> tuple[tuple[Fraction, ...], ...]:
    rows = tuple(entries)
    if len(rows) != scenario.num_rows:
        raise ShapeError(
            f"expected {scenario.num_rows} rows for n={scenario.n}, got {len(rows)}"
        )
    frozen = []
    for row in rows:
        cells = tuple(as_fraction(v) for v in row)
        if len(cells) != 4:
            raise ShapeError(f"expected 4 columns per row, got {len(cells)}")
        frozen.append(cells)
    return tuple(frozen)


@dataclass(frozen=True)
class DistributionMatrix:
    """A 2n-by-4 table of exact rational conditional probabilities.

    Construction checks only shape and rationality.  Membership in the
    no-signaling polytope (nonnegativity, row normalization, marginal
    consistency) is checked by :func:`validate`, so that out-of-polytope
    tables can still be represented and diagnosed.
    """

    scenario: Scenario
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "entries", _freeze_entries(self.scenario, self.entries)
        )

    def cell(self, row: int, col: int) -> Fraction:
        return self.entries[row][col]

    def row(self, row: int) -> tuple[Fraction, ...]:
        return self.entries[row]

    def __iter__(self):
        return iter(self.entries)


def matrix_222(rows_222) -> DistributionMatrix:
    """Build an n=2 matrix from rows given in the order ab, ab', a'b, a'b'.

    Convenience for tables that enumerate the four setting pairs by
    Alice-major nesting rather than in canonical (chained) row order.
    """
    rows = tuple(rows_222)
    if len(rows) != 4:
        raise ShapeError(f"expected 4 rows, got {len(rows)}")
    # Canonical row -> position in the Alice-major listing.
    order = (0, 2, 3, 1)  # a1b1=ab, a2b1=a'b, a2b2=a'b', a1b2=ab'
    return DistributionMatrix(SCENARIO_222, tuple(rows[k] for k in order))


def rows_as_222(dm: DistributionMatrix) -> tuple[tuple[Fraction, ...], ...]:
    """Rows of an n=2 matrix reordered to ab, ab', a'b, a'b'."""
    if dm.scenario.n != 2:
        raise ShapeError("Alice-major row order is defined for n=2 only")
    order = (0, 3, 1, 2)  # ab=a1b1, ab'=a1b2, a'b=a2b1, a'b'=a2b2
    return tuple(dm.entries[k] for k in order)


# ---------------------------------------------------------------------------
# Vertices: local deterministic boxes and generalized PR boxes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalDeterministic:
    """A deterministic local strategy: one fixed outcome per setting."""

    scenario: Scenario
    a_assign: tuple[str, ...]
    b_assign: tuple[str, ...]

    def __post_init__(self) -> None:
        for name, assign in (("a_assign", self.a_assign), ("b_assign", self.b_assign)):
            letters = tuple(assign)
            if len(letters) != self.scenario.n or any(
                v not in OUTCOMES for v in letters
            ):
                raise ShapeError(
                    f"{name} must be {self.scenario.n} letters from {OUTCOMES}"
                )
            object.__setattr__(self, name, letters)

    def outcome_column(self, alice: int, bob: int) -> int:
        """Column index of the deterministic outcome at pair (1-based)."""
        return COLUMN_INDEX[(self.a_assign[alice - 1], self.b_assign[bob - 1])]

    def matrix(self) -> DistributionMatrix:
        rows = []
        for i, j in self.scenario.setting_pairs():
            row = [Fraction(0)] * 4
            row[self.outcome_column(i, j)] = Fraction(1)
            rows.append(tuple(row))
        return DistributionMatrix(self.scenario, tuple(rows))


@dataclass(frozen=True)
class GeneralizedPRBox:
    """A no-signaling vertex with every row perfectly (anti)correlated.

    ``row_types`` lists one letter per canonical row: ``"C"`` for the
    correlated row (1/2, 0, 0, 1/2) and ``"A"`` for the anticorrelated
    row (0, 1/2, 1/2, 0).  The number of anticorrelated rows must be
    odd; with an even count the same rows admit a local model, so the
    box would not be a nonlocal vertex.
    """

    scenario: Scenario
    row_types: tuple[str, ...]

    def __post_init__(self) -> None:
        types = tuple(self.row_types)
        if len(types) != self.scenario.num_rows or any(
            t not in (CORRELATED, ANTICORRELATED) for t in types
        ):
            raise ShapeError(
                f"row_types must be {self.scenario.num_rows} letters "
                f"'{CORRELATED}' or '{ANTICORRELATED}'"
            )
        if types.count(ANTICORRELATED) % 2 != 1:
            raise ShapeError(
                "a generalized PR box needs an odd number of anticorrelated rows"
            )
        object.__setattr__(self, "row_types", types)

    def matrix(self) -> DistributionMatrix:
        rows = tuple(
            CORRELATED_ROW if t == CORRELATED else ANTICORRELATED_ROW
            for t in self.row_types
        )
        return DistributionMatrix(self.scenario, rows)

    def zero_columns(self, row: int) -> tuple[int, int]:
        """Columns where this box puts zero probability in ``row``."""
        return (1, 2) if self.row_types[row] == CORRELATED else (0, 3)

    def zero_cells(self) -> tuple[tuple[int, int], ...]:
        """All (row, column) cells where this box puts zero probability."""
        return tuple(
            (r, c)
            for r in range(self.scenario.num_rows)
            for c in self.zero_columns(r)
        )


Box = Union[DistributionMatrix, LocalDeterministic, GeneralizedPRBox]


def as_matrix(box: Box) -> DistributionMatrix:
    """The distribution matrix induced by a vertex, or the matrix itself."""
    if isinstance(box, DistributionMatrix):
        return box
    if isinstance(box, (LocalDeterministic, GeneralizedPRBox)):
        return box.matrix()
    raise ShapeError(f"expected a box or matrix, got {type(box).__name__}")


# ---------------------------------------------------------------------------
# The n=2 vertex catalog
# ---------------------------------------------------------------------------

# PR boxes 1..8 as row types in Alice-major order (ab, ab', a'b, a'b').
# Boxes 2k and 2k-1 are complements: every C swapped with A.
_PR_TYPES_222 = (
    "CCCA",
    "AAAC",
    "CCAC",
    "AACA",
    "CACC",
    "ACAA",
    "ACCC",
    "CAAA",
)

# Local deterministic boxes 1..16 as outcome assignments (a, a', b, b').
_LD_ASSIGNMENTS = (
    "++++",
    "++00",
    "00++",
    "0000",
    "+++0",
    "++0+",
    "00+0",
    "000+",
    "+0++",
    "+000",
    "0+++",
    "0+00",
    "+0+0",
    "+00+",
    "0++0",
    "0+0+",
)

_ALICE_MAJOR_TO_CANONICAL = (0, 2, 3, 1)  # canonical row i <- listing position


def _pr_from_types_222(types: str) -> GeneralizedPRBox:
    canonical = tuple(types[k] for k in _ALICE_MAJOR_TO_CANONICAL)
    return GeneralizedPRBox(SCENARIO_222, canonical)


def _ld_from_assignment(assignment: str) -> LocalDeterministic:
    a, a2, b, b2 = assignment
    return LocalDeterministic(SCENARIO_222, (a, a2), (b, b2))


_CATALOG_PRS = tuple(_pr_from_types_222(t) for t in _PR_TYPES_222)
_CATALOG_LDS = tuple(_ld_from_assignment(s) for s in _LD_ASSIGNMENTS)


def catalog_222() -> tuple[tuple[GeneralizedPRBox, ...], tuple[LocalDeterministic, ...]]:
    """The 24 vertices of the n=2 no-signaling polytope.

    Returns ``(prs, lds)``: 8 PR boxes and 16 local deterministic boxes
    in their fixed catalog order.  Catalog indices elsewhere in this
    package are 1-based: ``prs[k-1]`` is PR box ``k``.
    """
    return _CATALOG_PRS, _CATALOG_LDS


def pr_box(index: int) -> GeneralizedPRBox:
    """PR box by 1-based catalog index."""
    if not 1 <= index <= 8:
        raise PreconditionError(f"PR box index must be 1..8, got {index}")
    return _CATALOG_PRS[index - 1]


def ld_box(index: int) -> LocalDeterministic:
    """Local deterministic box by 1-based catalog index."""
    if not 1 <= index <= 16:
        raise PreconditionError(f"LD box index must be 1..16, got {index}")
    return _CATALOG_LDS[index - 1]


_MAX_ENUMERATION_N = 12


def enumerate_lds(scenario: Scenario) -> tuple[LocalDeterministic, ...]:
    """All 2^(2n) local deterministic boxes, in a fixed order."""
    if scenario.n > _MAX_ENUMERATION_N:
        raise CapacityError(
            f"enumerating 2^{2 * scenario.n} deterministic boxes is not supported "
            f"(n must be <= {_MAX_ENUMERATION_N})"
        )
    boxes = []
    for letters in itertools.product(OUTCOMES, repeat=2 * scenario.n):
        boxes.append(
            LocalDeterministic(
                scenario, letters[: scenario.n], letters[scenario.n :]
            )
        )
    return tuple(boxes)


def enumerate_gprs(scenario: Scenario) -> tuple[GeneralizedPRBox, ...]:
    """All 2^(2n-1) generalized PR boxes, in a fixed order."""
    if scenario.n > _MAX_ENUMERATION_N:
        raise CapacityError(
            f"enumerating 2^{2 * scenario.n - 1} PR boxes is not supported "
            f"(n must be <= {_MAX_ENUMERATION_N})"
        )
    boxes = []
    for types in itertools.product((CORRELATED, ANTICORRELATED), repeat=2 * scenario.n):
        if types.count(ANTICORRELATED) % 2 == 1:
            boxes.append(GeneralizedPRBox(scenario, types))
    return tuple(boxes)


# ---------------------------------------------------------------------------
# Mixtures and decompositions
# ---------------------------------------------------------------------------


def mix(terms: Iterable[tuple[Box, RationalLike]]) -> DistributionMatrix:
    """Exact convex combination of boxes or matrices.

    Weights must be nonnegative rationals summing to exactly 1, and all
    terms must live in the same scenario.
    """
    pairs = [(as_matrix(box), as_fraction(w)) for box, w in terms]
    if not pairs:
        raise PreconditionError("mix requires at least one term")
    scenario = pairs[0][0].scenario
    if any(m.scenario != scenario for m, _ in pairs):
        raise ShapeError("all terms in a mixture must share one scenario")
    if any(w < 0 for _, w in pairs):
        raise NormalizationError("mixture weights must be nonnegative")
    total = sum(w for _, w in pairs)
    if total != 1:
        raise NormalizationError(f"mixture weights must sum to 1, got {total}")
    rows = []
    for r in range(scenario.num_rows):
        rows.append(
            tuple(
                sum((w * m.entries[r][c] for m, w in pairs), Fraction(0))
                for c in range(4)
            )
        )
    return DistributionMatrix(scenario, tuple(rows))


@dataclass(frozen=True)
class Decomposition:
    """A convex decomposition into at most one PR box plus LD boxes.

    Weights are strictly positive exact rationals summing to 1;
    zero-weight terms are never stored.
    """

    scenario: Scenario
    pr_term: tuple[GeneralizedPRBox, Fraction] | None
    ld_terms: tuple[tuple[LocalDeterministic, Fraction], ...]

    def __post_init__(self) -> None:
        weights = []
        if self.pr_term is not None:
            box, w = self.pr_term
            w = as_fraction(w)
            if box.scenario != self.scenario:
                raise ShapeError("PR term scenario mismatch")
            object.__setattr__(self, "pr_term", (box, w))
            weights.append(w)
        lds = []
        for box, w in self.ld_terms:
            w = as_fraction(w)
            if box.scenario != self.scenario:
                raise ShapeError("LD term scenario mismatch")
            lds.append((box, w))
            weights.append(w)
        object.__setattr__(self, "ld_terms", tuple(lds))
        if any(w <= 0 for w in weights):
            raise NormalizationError("decomposition weights must be positive")
        if sum(weights) != 1:
            raise NormalizationError(
                f"decomposition weights must sum to 1, got {sum(weights)}"
            )

    @property
    def pr_weight(self) -> Fraction:
        return self.pr_term[1] if self.pr_term is not None else Fraction(0)

    @property
    def local_weight(self) -> Fraction:
        return Fraction(1) - self.pr_weight

    def terms(self) -> tuple[tuple[Box, Fraction], ...]:
        out: list[tuple[Box, Fraction]] = []
        if self.pr_term is not None:
            out.append(self.pr_term)
        out.extend(self.ld_terms)
        return tuple(out)

    def mixture(self) -> DistributionMatrix:
        return mix(self.terms())


# ---------------------------------------------------------------------------
# Relabeling symmetries (n=2)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Relabeling:
    """A local symmetry of the n=2 polytope.

    Optionally swaps the two settings on each side and optionally flips
    the outcome labels of each (new) setting: 2*2*4*4 = 64 elements.
    """

    swap_a: bool
    swap_b: bool
    flip_a: tuple[bool, bool]
    flip_b: tuple[bool, bool]

    def __post_init__(self) -> None:
        object.__setattr__(self, "flip_a", (bool(self.flip_a[0]), bool(self.flip_a[1])))
        object.__setattr__(self, "flip_b", (bool(self.flip_b[0]), bool(self.flip_b[1])))
        object.__setattr__(self, "swap_a", bool(self.swap_a))
        object.__setattr__(self, "swap_b", bool(self.swap_b))

    @classmethod
    def identity(cls) -> "Relabeling":
        return cls(False, False, (False, False), (False, False))

    def is_identity(self) -> bool:
        return self == Relabeling.identity()

    def inverse(self) -> "Relabeling":
        # Outcome flips are indexed by the relabeled setting, so inverting
        # a setting swap also swaps which flip applies where.
        flip_a = (self.flip_a[1], self.flip_a[0]) if self.swap_a else self.flip_a
        flip_b = (self.flip_b[1], self.flip_b[0]) if self.swap_b else self.flip_b
        return Relabeling(self.swap_a, self.swap_b, flip_a, flip_b)


def all_relabelings() -> tuple[Relabeling, ...]:
    """All 64 relabelings in a fixed enumeration order."""
    bools = (False, True)
    out = []
    for swap_a, swap_b in itertools.product(bools, bools):
        for flip_a in itertools.product(bools, bools):
            for flip_b in itertools.product(bools, bools):
                out.append(Relabeling(swap_a, swap_b, flip_a, flip_b))
    return tuple(out)


# Canonical row index for 222 coordinates (A, B) with A, B in {0, 1}.
_ROW_FROM_AB = {(0, 0): 0, (1, 0): 1, (1, 1): 2, (0, 1): 3}
_AB_FROM_ROW = {v: k for k, v in _ROW_FROM_AB.items()}


def relabeling_cell_map(r: Relabeling) -> dict[tuple[int, int], tuple[int, int]]:
    """For each target cell, the source cell it is read from.

    ``apply_relabeling(dm, r)`` sets ``new[cell] = dm[map[cell]]``.
    """
    cmap = {}
    for row in range(4):
        a, b = _AB_FROM_ROW[row]
        for col in range(4):
            x, y = divmod(col, 2)  # outcome bits: 0 = "+", 1 = "0"
            a_src = a ^ r.swap_a
            b_src = b ^ r.swap_b
            x_src = x ^ r.flip_a[a]
            y_src = y ^ r.flip_b[b]
            cmap[(row, col)] = (_ROW_FROM_AB[(a_src, b_src)], 2 * x_src + y_src)
    return cmap


def apply_relabeling(dm: DistributionMatrix, r: Relabeling) -> DistributionMatrix:
    """Permute an n=2 matrix's cells under a relabeling symmetry."""
    if dm.scenario.n != 2:
        raise ShapeError("relabelings are defined for the n=2 scenario only")
    cmap = relabeling_cell_map(r)
    rows = []
    for row in range(4):
        rows.append(tuple(dm.entries[src_r][src_c] for src_r, src_c in
                          (cmap[(row, col)] for col in range(4))))
    return DistributionMatrix(dm.scenario, tuple(rows))


# ---------------------------------------------------------------------------
# Settings distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SettingsDistribution:
    """Probabilities with which the 2n setting pairs are measured."""

    scenario: Scenario
    probs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        probs = tuple(as_fraction(p) for p in self.probs)
        if len(probs) != self.scenario.num_rows:
            raise ShapeError(
                f"expected {self.scenario.num_rows} settings probabilities, "
                f"got {len(probs)}"
            )
        if any(p < 0 for p in probs):
            raise NormalizationError("settings probabilities must be nonnegative")
        if sum(probs) != 1:
            raise NormalizationError(
                f"settings probabilities must sum to 1, got {sum(probs)}"
            )
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, scenario: Scenario) -> "SettingsDistribution":
        p = Fraction(1, scenario.num_rows)
        return cls(scenario, (p,) * scenario.num_rows)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    """One violated membership constraint, with its exact residual."""

    constraint: str  # "nonnegativity" | "normalization" | "no-signaling"
    location: str
    residual: Fraction

    def __str__(self) -> str:
        return f"{self.constraint} at {self.location}: residual {self.residual}"


def _setting_rows(scenario: Scenario) -> tuple[list[tuple[int, list[int]]], list[tuple[int, list[int]]]]:
    """Rows measuring each Alice setting and each Bob setting (1-based)."""
    pairs = scenario.setting_pairs()
    alice: dict[int, list[int]] = {}
    bob: dict[int, list[int]] = {}
    for idx, (i, j) in enumerate(pairs):
        alice.setdefault(i, []).append(idx)
        bob.setdefault(j, []).append(idx)
    return (sorted(alice.items()), sorted(bob.items()))


def validate(dm: DistributionMatrix) -> list[Violation]:
    """Check membership in the no-signaling polytope.

    Returns one :class:`Violation` per failed constraint — entry
    nonnegativity, row normalization, and equality of each side's
    outcome marginal across the two rows that measure the same setting.
    An empty report means the matrix is a polytope member.
    """
    labels = dm.scenario.row_labels()
    violations = []
    for r, row in enumerate(dm.entries):
        for c, value in enumerate(row):
            if value < 0:
                violations.append(
                    Violation("nonnegativity", f"cell ({labels[r]}, {COLUMNS[c]})", value)
                )
    for r, row in enumerate(dm.entries):
        total = sum(row)
        if total != 1:
            violations.append(
                Violation("normalization", f"row {labels[r]}", total - 1)
            )
    alice, bob = _setting_rows(dm.scenario)
    for i, rows in alice:
        first, second = rows
        # P(alice outcome "+") must not depend on Bob's choice of setting.
        m1 = dm.entries[first][0] + dm.entries[first][1]
        m2 = dm.entries[second][0] + dm.entries[second][1]
        if m1 != m2:
            violations.append(
                Violation(
                    "no-signaling",
                    f"alice setting a{i} between rows {labels[first]} and {labels[second]}",
                    m1 - m2,
                )
            )
    for j, rows in bob:
        first, second = rows
        m1 = dm.entries[first][0] + dm.entries[first][2]
        m2 = dm.entries[second][0] + dm.entries[second][2]
        if m1 != m2:
            violations.append(
                Violation(
                    "no-signaling",
                    f"bob setting b{j} between rows {labels[first]} and {labels[second]}",
                    m1 - m2,
                )
            )
    return violations


def require_member(dm: DistributionMatrix, *, context: str = "operation") -> None:
    """Raise :class:`PreconditionError` unless ``dm`` passes :func:`validate`."""
    violations = validate(dm)
    if violations:
        summary = "; ".join(str(v) for v in violations[:4])
        more = "" if len(violations) <= 4 else f" (+{len(violations) - 4} more)"
        raise PreconditionError(
            f"{context} requires a no-signaling distribution matrix: {summary}{more}"
        )
