"""Exact analysis of no-signaling distribution matrices.

The package represents bipartite conditional distributions as matrices
of exact rationals (one row per settings pair in the canonical chained
order, columns ``++ +0 0+ 00``), and provides:

* polytope membership checks and violation diagnostics,
* the CHSH facet machinery for n=2: the 8 symmetries, exact vertex
  decompositions read off the matrix cells, the single-cell rewrites of
  the quarter violation, and a variance-minimizing violation estimator,
* the chained (n>=2) generalizations: functional values against
  generalized PR boxes, one-mismatch decompositions and their tightness,
  pairwise box merges and the replacement tables they generate,
* distance measures to the local polytope (total variation exactly,
  Kullback-Leibler numerically) and a face projection,
* detector-efficiency transforms with exact critical-threshold bisection,
* vertex enumeration with exact extremality certificates.

All polytope geometry is exact (:class:`fractions.Fraction` cells, with
``gmpy2`` transparently accelerating the linear algebra when present);
floats appear only in the two numerical optimizers and as requested
renderings.
"""

from .chained import (
    MismatchCell,
    canonical_gpr,
    chained_value,
    decompose_chained,
    domino_merge,
    identify_gpr,
    is_local_chained,
    mismatch_replacement,
    one_support_mismatches,
    support_mismatch_count,
    tightness_witness,
)
from .chsh import (
    CASTOUT_TABLE,
    PAIR_TABLE,
    READOFF_CELLS,
    SATURATING_SET_1,
    VARIANT_CELLS,
    ChshSymmetry,
    all_chsh_values,
    castout_mixture,
    castout_replacement,
    chsh_symmetries,
    chsh_symmetry,
    chsh_value,
    decompose_222,
    decompose_local_222,
    estimator_objective,
    estimator_weights,
    is_local_222,
    ld_index_of,
    pair_replacement,
    pr_index_of,
    readoff_222,
    row_correlators,
    uniform_pair_mixture,
    variant_eberhard_values,
    violated_symmetry,
)
from .core import (
    ANTICORRELATED_ROW,
    COLUMNS,
    CORRELATED_ROW,
    SCENARIO_222,
    BellError,
    CapacityError,
    Decomposition,
    DistributionMatrix,
    GeneralizedPRBox,
    InconsistentInputError,
    InvariantViolationError,
    LocalDeterministic,
    NonConvergenceError,
    NormalizationError,
    NotApplicableError,
    PreconditionError,
    Relabeling,
    Scenario,
    SettingsDistribution,
    ShapeError,
    Violation,
    all_relabelings,
    apply_relabeling,
    as_fraction,
    as_matrix,
    catalog_222,
    enumerate_gprs,
    enumerate_lds,
    ld_box,
    matrix_222,
    mix,
    pr_box,
    relabeling_cell_map,
    require_member,
    rows_as_222,
    validate,
)
from .efficiency import EfficiencyParams, apply_efficiency, critical_efficiency
from .fileio import (
    dump_distribution,
    dumps_distribution,
    format_rational,
    load_distribution,
    loads_distribution,
    save_distribution,
)
from .metrics import (
    ClosestLocalResult,
    face_projection,
    kl_closest_local,
    kl_divergence,
    kl_gradient,
    kl_minimize,
    kl_objective,
    tv_closest_local,
    tv_distance,
)
from .polytope import (
    ConstraintRow,
    ConstraintSystem,
    active_rows,
    build_constraints,
    enumerate_vertices,
    is_extremal,
    rank_exact,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
