"""Probabilistic metric spaces with matrix-ideal statistical convergence.

The package models distance distribution functions as finite step
functions, computes the modified Levy metric exactly to tolerance,
builds finite probabilistic metric spaces under triangle functions, and
runs finite-horizon detectors for strong statistical convergence driven
by a summability matrix and an admissible ideal.  A seeded harness
generates ground-truth instances and checks the detector suite against
them.
"""

from .distfn import (
    DEFAULT_DL_TOL,
    EPS0,
    TAIL_LOCATION,
    StepDistFn,
    WeakConvergence,
    evaluate,
    levy_distance,
    levy_distance_to_zero,
    merged_locations,
    pointwise_gap,
    pointwise_leq,
    pointwise_max,
    pointwise_min,
    unit_step,
    weakly_converges,
)
from .triangle import (
    MAXIMAL,
    TNORMS,
    TRIANGLE_KINDS,
    TriangleAxiomReport,
    TriangleFn,
    apply_maximal,
    apply_supconv,
    check_triangle_axioms,
    dominates,
    t_lukasiewicz,
    t_minimum,
    t_product,
)
from .pmspace import (
    AxiomViolation,
    FinitePMSpace,
    SpaceAxiomReport,
    build_equilateral,
    build_metric_induced,
    from_table,
)
from .summability import (
    ALL_INDICES,
    CONVERGED,
    CUBES,
    DEFAULT_HORIZON,
    DEFAULT_TOL,
    DIVERGED,
    EVENS,
    INCONCLUSIVE,
    NO_INDICES,
    ODDS,
    POWERS_OF_TWO,
    SQUARES,
    BlockMatrix,
    ConstantColumnMatrix,
    ExplicitMatrix,
    Ideal,
    IdentityMatrix,
    IndexSet,
    RegularityReport,
    SummMatrix,
    TriangularMatrix,
    Verdict,
    a_density_partial,
    ai_density,
    ai_density_is_full,
    ai_density_is_null,
    ai_nonthin,
    cesaro1,
    check_regularity,
    finite_set,
    ideal_from_spec,
    ideal_limit,
    ideal_limit_at,
    index_block,
    index_set_from_spec,
    matrix_from_spec,
    multiples,
    squares_rows,
    tail_start,
    weighted_mean,
)
from .convergence import (
    IndexedSequence,
    ai_star_conv_detect,
    ai_stat_cauchy_detect,
    ai_stat_conv_detect,
    alternating,
    constant_sequence,
    eventually_constant,
    from_values,
    gamma_set,
    lambda_set,
    lemma_cauchy_predicates,
    splice,
    stat_bounded_check,
    strong_conv_detect,
    strong_limit_point_set,
    visit_set,
    visit_witnesses,
)
from .harness import (
    DEFAULT_SUITE_SIZE,
    DEFAULT_SUITE_TOL,
    FOURTH_POWERS,
    Instance,
    REPORT_SCHEMA,
    SuiteConfig,
    generate_suite,
    oracle_density,
    oracle_levy_distance,
    oracle_levy_feasible,
    random_step_fn,
    render_text,
    run_theorem_suite,
    space_pool,
    suite_passed,
    validate_report,
    write_csv,
    write_report,
)

__version__ = "0.1.0"
