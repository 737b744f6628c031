"""Reachability and coherence toolkit for two-bath alternating-stroke machines.

The package splits into two halves. The incoherent half tracks which
occupation vectors a machine with one cold and one hot bath can reach when the
two sides take turns thermalizing: relative-to-reference majorization order,
convex reachable sets, their attractors and guaranteed inner polytopes. The
coherent half asks how many strokes a machine with a fixed basis-changing
unitary needs to build arbitrary gates, dense products, and states unbiased in
two bases, with exact single-qubit synthesis as the worked-out case.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    DegenerateEngineError,
    EngineError,
    PreconditionError,
    RetryExhaustedError,
    StructuralImpossibilityError,
)
from .thermo import (
    bar_state,
    beta_order,
    curve_value,
    dedup_rows,
    extremal_achievable,
    gibbs_state,
    thermalize_subset,
    thermo_curve,
    thermomajorizes,
    total_variation,
    two_level_transfer,
)
from .hull import hausdorff_tv, hull_distance, in_hull, prune_hull
from .athermality import (
    AttractorStates,
    EngineParams,
    QubitInterval,
    ReachableSet,
    attractor_states,
    extreme_occupation_step,
    ground_state_criterion,
    ground_state_round,
    inner_polytope,
    qubit_reachable_interval,
    respects_top_bound,
    simulate,
    top_bound_threshold,
    top_occupation_ceiling,
)
from .coherence import (
    DenseProduct,
    GraphDiagnosis,
    PrimitivityVerdict,
    alternating_product,
    amplitude_bound,
    column_overlap,
    fourier_matrix,
    fractional_fourier,
    graph_diagnosis,
    lower_bound_strokes,
    overlap_pattern,
    pattern_matrix,
    pattern_primitivity,
    random_unitary,
    synthesize_dense_product,
    upper_bound_strokes,
)
from .qubit_control import (
    EulerZXZ,
    Rotation,
    StrokePlan,
    apply_plan,
    canonical_rotations,
    euler_zxz,
    max_mutual_bloch,
    plan_matrix,
    synthesize_state,
    synthesize_unitary,
    three_stroke_feasible,
)
from .mutual import (
    FlatColumnSolution,
    FlatNecessity,
    ProximityVerdict,
    RealizedState,
    dominant_entry_blocker,
    flat_column_necessary,
    permutation_proximity_blocker,
    realize_state,
    search_flat_column,
    search_unbiased_state,
    verify_mutually_coherent,
)
