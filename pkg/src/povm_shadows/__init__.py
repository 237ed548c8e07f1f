"""Classical shadow tomography with generalized measurements (POVMs)."""

from . import errors
from .norms import (
    NormReport,
    average_squared_norm,
    estimator_variance,
    factorized_squared_norm,
    log_factorized_squared_norm,
    max_projection_norm_grid,
    norm_operator,
    octahedron_bound,
    projection_norms,
    sphere_grid,
    squared_shadow_norm,
)
from .operators import (
    bloch_projector,
    from_bloch,
    haar_random_projection,
    haar_random_projections,
    haar_random_state,
    hermitian,
    make_rng,
    projector,
    random_density_matrix,
    tensor,
    to_bloch,
)
from .optimize import (
    AnnealConfig,
    OptimizationResult,
    anneal_factorized,
    anneal_single_qubit,
    factorized_objective,
    objective,
    vertex_distance,
)
from .povm import (
    SOLIDS,
    Povm,
    QubitPovmParams,
    depolarize,
    from_bloch_params,
    from_unitary_ensemble,
    inverted,
    is_informationally_complete,
    named_povm,
    platonic,
    povm_from_json,
    povm_to_json,
    random_povm,
    random_uniform_qubit_povm,
    single_qubit_clifford_group,
    solid_vertices,
    symmetry_coefficients,
    tensor_povm,
    uniform_trace_split,
    validate,
    vertex_projections,
)
from .sampling import (
    EstimatorConfig,
    estimate_mean,
    sample_joint_outcomes,
    sample_outcomes,
    shot_estimates,
    simulate,
    single_shot_estimate,
)
from .shadows import (
    ClassicalShadowSet,
    FrameSuperoperator,
    bloch_least_squares,
    classical_shadows,
    classical_shadows_symmetric,
    frame_operator,
    least_squares_estimate,
    shadows_by_method,
)

__version__ = "0.1.0"
