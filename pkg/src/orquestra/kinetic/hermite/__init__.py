################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
from ._basis import (
    HermiteBasis,
    HermiteBasisSpec,
    HermiteCoeffVector,
    MultiIndex,
    VelocityQuadrature,
    as_multi_index,
    eval_basis,
    hermite_basis,
    maxwellian,
    multi_indices_of_order,
    project_function,
    sqrt_maxwellian,
    velocity_quadrature,
)
from ._moments import (
    MacroMoments,
    decompose_macro_micro,
    dissipation_form,
    macro_coefficients,
    macro_coercivity_floor,
    macro_moments,
    macro_projection_matrix,
    micro_coercivity_constant,
    micro_subspace,
)
from ._operators import (
    LadderKind,
    add_fluid_sources,
    apply_collision_L,
    apply_ladder,
    apply_matrix,
    apply_velocity_laplacian,
    collision_diagonal,
    kinetic_linear_terms,
    ladder_matrix,
    nu_gram_matrix,
    nu_norm,
    velocity_laplacian_matrix,
)
