"""blidkit: bounded local-identity maps and what they buy you.

Desk-scale numerical machinery for smooth cutoffs, blid maps on R^m and
discretized C[0,1], germ extension, jet realization, and solvers for the
cohomological equation g(Ax) - g(x) = f(x) with hyperbolic linear A.
"""

from .bump import ScalarCutoff, cutoff_eval, make_cutoff, scalar_blid_eval
from .cohomo import (
    CohomologicalProblem,
    FlatSplitResult,
    GlobalizeResult,
    HyperbolicSplitting,
    LocalSolution,
    SeriesSolution,
    SolveReport,
    check_resonances,
    flat_split,
    flat_term_from_spec,
    globalize,
    solve_cohomological,
    solve_flat_local,
    solve_formal,
    solve_series,
    split_hyperbolic,
    taylor_term,
    vanishing_split,
)
from .errors import (
    BlidkitError,
    BoundViolation,
    CheckFailed,
    DegreeTooHigh,
    DimensionMismatch,
    GridMismatch,
    InvalidRadii,
    LocalResidualTooLarge,
    NotContractive,
    NotExpansive,
    NotHyperbolic,
    NotInImage,
    OrderTooHigh,
    OutsideValidity,
    ParseError,
    PoleOnGrid,
    SeriesDiverged,
    Singular,
    SingularResonance,
    SupportExceedsValidity,
)
from .funcspace import (
    BlidMap,
    GridFunction,
    Projector,
    SegmentSpec,
    blid_at_segment,
    blid_c01,
    c01_blid_map,
    euclidean_blid_map,
    integral_functional,
    rescale_blid,
    restrict_blid,
    restricted_blid_map,
    space_norm,
    sup_norm,
)
from .germ import (
    EuclideanSpace,
    GlobalMap,
    GridSpace,
    JetSpec,
    LocalMap,
    extend_by_bump,
    extend_germ,
    jet_extract,
    jet_scale_factors,
    realize_jet,
)
from .polyalg import (
    HomPolyMap,
    SymMultilinear,
    coeff_vector,
    compose_linear,
    continuity_bound,
    derivative_continuity_bound,
    eval_multilinear,
    hompoly_derivative,
    hompoly_eval,
    hompoly_eval_many,
    hompoly_from_coeff_vector,
    hompoly_scale,
    ln_matrix,
    monomial_basis,
    polarize,
    scalar_hompoly,
    vector_hompoly,
    zero_hompoly,
)

__version__ = "0.1.0"
