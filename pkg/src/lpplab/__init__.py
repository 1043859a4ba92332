"""lpplab: a reproducible simulation laboratory for planar exponential
last passage percolation with stationary boundary data."""

__version__ = "0.1.0"

from .rng import Seed
from .environment import (
    Density,
    Window,
    WeightField,
    BoundaryProfile,
    characteristic_point,
    sample_exponential,
    build_bulk,
    build_stationary_boundary,
    build_stationary_boundary_window,
    build_half_plane,
    build_boundary_profile,
    flat_profile,
)
from .shape import (
    CharacteristicSpec,
    limit_shape,
    boundary_mean,
    curvature_penalty,
    axis_remainder,
    antidiagonal_remainder,
)
from .passage import (
    UNREACHABLE,
    PassageTable,
    GeodesicPath,
    ExitRecord,
    passage_point_to_point,
    brute_force_passage,
    passage_stationary_boundary,
    passage_point_to_line,
    forward_table,
    line_table,
    backtrack_geodesic,
    backtrack_line_geodesic,
    exit_time,
    last_axis_meeting,
)
from .coupling import (
    CoupledPair,
    build_coupled_pair,
    verify_equality,
    burke_increment_test,
    coupled_exit_equality,
)
from .bounds import (
    MgfSpec,
    TailModel,
    mgf_closed_form,
    log_mgf_closed_form,
    mgf_bound_ratio,
    delta0,
    reference_curve,
    boundary_sum_mgf_mc,
    mgf_mc_null_se,
)
from .montecarlo import (
    ExperimentSpec,
    TailCurve,
    ExponentFit,
    VarianceTable,
    wilson_interval,
    run_experiment,
    run_exit_tail,
    run_upper_tail,
    run_lower_tail,
    run_variance_scaling,
    fit_exponent,
    write_tail_csv,
    write_variance_csv,
    read_tail_csv,
)
