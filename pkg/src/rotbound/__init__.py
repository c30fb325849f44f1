"""rotbound: rotation representations, a sharp angular-distance bound, and
certified global search over rotation space built on that bound."""

from .rotations import (
    Angle,
    AxisAngle,
    RotationMatrix,
    RotationParseError,
    angle_of,
    angular_distance,
    as_matrix,
    compose,
    enclosed_angle,
    exp_map,
    format_rotation,
    inverse,
    log_map,
    orthonormalize,
    parse_rotation_line,
    parse_rotations,
    random_rotation,
)
from .bounds import (
    CONVEXITY_TOL,
    EQUALITY_TOL,
    SLACK_TOL,
    ConvexityReport,
    DerivativeReport,
    HalfAngleParams,
    SlackReport,
    SweepResult,
    arccos_sq,
    arccos_sq_second_derivative,
    boundary_strata_sweep,
    certification_sweep,
    composed_angle_closed_form,
    composed_form_slack,
    convexity_certificate,
    inequality_lhs,
    inequality_rhs,
    inequality_slack,
    random_pair_sweep,
    reparam_lhs,
    reparam_rhs,
    second_derivative_check,
    write_convexity_csv,
    write_sweep_csv,
)
from .solver import (
    AGGREGATORS,
    DEFAULT_MAX_CUBES,
    Cube,
    Problem,
    ProblemFile,
    SolverResult,
    angular_residuals,
    averaging_problem,
    cube_uncertainty,
    format_result_line,
    lower_bound,
    read_problem_file,
    solve,
    subdivide,
    upper_bound,
    write_problem_file,
)

__version__ = "0.1.0"
