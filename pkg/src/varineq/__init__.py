"""Numerical checks of second-order conditions for one-dimensional variational problems."""
from .errors import (
    AdmissibilityError,
    CapabilityError,
    ConfigurationError,
    DomainError,
    EvaluationError,
    ModelNotFoundError,
    VarIneqError,
)
from .lagrangian import (
    LagrangianModel,
    PartialSet,
    Point3,
    catalog,
    eval_partials,
    fd_partials,
    get_model,
    numeric_model,
)
from .pendulum import (
    PendulumParams,
    inequality38_margin,
    pendulum_ode_rhs,
    rk4_integrate,
    separatrix_theta,
    separatrix_time,
    separatrix_trajectory,
)
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate
from .second_variation import (
    CheckReport,
    SecondVariationTerms,
    Trajectory,
    constant_trajectory,
    el_residual,
    functional_value,
    inequality_margin,
    linear_trajectory,
    run_check,
    second_variation_direct,
    second_variation_ibp_standard,
    second_variation_paper,
)
from .testfunctions import Interval, boundary_check, eval_phi, poly_bump, sampled

__version__ = "0.1.0"
