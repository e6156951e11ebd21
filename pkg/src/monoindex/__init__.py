"""Profile least-squares estimation in the monotone single index model."""

from .asymptotics import (
    ModelSpec,
    asymptotic_covariance,
    conditional_moments,
    matrix_A,
    matrix_A_tilde,
    matrix_Sigma,
    matrix_Sigma_tilde,
    moore_penrose_pinv,
    population_loss,
    psi_alpha,
)
from .estimators import (
    Dataset,
    DegenerateDesignError,
    EstimateResult,
    EstimatorKind,
    SearchOptions,
    alpha_to_angle,
    angle_to_alpha,
    ese_loss,
    golden_section,
    lse_loss,
    profile_fit,
    spline_score_loss,
    sse_loss,
)
from .isotonic import MonotoneStepFunction, ScatterPoint, eval_step, fit_isotonic
from .kernel import KernelSpec, default_bandwidth, smoothed_derivative
from .simulation import (
    ReplicationPlan,
    SimulationSummary,
    generate,
    loss_curve,
    run_monte_carlo,
)
from .spline import (
    NaturalCubicSpline,
    eval_spline,
    eval_spline_derivative,
    fit_smoothing_spline,
    roughness,
)

__version__ = "0.1.0"
