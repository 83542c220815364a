"""Euler-Lagrange residuals, the second variation in three forms, and the margin check.

Notation used throughout (``phi`` is the variation, partials are evaluated
along the trajectory (x, y(x), y'(x)) unless stated otherwise):

* Form A, :func:`second_variation_direct` --
  the integral of f_yy phi^2 + 2 f_yy' phi phi' + f_y'y' phi'^2, optionally at
  the shifted trajectory y + t phi.
* Form B, :func:`second_variation_paper` -- the integrated-by-parts expression
  whose x-derivative slots are filled with (0, phi, phi'); it is split into
  the seven term integrals of :class:`SecondVariationTerms`.
* Form C, :func:`second_variation_ibp_standard` -- integration by parts with
  the true total derivative along the trajectory, velocity (1, y', y'').

For an admissible phi, A and C agree identically.  B agrees with A whenever
f_yy' and all third partials vanish, as for the pendulum.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import ConfigurationError, VarIneqError
from .lagrangian import LagrangianModel
from .quadrature import DEFAULT_SPEC, QuadResult, QuadratureSpec, integrate
from .testfunctions import (
    Interval,
    SampledTestFunction,
    TestFunction,
    boundary_check,
    read_three_column_csv,
)

__all__ = [
    "Trajectory",
    "SecondVariationTerms",
    "ELResidual",
    "CheckReport",
    "IDENTITY_TOL",
    "EL_TOL",
    "constant_trajectory",
    "linear_trajectory",
    "sampled_trajectory",
    "load_sampled_trajectory",
    "trajectory_consistency",
    "relative_residual",
    "functional_value",
    "el_residual",
    "second_variation_direct",
    "second_variation_paper",
    "second_variation_ibp_standard",
    "inequality_margin",
    "inequality_sides",
    "run_check",
]

IDENTITY_TOL = 1e-9
EL_TOL = 1e-6


# --------------------------------------------------------------------------
# trajectories
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Trajectory:
    """A C^2 candidate solution y on ``interval`` with vectorised y, y', y''."""

    interval: Interval
    y: Callable
    yp: Callable
    ypp: Callable
    label: str = "custom"
    nodes: Optional[dict] = field(default=None, repr=False)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        shape = x.shape
        return tuple(np.broadcast_to(np.asarray(c(x), dtype=float), shape) for c in (self.y, self.yp, self.ypp))


def constant_trajectory(interval, c: float = 0.0) -> Trajectory:
    interval = Interval.make(*interval)
    c = float(c)
    return Trajectory(
        interval,
        lambda x: np.full(np.shape(x), c),
        lambda x: np.zeros(np.shape(x)),
        lambda x: np.zeros(np.shape(x)),
        label=f"constant({c!r})",
    )


def linear_trajectory(interval, slope: float = 1.0, offset: float = 0.0) -> Trajectory:
    interval = Interval.make(*interval)
    slope, offset = float(slope), float(offset)
    return Trajectory(
        interval,
        lambda x: offset + slope * np.asarray(x, dtype=float),
        lambda x: np.full(np.shape(x), slope),
        lambda x: np.zeros(np.shape(x)),
        label=f"linear({slope!r}, {offset!r})",
    )


def sampled_trajectory(x, y, yp, ypp=None, label: str = "sampled") -> Trajectory:
    """Cubic Hermite trajectory through (x, y, y') samples on a uniform grid.

    y'' at the nodes is estimated from y' unless given; y' and y'' are then
    read off a second Hermite interpolant of (y', y'').
    """
    x, y, yp = (np.array(a, dtype=float) for a in (x, y, yp))
    if not (x.shape == y.shape == yp.shape) or x.ndim != 1 or x.size < 4:
        raise ConfigurationError("trajectory samples need equal-length columns with >= 4 rows")
    dx = np.diff(x)
    if np.any(dx <= 0) or np.max(np.abs(dx - dx.mean())) > 1e-9 * dx.mean():
        raise ConfigurationError("trajectory grid must be strictly increasing and uniform")
    if ypp is None:
        ypp = np.gradient(yp, x, edge_order=2)
    ypp = np.array(ypp, dtype=float)
    if not all(np.all(np.isfinite(a)) for a in (x, y, yp, ypp)):
        raise ConfigurationError("trajectory samples contain non-finite values")
    s0 = CubicHermiteSpline(x, y, yp, extrapolate=False)
    s1 = CubicHermiteSpline(x, yp, ypp, extrapolate=False)
    return Trajectory(
        Interval.make(x[0], x[-1]),
        s0,
        s1,
        lambda t: s1(t, 1),
        label=label,
        nodes={"x": x, "y": y, "yp": yp, "ypp": ypp},
    )


def load_sampled_trajectory(path) -> Trajectory:
    """Read a trajectory from CSV columns ``x, y, y_prime`` (header required)."""
    _, cols = read_three_column_csv(path)
    return sampled_trajectory(*cols, label="sampled")


def trajectory_consistency(traj: Trajectory, points: int = 50, seed: int = 0) -> dict:
    """Compare y' and y'' against central differences of y and y' at random points.

    Returns the worst deviations scaled by max(1, |exact|) and whether both
    stay below 1e-6.
    """
    a, b = traj.interval
    rng = np.random.default_rng(seed)
    h = 1e-5 * max(1.0, b - a)
    x = rng.uniform(a + 2 * h, b - 2 * h, points)
    _, yp, ypp = traj(x)
    fd1 = (traj.y(x + h) - traj.y(x - h)) / (2 * h)
    fd2 = (traj.yp(x + h) - traj.yp(x - h)) / (2 * h)
    d1 = float(np.max(np.abs(fd1 - yp) / np.maximum(1.0, np.abs(yp))))
    d2 = float(np.max(np.abs(fd2 - ypp) / np.maximum(1.0, np.abs(ypp))))
    return {"yp_dev": d1, "ypp_dev": d2, "ok": d1 < 1e-6 and d2 < 1e-6}


# --------------------------------------------------------------------------
# functional and Euler-Lagrange residual
# --------------------------------------------------------------------------

def relative_residual(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


def _functional(model, traj, spec) -> QuadResult:
    def integrand(x):
        y, yp, _ = traj(x)
        return model.value(x, y, yp)

    return integrate(integrand, traj.interval, spec)


def functional_value(model: LagrangianModel, traj: Trajectory, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """F(y): the integral of f(x, y, y') along the trajectory."""
    return _functional(model, traj, spec).value


class ELResidual(NamedTuple):
    max_abs: float
    x: np.ndarray
    values: np.ndarray


def el_residual(model: LagrangianModel, traj: Trajectory, grid_size: int = 201) -> ELResidual:
    """f_y - d/dx f_y' on a uniform grid, with the total derivative
    d/dx f_y' = f_xy' + f_yy' y' + f_y'y' y''."""
    if int(grid_size) != grid_size or grid_size < 2:
        raise ConfigurationError(f"grid_size must be an integer >= 2, got {grid_size}")
    x = np.linspace(*traj.interval, int(grid_size))
    y, yp, ypp = traj(x)
    p = model.partials_at(x, y, yp)
    p.require("f_xyp")
    r = p.f_y - (p.f_xyp + p.f_yyp * yp + p.f_ypyp * ypp)
    r = np.broadcast_to(r, x.shape)
    return ELResidual(float(np.max(np.abs(r))), x, np.array(r))


# --------------------------------------------------------------------------
# second variation
# --------------------------------------------------------------------------

def _direct(model, traj, tf, t, spec) -> QuadResult:
    def integrand(x):
        y, yp, _ = traj(x)
        phi, dphi, _ = tf(x)
        p = model.partials_at(x, y + t * phi, yp + t * dphi)
        return p.f_yy * phi**2 + 2.0 * p.f_yyp * phi * dphi + p.f_ypyp * dphi**2

    return integrate(integrand, traj.interval, spec)


def second_variation_direct(
    model: LagrangianModel, traj: Trajectory, tf: TestFunction, t: float = 0.0, spec: QuadratureSpec = DEFAULT_SPEC
) -> float:
    """I''(t) for I(t) = F(y + t phi), partials taken along y + t phi (Form A at t = 0)."""
    if tf.is_zero:
        return 0.0
    return _direct(model, traj, tf, float(t), spec).value


TERM_NAMES = ("T1", "T2", "T3", "T4", "T5", "T6", "T7")


@dataclass(frozen=True)
class SecondVariationTerms:
    """Integrals of the seven terms of Form B.

    T1 = int f_yy phi^2          T2 = int f_yyy' 2 phi^3
    T3 = int f_yy' 2 phi phi'    T4 = int f_yy'y' 2 phi^2 phi'
    T5 = int f_y'y' phi phi''    T6 = int f_yy'y' phi' phi^2
    T7 = int f_y'y'y' phi phi'^2

    Form B = (T1 - T2) - (T3 + T4 + T5 + T6 + T7).
    """

    T1: float
    T2: float
    T3: float
    T4: float
    T5: float
    T6: float
    T7: float

    @property
    def lhs(self) -> float:
        return self.T1 - self.T2

    @property
    def rhs(self) -> float:
        return self.T3 + self.T4 + self.T5 + self.T6 + self.T7

    @property
    def total(self) -> float:
        return self.lhs - self.rhs


def _term_integrands(model, traj, tf):
    cache = {}

    def fields(x):
        key = x.tobytes()
        if key not in cache:
            cache.clear()
            y, yp, _ = traj(x)
            phi, d1, d2 = tf(x)
            cache[key] = (model.partials_at(x, y, yp), phi, d1, d2)
        return cache[key]

    def term(fn):
        return lambda x: fn(*fields(x))

    return {
        "T1": term(lambda p, phi, d1, d2: p.f_yy * phi**2),
        "T2": term(lambda p, phi, d1, d2: p.f_yyyp * 2.0 * phi**3),
        "T3": term(lambda p, phi, d1, d2: p.f_yyp * 2.0 * phi * d1),
        "T4": term(lambda p, phi, d1, d2: p.f_yypyp * 2.0 * phi**2 * d1),
        "T5": term(lambda p, phi, d1, d2: p.f_ypyp * phi * d2),
        "T6": term(lambda p, phi, d1, d2: p.f_yypyp * d1 * phi**2),
        "T7": term(lambda p, phi, d1, d2: p.f_ypypyp * phi * d1**2),
    }


def _form_b(model, traj, tf, spec):
    results = {name: integrate(g, traj.interval, spec) for name, g in _term_integrands(model, traj, tf).items()}
    terms = SecondVariationTerms(**{k: r.value for k, r in results.items()})
    return terms, results


def second_variation_paper(
    model: LagrangianModel, traj: Trajectory, tf: TestFunction, spec: QuadratureSpec = DEFAULT_SPEC
) -> tuple:
    """Form B and its per-term breakdown, partials along the unshifted trajectory."""
    if tf.is_zero:
        terms = SecondVariationTerms(*(0.0,) * 7)
        return 0.0, terms
    terms, _ = _form_b(model, traj, tf, spec)
    return terms.total, terms


def _ibp_standard(model, traj, tf, spec) -> QuadResult:
    def integrand(x):
        y, yp, ypp = traj(x)
        phi, d1, d2 = tf(x)
        p = model.partials_at(x, y, yp)
        p.require("f_xyyp", "f_xypyp")
        dx_yyp = p.f_xyyp + p.f_yyyp * yp + p.f_yypyp * ypp
        dx_ypyp = p.f_xypyp + p.f_yypyp * yp + p.f_ypypyp * ypp
        # d/dx (2 f_yy' phi + f_y'y' phi')
        flux = 2.0 * dx_yyp * phi + 2.0 * p.f_yyp * d1 + dx_ypyp * d1 + p.f_ypyp * d2
        return p.f_yy * phi**2 - flux * phi

    return integrate(integrand, traj.interval, spec)


def second_variation_ibp_standard(
    model: LagrangianModel, traj: Trajectory, tf: TestFunction, spec: QuadratureSpec = DEFAULT_SPEC
) -> float:
    """Form C: int f_yy phi^2 - int (d/dx [2 f_yy' phi + f_y'y' phi']) phi."""
    if tf.is_zero:
        return 0.0
    return _ibp_standard(model, traj, tf, spec).value


def inequality_sides(
    model: LagrangianModel, traj: Trajectory, tf: TestFunction, spec: QuadratureSpec = DEFAULT_SPEC
) -> tuple:
    """(left, right) of the inequality  T1 - T2 >= T3 + ... + T7."""
    _, terms = second_variation_paper(model, traj, tf, spec)
    return terms.lhs, terms.rhs


def inequality_margin(
    model: LagrangianModel, traj: Trajectory, tf: TestFunction, spec: QuadratureSpec = DEFAULT_SPEC
) -> float:
    """Left minus right side of the inequality; equal to Form B.

    A negative value means the inequality fails for this phi.  The sign is
    reported, never asserted.
    """
    return second_variation_paper(model, traj, tf, spec)[0]


# --------------------------------------------------------------------------
# aggregate report
# --------------------------------------------------------------------------

@dataclass
class CheckReport:
    """Everything :func:`run_check` computes for one configuration.

    A field left as ``None`` is unavailable; the reason is in ``errors``.
    """

    config: dict = field(default_factory=dict)
    F_value: Optional[float] = None
    el_residual_max: Optional[float] = None
    I2_direct: Optional[float] = None
    I2_paper: Optional[float] = None
    terms: Optional[dict] = None
    I2_ibp_standard: Optional[float] = None
    residual_AB: Optional[float] = None
    residual_AC: Optional[float] = None
    inequality_margin: Optional[float] = None
    margin38: Optional[float] = None
    boundary_values: Optional[dict] = None
    boundary_ok: Optional[bool] = None
    quad_errors: dict = field(default_factory=dict)
    converged: Optional[bool] = None
    identity_ok: Optional[bool] = None
    el_ok: Optional[bool] = None
    inequality_holds: Optional[bool] = None
    degenerate: bool = False
    notes: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, allow_nan=False)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def run_check(
    model: LagrangianModel,
    traj: Trajectory,
    tf: TestFunction,
    spec: QuadratureSpec = DEFAULT_SPEC,
    *,
    config: Optional[dict] = None,
    el_grid: int = 201,
) -> CheckReport:
    """Compute every form, residual and flag for one (model, trajectory, phi).

    Component failures are recorded in ``report.errors`` and leave the
    corresponding fields ``None``; nothing is raised for them.
    """
    rep = CheckReport(config=dict(config or {}))
    converged = []

    def attempt(name, fn):
        try:
            return fn()
        except (VarIneqError, ArithmeticError, ValueError) as exc:
            rep.errors[name] = f"{type(exc).__name__}: {exc}"
            return None

    def quad(name, res: QuadResult):
        rep.quad_errors[name] = res.error
        converged.append(res.converged)
        return res.value

    b = attempt("boundary", lambda: boundary_check(tf))
    if b is not None:
        rep.boundary_values = {"alpha": list(b.left), "beta": list(b.right)}
        rep.boundary_ok = b.passed

    rep.F_value = attempt("F_value", lambda: quad("F_value", _functional(model, traj, spec)))
    el = attempt("el_residual", lambda: el_residual(model, traj, el_grid))
    if el is not None:
        rep.el_residual_max = el.max_abs
        rep.el_ok = el.max_abs <= EL_TOL

    if tf.is_zero:
        rep.degenerate = True
        rep.I2_direct = rep.I2_paper = rep.I2_ibp_standard = 0.0
        rep.terms = {k: 0.0 for k in TERM_NAMES}
    else:
        rep.I2_direct = attempt("I2_direct", lambda: quad("I2_direct", _direct(model, traj, tf, 0.0, spec)))

        def form_b():
            terms, results = _form_b(model, traj, tf, spec)
            for k, r in results.items():
                quad(f"I2_paper.{k}", r)
            rep.terms = {k: getattr(terms, k) for k in TERM_NAMES}
            return terms.total

        rep.I2_paper = attempt("I2_paper", form_b)
        rep.I2_ibp_standard = attempt(
            "I2_ibp_standard", lambda: quad("I2_ibp_standard", _ibp_standard(model, traj, tf, spec))
        )
    rep.inequality_margin = rep.I2_paper

    if rep.I2_direct is not None and rep.I2_paper is not None:
        rep.residual_AB = relative_residual(rep.I2_direct, rep.I2_paper)
    if rep.I2_direct is not None and rep.I2_ibp_standard is not None:
        rep.residual_AC = relative_residual(rep.I2_direct, rep.I2_ibp_standard)
        rep.identity_ok = rep.residual_AC <= IDENTITY_TOL
    if rep.inequality_margin is not None:
        rep.inequality_holds = rep.inequality_margin >= 0.0

    if model.name == "pendulum" and model.provider == "analytic":
        from .pendulum import PendulumParams, inequality38_margin

        params = PendulumParams(model.params["m"], model.params["ell"], model.params["g"])
        rep.margin38 = attempt("margin38", lambda: 0.0 if tf.is_zero else inequality38_margin(params, traj, tf, spec))

    rep.converged = all(converged) if converged else None
    return rep
