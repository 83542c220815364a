"""The simple pendulum: equation of motion, RK4, the separatrix solution and
the specialised margin  ell * int phi'^2 - g * int cos(theta) phi^2.

Angles in radians; ``omega = sqrt(g / ell)``.  The closed-form solution is

    theta(t) = pi - 4 arctan(exp(-omega t) tan(pi/4 - theta0/4)),

the motion with separatrix energy that creeps up to the inverted position.
Writing u = exp(-omega t) tan(pi/4 - theta0/4), its derivatives are

    theta'  = 4 omega u / (1 + u^2)
    theta'' = -4 omega^2 u (1 - u^2) / (1 + u^2)^2,

so theta'(0) = 2 omega cos(theta0 / 2), which is not zero on (0, pi).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import ConfigurationError, DomainError
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate
from .second_variation import Trajectory
from .testfunctions import Interval, TestFunction

__all__ = [
    "PendulumParams",
    "pendulum_ode_rhs",
    "energy",
    "rk4_integrate",
    "separatrix_theta",
    "separatrix_rates",
    "separatrix_time",
    "separatrix_initial_rate",
    "separatrix_trajectory",
    "inequality38_margin",
]


@dataclass(frozen=True)
class PendulumParams:
    m: float = 1.0
    ell: float = 1.0
    g: float = 9.8
    theta0: float = math.pi / 2

    def __post_init__(self):
        for name in ("m", "ell", "g"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigurationError(f"{name} must be positive and finite, got {v}")
        if not math.isfinite(self.theta0):
            raise ConfigurationError(f"theta0 must be finite, got {self.theta0}")

    @property
    def omega(self) -> float:
        return math.sqrt(self.g / self.ell)

    def _closed_form_constant(self) -> float:
        if not 0.0 < self.theta0 < math.pi:
            raise DomainError(f"closed-form solution needs 0 < theta0 < pi, got theta0 = {self.theta0}")
        return math.tan(math.pi / 4 - self.theta0 / 4)


def pendulum_ode_rhs(params: PendulumParams, theta, theta_dot=None):
    """theta'' = -(g / ell) sin(theta)."""
    return -(params.g / params.ell) * np.sin(theta)


def energy(params: PendulumParams, theta, theta_dot):
    """E = m ell^2 theta'^2 / 2 - m g ell cos(theta)."""
    m, ell, g = params.m, params.ell, params.g
    return 0.5 * m * ell**2 * np.asarray(theta_dot) ** 2 - m * g * ell * np.cos(theta)


def rk4_integrate(params: PendulumParams, theta0: float, theta_dot0: float, interval, steps: int) -> Trajectory:
    """Classical fixed-step RK4 for the pendulum equation.

    Between nodes theta is the cubic Hermite interpolant of (theta, theta');
    theta'' is evaluated from the equation of motion.  The raw node arrays
    are kept in ``traj.nodes``.
    """
    if int(steps) != steps or steps < 10:
        raise ConfigurationError(f"steps must be an integer >= 10, got {steps}")
    steps = int(steps)
    interval = Interval.make(*interval)
    w2 = params.g / params.ell
    h = interval.length / steps
    t = np.linspace(interval.alpha, interval.beta, steps + 1)
    th = np.empty(steps + 1)
    om = np.empty(steps + 1)
    th[0], om[0] = float(theta0), float(theta_dot0)
    sin = math.sin
    a, w = th[0], om[0]
    for i in range(steps):
        k1a, k1w = w, -w2 * sin(a)
        k2a, k2w = w + 0.5 * h * k1w, -w2 * sin(a + 0.5 * h * k1a)
        k3a, k3w = w + 0.5 * h * k2w, -w2 * sin(a + 0.5 * h * k2a)
        k4a, k4w = w + h * k3w, -w2 * sin(a + h * k3a)
        a += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        th[i + 1], om[i + 1] = a, w
    acc = -w2 * np.sin(th)
    s0 = CubicHermiteSpline(t, th, om, extrapolate=False)
    s1 = CubicHermiteSpline(t, om, acc, extrapolate=False)
    return Trajectory(
        interval,
        s0,
        s1,
        lambda x: -w2 * np.sin(s0(x)),
        label="rk4",
        nodes={"x": t, "y": th, "yp": om, "ypp": acc},
    )


def separatrix_rates(params: PendulumParams, t):
    """(theta, theta', theta'') of the closed-form solution at time ``t``."""
    c = params._closed_form_constant()
    w = params.omega
    t = np.asarray(t, dtype=float)
    u = np.exp(-w * t) * c
    q = 1.0 + u * u
    theta = math.pi - 4.0 * np.arctan(u)
    theta_dot = 4.0 * w * u / q
    theta_ddot = -4.0 * w * w * u * (1.0 - u * u) / (q * q)
    if theta.ndim == 0:
        return float(theta), float(theta_dot), float(theta_ddot)
    return theta, theta_dot, theta_ddot


def separatrix_theta(params: PendulumParams, t):
    """theta(t) = pi - 4 arctan(exp(-t sqrt(g/ell)) tan(pi/4 - theta0/4))."""
    return separatrix_rates(params, t)[0]


def separatrix_initial_rate(params: PendulumParams) -> float:
    """theta'(0) of the closed-form solution, 2 omega cos(theta0 / 2)."""
    params._closed_form_constant()
    return 2.0 * params.omega * math.cos(params.theta0 / 2)


def separatrix_time(params: PendulumParams, theta):
    """t = sqrt(ell/g) ln(tan(pi/4 - theta0/4) / tan(pi/4 - theta/4)), for theta0 <= theta < pi."""
    c = params._closed_form_constant()
    theta = np.asarray(theta, dtype=float)
    # allow theta0 to come back a few ulps low from a round trip
    slack = 8 * np.finfo(float).eps * math.pi
    if np.any(theta >= math.pi) or np.any(theta < params.theta0 - slack) or not np.all(np.isfinite(theta)):
        raise DomainError(f"separatrix time needs theta0 = {params.theta0} <= theta < pi")
    t = np.sqrt(params.ell / params.g) * np.log(c / np.tan((math.pi - theta) / 4))
    return float(t) if t.ndim == 0 else t


def separatrix_trajectory(params: PendulumParams, interval) -> Trajectory:
    interval = Interval.make(*interval)
    params._closed_form_constant()
    return Trajectory(
        interval,
        lambda t: separatrix_rates(params, t)[0],
        lambda t: separatrix_rates(params, t)[1],
        lambda t: separatrix_rates(params, t)[2],
        label="separatrix",
    )


def inequality38_margin(
    params: PendulumParams, theta_traj: Trajectory, tf: TestFunction, spec: QuadratureSpec = DEFAULT_SPEC
) -> float:
    """ell * int phi'^2 - g * int cos(theta) phi^2; non-negative when the pendulum inequality holds."""

    def kinetic(t):
        return tf(t)[1] ** 2

    def potential(t):
        return np.cos(theta_traj.y(t)) * tf(t)[0] ** 2

    k = integrate(kinetic, theta_traj.interval, spec).value
    p = integrate(potential, theta_traj.interval, spec).value
    return params.ell * k - params.g * p
