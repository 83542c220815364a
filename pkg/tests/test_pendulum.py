import math

import numpy as np
import pytest

from oracles import bump_dphi_sq, bump_phi_sq
from varineq.errors import ConfigurationError, DomainError
from varineq.lagrangian import pendulum
from varineq.pendulum import (
    PendulumParams,
    energy,
    inequality38_margin,
    pendulum_ode_rhs,
    rk4_integrate,
    separatrix_initial_rate,
    separatrix_rates,
    separatrix_theta,
    separatrix_time,
    separatrix_trajectory,
)
from varineq.second_variation import constant_trajectory, inequality_margin
from varineq.testfunctions import poly_bump

THETA0S = [0.5, math.pi / 2, 3.0]
GL = [(1.0, 1.0), (9.8, 2.0)]


def test_rhs():
    p = PendulumParams(1, 2, 9.8)
    assert pendulum_ode_rhs(p, 0.0, 0.0) == 0.0
    assert pendulum_ode_rhs(p, math.pi / 2, 0.0) == pytest.approx(-4.9, rel=1e-15)
    assert abs(pendulum_ode_rhs(p, math.pi, 0.0)) < 1e-14


def test_params_validation():
    with pytest.raises(ConfigurationError):
        PendulumParams(m=0)
    with pytest.raises(ConfigurationError):
        PendulumParams(g=-1)


@pytest.mark.parametrize("theta0", [0.0, math.pi, -0.1, 4.0])
def test_closed_form_domain(theta0):
    with pytest.raises(DomainError):
        separatrix_theta(PendulumParams(theta0=theta0), 0.0)


def test_rk4_fixed_point():
    traj = rk4_integrate(PendulumParams(g=1, ell=1), 0.0, 0.0, (0, 5), 100)
    assert np.all(traj.nodes["y"] == 0.0)


def test_rk4_small_angle_period():
    traj = rk4_integrate(PendulumParams(g=1, ell=1), 0.01, 0.0, (0, 2 * math.pi), 10_000)
    assert abs(traj.nodes["y"][-1] - 0.01) < 1e-5


def test_rk4_energy_conservation():
    p = PendulumParams(g=1, ell=1)
    traj = rk4_integrate(p, 1.0, 0.5, (0, 10), 100_000)
    e = energy(p, traj.nodes["y"], traj.nodes["yp"])
    assert np.max(np.abs(e - e[0])) / abs(e[0]) < 1e-8


def test_rk4_step_validation():
    with pytest.raises(ConfigurationError):
        rk4_integrate(PendulumParams(), 0.1, 0.0, (0, 1), 5)


def test_separatrix_initial_value():
    for th0 in THETA0S:
        p = PendulumParams(theta0=th0)
        assert separatrix_theta(p, 0.0) == pytest.approx(th0, abs=4e-16)


def test_separatrix_limit():
    p = PendulumParams(g=1, ell=1, theta0=1.0)
    assert separatrix_theta(p, 60.0) == pytest.approx(math.pi, abs=1e-15)


def test_separatrix_initial_rate_nonzero():
    for th0 in THETA0S:
        p = PendulumParams(g=9.8, ell=2, theta0=th0)
        rate = separatrix_initial_rate(p)
        assert rate == pytest.approx(separatrix_rates(p, 0.0)[1], rel=1e-14)
        assert rate > 0


@pytest.mark.parametrize("theta0", THETA0S)
@pytest.mark.parametrize("g,ell", GL)
def test_separatrix_solves_equation_of_motion(theta0, g, ell):
    p = PendulumParams(1.0, ell, g, theta0)
    t = np.linspace(0, 5, 1001)
    th, _, thdd = separatrix_rates(p, t)
    assert np.max(np.abs(thdd + (g / ell) * np.sin(th))) < 1e-10


@pytest.mark.parametrize("theta0", THETA0S)
def test_separatrix_derivatives_match_finite_differences(theta0):
    p = PendulumParams(1.0, 1.0, 1.0, theta0)
    t = np.linspace(0.1, 4.9, 50)
    h = 1e-5
    fd1 = (separatrix_theta(p, t + h) - separatrix_theta(p, t - h)) / (2 * h)
    fd2 = (separatrix_rates(p, t + h)[1] - separatrix_rates(p, t - h)[1]) / (2 * h)
    _, d1, d2 = separatrix_rates(p, t)
    assert np.max(np.abs(fd1 - d1)) < 1e-8
    assert np.max(np.abs(fd2 - d2)) < 1e-8


@pytest.mark.parametrize("theta0", THETA0S)
@pytest.mark.parametrize("g,ell", GL)
def test_separatrix_energy(theta0, g, ell):
    p = PendulumParams(1.0, ell, g, theta0)
    th, thd, _ = separatrix_rates(p, np.linspace(0, 5, 501))
    assert np.max(np.abs(0.5 * thd**2 - (g / ell) * np.cos(th) - g / ell)) < 1e-10


@pytest.mark.parametrize("theta0", THETA0S)
@pytest.mark.parametrize("g,ell", GL)
def test_time_theta_roundtrip(theta0, g, ell):
    p = PendulumParams(1.0, ell, g, theta0)
    t = np.linspace(0, 5, 501)
    assert np.max(np.abs(separatrix_time(p, separatrix_theta(p, t)) - t)) < 1e-10


def test_time_at_theta0_is_zero():
    p = PendulumParams(theta0=1.2)
    assert separatrix_time(p, 1.2) == 0.0


def test_time_monotone():
    p = PendulumParams(theta0=0.7)
    th = np.linspace(0.7, math.pi - 1e-3, 400)
    assert np.all(np.diff(separatrix_time(p, th)) > 0)


@pytest.mark.parametrize("theta", [math.pi, 3.5, 0.1])
def test_time_domain(theta):
    with pytest.raises(DomainError):
        separatrix_time(PendulumParams(theta0=0.5), theta)


def test_rk4_tracks_closed_form():
    p = PendulumParams(1.0, 1.0, 9.8, math.pi / 2)
    traj = rk4_integrate(p, p.theta0, separatrix_initial_rate(p), (0, 2), 10_000)
    t = traj.nodes["x"]
    assert np.max(np.abs(traj.nodes["y"] - separatrix_theta(p, t))) < 1e-6
    q = np.linspace(0, 2, 777)
    assert np.max(np.abs(traj.y(q) - separatrix_theta(p, q))) < 1e-6


def test_margin38_equilibrium():
    p = PendulumParams(1, 1, 1)
    m = inequality38_margin(p, constant_trajectory((0, 1)), poly_bump((0, 1), 1, 3))
    assert m == pytest.approx(bump_dphi_sq(1, 3) - bump_phi_sq(1, 3), rel=1e-12)


@pytest.mark.parametrize("n", [3, 4, 6])
def test_margin38_inverted_positive(n):
    p = PendulumParams(1, 1.5, 9.8)
    tf = poly_bump((0, 3), 1, n)
    m = inequality38_margin(p, constant_trajectory((0, 3), math.pi), tf)
    assert m == pytest.approx(1.5 * bump_dphi_sq(3, n) + 9.8 * bump_phi_sq(3, n), rel=1e-10)
    assert m > 0


@pytest.mark.parametrize("m,ell,g,theta0", [(1, 1, 9.8, math.pi / 2), (2.5, 0.4, 3.0, 0.3), (0.7, 2.0, 9.8, 2.9)])
def test_margin38_matches_general_engine(m, ell, g, theta0):
    p = PendulumParams(m, ell, g, theta0)
    traj = separatrix_trajectory(p, (0, 2))
    tf = poly_bump((0, 2), 1, 3)
    general = inequality_margin(pendulum(m, ell, g), traj, tf)
    assert inequality38_margin(p, traj, tf) * m * ell == pytest.approx(general, rel=1e-10)
