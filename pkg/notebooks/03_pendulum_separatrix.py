# %% [markdown]
# # Pendulum: the separatrix solution and the specialised inequality
#
#     theta(t) = pi - 4 arctan(exp(-t sqrt(g/ell)) tan(pi/4 - theta0/4))
#
# solves theta'' + (g/ell) sin(theta) = 0 with separatrix energy.  Its
# initial rate is 2 sqrt(g/ell) cos(theta0/2), not zero.

# %%
import math

import numpy as np

from varineq import (
    PendulumParams,
    get_model,
    inequality38_margin,
    inequality_margin,
    poly_bump,
    rk4_integrate,
    separatrix_theta,
    separatrix_time,
    separatrix_trajectory,
)
from varineq.pendulum import energy, separatrix_initial_rate, separatrix_rates

p = PendulumParams(m=1.0, ell=1.0, g=9.8, theta0=math.pi / 2)
t = np.linspace(0, 5, 1001)
theta, theta_dot, theta_ddot = separatrix_rates(p, t)
print("max |theta'' + (g/ell) sin theta| =", np.max(np.abs(theta_ddot + p.g / p.ell * np.sin(theta))))
print("max |t(theta(t)) - t|            =", np.max(np.abs(separatrix_time(p, theta) - t)))
print("theta'(0)                        =", separatrix_initial_rate(p))
print("energy per m ell^2 minus g/ell   =", np.max(np.abs(0.5 * theta_dot**2 - p.g / p.ell * np.cos(theta) - p.g / p.ell)))

# %% RK4 from the same initial state
rk = rk4_integrate(p, p.theta0, separatrix_initial_rate(p), (0, 2), 10_000)
print("max |RK4 - closed form| on [0, 2] =", np.max(np.abs(rk.nodes["y"] - separatrix_theta(p, rk.nodes["x"]))))
e = energy(p, rk.nodes["y"], rk.nodes["yp"])
print("relative energy drift            =", np.max(np.abs(e - e[0])) / abs(e[0]))

# %% [markdown]
# The general margin and ell * int phi'^2 - g * int cos(theta) phi^2 differ
# by the factor m ell.

# %%
model = get_model("pendulum", m=p.m, ell=p.ell, g=p.g)
for beta in (0.5, 1.0, 2.0, 4.0):
    traj = separatrix_trajectory(p, (0, beta))
    phi = poly_bump((0, beta), 1, 3)
    general = inequality_margin(model, traj, phi)
    special = inequality38_margin(p, traj, phi)
    print(f"[0, {beta}]  margin={general:+.10e}  m*ell*margin38={p.m * p.ell * special:+.10e}")
