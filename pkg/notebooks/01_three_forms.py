# %% [markdown]
# # Three ways to write the second variation
#
# For a Lagrangian f(x, y, y'), a trajectory y and a variation phi that
# vanishes with phi' and phi'' at both ends, the second variation can be
# evaluated
#
# * directly (Form A),
# * after an integration by parts that fills the derivative slots with
#   (0, phi, phi') (Form B, also the inequality margin),
# * after an integration by parts with the true total derivative (Form C).
#
# A and C always agree.  B agrees with them only when f_yy' and all third
# partials vanish.

# %%
import numpy as np

from varineq import (
    constant_trajectory,
    get_model,
    linear_trajectory,
    poly_bump,
    second_variation_direct,
    second_variation_ibp_standard,
    second_variation_paper,
)

# %% pendulum at rest, m = ell = g = 1, on [0, 1]
model = get_model("pendulum", m=1, ell=1, g=1)
traj = constant_trajectory((0, 1))
phi = poly_bump((0, 1), lam=1, n=3)

a = second_variation_direct(model, traj, phi)
b, terms = second_variation_paper(model, traj, phi)
c = second_variation_ibp_standard(model, traj, phi)
print(f"A = {a:.15g}\nB = {b:.15g}\nC = {c:.15g}")
print("exact 1/770 - 1/12012 =", 1 / 770 - 1 / 12012)
print(terms)

# %% [markdown]
# For the arclength Lagrangian sqrt(1 + y'^2) the third partial f_y'y'y' is
# nonzero, and Form B drifts away from A and C.

# %%
model = get_model("arclength")
traj = linear_trajectory((0, 1), slope=1.0)
for n in (3, 4, 5, 6):
    phi = poly_bump((0, 1), 1, n)
    a = second_variation_direct(model, traj, phi)
    b, _ = second_variation_paper(model, traj, phi)
    c = second_variation_ibp_standard(model, traj, phi)
    print(f"n={n}  A={a:.6e}  B-A={b - a:+.3e}  C-A={c - a:+.1e}")

# %% [markdown]
# Form A is quadratic in phi, so doubling lambda multiplies it by four.

# %%
model = get_model("harmonic", k=1)
traj = constant_trajectory((0, 2))
ratio = second_variation_direct(model, traj, poly_bump((0, 2), 2, 3)) / second_variation_direct(
    model, traj, poly_bump((0, 2), 1, 3)
)
print("A(2 phi) / A(phi) =", ratio)
