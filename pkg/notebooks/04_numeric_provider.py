# %% [markdown]
# # User Lagrangians without closed-form partials
#
# A value-only callback gets central-difference partials.  First partials
# come out to about 1e-10 relative, second to 1e-7 and third to 1e-4 at
# worst.  Acceptance-grade runs should use an analytic model.

# %%
import numpy as np

from varineq import (
    Point3,
    eval_partials,
    get_model,
    linear_trajectory,
    numeric_model,
    poly_bump,
    run_check,
)

analytic = get_model("arclength")
numeric = numeric_model("arclength-fd", lambda x, y, yp: np.sqrt(1 + yp**2))

p = Point3(0.0, 0.0, 0.8)
a, n = eval_partials(analytic, p), eval_partials(numeric, p)
for name, exact in a.as_dict().items():
    print(f"{name:9s} exact={exact:+.12e}  fd={getattr(n, name):+.12e}")

# %% [markdown]
# On a straight line y'' = 0, so the noisy third partials barely enter the
# total derivative and both models give the same residuals.

# %%
traj = linear_trajectory((0, 1), slope=0.8)
phi = poly_bump((0, 1), 1, 3)
for model in (analytic, numeric):
    rep = run_check(model, traj, phi)
    print(model.name, "residual_AC =", rep.residual_AC, "residual_AB =", rep.residual_AB)
