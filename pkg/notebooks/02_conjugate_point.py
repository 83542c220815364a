# %% [markdown]
# # The harmonic oscillator past its conjugate point
#
# y = 0 solves the Euler-Lagrange equation of f = y'^2/2 - y^2/2 on every
# interval, but it stops minimising once the interval is longer than pi.
# With the cubic bump, the margin is
#
#     beta^11 / 770 - beta^13 / 12012
#
# which changes sign at beta = sqrt(12012 / 770), about 3.9497.  (The bump is
# not the worst variation, so this is later than pi.)

# %%
import numpy as np

from varineq import constant_trajectory, get_model, inequality_margin, poly_bump

model = get_model("harmonic", k=1)
betas = np.linspace(3.0, 4.5, 16)
for beta in betas:
    m = inequality_margin(model, constant_trajectory((0, beta)), poly_bump((0, beta), 1, 3))
    exact = beta**11 / 770 - beta**13 / 12012
    print(f"beta={beta:5.2f}  margin={m:+12.5e}  closed form={exact:+12.5e}")

print("crossing at", np.sqrt(12012 / 770))

# %% [markdown]
# The same sweep from the command line:
#
#     varineq sweep --problem harmonic --axis beta=3.5,3.9,4.0,4.5
#
# and a single check exits 3 once the margin is negative:
#
#     varineq check --problem harmonic --beta 4.0; echo $?

# %%
from varineq.cli import main

print("exit code at beta = 3.5:", main(["check", "--problem", "harmonic", "--beta", "3.5", "--out", "/dev/null"]))
print("exit code at beta = 4.0:", main(["check", "--problem", "harmonic", "--beta", "4.0", "--out", "/dev/null"]))
