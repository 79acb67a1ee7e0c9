# %% [markdown]
# # Optimal posteriors on a circle
#
# A layer of M neurons encodes an angle theta. Each input triggers n firing
# events, and the decoder rebuilds the input from which neurons fired.
# Minimising the reconstruction bound leaves one free shape parameter: the
# half-width s of the band where neighbouring posteriors overlap.
#
# Run with `python demos/01_circle_posteriors.py`.

# %%
import math

import numpy as np

from torusvq import ProblemSpec, build_profile, posterior_eval, solve

# %% [markdown]
# ## Few firing events: two neurons overlap
#
# With n = 2 each posterior is flat at 1 near its own neuron. It then ramps
# down across the cell edge at pi/M.

# %%
spec = ProblemSpec("circle", 8, 2)
sol = solve(spec)
print(f"regime={sol.regime.value}  s={sol.s:.6f}  s/(pi/M)={sol.s_normalized:.4f}")
print(f"r={sol.r:.6f}  D1={sol.d1:.6f}  D2={sol.d2:.6f}  D1+D2={sol.d_total:.6f}")

prof = build_profile(spec, sol.s, sol.regime)
theta = np.linspace(0.0, math.pi / 2, 13)
for t, p in zip(theta, posterior_eval(prof, theta)):
    print(f"  theta={t:6.3f}  p={p:.4f}  " + "#" * int(round(40 * p)))

# %% [markdown]
# ## Many firing events: three neurons overlap
#
# As n grows the posteriors widen until the overlap passes the cell edge.
# Then three neurons share the region around every neuron, and the peak
# value falls below 1.

# %%
spec = ProblemSpec("circle", 8, 100)
sol = solve(spec)
prof = build_profile(spec, sol.s, sol.regime)
print(f"regime={sol.regime.value}  s/(pi/M)={sol.s_normalized:.4f}  peak p={posterior_eval(prof, 0.0):.4f}")

# %% [markdown]
# ## How s moves with n
#
# s rises steadily with n. Two-overlap solutions stop at s = pi/M, and
# the three-overlap branch takes over from there up to 2 pi/M.

# %%
for n in (1, 1.5, 2, 5, 20, 100, 1e4, 1e6):
    sol = solve(ProblemSpec("circle", 8, n))
    print(f"n={n:>9g}  {sol.regime.value:5s}  s/(pi/M)={sol.s_normalized:.4f}  D1+D2={sol.d_total:.3e}")

# %% [markdown]
# At n = 1 the optimum is a hard quantizer. Each neuron owns one arc, and
# its reference vector sits at the arc centroid, at radius
# (M/pi) sin(pi/M).

# %%
sol = solve(ProblemSpec("circle", 8, 1))
print(f"r={sol.r!r}  closed form={8 / math.pi * math.sin(math.pi / 8)!r}")
