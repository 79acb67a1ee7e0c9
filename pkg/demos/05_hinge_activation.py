# %% [markdown]
# # A thresholded-linear neuron as an approximate posterior
#
# Normalising the responses max(0, w.x - a) across neurons gives a smooth
# ramp between cells. The threshold a is tuned so that value and slope
# match the optimal posterior at the cell edge.

# %%
import math

from torusvq import ProblemSpec, posterior_eval, solve
from torusvq.activation import approx_error, approx_posterior, discrepancy_exponent
from torusvq.codec import make_profile

M = 8
s = solve(ProblemSpec("circle", M, 2)).s
prof = make_profile(2 * math.pi / M, s, "two")

# %%
edge = math.pi / M
for h in (0.0, 0.02, 0.05, 0.1, 0.15):
    t = edge + h
    pe, pa = posterior_eval(prof, t), approx_posterior(t, s, M)
    print(f"theta-pi/M={h:.2f}  exact={pe:.5f}  hinge={pa:.5f}  diff={pe - pa:+.2e}")

# %% [markdown]
# The mismatch grows like the cube of the distance from the edge.

# %%
print(f"fitted exponent = {discrepancy_exponent(s, M):.3f}")

# %% [markdown]
# ## More neurons do not help
#
# The cubic coefficient of the hinge ramp contains cot(pi/M) / sin(s)^2.
# It grows without bound, so the worst-case error never shrinks as M grows.

# %%
for M in (8, 32, 128):
    s = solve(ProblemSpec("circle", M, 2)).s
    err = approx_error(s, M)
    print(f"M={M:4d}  sup error={err.sup_error:.4f}  cubic exact={err.exact_cubic:9.3f}"
          f"  hinge={err.approx_cubic:12.3f}")
