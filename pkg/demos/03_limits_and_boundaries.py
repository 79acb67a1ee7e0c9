# %% [markdown]
# # Limits and the regime boundary
#
# The exact optimum comes from a transcendental equation. Its behaviour at
# the extremes is captured by short series, compared here with the exact
# roots.

# %%
import math

from torusvq import ProblemSpec, solve
from torusvq.asymptotics import (
    boundary_two_three,
    expand_large_M,
    expand_large_n,
    linear_manifold_limit,
    s_near_n1,
)

# %% [markdown]
# ## Many neurons
#
# The series in 1/M is accurate to the omitted fifth-order term in s.
# Doubling M cuts the error by about 32.

# %%
for M in (25, 50, 100, 200, 400):
    spec = ProblemSpec("circle", M, 2)
    print(f"M={M:4d}  |s_series - s_exact| = {abs(expand_large_M(spec).s - solve(spec).s):.2e}")

# %% [markdown]
# Shrink the angles by the neuron spacing and a large circle looks like a
# straight line. Its optimum has s = (n-1)/(2n) in spacing units.

# %%
sol = solve(ProblemSpec("circle", 2000, 3))
print("line limit:", linear_manifold_limit(3), " circle:", sol.s / (2 * math.pi / 2000))

# %% [markdown]
# ## Near one firing event
#
# s grows linearly in n - 1.

# %%
spec = ProblemSpec("circle", 16, 1.0001)
print(f"slope estimate {s_near_n1(spec):.6e}  exact {solve(spec).s:.6e}")

# %% [markdown]
# ## Many firing events
#
# Here s approaches 2 pi/M like a cube root of 1/n. The leading distortion
# term is only as good as (M^2/n)^(1/3) allows, so its accuracy worsens as
# M grows at fixed n.

# %%
for M in (8, 16, 64):
    spec = ProblemSpec("circle", M, 1e6)
    e, sol = expand_large_n(spec), solve(spec)
    print(f"M={M:3d}  rel err s={abs(e.s / sol.s - 1):.1e}  D={abs(e.d_total / sol.d_total - 1):.1e}")

# %% [markdown]
# ## Where three neurons start to overlap
#
# At s = pi/M the two-overlap condition is linear in (n-1)/n. That makes
# the boundary exact, and it approaches 3 M^2 / pi^2 for large M.

# %%
for m in (8, 20, 100):
    b = boundary_two_three(m)
    f = boundary_two_three(m, "torus-factorial")
    print(f"M_eff={m:4d}  circle n={b.n_exact:10.3f} (~{b.n_asymptote:10.3f})"
          f"  factorial n={f.n_exact:10.3f} (~{f.n_asymptote:10.3f})")
