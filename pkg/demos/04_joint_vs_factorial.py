# %% [markdown]
# # Encoding a torus: one codebook or two
#
# A 2-torus can be tiled by M neurons jointly, a sqrt(M) by sqrt(M) grid.
# It can also be split into two circles of M/2 neurons each, decoded
# independently. Which scheme reconstructs better depends on both M and n.

# %%
from torusvq.asymptotics import asymptotic_crossing_M
from torusvq.compare import compare, sweep, winner_boundary

# %% [markdown]
# ## A few sample points

# %%
for M, n in [(8, 100), (16, 1e4), (8, 1)]:
    row = compare(M, n)
    print(f"M={M:3g} n={n:>7g}  joint={row.d_joint:.5f}  factorial={row.d_factorial:.5f}  -> {row.winner.value}")

# %% [markdown]
# With a single firing event the factorial code pays an extra 2. Each
# circle alone carries no information about the other coordinate.

# %% [markdown]
# ## The relative gap
#
# `rel_gap` is (D_factorial - D_joint) / D_factorial. Negative values mean
# the factorial code is better.

# %%
for M in (8, 10, 12, 16):
    gaps = [f"{row.rel_gap:+.3f}" for row in sweep([M], (2, 1e4), 5)]
    print(f"M={M:3d}  " + "  ".join(gaps))

# %% [markdown]
# ## The boundary between the two
#
# For large n both distortions shrink like 1/n. Their ratio then depends on
# M alone, so the boundary flattens out at a fixed M.

# %%
print(f"asymptotic crossing M = {asymptotic_crossing_M():.6f}")
for n in (5, 10, 100, 1e4, 1e6):
    m = winner_boundary(n)
    print(f"n={n:>8g}  M_critical = {'none' if m is None else f'{m:.4f}'}")
