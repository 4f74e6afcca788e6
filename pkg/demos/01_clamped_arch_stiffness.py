# %% [markdown]
# # Clamped circular arch: initial stiffness under a crown load
#
# Half of a symmetric clamped arch is modelled with the crown on a sliding
# clamp. The quantity of interest is the initial stiffness, the ratio of the
# crown load to the crown deflection as both go to zero. Each element is
# marched with NIS integration steps, and the error should fall by about four
# each time NIS doubles.

# %%
from arcbeam.cli import load_spec, metric_value, richardson

one = load_spec("arch_sym")
two = load_spec("arch_sym_2el")
print(one.title)

# %% [markdown]
# One element against two elements with half the steps each. With the same
# total number of steps, the two discretisations should land close together.

# %%
grid = [4, 8, 16, 32, 64, 128, 256]
vals = {n: metric_value(one.with_nis(n)) for n in grid}
prev = None
for n in grid:
    k = vals[n]
    ratio = "" if prev is None else f"{(prev[1] - vals[256]) / (k - vals[256]):6.2f}" if n < 256 else ""
    print(f"NIS {n:4d}  one element {k:10.4f}  two elements {metric_value(two.with_nis(n // 2)):10.4f}  {ratio}")
    prev = (n, k)

# %% [markdown]
# Richardson extrapolation of the two finest grids, assuming second order.

# %%
print(f"extrapolated stiffness {richardson(128, vals[128], 256, vals[256]):.4f}")
