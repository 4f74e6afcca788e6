# %% [markdown]
# # Parabolic arches under an apex load
#
# A shallow parabolic arch is pushed down at the apex under displacement
# control. The load rises to a limit point, drops, and then picks up again
# as the arch inverts. A deeper arch snaps back: the apex deflection itself
# reverses along the path, so only arc-length control can follow it.

# %%
from dataclasses import replace

import numpy as np

from arcbeam.cli import load_spec, run_frame

shallow = run_frame(load_spec("parabola_shallow"))
loads = np.array([s.load for s in shallow.result.steps])
k = next(i for i in range(1, len(loads) - 1) if loads[i - 1] <= loads[i] > loads[i + 1])
print(f"shallow arch: first peak {loads[k]:.6f} at step {k}, minimum after it {loads[k:].min():.6f}, "
      f"final {loads[-1]:.6f}")

# %%
deep = load_spec("parabola_deep")
arc = run_frame(deep)
a = deep.analysis
c = arc.model.dof(a.stop.node, a.stop.dof)
w = np.array([s.u[c] for s in arc.result.steps])
lam = np.array([s.load for s in arc.result.steps])
back = np.flatnonzero(np.diff(w) < 0)
print(f"deep arch: {len(w) - 1} arc-length steps, apex deflection reverses between steps {back[0]} and {back[-1] + 1}")
print(f"largest load on the path {lam.max():.6f}")

# %% [markdown]
# Displacement control on the same arch cannot pass the point where the apex
# deflection turns back. It stops there with an error and keeps the steps it
# had already accepted, instead of jumping silently to a distant branch.

# %%
disp = replace(deep, analysis=replace(a, control="displacement", dof=a.stop, target=a.stop_value, steps=60,
                                      ds=None, stop=None, stop_value=None))
r = run_frame(disp)
print(r.error)
print(f"{len(r.result.steps)} steps kept")
