# %% [markdown]
# # Unrolling a full circle with an end moment
#
# A closed circular ring, clamped at one end, is opened by an end moment. The
# moment M1 = EI/R0 straightens it exactly, and 2 M1 rolls it into a circle
# of the opposite sense. We watch the deflection of the midpoint, scaled by
# R0, converge as NIS doubles. The exact values at M1 and 2 M1 are -2 and
# about -3.94612.

# %%
from dataclasses import replace

from arcbeam.cli import load_spec, run_cantilever

base = load_spec("unfolding")
print(base.title)


def probe(nis):
    spec = replace(base, moments=(-1.0, -2.0), compare_laws=False).with_nis(nis).with_law("consistent")
    run = run_cantilever(spec)
    return [-r[7] / run.scale for r in run.rows]


# %%
prev = None
for n in (4, 8, 16, 32, 64, 128, 256):
    a, b = probe(n)
    err = a + 2.0
    ratio = "" if prev is None else f"{prev / err:5.2f}"
    print(f"NIS {n:4d}  w(M1) {a:10.6f}  w(2 M1) {b:10.6f}  {ratio}")
    prev = err
