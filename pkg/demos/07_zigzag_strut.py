# %% [markdown]
# # Zig-zag strut as a single element
#
# A staircase of straight segments is one element whose reference shape has
# kinks. Compressed end to end it behaves like a straight strut with
# equivalent stiffnesses EA_bar and EI_bar. The buckling load of a
# compressible strut then follows in closed form.

# %%
import math

from arcbeam import BeamElement, SectionModel
from arcbeam.cli import load_spec, run_frame
from arcbeam.model_io import build_structure

EA_bar, EI_bar = 486 * math.sqrt(2), 1 / math.sqrt(2)
print(f"Euler load  {EI_bar * math.pi**2:.4f}")
print(f"compressible strut  {EA_bar / 2 * (1 - math.sqrt(1 - 4 * EI_bar * math.pi**2 / EA_bar)):.4f}")

# %% [markdown]
# The element's own flexibility at rest gives EI_bar exactly. Its axial
# flexibility includes the stretching of the segments, so EA_bar only comes
# out as above once the segments are made axially rigid.

# %%
el = build_structure(load_spec("zigzag")).entries[0].element
_, G = el.march_jacobian([0.0, 0.0, 0.0])
c = [x / el.chord for x in el.end_local]
print(f"EI_bar {1 / abs(G[2, 2]):.6f}")
for EA in (el.section.EA, 1e12):
    e = BeamElement(el.shape, SectionModel.stiffness(EA, el.section.EI, "simplified"), el.nis)
    _, Gs = e.march_jacobian([0.0, 0.0, 0.0])
    flex = sum(c[i] * Gs[i, j] * c[j] for i in range(2) for j in range(2))
    print(f"segment EA {EA:8.3g}  EA_bar {e.chord / abs(flex):.2f}")

# %% [markdown]
# Tracing the path with one element and with ten gives the same pre-buckling
# response, and the critical point is found from the sign of the tangent
# determinant.

# %%
one, ten = run_frame(load_spec("zigzag")), run_frame(load_spec("zigzag_10"))
print(f"critical load, one element  {one.result.critical.load:.4f}")
print(f"critical load, ten elements {ten.result.critical.load:.4f}")
