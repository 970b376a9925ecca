"""
=========================================
Correlation and entanglement of a singlet
=========================================

Exact orbital entropies for the four singlet geometries and the two triplet
ones. Without the superselection rule every orbital looks entangled. With it,
the singlet orbitals carry correlation but no usable entanglement, while the
open-shell triplet orbitals keep about one bit.
"""

# %%
# Exact run for one geometry
# --------------------------
# ``mode="exact"`` takes expectation values straight from the statevector, so
# noise reduction has nothing to remove.
from orbent.pipeline import RunConfig, run

res = run(RunConfig("singlet-image-12", ssr=True, mode="exact"), write=False)
for name in ["s1[2]", "I[2]", "Issr[2]", "Essr[2]", "Issr[2,3]"]:
    print(f"{name:10s} {res.report[name]:.6f}")

# %%
# All singlet geometries
# ----------------------
# The SSR entanglement stays at zero and the SSR correlation is exactly half
# the unrestricted one.
for image in (1, 8, 12, 16):
    v = run(RunConfig(f"singlet-image-{image}", mode="exact"), write=False).report.values()
    row = "  ".join(f"{v[f'Issr[{i}]']:.4f}/{v[f'Essr[{i}]']:.1e}" for i in range(4))
    print(f"image {image:2d}  Issr/Essr per orbital: {row}")

# %%
# Triplet geometries
# ------------------
# Orbitals 2 and 3 hold one unpaired electron each, in a superposition of spin
# up and spin down, which the rule does not forbid.
for image in (1, 8):
    v = run(RunConfig(f"triplet-image-{image}", mode="exact"), write=False).report.values()
    print(f"triplet image {image}: Essr[2] = {v['Essr[2]']:.6f}, Essr[3] = {v['Essr[3]']:.6f}")

# %%
# Pair correlations
# -----------------
# Mutual information with and without the rule. The unrestricted value is
# never smaller, and pair (2, 3) is the strongest.
full = run(RunConfig("singlet-image-12", ssr=False, mode="exact"), write=False).report.values()
ssr = res.report.values()
for i, j in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]:
    print(f"({i},{j})  I = {full[f'I[{i},{j}]']:.4f}   Issr = {ssr[f'Issr[{i},{j}]']:.4f}")
