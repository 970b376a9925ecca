"""
===================================
Noise reduction on sampled matrices
===================================

Finite shots and depolarizing noise push small eigenvalues of the measured
matrices away from zero, which inflates every entropy. A hard threshold on
the singular values removes most of that before the projection back to a
physical density matrix.
"""

# %%
# Simulated data
# --------------
# 10,000 shots per circuit and a 2% global depolarizing channel. Clipping
# negative eigenvalues leaves the noise floor in place. Thresholding removes
# it, along with true entropies that are smaller than the noise (s1[0] here).
import numpy as np

from orbent.denoise import bulk_edge_study
from orbent.pipeline import RunConfig, run

exact = run(RunConfig("singlet-image-12", mode="exact"), write=False).report.values()
cfg = dict(fixture="singlet-image-12", mode="simulate", shots=10_000, p=0.02, seed=3)
on = run(RunConfig(**cfg, noise_reduction="on"), write=False)
raw = run(RunConfig(**cfg, noise_reduction="raw-baseline"), write=False).report.values()

for name in ["s1[0]", "s1[2]", "s2[0,1]", "s2[2,3]"]:
    print(f"{name:8s} exact {exact[name]:.4f}  thresholded {on.report[name]:.4f}  clipped {raw[name]:.4f}")

# %%
# What the threshold removed
# --------------------------
# For the pair (2, 3) matrix only the two physical singular values survive.
rep = on.analysis.reports[next(t for t in on.plan.targets if t.orbitals == (2, 3))]
print("tau", round(rep["tau"], 5))
print("before", np.round(rep["singular_values_before"][:5], 4))
print("after ", np.round(rep["singular_values_after"][:5], 4))

# %%
# Where the threshold sits
# ------------------------
# Rank-two signal (0.15 and 0.2) plus sparse Gaussian noise. At full density the
# threshold clears the noise bulk. At 20% density the largest noise value is set
# by the heaviest row and crosses it in about one matrix in five.
for r in bulk_edge_study((1.0, 0.8, 0.2), n_samples=300):
    print(f"R={r.R:.1f}  tau={r.tau:.4f}  signal kept {r.signal_survival:.0%}  "
          f"pure-noise alarms {r.pure_noise_false_alarm:.1%}")
