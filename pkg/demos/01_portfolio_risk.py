"""
Selecting cameras like a stock portfolio
========================================

Each camera delivers its full resolution when it is up and nothing when it is
disrupted. Its availability probability is Beta-distributed, so the delivered
resolution has a mean and a spread, and pairs of cameras covary through the
correlation matrix. Choosing a subset is then a mean-variance problem.
"""

import numpy as np

from camsel import (
    default_config_path,
    expected_resolutions,
    load_scenario,
    objective_risk,
    selection_from_indices,
)
from camsel.scenario import covariance_matrix

sc = load_scenario(default_config_path())
print(f"{sc.n} cameras, quality floor theta = {sc.theta:,.0f} px, budget psi = {sc.psi}")

# %% Per-camera statistics
# E[p] = a/(a+b) and sd[p] follow from the Beta shape; scaling by the pixel
# count gives the mean and spread of the delivered resolution.
for cam, mean in zip(sc.cameras, expected_resolutions(sc)):
    m = cam.moments
    print(f"  camera {cam.id + 1}: {cam.width}x{cam.height}  E[p]={m.mean:.3f}  sd[p]={m.std:.3f}"
          f"  E[R]={mean:>12,.0f}")

# %% Covariance of delivered resolution
cov = covariance_matrix(sc)
np.set_printoptions(precision=3, suppress=True, linewidth=120)
print("\ncovariance / 1e10:")
print(cov / 1e10)

# %% Two candidate selections
# The three 1080p cameras are strongly correlated with each other in the
# shipped matrix, so stacking them concentrates risk.
for label, idx in [("three 1080p + one 720p", (0, 1, 2, 3)), ("four 720p", (3, 4, 5, 6))]:
    a = selection_from_indices(idx, sc.n)
    q = float(expected_resolutions(sc) @ a)
    r = objective_risk(a, sc)
    print(f"\n{label:>24}: expected quality {q:>12,.0f}  risk {r:.4e}  sd {np.sqrt(r):,.0f}")
