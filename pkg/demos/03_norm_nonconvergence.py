"""Averaged log-derivatives converge pointwise but not uniformly.

C_t(k) is the log-derivative of U_hat(k)^t divided by i t. Away from the
degenerate points it settles on H1(k) at rate ~1/t. Near (0, 0) the
transition happens on the scale |k| ~ 1/t, so the largest error over the
torus stays of order one. That scale forces a grid fine enough to see it:
the nearest grid point to the origin must satisfy t |k| of order one.
At (0, 0) itself the average is constant in t.
"""
import numpy as np

from hqwalk import (SINGULAR_POINTS, TorusGrid, build_named_walk, cocycle_average,
                    convergence_report, eigendecompose, group_velocity_field, h_operator_field)

walk = build_named_walk("exotic2d")
print("C_t(0, 0) for t = 1, 97:")
for t in (1, 97):
    print(np.round(cocycle_average(walk, 1, t, np.array([[0.0, 0.0]])).values[0], 12))

t_list = [64, 128, 256, 512]
for N in (128, 768):
    grid = TorusGrid(N, 2)
    spec = eigendecompose(walk, grid)
    ref = h_operator_field(spec, group_velocity_field(spec, walk), 1)
    rep = convergence_report(walk, 1, t_list, grid, reference=ref, exclusion_radius=0.3,
                             singular_points=SINGULAR_POINTS["exotic2d"])
    print(f"\ngrid {N}^2 (nearest point to the origin at |k| = {np.sqrt(2) * np.pi / N:.4f})")
    print("    t   pointwise   sup")
    for r in rep:
        print(f"{r.t:5d}   {r.pointwise_err:.5f}   {r.sup_err:.5f}")

# along k = (0, s) the limit H1 vanishes while C_t(0, 0) does not: the error
# is a function of t * s alone, so it is the same at every t
print("\nerror along k = (0, s) at t * s = 0.5, 1, 2, 4, 8:")
for t in (64, 512):
    s = np.array([0.5, 1, 2, 4, 8]) / t
    pts = np.stack([np.zeros_like(s), s], axis=1)
    spec = eigendecompose(walk, pts)
    ref = h_operator_field(spec, group_velocity_field(spec, walk), 1)
    err = np.linalg.norm(cocycle_average(walk, 1, t, pts).values - ref, 2, axis=(1, 2))
    print(f"t={t:3d}: " + "  ".join(f"{e:.4f}" for e in err))
