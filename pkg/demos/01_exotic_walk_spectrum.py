"""Band structure and velocity operators of the exotic 2-d walk.

The walk mixes the two coin states with shifts along both axes. Its two
eigenvalues only depend on cos k1 + cos k2 and touch at (0, 0) and (pi, pi),
where the group velocity is undefined. Away from those points the
velocity operators H1, H2 are assembled from band velocities and
eigenprojections, and they agree with the closed form.
"""
import numpy as np

from hqwalk import (TorusGrid, build_named_walk, closed_form_exotic_H, commutator_norm,
                    eigendecompose, group_velocity_field, h_operator_field)

walk = build_named_walk("exotic2d")
print(walk)
print("U(0, 0) =\n", np.round(walk((0.0, 0.0)), 12))
print("U(pi/2, pi/2) =\n", np.round(walk((np.pi / 2, np.pi / 2)), 12))

grid = TorusGrid(64, 2)
spec = eigendecompose(walk, grid)
vel = group_velocity_field(spec, walk)
print(f"\n{grid.size} grid points, {spec.flagged.sum()} flagged, "
      f"smallest eigenvalue gap {spec.gaps.min():.3e}")
print(f"largest imaginary part dropped from band velocities: {vel.max_imag:.1e}")

ok = ~spec.flagged
for axis in (1, 2):
    h = h_operator_field(spec, vel, axis)
    gap = np.abs(h[ok] - closed_form_exotic_H(axis, spec.points[ok])).max()
    print(f"axis {axis}: |H - closed form| <= {gap:.1e}, "
          f"speed bound ||dU/dk|| = {commutator_norm(walk, axis, grid):.6f}")

h1, h2 = h_operator_field(spec, vel, 1), h_operator_field(spec, vel, 2)
comm = np.linalg.norm(h1[ok] @ h2[ok] - h2[ok] @ h1[ok], 2, axis=(1, 2)).max()
print(f"||[H1, H2]|| <= {comm:.1e}: the two velocity operators commute")

# a closer look near the degenerate point: H1 depends on the direction of approach
for angle in (0.0, np.pi / 4, np.pi / 2):
    k = 1e-4 * np.array([np.cos(angle), np.sin(angle)])
    print(f"H1 near (0,0) from angle {angle:.3f}:\n", np.round(closed_form_exotic_H(1, k), 4))
