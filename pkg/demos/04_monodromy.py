"""No globally C1 eigenvalue branch for the exotic walk.

Along the k1 axis the eigenvalues are
1/2 + 1/2 cos k1 +- i sin(k1/2) sqrt(1 + cos^2(k1/2)),
which cross linearly at k1 = 0. Continue the eigenvalue that starts at
(-eps, 0) with positive imaginary part to (eps, 0) along two paths: the
straight segment through the degenerate point, and a half circle around
it. The two endpoints are complex conjugates, so the branch picked by
continuity depends on the path.
"""
import numpy as np

from hqwalk import build_named_walk, exotic_paths, monodromy_probe

walk = build_named_walk("exotic2d")
for eps in (0.1, 0.3, 1.0):
    c = np.cos(eps / 2) ** 2
    start = complex(c, np.sin(eps / 2) * np.sqrt(1 + c))
    r1, r2 = exotic_paths(eps)
    through = monodromy_probe(walk, r1, start_branch=start)
    around = monodromy_probe(walk, r2, start_branch=start)
    print(f"eps={eps}: start {start:.7f}")
    print(f"   through (0,0): {through.endpoint:.7f}  ({through.steps} steps)")
    print(f"   around  (0,0): {around.endpoint:.7f}  ({around.steps} steps)")
    print(f"   min |Im| along the half circle: {np.abs(around.trace.imag).min():.4f}")
