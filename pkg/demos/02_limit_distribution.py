"""Ballistic limit law of x / t, from the spectrum and from simulation.

Start the exotic walk at the origin with coin (1, 0). The limit measure
of x / t is built from the band velocities and the overlap of the initial
vector with each eigenvector. Running the walk for t steps and comparing
characteristic functions and moments shows the finite-t law closing in.
The Hadamard walk in one dimension gives a second check through the
Kolmogorov distance of the cumulative distributions.
"""
import numpy as np

from hqwalk import (TorusGrid, build_named_walk, compare, delta_state, eigendecompose, evolve,
                    fourier_state, group_velocity_field, limit_measure, scaled_distribution)


def limit_for(walk, xi, N):
    grid = TorusGrid(N, walk.d)
    spec = eigendecompose(walk, grid)
    return limit_measure(spec, group_velocity_field(spec, walk), fourier_state(xi, grid))


walk = build_named_walk("exotic2d")
xi = delta_state((0, 0), [1, 0])
mu = limit_for(walk, xi, 128)
print(f"exotic2d limit: {len(mu.weights)} atoms, mass {mu.total_mass():.6f}, "
      f"unresolved {mu.unresolved_mass:.1e}, max |v| {np.abs(mu.velocities).max():.4f}")

w_list = [(1, 0), (0, 1), (1, 1), (2, -1)]
m_list = [(1, 0), (0, 1), (2, 0), (0, 2), (1, 1)]
state, now = xi, 0
for t in (32, 64, 128, 256):
    state = evolve(walk, state, t - now)
    now = t
    rep = compare(scaled_distribution(state, t), mu, w_list, m_list)
    chars = " ".join(f"{g:.4f}" for _, g in rep.char_gaps)
    moms = " ".join(f"{g:.4f}" for _, g in rep.moment_gaps)
    print(f"t={t:4d}  char gaps {chars}   moment gaps {moms}")

had = build_named_walk("hadamard1d")
xi1 = delta_state([0], [1, 1j])
mu1 = limit_for(had, xi1, 1024)
for t in (50, 100, 200, 400):
    p = scaled_distribution(evolve(had, xi1, t), t)
    print(f"hadamard1d t={t:3d}: Kolmogorov distance {compare(p, mu1).kolmogorov[0]:.4f}")
