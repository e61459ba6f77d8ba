import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hqwalk import (AliasingError, LatticeState, ShapeMismatchError, TorusGrid, VelocityMeasure,
                    build_named_walk, char_function, commutator_norm, compare, delta_state,
                    eigendecompose, evolve, fourier_state, group_velocity_field, h_expectation,
                    h_operator_field, kolmogorov_distance, limit_measure, moment,
                    scaled_distribution, walk_from_spec)

SHIFT = build_named_walk("shift1d")
HAD = build_named_walk("hadamard1d")
EXO = build_named_walk("exotic2d")


def direct_fourier(state, grid):
    """Site-by-site sum of xi(x) exp(i k.x)."""
    k = grid.points()
    out = np.zeros((len(k), state.n), dtype=complex)
    for site, vec in state.items():
        out += np.exp(1j * (k @ np.array(site)))[:, None] * vec
    return out


def spectral_measure(symbol, xi, grid):
    spec = eigendecompose(symbol, grid)
    vel = group_velocity_field(spec, symbol)
    return spec, vel, limit_measure(spec, vel, fourier_state(xi, grid))


@pytest.fixture(scope="module")
def exo128():
    xi = delta_state([0, 0], [1, 0])
    return (xi,) + spectral_measure(EXO, xi, TorusGrid(128, 2))


def test_fourier_examples():
    g = TorusGrid(8, 2)
    np.testing.assert_allclose(fourier_state(delta_state([0, 0], [1, 0]), g).values,
                               np.tile([1, 0], (g.size, 1)), atol=1e-15)
    g1 = TorusGrid(8)
    np.testing.assert_allclose(fourier_state(delta_state([1], [1]), g1).values[:, 0],
                               np.exp(1j * g1.axis()), atol=1e-15)
    two = LatticeState.from_sites({(0,): [2 ** -0.5], (2,): [2 ** -0.5]})
    g0 = TorusGrid(4, 1, offset=0.0)  # contains k = pi/2
    assert abs(fourier_state(two, g0).values[1, 0]) < 1e-15


def test_fourier_aliasing():
    wide = LatticeState.from_sites({(0,): [1.0], (9,): [1.0]})
    with pytest.raises(AliasingError) as info:
        fourier_state(wide, TorusGrid(8))
    assert info.value.required_N == 10
    fourier_state(wide, TorusGrid(10))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=1, max_size=6, unique=True),
       st.integers(0, 2 ** 32 - 1), st.sampled_from([13, 16]), st.sampled_from([0.0, 0.5, 0.25]))
def test_fourier_matches_direct_sum_and_parseval(sites, seed, N, offset):
    rng = np.random.default_rng(seed)
    vecs = rng.normal(size=(len(sites), 2)) + 1j * rng.normal(size=(len(sites), 2))
    xi = LatticeState.from_sites(dict(zip(sites, vecs))).normalized()
    g = TorusGrid(N, 2, offset)
    fs = fourier_state(xi, g)
    np.testing.assert_allclose(fs.values, direct_fourier(xi, g), atol=1e-12)
    assert abs(fs.norm_squared() - 1) <= 1e-10


def test_shift_limit_is_delta_at_one():
    g = TorusGrid(32)
    xi = LatticeState.from_sites({(0,): [0.6], (3,): [0.8j]})
    _, _, mu = spectral_measure(SHIFT, xi, g)
    np.testing.assert_allclose(mu.velocities, 1, atol=1e-15)
    assert mu.total_mass() == pytest.approx(1, abs=1e-12)
    assert char_function(mu, [np.pi]) == pytest.approx(-1, abs=1e-12)
    assert char_function(mu, [0.0]) == pytest.approx(mu.total_mass(), abs=1e-15)


def test_identity_limit_is_delta_at_zero():
    ident = walk_from_spec({"d": 1, "n": 1, "coefficients": [{"offset": [0], "matrix": [[[1, 0]]]}]})
    _, _, mu = spectral_measure(ident, delta_state([0], [1]), TorusGrid(16))
    np.testing.assert_allclose(mu.velocities, 0, atol=1e-15)


def test_exotic_limit_support_and_mass(exo128):
    _, spec, _, mu = exo128
    bound = 1 / np.sqrt(2)
    assert np.abs(mu.velocities).max() <= bound + 1e-6
    assert mu.total_mass() >= 0.999
    assert mu.total_mass() + mu.unresolved_mass == pytest.approx(1, abs=1e-9)
    assert mu.unresolved_mass < 10 / 128
    assert mu.metadata["grid_N"] == 128


def test_exotic_unresolved_mass_on_centred_grid():
    g = TorusGrid(16, 2, offset=0.0)  # hits (0,0) and (pi,pi)
    spec, _, mu = spectral_measure(EXO, delta_state([0, 0], [1, 0]), g)
    assert spec.flagged.sum() == 2
    assert mu.unresolved_mass == pytest.approx(2 / 256)
    assert mu.total_mass() + mu.unresolved_mass == pytest.approx(1, abs=1e-9)


def test_first_moment_two_routes(exo128):
    xi, spec, vel, mu = exo128
    fs = fourier_state(xi, spec.grid)
    for axis in (1, 2):
        e = np.eye(2, dtype=int)[axis - 1]
        assert moment(mu, e) == pytest.approx(h_expectation(h_operator_field(spec, vel, axis), fs),
                                              abs=1e-8)


def test_exotic_char_function_against_simulation(exo128):
    xi, _, _, mu = exo128
    p = scaled_distribution(evolve(EXO, xi, 256), 256)
    rep = compare(p, mu, [(1, 0), (0, 1), (1, 1), (2, -1)], [(1, 0), (0, 2)])
    assert all(g < 0.05 for _, g in rep.char_gaps)
    assert abs(char_function(mu, (1, 0)) - np.sum(p.masses * np.exp(1j * p.velocities[:, 0]))) < 0.05


def test_hadamard_kolmogorov():
    xi = delta_state([0], [1, 1j])
    _, _, mu = spectral_measure(HAD, xi, TorusGrid(512))
    p = scaled_distribution(evolve(HAD, xi, 400), 400)
    rep = compare(p, mu)
    assert rep.kolmogorov[0] < 0.05
    # spread bounded by the coin speed 1/sqrt(2)
    assert np.abs(mu.velocities).max() <= 1 / np.sqrt(2) + 1e-9


def test_shift_compare_exact():
    xi = delta_state([0], [1])
    _, _, mu = spectral_measure(SHIFT, xi, TorusGrid(8))
    p = scaled_distribution(evolve(SHIFT, xi, 13), 13)
    rep = compare(p, mu, [(0.5,), (3.0,)], [(1,), (2,), (5,)])
    assert max(g for _, g in rep.char_gaps + rep.moment_gaps) < 1e-12
    assert rep.kolmogorov == [pytest.approx(0, abs=1e-12)]
    d = rep.to_dict()
    assert set(d) == {"char_function", "moments", "kolmogorov"}


def test_kolmogorov_distance_basics():
    assert kolmogorov_distance([0.0], [1.0], [0.0], [1.0]) == 0
    assert kolmogorov_distance([0.0], [1.0], [1.0], [1.0]) == 1
    assert kolmogorov_distance([0, 1], [0.5, 0.5], [0.5], [1.0]) == pytest.approx(0.5)
    assert kolmogorov_distance([1 - 1e-16], [1.0], [1.0], [1.0]) == 0


def test_limit_measure_grid_mismatch():
    spec = eigendecompose(SHIFT, TorusGrid(8))
    vel = group_velocity_field(spec, SHIFT)
    with pytest.raises(ShapeMismatchError):
        limit_measure(spec, vel, fourier_state(delta_state([0], [1]), TorusGrid(16)))
    other = group_velocity_field(eigendecompose(SHIFT, TorusGrid(8)), SHIFT)
    with pytest.raises(ShapeMismatchError):
        limit_measure(spec, other, fourier_state(delta_state([0], [1]), TorusGrid(8)))
    p = scaled_distribution(delta_state([0, 0], [1, 0]), 1)
    with pytest.raises(ShapeMismatchError):
        compare(p, limit_measure(spec, vel, fourier_state(delta_state([0], [1]), TorusGrid(8))))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_robustness_in_initial_vector(seed):
    rng = np.random.default_rng(seed)
    eps = 1e-3
    g = TorusGrid(32, 2)
    spec = eigendecompose(EXO, g)
    vel = group_velocity_field(spec, EXO)
    xi = delta_state([0, 0], [1, 0])
    eta = rng.normal(size=(3, 3, 2)) + 1j * rng.normal(size=(3, 3, 2))
    eta *= eps * rng.uniform(0.1, 1) / np.linalg.norm(eta)
    pert = xi.add(LatticeState(2, 2, [-1, -1], eta)).normalized()
    diff = pert.add(xi, -1)
    delta = np.sqrt(abs(diff.inner(diff)))
    assert delta <= 2 * eps
    mu = limit_measure(spec, vel, fourier_state(xi, g))
    mu2 = limit_measure(spec, vel, fourier_state(pert, g))
    for w in [(1, 0), (0, 1), (1, 1), (2, -1)]:
        assert abs(char_function(mu, w) - char_function(mu2, w)) <= 2 * delta + 1e-9


def test_weights_bounded_by_commutator_support():
    xi = LatticeState.from_sites({(0, 0): [1, 0], (1, -2): [0, 1j]}).normalized()
    _, _, mu = spectral_measure(EXO, xi, TorusGrid(24, 2))
    for axis in (1, 2):
        assert np.abs(mu.velocities[:, axis - 1]).max() <= commutator_norm(EXO, axis) + 1e-6
    assert isinstance(mu, VelocityMeasure)
