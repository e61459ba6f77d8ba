from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hqwalk import (LatticeState, ShapeMismatchError, build_named_walk, commutator_norm,
                    concentration_series, delta_state, evolve, gaussian_state, moment,
                    position_mean, scaled_distribution, step, walk_from_spec)

WALKS = {name: build_named_walk(name) for name in ("shift1d", "hadamard1d", "exotic2d")}
IDENTITY1 = walk_from_spec({"d": 1, "n": 2, "coefficients": [
    {"offset": [0], "matrix": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}]})


def direct_step(symbol, sites):
    """Dictionary oracle: (U xi)(x) = sum_y A_y xi(x - y)."""
    out = {}
    for x, vec in sites.items():
        for y, a in symbol.coefficients().items():
            key = tuple(np.add(x, y))
            out[key] = out.get(key, 0) + a @ vec
    return out


def as_dict(state):
    return dict(state.items())


def test_shift_step_and_evolve():
    s = WALKS["shift1d"]
    d0 = delta_state([0], [1])
    assert as_dict(step(s, d0)) == {(1,): pytest.approx(np.array([1]))}
    d7 = evolve(s, d0, 7)
    np.testing.assert_array_equal(d7.support(), [[7]])
    assert d7[(7,)][0] == 1


def test_identity_walk_step():
    xi = LatticeState.from_sites({(0,): [0.6, 0], (3,): [0, 0.8j]})
    out = step(IDENTITY1, xi)
    for site, vec in xi.items():
        np.testing.assert_array_equal(out[site], vec)


def test_exotic_single_step():
    out = as_dict(step(WALKS["exotic2d"], delta_state([0, 0], [1, 0])))
    assert set(out) == {(1, 0), (0, 1)}
    np.testing.assert_allclose(out[(1, 0)], [0.5, 0.5])
    np.testing.assert_allclose(out[(0, 1)], [0.5, -0.5])


def test_evolve_zero_steps_is_identity():
    xi = gaussian_state(2, [1, 1j], 1.5)
    assert evolve(WALKS["exotic2d"], xi, 0) is xi


def test_exotic_two_steps_against_oracle():
    w = WALKS["exotic2d"]
    out = evolve(w, delta_state([0, 0], [1, 0]), 2)
    assert abs(out.norm() - 1) < 1e-14
    assert all(abs(x) + abs(y) <= 2 for x, y in (tuple(s) for s in out.support()))
    ref = direct_step(w, direct_step(w, {(0, 0): np.array([1, 0], complex)}))
    for site, vec in ref.items():
        np.testing.assert_allclose(out[site], vec, atol=1e-15)


def test_scaled_distribution_examples():
    d = scaled_distribution(evolve(WALKS["shift1d"], delta_state([0], [1]), 7), 7)
    np.testing.assert_array_equal(d.velocities, [[1.0]])
    np.testing.assert_array_equal(d.masses, [1.0])
    assert d.fractions() == [(Fraction(1),)]

    two = LatticeState.from_sites({(0,): [2 ** -0.5], (4,): [2 ** -0.5]})
    d = scaled_distribution(two, 4)
    np.testing.assert_allclose(d.velocities.ravel(), [0, 1])
    np.testing.assert_allclose(d.masses, [0.5, 0.5])

    d = scaled_distribution(step(WALKS["exotic2d"], delta_state([0, 0], [1, 0])), 1)
    atoms = {tuple(v): m for v, m in zip(d.velocities, d.masses)}
    assert atoms == pytest.approx({(0.0, 1.0): 0.5, (1.0, 0.0): 0.5})
    assert moment(d, (1, 0)) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(ValueError):
        scaled_distribution(two, 0)


def test_moment_examples():
    d = scaled_distribution(evolve(WALKS["hadamard1d"], delta_state([0], [1, 0]), 9), 9)
    assert moment(d, [0]) == pytest.approx(1, abs=1e-13)
    one = scaled_distribution(delta_state([7], [1]), 7)
    assert moment(one, [3]) == 1.0
    with pytest.raises(ValueError):
        moment(one, [1, 1])


def test_concentration_examples():
    s, d0 = WALKS["shift1d"], delta_state([0], [1])
    assert concentration_series(s, d0, [1.5], [10, 100]) == [(10, 1.0), (100, 1.0)]
    with pytest.warns(UserWarning, match="speed bound"):
        assert concentration_series(s, d0, [0.5], [10]) == [(10, 0.0)]


def test_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        step(WALKS["exotic2d"], delta_state([0], [1, 0]))


def test_gaussian_state_truncation():
    g = gaussian_state(1, [1], 3.0, center=[0.3], momentum=[0.5], tail=1e-10)
    assert abs(g.norm() - 1) < 1e-14
    assert 0 < g.truncated_mass <= 1e-10
    # envelope centred at 0.3: the two neighbours straddle the peak
    assert g.site_masses()[tuple(np.array([0]) - g.origin)] > g.site_masses()[tuple(np.array([-2]) - g.origin)]


def test_add_and_inner():
    a = delta_state([0], [1, 0])
    b = delta_state([2], [0, 1])
    c = a.add(b, 1j)
    assert c.inner(c) == pytest.approx(2)
    assert a.inner(c) == pytest.approx(1)
    assert b.inner(c) == pytest.approx(1j)


# -- properties ---------------------------------------------------------------

@st.composite
def states(draw, d, n, max_sites=4):
    m = draw(st.integers(1, max_sites))
    sites = draw(st.lists(st.tuples(*[st.integers(-3, 3)] * d), min_size=m, max_size=m, unique=True))
    vecs = draw(st.lists(st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False,
                                                     allow_infinity=False),
                                  min_size=n, max_size=n), min_size=m, max_size=m))
    vecs = [np.array(v) for v in vecs]
    if all(np.all(v == 0) for v in vecs):
        vecs[0] = np.eye(n)[0]
    return LatticeState.from_sites(dict(zip(sites, vecs)), n=n).normalized()


walk_and_state = st.sampled_from(sorted(WALKS)).flatmap(
    lambda name: st.tuples(st.just(WALKS[name]), states(WALKS[name].d, WALKS[name].n)))


@settings(max_examples=30, deadline=None)
@given(walk_and_state, st.integers(0, 40))
def test_norm_preserved_and_support_bound(ws, t):
    w, xi = ws
    out = evolve(w, xi, t)
    assert abs(out.norm() - 1) <= 1e-10
    lo, hi = xi.support().min(0) - t * w.radius, xi.support().max(0) + t * w.radius
    sup = out.support()
    assert np.all(sup >= lo) and np.all(sup <= hi)


@settings(max_examples=30, deadline=None)
@given(walk_and_state, st.integers(1, 30))
def test_moment_identity(ws, t):
    w, xi = ws
    out = evolve(w, xi, t)
    dist = scaled_distribution(out, t)
    for axis in range(1, w.d + 1):
        e = np.eye(w.d, dtype=int)[axis - 1]
        assert moment(dist, e) == pytest.approx(position_mean(out, axis, t), abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(walk_and_state, st.integers(1, 6))
def test_step_matches_dictionary_oracle(ws, t):
    w, xi = ws
    ref = as_dict(xi)
    out = xi
    for _ in range(t):
        ref = direct_step(w, ref)
        out = step(w, out)
    for site, vec in ref.items():
        np.testing.assert_allclose(out[site], vec, atol=1e-13)


def test_norm_preserved_long_run():
    out = evolve(WALKS["hadamard1d"], delta_state([0], [1, 1j]), 1000)
    assert abs(out.norm() - 1) <= 1e-10


@pytest.mark.parametrize("name,t", [("hadamard1d", 512), ("exotic2d", 256)])
def test_moment_growth_bound(name, t):
    w = WALKS[name]
    coin = [1, 1j] if name == "hadamard1d" else [1, 0]
    dist = scaled_distribution(evolve(w, delta_state([0] * w.d, coin), t), t)
    for axis in range(1, w.d + 1):
        bound = commutator_norm(w, axis)
        for m in (2, 4, 6):
            e = m * np.eye(w.d, dtype=int)[axis - 1]
            assert abs(moment(dist, e)) ** (1 / m) <= bound + 0.05
