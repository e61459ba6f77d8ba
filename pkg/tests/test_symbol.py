import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hqwalk import (LaurentMatrixSymbol, NonUnitaryError, TorusGrid, WalkError, build_named_walk,
                    commutator_norm, derive, evaluate, symbol_pow_at, unitarity_deviation,
                    validate_unitary, walk_from_spec, walk_to_spec)

IDENTITY2 = {"d": 2, "n": 2, "coefficients": [
    {"offset": [0, 0], "matrix": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}]}


def exotic_by_hand(k1, k2):
    # the displayed matrix, written out entry by entry
    e1, e2 = np.exp(1j * k1), np.exp(1j * k2)
    return 0.5 * np.array([[e1 + e2, -1 / e1 + 1 / e2], [e1 - e2, 1 / e1 + 1 / e2]])


@pytest.fixture(scope="module")
def exotic():
    return build_named_walk("exotic2d")


def test_shift1d_coefficients():
    s = build_named_walk("shift1d")
    assert (s.d, s.n) == (1, 1)
    assert s.support == [(1,)]
    np.testing.assert_array_equal(s.coefficients()[(1,)], [[1]])


@pytest.mark.parametrize("k", [(0.0, 0.0), (0.3, -1.1), (np.pi / 2, np.pi / 2), (2.0, 5.0)])
def test_exotic_matches_displayed_matrix(exotic, k):
    np.testing.assert_allclose(exotic(k), exotic_by_hand(*k), atol=1e-15)


def test_identity_custom_walk():
    ident = walk_from_spec(IDENTITY2)
    for k in [(0, 0), (1.0, 2.0)]:
        np.testing.assert_allclose(ident(k), np.eye(2), atol=0)
    assert derive(ident, 1).support == []
    assert commutator_norm(ident, 1, TorusGrid(8, 2)) == 0.0


def test_evaluate_examples(exotic):
    np.testing.assert_allclose(evaluate(exotic, (0, 0)), np.eye(2), atol=1e-15)
    np.testing.assert_allclose(evaluate(exotic, (np.pi / 2, np.pi / 2)), np.diag([1j, -1j]),
                               atol=1e-15)


def test_evaluate_batched(exotic):
    k = np.random.default_rng(0).uniform(0, 2 * np.pi, size=(5, 3, 2))
    out = evaluate(exotic, k)
    assert out.shape == (5, 3, 2, 2)
    np.testing.assert_allclose(out[2, 1], exotic(k[2, 1]), atol=1e-15)


def test_derive_examples(exotic):
    ds = derive(build_named_walk("shift1d"), 1)
    assert ds.support == [(1,)]
    assert ds.coefficients()[(1,)][0, 0] == 1j
    np.testing.assert_allclose(derive(exotic, 1)((0, 0)), 0.5j * np.array([[1, 1], [1, -1]]),
                               atol=1e-15)


def test_derive_matches_finite_difference(exotic):
    k, h = np.array([0.4, 1.3]), 1e-6
    for axis in (1, 2):
        e = np.eye(2)[axis - 1] * h
        fd = (exotic(k + e) - exotic(k - e)) / (2 * h)
        np.testing.assert_allclose(derive(exotic, axis)(k), fd, atol=1e-8)


def test_commutator_norm_examples(exotic):
    assert commutator_norm(build_named_walk("shift1d"), 1, TorusGrid(17)) == pytest.approx(1, abs=1e-15)
    assert commutator_norm(exotic, 1, TorusGrid(64, 2)) == pytest.approx(1 / np.sqrt(2), abs=1e-12)
    # constant in k: every point gives the same norm
    du = evaluate(derive(exotic, 1), TorusGrid(16, 2).points())
    np.testing.assert_allclose(np.linalg.norm(du, 2, axis=(-2, -1)), 1 / np.sqrt(2), atol=1e-12)


def test_symbol_pow_examples(exotic):
    for name in ("shift1d", "hadamard1d", "exotic2d"):
        s = build_named_walk(name)
        np.testing.assert_array_equal(symbol_pow_at(s, [0.7] * s.d, 0), np.eye(s.n))
    assert symbol_pow_at(build_named_walk("shift1d"), np.pi / 3, 6)[0, 0] == pytest.approx(1, abs=1e-14)
    np.testing.assert_allclose(symbol_pow_at(exotic, (np.pi / 2, np.pi / 2), 2), -np.eye(2), atol=1e-15)
    with pytest.raises(ValueError):
        symbol_pow_at(exotic, (0, 0), -1)


def test_builtins_are_unitary():
    for name in ("shift1d", "hadamard1d", "exotic2d"):
        s = build_named_walk(name)
        dev, _ = unitarity_deviation(s, TorusGrid(40, s.d))
        assert dev <= 1e-12


def test_non_unitary_reports_deviation_and_point():
    spec = {"d": 1, "n": 1, "coefficients": [{"offset": [0], "matrix": [[[0.5, 0]]]},
                                             {"offset": [1], "matrix": [[[0.6, 0]]]}]}
    with pytest.raises(NonUnitaryError) as info:
        walk_from_spec(spec)
    err = info.value
    # |0.5 + 0.6 e^{ik}|^2 - 1 = 0.6 cos k - 0.39 is largest in size at k = pi
    assert err.max_deviation == pytest.approx(0.99, abs=0.01)
    assert err.worst_k[0] == pytest.approx(np.pi, abs=0.1)


def test_walk_description_errors():
    with pytest.raises(WalkError, match="unknown walk"):
        build_named_walk("nope")
    with pytest.raises(WalkError):
        build_named_walk("shift1d", {"x": 1})
    with pytest.raises(WalkError):
        walk_from_spec({"name": "shift1d", "extra": 1})
    with pytest.raises(WalkError):
        build_named_walk("custom", {"d": 1, "n": 1})
    with pytest.raises(WalkError, match="shape"):
        LaurentMatrixSymbol.from_coefficients({(0,): np.eye(2), (1,): np.eye(3)})


def test_walk_description_round_trip(exotic):
    back = walk_from_spec(walk_to_spec(exotic))
    np.testing.assert_array_equal(back.offsets, exotic.offsets)
    np.testing.assert_array_equal(back.matrices, exotic.matrices)


def test_symbol_immutable(exotic):
    with pytest.raises(ValueError):
        exotic.matrices[0, 0, 0] = 3


def test_adjoint_is_inverse(exotic):
    prod = exotic.adjoint() @ exotic
    assert prod.support == [(0, 0)]
    np.testing.assert_allclose(prod.coefficients()[(0, 0)], np.eye(2), atol=1e-15)


# -- properties ---------------------------------------------------------------

coef = st.floats(-2, 2, allow_nan=False)


@st.composite
def random_symbols(draw, d=2, n=2):
    m = draw(st.integers(1, 4))
    offs = draw(st.lists(st.tuples(*[st.integers(-2, 2)] * d), min_size=m, max_size=m, unique=True))
    mats = {o: np.array(draw(st.lists(coef, min_size=2 * n * n, max_size=2 * n * n))).view(complex)
                .reshape(n, n) for o in offs}
    return LaurentMatrixSymbol.from_coefficients(mats, d, n)


ks = st.tuples(st.floats(-7, 7), st.floats(-7, 7))


@settings(max_examples=40, deadline=None)
@given(random_symbols(), random_symbols(), st.complex_numbers(max_magnitude=3),
       st.complex_numbers(max_magnitude=3), st.sampled_from([1, 2]))
def test_derive_linear(x, y, a, b, axis):
    lhs = derive(x * a + y * b, axis).coefficients()
    rhs = (derive(x, axis) * a + derive(y, axis) * b).coefficients()
    for off in set(lhs) | set(rhs):
        np.testing.assert_allclose(lhs.get(off, 0), rhs.get(off, 0), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(random_symbols(), random_symbols(), ks, st.sampled_from([1, 2]))
def test_leibniz(x, y, k, axis):
    lhs = derive(x @ y, axis)(k)
    rhs = derive(x, axis)(k) @ y(k) + x(k) @ derive(y, axis)(k)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12 * max(1.0, np.abs(lhs).max()))


@settings(max_examples=40, deadline=None)
@given(random_symbols(), ks, st.sampled_from([0, 1]), st.integers(-3, 3))
def test_periodicity(x, k, i, m):
    k2 = np.array(k, dtype=float)
    k2[i] += 2 * np.pi * m
    np.testing.assert_allclose(x(k2), x(k), atol=1e-12 * max(1.0, np.abs(x(k)).max()))


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi))
def test_product_of_unitaries_is_unitary(a, b, c):
    # coin C(a) then shift: a unitary family parameterized by angles
    coin = np.array([[np.cos(a), -np.sin(a) * np.exp(1j * b)],
                     [np.sin(a) * np.exp(1j * c), np.cos(a) * np.exp(1j * (b + c))]])
    shift = LaurentMatrixSymbol.from_coefficients({(-1,): np.diag([1, 0]), (1,): np.diag([0, 1])})
    walk = shift @ LaurentMatrixSymbol.from_coefficients({(0,): coin})
    validate_unitary(walk)
