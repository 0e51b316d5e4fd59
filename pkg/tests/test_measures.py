import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clarktorus import measures as M
from clarktorus.errors import AliasingError, ResolutionError
from clarktorus.numerics import circle_nodes

LEB2 = M.Product((M.Lebesgue(), M.Lebesgue()))


def test_lebesgue_moments():
    assert M.total_mass(LEB2, 64) == pytest.approx(1.0)
    assert abs(M.fourier_coeff(LEB2, (1, 0), 64)) < 1e-14
    assert abs(M.fourier_coeff(LEB2, (3, -2), 64)) < 1e-14


def test_atomic_fourier():
    a = np.exp(0.3j)
    mu = M.Atomic([[a, -1]], [1.0])
    assert M.fourier_coeff(mu, (2, 1), 64) == pytest.approx(np.conj(a) ** 2 * -1)


def test_aliasing_error():
    with pytest.raises(AliasingError):
        M.fourier_coeff(LEB2, (32, 0), 64)
    M.fourier_coeff(LEB2, (31, 0), 64)


def test_total_mass_rejects_signed_measures():
    with pytest.raises(ValueError):
        M.total_mass(M.Atomic([[1, 1], [1, -1]], [1.0, -0.5]))


def test_pluriharmonic_check():
    ok, bad = M.pluriharmonic_support_check(LEB2, 8, 1e-8, 64)
    assert ok and not bad
    ok, bad = M.pluriharmonic_support_check(M.Atomic([[1, 1]], [1.0]), 8, 1e-6, 64)
    assert not ok
    assert ((1, -1), pytest.approx(1.0)) in [(k, v) for k, v in bad]


def test_pluriharmonic_check_three_variables():
    mu = M.Product((M.Lebesgue(),) * 3)
    assert M.pluriharmonic_support_check(mu, 2, 1e-8, 64)[0]
    assert not M.pluriharmonic_support_check(M.Atomic([[1, 1, 1]], [1.0]), 1, 1e-8, 64)[0]


def test_moments_rule_pairs_exactly():
    c = np.array([1.0, 0.25 - 0.1j, 0.05j])
    mu = M.Pushforward(M.Moments(c), (1.0,))
    for k, want in enumerate(c):
        got = np.sum(np.conj(mu.rule(16)[0][:, 0]) ** k * mu.rule(16)[1])
        assert got == pytest.approx(want, abs=1e-14)


def test_density_and_pushforward():
    d = M.Density(lambda x: 1 + (x + np.conj(x)).real / 2)
    mu = M.Pushforward(d, (1.0, 1j))
    pts, w = mu.rule(32)
    assert np.allclose(pts[:, 1], 1j * pts[:, 0])
    assert np.sum(w).real == pytest.approx(1.0)
    assert np.sum(w * np.conj(pts[:, 0])) == pytest.approx(0.5)


def test_sum_and_product_masses():
    mu = M.Sum(((0.5, LEB2), (0.5, M.Product((M.Atom(1j), M.Lebesgue())))))
    assert M.total_mass(mu, 64) == pytest.approx(1.0)
    assert M.fourier_coeff(mu, (1, 0), 64) == pytest.approx(0.5 * -1j)


def test_slice_rule_reproduces_lebesgue():
    # every slice measure equal to Lebesgue measure averages to Lebesgue measure on T^2
    def moments(directions, K):
        out = np.zeros((len(directions), K), dtype=complex)
        out[:, 0] = 1.0
        return out

    pts, w = M.slice_rule(moments, 32, 64)
    assert np.sum(w).real == pytest.approx(1.0)
    for k in [(1, 0), (0, 1), (2, -1), (1, 1)]:
        assert abs(np.sum(w * M.character(k)(pts))) < 1e-13


def test_json_round_trip():
    mu = M.Sum(((1.0, M.Product((M.AtomicSet((1, -1), (0.5, 0.5)), M.Lebesgue()))), (0.5, M.Atomic([[1j, -1j]], [2.0]))))
    text = M.measure_to_json(mu)
    back = M.measure_from_dict(json.loads(text))
    assert M.measure_to_json(back) == text
    for k in [(0, 0), (1, 0), (1, -1)]:
        assert M.fourier_coeff(back, k, 64) == pytest.approx(M.fourier_coeff(mu, k, 64))


def test_graph_measure_of_antidiagonal():
    g = M.Graph(lambda xi: (np.conj(xi)[:, None], np.ones((np.size(xi), 1))), coordinate=0)
    assert M.total_mass(g, 64) == pytest.approx(1.0, abs=1e-13)
    assert M.fourier_coeff(g, (1, 1), 64) == pytest.approx(1.0, abs=1e-13)
    assert abs(M.fourier_coeff(g, (1, 0), 64)) < 1e-13
    text = M.graph_csv(g, rows=8)
    lines = text.splitlines()
    assert lines[0] == "angle,branch,eta_angle,weight" and len(lines) == 9


def test_cauchy_transform_of_lebesgue_is_one(rng):
    for z in 0.9 * rng.uniform(size=(5, 2)):
        assert M.cauchy_transform(LEB2, z, 512) == pytest.approx(1.0, abs=1e-14)
        assert M.poisson_integral(LEB2, z, 512) == pytest.approx(1.0)


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        M.QuadratureSpec(nodes_per_dim=4)
    with pytest.raises(ValueError):
        M.QuadratureSpec(radii=(0.9, 0.5))
    with pytest.raises(ResolutionError):
        M.QuadratureSpec(radii=(0.5, 0.9), radial_nodes=(16, 32))
    s = M.QuadratureSpec()
    assert s.order == len(s.radii) - 1
    assert s.grid_for(0) >= 8 / (1 - s.radii[0])


coef = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


@settings(max_examples=40, deadline=None)
@given(coef, coef, st.integers(-5, 5), st.integers(-5, 5))
def test_integration_is_linear(a, b, k1, k2):
    mu = M.Sum(((0.3, LEB2), (0.7, M.Atomic([[np.exp(0.4j), np.exp(-1.3j)]], [1.0]))))
    f = M.character((k1, k2))
    g = lambda p: p[:, 0] * np.conj(p[:, 1]) ** 2
    lhs = M.integrate(mu, lambda p: a * f(p) + b * g(p), 64)
    rhs = a * M.integrate(mu, f, 64) + b * M.integrate(mu, g, 64)
    assert lhs == pytest.approx(rhs, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0, 2 * np.pi), min_size=1, max_size=4), st.integers(-6, 6), st.integers(-6, 6))
def test_real_measure_fourier_symmetry(angles, k1, k2):
    pts = np.exp(1j * np.array([[t, 2 * t + 1] for t in angles]))
    mu = M.Atomic(pts, np.linspace(0.2, 1.0, len(angles)))
    assert M.fourier_coeff(mu, (-k1, -k2), 64) == pytest.approx(np.conj(M.fourier_coeff(mu, (k1, k2), 64)), abs=1e-12)
