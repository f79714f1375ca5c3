# -*- coding: utf-8 -*-

import numpy as np
import pytest
from modules.exceptions import ArgumentError
from modules.temporal import TemporalSpec, build_temporal_basis, eval_temporal, curvature_matrix
from .oracles import gauss_interval


@pytest.mark.parametrize('spec, n_c', [
    (TemporalSpec(3, (), 5), 14),
    (TemporalSpec(1, (), 0), 2),
    (TemporalSpec(3, (6, 12, 18), 5), 17),
])
def test_dimension(spec, n_c):
    basis = build_temporal_basis(spec, 24)
    assert spec.dimension == n_c
    assert basis.n_c == n_c
    assert basis.evaluate(np.arange(1, 25)).shape == (24, n_c)
    assert basis.certified


def test_values_at_known_times():
    cubic = build_temporal_basis(TemporalSpec(3, (), 0), 24)
    assert np.allclose(cubic.evaluate(0.0), (1, 0, 0, 0))
    assert np.allclose(cubic.evaluate(24.0), (1, 1, 1, 1))

    seasonal = build_temporal_basis(TemporalSpec(1, (), 2, 12.0), 24)
    assert np.allclose(seasonal.evaluate(12.0)[2:4], (0, 1), atol=1e-12)
    t = np.linspace(1, 24, 47)
    values = seasonal.evaluate(t)
    for col in (2, 4):
        assert np.allclose(values[:, col] ** 2 + values[:, col + 1] ** 2, 1.0)


def test_truncated_power_is_zero_before_its_knot():
    basis = build_temporal_basis(TemporalSpec(2, (10,), 0), 20)
    assert basis.labels[3] == '(t-10)+^2'
    values = basis.evaluate([5.0, 10.0, 15.0])[:, 3]
    assert np.allclose(values, (0.0, 0.0, (5.0 / 20) ** 2))


def test_penalty_ignores_affine_terms():
    basis = build_temporal_basis(TemporalSpec(3, (6, 12, 18), 5), 24)
    P = basis.penalty
    assert np.all(P[:2] == 0) and np.all(P[:, :2] == 0)
    assert np.array_equal(P, P.T)
    assert np.linalg.eigvalsh(P).min() > -1e-8 * np.abs(P).max()


def test_penalty_matches_quadrature():
    basis = build_temporal_basis(TemporalSpec(3, (6, 12, 18), 2), 24)

    def outer(t):
        values = basis.second_derivative(t)
        return values[:, :, None] * values[:, None, :]

    reference = gauss_interval(outer, 1.0, 24.0, panels=230)
    scale = np.abs(reference).max()
    assert np.abs(basis.penalty - reference).max() < 1e-8 * scale


def test_penalty_of_one_seasonal_period():
    basis = build_temporal_basis(TemporalSpec(1, (), 1, 12.0), 24)
    P = curvature_matrix(basis, 0.0, 12.0)
    omega = 2 * np.pi / 12
    assert P[2, 2] == pytest.approx(omega ** 4 * 6.0)
    assert P[3, 3] == pytest.approx(omega ** 4 * 6.0)
    assert abs(P[2, 3]) < 1e-10
    assert np.all(curvature_matrix(basis, 5.0, 5.0) == 0)


@pytest.mark.parametrize('spec, n', [
    (TemporalSpec(1, (), 0), 0),
    (TemporalSpec(-1, (), 0), 10),
    (TemporalSpec(1, (), 1, 0.0), 10),
    (TemporalSpec(1, (5,), 0), 10),
    (TemporalSpec(3, (10,), 0), 10),
    (TemporalSpec(3, (1,), 0), 10),
    (TemporalSpec(3, (4, 4), 0), 10),
])
def test_invalid_specs(spec, n):
    with pytest.raises(ArgumentError):
        build_temporal_basis(spec, n)


def test_extrapolation_is_finite():
    basis = build_temporal_basis(TemporalSpec(3, (6, 12), 5), 24)
    values = basis.evaluate([0.5, 30.0, 36.0])
    assert np.all(np.isfinite(values))
    # Trend keeps growing past the end of the sample
    assert values[2, 3] > values[1, 3] > 1.0


def test_eval_temporal_rows():
    basis = build_temporal_basis(TemporalSpec(1, (), 1, period=12.0), 24)
    rows = eval_temporal(basis, [1, 12, 24])
    assert rows.shape == (3, basis.n_c)
    assert np.allclose(rows, basis.evaluate(np.array([1, 12, 24])))
    assert np.allclose(rows[:, 0], 1.0)
