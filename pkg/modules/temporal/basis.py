# -*- coding: utf-8 -*-

"""
temporal.basis
~~~~~~~~~~~~~~

Time-domain bases c(t): polynomial trend with optional truncated-power
spline pieces, plus Fourier seasonal pairs, and their curvature penalty.
"""
from dataclasses import dataclass, field
import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.legendre import leggauss
from modules.exceptions import ArgumentError, ConstructionError
from modules.logger import get_logger

__all__ = ['TemporalSpec', 'TemporalBasis', 'build_temporal_basis',
           'eval_temporal', 'curvature_matrix']

# Relative agreement required between closed-form and quadrature penalties
CURVATURE_CHECK_TOL = 1e-9

# Gauss points per composite-quadrature panel
PANEL_POINTS = 10

_logger = get_logger(__name__)


@dataclass(frozen=True)
class TemporalSpec:
    """
    Component description: ``poly_degree`` gives polynomial terms
    1, t, ..., t^poly_degree and the degree of the truncated powers at
    ``knots``; ``fourier`` sin/cos pairs of the given ``period``.
    """

    poly_degree: int = 3
    knots: tuple = field(default_factory=tuple)
    fourier: int = 5
    period: float = 12.0

    @property
    def dimension(self):
        return self.poly_degree + 1 + len(self.knots) + 2 * self.fourier


@dataclass(frozen=True)
class _Piece:
    kind: str       # 'poly', 'trunc', 'sin' or 'cos'
    power: int = 0
    knot: float = -np.inf
    omega: float = 0.0

    def label(self):
        if self.kind == 'poly':
            return 't^%d' % self.power
        if self.kind == 'trunc':
            return '(t-%g)+^%d' % (self.knot, self.power)
        return '%s(%gt)' % (self.kind, self.omega)


class TemporalBasis:
    def __init__(self, spec, n, pieces):
        self.spec = spec
        self.n = int(n)
        self.pieces = tuple(pieces)
        self.penalty = None
        self.certified = False

    def __repr__(self):
        return '{}(n_c={}, n={})'.format(self.__class__.__name__, self.n_c, self.n)

    @property
    def n_c(self):
        return len(self.pieces)

    @property
    def labels(self):
        return [piece.label() for piece in self.pieces]

    def evaluate(self, t):
        """
        Evaluate c(t) at one or many (possibly non-integer, extrapolated) times.

        :return: (len(t), n_c) matrix, or (n_c,) for a scalar t
        """

        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.empty((len(t), self.n_c))
        for col, piece in enumerate(self.pieces):
            if piece.kind == 'poly':
                out[:, col] = (t / self.n) ** piece.power
            elif piece.kind == 'trunc':
                out[:, col] = np.where(t > piece.knot, (t - piece.knot) / self.n, 0.0) ** piece.power
            elif piece.kind == 'sin':
                out[:, col] = np.sin(piece.omega * t)
            else:
                out[:, col] = np.cos(piece.omega * t)
        return out[0] if scalar else out

    def second_derivative(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty((len(t), self.n_c))
        for col, piece in enumerate(self.pieces):
            if piece.kind in ('sin', 'cos'):
                wave = np.sin if piece.kind == 'sin' else np.cos
                out[:, col] = -piece.omega ** 2 * wave(piece.omega * t)
            else:
                poly, start = self._curvature_poly(piece)
                out[:, col] = np.where(t > start, poly(t), 0.0)
        return out

    def _curvature_poly(self, piece):
        # Second derivative of a polynomial-type piece and its support start
        if piece.kind == 'poly':
            poly = Polynomial.basis(piece.power) / float(self.n) ** piece.power
        else:
            poly = Polynomial([-piece.knot, 1.0]) ** piece.power / float(self.n) ** piece.power
        return poly.deriv(2) if piece.power >= 2 else Polynomial([0.0]), piece.knot


def build_temporal_basis(spec, n):
    """
    Build c(t) for time points t = 1..n.

    :param TemporalSpec spec: component description
    :param int n: horizon
    :rtype: TemporalBasis
    :raises ArgumentError: on knots outside (1, n), a non-positive period
        or a negative degree
    """

    if n < 1:
        raise ArgumentError('Horizon must be positive, got %r' % n)
    if spec.poly_degree < 0:
        raise ArgumentError('Polynomial degree must be non-negative, got %r' % spec.poly_degree)
    if spec.fourier < 0:
        raise ArgumentError('Fourier pair count must be non-negative, got %r' % spec.fourier)
    if spec.fourier and not spec.period > 0:
        raise ArgumentError('Fourier period must be positive, got %r' % spec.period)
    if spec.knots and spec.poly_degree < 2:
        raise ArgumentError('Spline knots need polynomial degree >= 2')
    for knot in spec.knots:
        if not 1 < knot < n:
            raise ArgumentError('Knot %r lies outside (1, %d)' % (knot, n))
    if len(set(spec.knots)) != len(spec.knots):
        raise ArgumentError('Knots must be distinct: %s' % (spec.knots,))

    pieces = [_Piece('poly', power=m) for m in range(spec.poly_degree + 1)]
    pieces += [_Piece('trunc', power=spec.poly_degree, knot=float(k)) for k in sorted(spec.knots)]
    for k in range(1, spec.fourier + 1):
        omega = 2.0 * np.pi * k / spec.period
        pieces += [_Piece('sin', omega=omega), _Piece('cos', omega=omega)]

    basis = TemporalBasis(spec, n, pieces)
    basis.penalty = curvature_matrix(basis)
    basis.certified = True
    _logger.info('Built temporal basis: n_c=%d over t = 1..%d' % (basis.n_c, n))
    return basis


def eval_temporal(basis, t):
    return basis.evaluate(t)


def _int_wave(kind, w, a, b):
    # Integral of sin(wt) or cos(wt) over [a, b]
    if w == 0.0:
        return 0.0 if kind == 'sin' else b - a
    if kind == 'sin':
        return (np.cos(w * a) - np.cos(w * b)) / w
    return (np.sin(w * b) - np.sin(w * a)) / w


def _int_poly_wave(poly, kind, w, a, b):
    # Integral of q(t)·sin(wt) or q(t)·cos(wt) via repeated integration by parts
    def antiderivative(t):
        total, deriv, k = 0j, poly, 0
        while True:
            total += (-1) ** k * deriv(t) / (1j * w) ** (k + 1)
            if deriv.degree() == 0:
                break
            deriv, k = deriv.deriv(), k + 1
        return np.exp(1j * w * t) * total

    value = antiderivative(b) - antiderivative(a)
    return value.imag if kind == 'sin' else value.real


def _int_wave_wave(kind_a, wa, kind_b, wb, a, b):
    if kind_a == 'cos' and kind_b == 'sin':
        kind_a, wa, kind_b, wb = kind_b, wb, kind_a, wa
    if kind_a == 'sin' and kind_b == 'sin':
        return 0.5 * (_int_wave('cos', wa - wb, a, b) - _int_wave('cos', wa + wb, a, b))
    if kind_a == 'cos' and kind_b == 'cos':
        return 0.5 * (_int_wave('cos', wa - wb, a, b) + _int_wave('cos', wa + wb, a, b))
    # sin(wa t) cos(wb t)
    return 0.5 * (_int_wave('sin', wa + wb, a, b) + _int_wave('sin', wa - wb, a, b))


def _closed_form(basis, lower, upper):
    size = basis.n_c
    penalty = np.zeros((size, size))
    trig = ('sin', 'cos')
    for i, pa in enumerate(basis.pieces):
        for j in range(i, size):
            pb = basis.pieces[j]
            if pa.kind in trig and pb.kind in trig:
                value = pa.omega ** 2 * pb.omega ** 2 * \
                    _int_wave_wave(pa.kind, pa.omega, pb.kind, pb.omega, lower, upper)
            elif pa.kind in trig or pb.kind in trig:
                wave, other = (pa, pb) if pa.kind in trig else (pb, pa)
                poly, start = basis._curvature_poly(other)
                lo = max(lower, start)
                value = 0.0
                if lo < upper and poly.degree() >= 0 and np.any(poly.coef):
                    value = -wave.omega ** 2 * _int_poly_wave(poly, wave.kind, wave.omega, lo, upper)
            else:
                qa, sa = basis._curvature_poly(pa)
                qb, sb = basis._curvature_poly(pb)
                lo = max(lower, sa, sb)
                value = 0.0
                if lo < upper:
                    antider = (qa * qb).integ()
                    value = antider(upper) - antider(lo)
            penalty[i, j] = penalty[j, i] = value
    return penalty


def _composite_quadrature(basis, lower, upper):
    breaks = {lower, upper}
    breaks.update(k for k in basis.spec.knots if lower < k < upper)
    width = 1.0
    if basis.spec.fourier:
        width = min(width, basis.spec.period / (4.0 * basis.spec.fourier))
    x, w = leggauss(PANEL_POINTS)
    edges = sorted(breaks)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        count = max(1, int(np.ceil((b - a) / width)))
        grid = np.linspace(a, b, count + 1)
        half = np.diff(grid) / 2.0
        mid = (grid[:-1] + grid[1:]) / 2.0
        nodes.append((mid[:, None] + half[:, None] * x[None, :]).ravel())
        weights.append((half[:, None] * w[None, :]).ravel())
    nodes, weights = np.concatenate(nodes), np.concatenate(weights)
    values = basis.second_derivative(nodes)
    return values.T @ (values * weights[:, None])


def curvature_matrix(basis, lower=None, upper=None):
    """
    Curvature penalty P = integral of c''(t) c''(t)^T over [lower, upper].

    :param TemporalBasis basis: the basis
    :param float lower: integration start, defaults to 1
    :param float upper: integration end, defaults to n
    :return: symmetric PSD (n_c, n_c) matrix
    :raises ConstructionError: if the closed form disagrees with quadrature
    """

    lower = 1.0 if lower is None else float(lower)
    upper = float(basis.n) if upper is None else float(upper)
    if upper <= lower:
        return np.zeros((basis.n_c, basis.n_c))

    penalty = _closed_form(basis, lower, upper)
    reference = _composite_quadrature(basis, lower, upper)
    scale = max(1.0, np.abs(penalty).max())
    if np.abs(penalty - reference).max() > CURVATURE_CHECK_TOL * scale:
        raise ConstructionError('Curvature penalty failed the quadrature check')
    return penalty
