# -*- coding: utf-8 -*-

"""
sfpc.state_space
~~~~~~~~~~~~~~~~

Companion-form state-space view of the score process: Kalman filter,
Kalman smoother and the smoothed moments the E-step needs.

The state at time t is (alpha_t, alpha_{t-1}, ..., alpha_{t-p}); the
selection matrix S picks the first block.
"""
from dataclasses import dataclass
import numpy as np
from scipy.linalg import cho_factor, cho_solve, pinvh, solve_discrete_lyapunov, LinAlgError
from modules.exceptions import NumericalError, ConditioningError, StationarityError
from .ar import is_stationary
from . import config

__all__ = ['StateSpaceSpec', 'state_matrices', 'FilterOutput', 'SmootherOutput', 'LatentMoments',
           'kalman_filter', 'kalman_smoother', 'extract_moments', 'lag_product_sums']

PINV_RTOL = config.getfloat('kalman', 'pinv_rtol', fallback=1e-12)
LOG_2PI = np.log(2.0 * np.pi)


def _sym(matrix):
    return (matrix + matrix.T) / 2.0


def state_matrices(params):
    """Companion transition T and innovation covariance diag(H_J, 0, ..., 0)."""
    J, p = params.J, params.p
    m = (p + 1) * J
    transition = np.zeros((m, m))
    for lag in range(p):
        transition[:J, lag * J:(lag + 1) * J] = np.diag(params.K[lag])
    transition[J:, :-J] = np.eye(p * J)
    innovation = np.zeros((m, m))
    innovation[:J, :J] = np.diag(params.sigma2_j)
    return transition, innovation


class StateSpaceSpec:
    """
    Transition T, state innovation covariance H~, initial covariance Q_0|0
    and the per-row observation pieces: offsets o (the mean surface at
    each observation) and loadings B Theta.
    """

    def __init__(self, J, p, transition, innovation, initial_cov,
                 offsets, loadings, sigma2, panel):
        self.J = J
        self.p = p
        self.transition = transition
        self.innovation = innovation
        self.initial_cov = initial_cov
        self.offsets = offsets
        self.loadings = loadings
        self.sigma2 = float(sigma2)
        self.panel = panel

    def __repr__(self):
        return '{}(J={}, p={}, n={})'.format(self.__class__.__name__, self.J, self.p, self.panel.n)

    @property
    def state_dim(self):
        return (self.p + 1) * self.J

    @classmethod
    def from_params(cls, params, panel, stationary_init=False):
        """
        :param ModelParams params: current parameters
        :param ObservationPanel panel: panel with its design cached
        :param bool stationary_init: start from the stationary state
            covariance instead of Q_0|0 = 0
        """

        J, p = params.J, params.p
        transition, innovation = state_matrices(params)

        if stationary_init:
            for j in range(J):
                if not is_stationary(params.K[:, j]):
                    raise StationarityError('Component %d has non-stationary AR coefficients' % (j + 1))
            initial_cov = _sym(solve_discrete_lyapunov(transition, innovation))
        else:
            initial_cov = np.zeros_like(transition)

        offsets = (panel.B @ params.theta_b) * panel.per_row(panel.C @ params.theta_c)
        loadings = panel.B @ params.Theta
        return cls(J, p, transition, innovation, initial_cov, offsets, loadings,
                   params.sigma2, panel)


@dataclass
class FilterOutput:
    pred_mean: np.ndarray
    pred_cov: np.ndarray
    filt_mean: np.ndarray
    filt_cov: np.ndarray
    innovations: list
    innovation_covs: list
    neg2_loglik: float


@dataclass
class SmootherOutput:
    mean: np.ndarray
    cov: np.ndarray
    neg2_loglik: float


def kalman_filter(spec, panel=None):
    """
    Prediction-correction pass over t = 1..n. Times without observations
    are pure predictions.

    :param StateSpaceSpec spec: the model
    :param ObservationPanel panel: defaults to the panel ``spec`` was built on
    :rtype: FilterOutput
    :raises NumericalError: on non-finite inputs
    :raises ConditioningError: if an innovation covariance is not positive definite
    """

    panel = panel or spec.panel
    J, m, n = spec.J, spec.state_dim, panel.n
    if not (np.all(np.isfinite(spec.loadings)) and np.all(np.isfinite(spec.offsets))
            and np.isfinite(spec.sigma2) and np.all(np.isfinite(spec.transition))):
        raise NumericalError('Non-finite state-space inputs')

    T, H = spec.transition, spec.innovation
    pred_mean = np.zeros((n, m))
    pred_cov = np.zeros((n, m, m))
    filt_mean = np.zeros((n, m))
    filt_cov = np.zeros((n, m, m))
    innovations, innovation_covs = [], []
    neg2 = 0.0

    mean = np.zeros(m)
    cov = spec.initial_cov.copy()
    for t in range(n):
        mean = T @ mean
        cov = _sym(T @ cov @ T.T + H)
        pred_mean[t], pred_cov[t] = mean, cov

        rows = panel.rows(t)
        if panel.counts[t]:
            L = spec.loadings[rows]
            v = panel.values[rows] - spec.offsets[rows] - L @ mean[:J]
            cross = cov[:, :J] @ L.T
            F = _sym(L @ cross[:J] + spec.sigma2 * np.eye(len(v)))
            try:
                factor = cho_factor(F)
            except LinAlgError:
                raise ConditioningError('Innovation covariance at time %d is not positive definite'
                                        % (t + 1))
            gain = cho_solve(factor, cross.T).T
            mean = mean + gain @ v
            reduce = np.eye(m)
            reduce[:, :J] -= gain @ L
            cov = _sym(reduce @ cov @ reduce.T + spec.sigma2 * gain @ gain.T)
            neg2 += len(v) * LOG_2PI + 2.0 * np.log(np.diag(factor[0])).sum() \
                + v @ cho_solve(factor, v)
            innovations.append(v)
            innovation_covs.append(F)
        else:
            innovations.append(np.zeros(0))
            innovation_covs.append(np.zeros((0, 0)))
        filt_mean[t], filt_cov[t] = mean, cov

    return FilterOutput(pred_mean, pred_cov, filt_mean, filt_cov,
                        innovations, innovation_covs, float(neg2))


def kalman_smoother(spec, filter_out):
    """
    Backward recursion from the terminal filtered state. Singular
    one-step covariances are inverted with a relative-cutoff pseudo-inverse.

    :rtype: SmootherOutput
    """

    T = spec.transition
    n = len(filter_out.filt_mean)
    mean = filter_out.filt_mean.copy()
    cov = filter_out.filt_cov.copy()
    for t in range(n - 2, -1, -1):
        pred_inv = pinvh(filter_out.pred_cov[t + 1], rtol=PINV_RTOL)
        L = filter_out.filt_cov[t] @ T.T @ pred_inv
        mean[t] = filter_out.filt_mean[t] + L @ (mean[t + 1] - filter_out.pred_mean[t + 1])
        cov[t] = _sym(filter_out.filt_cov[t] + L @ (cov[t + 1] - filter_out.pred_cov[t + 1]) @ L.T)
    if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
        raise NumericalError('Kalman smoother produced non-finite moments')
    return SmootherOutput(mean, cov, filter_out.neg2_loglik)


def lag_product_sums(state_mean, state_cov, J, p):
    """
    Expected lag-product matrices, one (p+1, p+1) matrix per component.

    Entry (i, k) (1-based) is the conditional expectation of
    a_i a_k + a_{i+1} a_{k+1} + ... + a_{n+1-k} a_{n+1-i}; off-diagonal
    entries of the first row and column carry a minus sign so that the
    AR sum of squares is (1, k) D (1, k)^T. Without ``state_cov`` the
    scores are taken as known.
    """

    n = len(state_mean)
    D = np.zeros((J, p + 1, p + 1))
    for j in range(J):
        alpha = state_mean[:, j]
        for i in range(1, p + 2):
            for k in range(i, p + 2):
                count = n + 2 - i - k
                if count <= 0:
                    continue
                lag = k - i
                value = alpha[i - 1:i - 1 + count] @ alpha[k - 1:k - 1 + count]
                if state_cov is not None:
                    value += state_cov[k - 1:k - 1 + count, j, lag * J + j].sum()
                if i == 1 and k > 1:
                    value = -value
                D[j, i - 1, k - 1] = D[j, k - 1, i - 1] = value
    return D


class LatentMoments:
    """
    Smoothed moments of the scores: alpha (n, J), sigma (n, J, J) and the
    lag-product matrices D (J, p+1, p+1), derived from the smoothed state.
    """

    def __init__(self, state_mean, state_cov, J, p, neg2_loglik=np.nan):
        self.state_mean = state_mean
        self.state_cov = state_cov
        self.J = J
        self.p = p
        self.neg2_loglik = float(neg2_loglik)
        self.alpha = state_mean[:, :J]
        self.sigma = state_cov[:, :J, :J]
        self.D = lag_product_sums(state_mean, state_cov, J, p)

    def __repr__(self):
        return '{}(n={}, J={}, p={})'.format(self.__class__.__name__, self.n, self.J, self.p)

    @property
    def n(self):
        return len(self.state_mean)

    def S_hat(self, j, k):
        """Expected AR sum of squares of component j under coefficients k."""
        vec = np.concatenate([[1.0], np.asarray(k, dtype=float)])
        return float(vec @ self.D[j] @ vec)

    def transform(self, G):
        """
        Moments of G alpha_t for a J x J map G, applied to every lag block.
        """

        full = np.kron(np.eye(self.p + 1), np.asarray(G, dtype=float))
        mean = self.state_mean @ full.T
        cov = np.einsum('ab,tbc,dc->tad', full, self.state_cov, full)
        cov = (cov + np.swapaxes(cov, 1, 2)) / 2.0
        return LatentMoments(mean, cov, self.J, self.p, self.neg2_loglik)


def extract_moments(smoother_out, spec):
    return LatentMoments(smoother_out.mean, smoother_out.cov, spec.J, spec.p,
                         smoother_out.neg2_loglik)
