# -*- coding: utf-8 -*-

"""
sfpc.model
~~~~~~~~~~

Parameter, configuration and result containers of the sFPC estimator.
"""
from dataclasses import dataclass, field, replace
from typing import List, Optional
import numpy as np
from modules.exceptions import ArgumentError
from modules.spatial import orthonormal_basis
from modules.temporal import build_temporal_basis
from . import config

__all__ = ['Penalties', 'ModelParams', 'ModelBases', 'FitConfig',
           'BlockStep', 'IterationTrace', 'FittedModel']


@dataclass(frozen=True)
class Penalties:
    lambda_mu_s: float = 1.0
    lambda_mu_t: float = 1.0
    lambda_pc: float = 1.0

    def __post_init__(self):
        for name, value in self.as_dict().items():
            if not np.isfinite(value) or value < 0:
                raise ArgumentError('Penalty %s must be finite and >= 0, got %r' % (name, value))

    def as_dict(self):
        return {'lambda_mu_s': self.lambda_mu_s,
                'lambda_mu_t': self.lambda_mu_t,
                'lambda_pc': self.lambda_pc}

    def log10(self):
        return np.log10([self.lambda_mu_s, self.lambda_mu_t, self.lambda_pc])

    @classmethod
    def from_log10(cls, values):
        mu_s, mu_t, pc = (10.0 ** float(v) for v in values)
        return cls(mu_s, mu_t, pc)


@dataclass(frozen=True, eq=False)
class ModelParams:
    """
    theta_b (n_b,), theta_c (n_c,), Theta (n_b, J), K (p, J), sigma2,
    sigma2_j (J,).
    """

    theta_b: np.ndarray
    theta_c: np.ndarray
    Theta: np.ndarray
    K: np.ndarray
    sigma2: float
    sigma2_j: np.ndarray

    @property
    def J(self):
        return self.Theta.shape[1]

    @property
    def p(self):
        return self.K.shape[0]

    def replace(self, **changes):
        return replace(self, **changes)

    def invariant_violations(self, tol=1e-8):
        """Human-readable list of broken identifiability constraints."""
        problems = []
        if abs(np.linalg.norm(self.theta_b) - 1.0) > max(tol, 1e-10):
            problems.append('|theta_b| = %r' % np.linalg.norm(self.theta_b))
        gram = self.Theta.T @ self.Theta
        if np.abs(gram - np.eye(self.J)).max() >= tol:
            problems.append('Theta columns not orthonormal')
        if np.any(np.diff(self.sigma2_j) >= 0):
            problems.append('sigma2_j not strictly decreasing: %s' % self.sigma2_j.tolist())
        if not self.sigma2 > 0:
            problems.append('sigma2 = %r' % self.sigma2)
        return problems


class ModelBases:
    """Spatial and temporal bases together with their penalty matrices."""

    def __init__(self, spatial, temporal):
        self.spatial = spatial
        self.temporal = temporal
        self.gamma = spatial.energy
        self.P = temporal.penalty

    def __repr__(self):
        return '{}(n_b={}, n_c={})'.format(self.__class__.__name__, self.n_b, self.n_c)

    @property
    def n_b(self):
        return self.spatial.n_b

    @property
    def n_c(self):
        return self.temporal.n_c

    @classmethod
    def build(cls, triangulation, degree, smoothness, temporal_spec, n):
        return cls(orthonormal_basis(triangulation, degree, smoothness),
                   build_temporal_basis(temporal_spec, n))


@dataclass(frozen=True)
class FitConfig:
    J: int = 2
    p: int = 1
    penalties: Penalties = field(default_factory=Penalties)
    tol: float = config.getfloat('em', 'tol', fallback=1e-6)
    max_iter: int = config.getint('em', 'max_iter', fallback=200)
    freeze_K: bool = False
    stationary_init: bool = config.getboolean('kalman', 'stationary_init', fallback=False)
    init: Optional[ModelParams] = None

    def __post_init__(self):
        if self.J < 1:
            raise ArgumentError('J must be >= 1, got %r' % self.J)
        if self.p < 1:
            raise ArgumentError('p must be >= 1, got %r' % self.p)
        if self.max_iter < 1 or not self.tol > 0:
            raise ArgumentError('max_iter must be >= 1 and tol > 0')

    def replace(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class BlockStep:
    block: str
    q: float


@dataclass
class IterationTrace:
    iteration: int
    q: float
    neg2_loglik: float
    steps: List[BlockStep] = field(default_factory=list)
    start_q: float = np.nan     # q_value after the E-step, before any block


@dataclass
class FittedModel:
    params: ModelParams
    moments: object
    bases: ModelBases
    config: FitConfig
    trace: List[IterationTrace]
    converged: bool
    iterations: int
    residuals: np.ndarray
    warnings: List[str] = field(default_factory=list)
    # (theta_mu, theta_nu) of main effects removed before fitting
    main_effects: Optional[tuple] = None

    @property
    def n(self):
        return self.moments.n

    @property
    def q_values(self):
        return np.array([item.q for item in self.trace])

    @property
    def neg2_logliks(self):
        return np.array([item.neg2_loglik for item in self.trace])
