# -*- coding: utf-8 -*-

"""
simulation.truth
~~~~~~~~~~~~~~~~

Closed-form mean and principal component functions of the simulation
study and the eight setup / variance configurations.
"""
from dataclasses import dataclass
import numpy as np
from modules.exceptions import ArgumentError
from . import config

__all__ = ['TruthFunctions', 'SimSetup', 'SETUPS', 'VARIANCE_LEVELS']

SETUPS = ('i', 'ii', 'iii', 'iv')

# noise variance -> (noise variance, score variances)
VARIANCE_LEVELS = {
    1.0: (1.0, (1.0, 0.1)),
    0.1: (0.1, (0.1, 0.01))
}

# AR(2) coefficients of both score series in the correlated setups
AR_COEFFICIENTS = (0.8, 0.1)


class TruthFunctions:
    @staticmethod
    def mu1(x, y):
        r = np.sqrt(0.1 * np.asarray(x) ** 2 + 0.2 * np.asarray(y))
        return 5.0 * (np.exp(r) + np.exp(-r))

    @staticmethod
    def mu2(t, n, varying=True):
        t = np.asarray(t, dtype=float)
        if not varying:
            return np.ones_like(t)
        return np.cos(2.0 * np.pi * t / 12.0) + t / n

    @staticmethod
    def phi1(x, y):
        return 0.8578 * np.sin(np.asarray(x) ** 2 + 0.5 * np.asarray(y) ** 2)

    @staticmethod
    def phi2(x, y):
        x, y = np.asarray(x), np.asarray(y)
        return 0.8721 * np.sin(0.3 * x ** 2 + 0.6 * y ** 2) - 0.2988 * np.sin(x ** 2 + 0.5 * y ** 2)

    @classmethod
    def phi(cls, points):
        """(N, 2) matrix of both principal component functions."""
        points = np.atleast_2d(points)
        x, y = points[:, 0], points[:, 1]
        return np.column_stack([cls.phi1(x, y), cls.phi2(x, y)])


@dataclass(frozen=True)
class SimSetup:
    setup: str = 'i'
    variance: float = 1.0
    n: int = config.getint('generate', 'n', fallback=500)
    min_locations: int = config.getint('generate', 'min_locations', fallback=50)
    max_locations: int = config.getint('generate', 'max_locations', fallback=60)
    seed: int = 0

    def __post_init__(self):
        if self.setup not in SETUPS:
            raise ArgumentError('Unknown setup "%s", expected one of %s'
                                % (self.setup, ', '.join(SETUPS)))
        if float(self.variance) not in VARIANCE_LEVELS:
            raise ArgumentError('Variance level must be one of %s, got %r'
                                % (sorted(VARIANCE_LEVELS), self.variance))
        if self.n < 3 or not 1 <= self.min_locations <= self.max_locations:
            raise ArgumentError('Need n >= 3 and 1 <= min_locations <= max_locations')

    @property
    def varying_mean(self):
        return self.setup in ('i', 'ii')

    @property
    def correlated(self):
        return self.setup in ('i', 'iii')

    @property
    def K(self):
        k = np.array(AR_COEFFICIENTS) if self.correlated else np.zeros(len(AR_COEFFICIENTS))
        return np.column_stack([k, k])

    @property
    def sigma2(self):
        return VARIANCE_LEVELS[float(self.variance)][0]

    @property
    def sigma2_j(self):
        return np.array(VARIANCE_LEVELS[float(self.variance)][1])

    def replace(self, **changes):
        values = dict(self.__dict__)
        values.update(changes)
        return SimSetup(**values)
