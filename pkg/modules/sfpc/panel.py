# -*- coding: utf-8 -*-

"""
sfpc.panel
~~~~~~~~~~

Observations grouped by time point, stored flat with per-time offsets,
plus the cached design matrices B_t and c_t.
"""
import numpy as np
from modules.exceptions import ArgumentError, DataError
from . import config

__all__ = ['ObservationPanel']

GRAM_CACHE_LIMIT = config.getint('em', 'gram_cache_limit', fallback=20000000)


class ObservationPanel:
    """
    Rows are ordered by time; rows of time index t (0-based) occupy
    ``offsets[t]:offsets[t + 1]``. Time points without rows are kept.
    """

    def __init__(self, locations, values, counts, labels=None, stations=None,
                 B=None, C=None):
        self.locations = np.asarray(locations, dtype=float).reshape(-1, 2)
        self.values = np.asarray(values, dtype=float).ravel()
        self.counts = np.asarray(counts, dtype=np.int64)
        self.offsets = np.concatenate([[0], np.cumsum(self.counts)])
        self.time_index = np.repeat(np.arange(len(self.counts)), self.counts)
        self.labels = np.arange(1, self.n + 1) if labels is None else np.asarray(labels)
        self.stations = stations
        self.B = B
        self.C = C
        self._gram_stack = None

        if len(self.values) != len(self.locations) or self.offsets[-1] != len(self.values):
            raise ArgumentError('Panel counts do not match the number of rows')
        if not np.all(np.isfinite(self.values)) or not np.all(np.isfinite(self.locations)):
            raise DataError('Panel contains non-finite locations or values')

    @classmethod
    def from_lists(cls, locations, values, labels=None, stations=None):
        """
        Build from per-time lists of (n_t, 2) locations and (n_t,) values.
        """

        if len(locations) != len(values):
            raise ArgumentError('Got %d location lists and %d value lists'
                                % (len(locations), len(values)))
        counts = [len(np.asarray(v).ravel()) for v in values]
        locs = [np.asarray(l, dtype=float).reshape(-1, 2) for l in locations]
        for t, (loc, count) in enumerate(zip(locs, counts)):
            if len(loc) != count:
                raise ArgumentError('Time %d has %d locations and %d values' % (t + 1, len(loc), count))
        flat_locs = np.vstack(locs) if locs else np.zeros((0, 2))
        flat_vals = np.concatenate([np.asarray(v, dtype=float).ravel() for v in values]) \
            if values else np.zeros(0)
        return cls(flat_locs, flat_vals, counts, labels, stations)

    def __repr__(self):
        return '{}(n={}, rows={}, design={})'.format(
            self.__class__.__name__, self.n, self.size, self.has_design)

    @property
    def n(self):
        return len(self.counts)

    @property
    def size(self):
        return len(self.values)

    @property
    def has_design(self):
        return self.B is not None and self.C is not None

    def rows(self, t):
        return slice(self.offsets[t], self.offsets[t + 1])

    def z(self, t):
        return self.values[self.rows(t)]

    def B_t(self, t):
        return self.B[self.rows(t)]

    def with_design(self, spatial, temporal):
        """
        Copy of the panel with B = b(locations) and C = c(1..n) cached.
        """

        B = spatial.evaluate(self.locations)
        C = temporal.evaluate(np.arange(1, self.n + 1, dtype=float))
        return ObservationPanel(self.locations, self.values, self.counts,
                                self.labels, self.stations, B, C)

    def with_values(self, values):
        panel = ObservationPanel(self.locations, values, self.counts,
                                 self.labels, self.stations, self.B, self.C)
        panel._gram_stack = self._gram_stack
        return panel

    def subset(self, mask):
        """
        Panel restricted to rows where ``mask`` holds; every time point is kept.
        """

        mask = np.asarray(mask, dtype=bool)
        counts = np.bincount(self.time_index[mask], minlength=self.n)
        stations = None if self.stations is None else np.asarray(self.stations)[mask]
        B = None if self.B is None else self.B[mask]
        return ObservationPanel(self.locations[mask], self.values[mask], counts,
                                self.labels, stations, B, self.C)

    def per_row(self, per_time):
        """Broadcast a per-time array onto rows."""
        return np.asarray(per_time)[self.time_index]

    def _stack(self):
        if self._gram_stack is None and self.n * self.B.shape[1] ** 2 <= GRAM_CACHE_LIMIT:
            stack = np.zeros((self.n, self.B.shape[1], self.B.shape[1]))
            for t in range(self.n):
                if self.counts[t]:
                    Bt = self.B_t(t)
                    stack[t] = Bt.T @ Bt
            self._gram_stack = stack
        return self._gram_stack

    def weighted_gram(self, weights):
        """
        Sum over t of weights[t] * B_t^T B_t.
        """

        weights = np.asarray(weights, dtype=float)
        stack = self._stack()
        if stack is not None:
            return np.tensordot(weights, stack, axes=1)
        rows = self.per_row(weights)
        return self.B.T @ (self.B * rows[:, None])
