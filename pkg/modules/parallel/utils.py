# -*- coding: utf-8 -*-

import os
import numpy as np

__all__ = ['split_seeds', 'worker_count', 'WORKERS_ENV']

# Environment variable overriding the default worker count
WORKERS_ENV = 'SFPC_WORKERS'


def worker_count(requested=None):
    """
    Resolve the number of worker processes.

    :param int requested: explicit request, takes precedence when given
    :return: worker count, at least 1
    :rtype: int
    :raises ValueError: if the environment value is not an integer
    """

    if requested is None:
        value = os.environ.get(WORKERS_ENV, '').strip()
        if not value:
            return 1
        try:
            requested = int(value)
        except ValueError:
            raise ValueError('%s must be an integer, got "%s"' % (WORKERS_ENV, value))
    return max(1, int(requested))


def split_seeds(master, count, *keys):
    """
    Derive independent child seeds from a master seed.

    The rule is ``SeedSequence(master, spawn_key=keys).spawn(count)`` with
    each child reduced to its first 32-bit state word, so a given
    (master, keys, index) always maps to the same seed.

    :param int master: master seed
    :param int count: number of child seeds
    :param keys: extra integers separating independent streams
    :return: list of child seeds
    :rtype: list[int]
    """

    root = np.random.SeedSequence(int(master), spawn_key=tuple(int(k) for k in keys))
    return [int(child.generate_state(1)[0]) for child in root.spawn(int(count))]
