# -*- coding: utf-8 -*-

from .utils import split_seeds, worker_count
from .worker import TaskResult, TaskWorker
from .run import TaskRunner

__all__ = ['TaskRunner', 'TaskWorker', 'TaskResult', 'split_seeds', 'worker_count']
