# -*- coding: utf-8 -*-

from collections import namedtuple
from multiprocessing import Process
from modules.logger import get_logger, client_configurer

__all__ = ['TaskWorker', 'TaskResult']

TaskResult = namedtuple('TaskResult', 'index value error')


def run_task(func, index, task, logger):
    try:
        return TaskResult(index, func(task), None)
    except Exception as exc:
        logger.warning('Task %d failed: %s' % (index, exc))
        return TaskResult(index, None, '%s: %s' % (exc.__class__.__name__, exc))


class TaskWorker(Process):
    def __init__(self, name, func, tasks, results,
                 event, log_queue=None, exc_queue=None):
        super(TaskWorker, self).__init__(name=name)
        self._logger = None
        self._func = func
        self._tasks = tasks
        self._results = results
        self._event = event
        self._log_queue = log_queue
        self._exc_queue = exc_queue

    def is_running(self):
        return self._event.is_set()

    def run(self):
        # Configure logging
        if self._log_queue is not None:
            client_configurer(self._log_queue)
        self._logger = get_logger(self.name)

        # Run worker
        self._event.wait()
        self._logger.info('Worker (%s) is started' % self.name)

        try:
            while self.is_running():
                item = self._tasks.get()
                if item is None:
                    break
                index, task = item
                self._results.put(run_task(self._func, index, task, self._logger))
        except Exception as exc:
            self._logger.exception(exc)
            if self._exc_queue is not None:
                self._exc_queue.put((self.name, exc))

        self._logger.info('Worker (%s) is stopped.' % self.name)
