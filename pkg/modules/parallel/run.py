# -*- coding: utf-8 -*-

from queue import Empty
from multiprocessing import Event, Queue
from modules.logger import LogServer, get_logger
from .utils import worker_count
from .worker import TaskWorker, run_task

__all__ = ['TaskRunner']

# Seconds between liveness checks while waiting for results
POLL_INTERVAL = 1.0


class TaskRunner:
    """
    Maps a picklable function over independent tasks with a pool of worker
    processes. Results come back ordered by task index whatever the
    scheduling, so downstream output is reproducible.
    """

    def __init__(self, workers=None, verbose=False, logfile=None):
        self.workers = worker_count(workers)
        self.verbose = verbose
        self.logfile = logfile
        self._logger = get_logger(self.__class__.__name__)

    def map(self, func, tasks, label='task'):
        tasks = list(tasks)
        if not tasks:
            return []
        if self.workers <= 1 or len(tasks) == 1:
            return self._map_inline(func, tasks, label)
        return self._map_pool(func, tasks, label)

    def _map_inline(self, func, tasks, label):
        results = []
        for index, task in enumerate(tasks):
            self._logger.info('Running %s %d/%d' % (label, index + 1, len(tasks)))
            results.append(run_task(func, index, task, self._logger))
        return results

    def _map_pool(self, func, tasks, label):
        run_event = Event()
        task_queue, result_queue = Queue(), Queue()
        log_queue, exc_queue = Queue(), Queue()

        logsrv = LogServer(log_queue, self.verbose, self.logfile)
        count = min(self.workers, len(tasks))
        workers = [
            TaskWorker('%s-%d' % (label, i + 1), func, task_queue, result_queue,
                       run_event, log_queue, exc_queue)
            for i in range(count)
        ]

        for item in enumerate(tasks):
            task_queue.put_nowait(item)
        for _ in workers:
            task_queue.put_nowait(None)

        logsrv.start()
        for worker in workers:
            worker.start()
        run_event.set()
        self._logger.info('Dispatched %d %ss to %d workers' % (len(tasks), label, count))

        results = {}
        try:
            while len(results) < len(tasks):
                try:
                    result = result_queue.get(timeout=POLL_INTERVAL)
                except Empty:
                    self.raise_worker_exceptions(exc_queue)
                    if not any(worker.is_alive() for worker in workers) and result_queue.empty():
                        raise RuntimeError('Workers exited with %d %ss unfinished'
                                           % (len(tasks) - len(results), label))
                    continue
                results[result.index] = result
        finally:
            run_event.clear()
            self.join_workers(workers)
            logsrv.stop()

        self.raise_worker_exceptions(exc_queue)
        return [results[i] for i in range(len(tasks))]

    @staticmethod
    def join_workers(workers):
        for worker in workers:
            if worker.is_alive():
                worker.join()

    @staticmethod
    def raise_worker_exceptions(exc_queue):
        try:
            _, exc = exc_queue.get_nowait()
        except Empty:
            return
        else:
            raise exc
