# -*- coding: utf-8 -*-

"""
modules.logger
~~~~~~~~~~~~~~

Process-aware logging: the main process owns the handlers, worker
processes forward their records through a queue drained by a LogServer.
"""
import sys
import logging
import traceback
from logging.handlers import RotatingFileHandler, QueueHandler
from multiprocessing import Process

__all__ = ['get_logger', 'server_configurer', 'client_configurer', 'LogServer']

MAX_FILE_SIZE = 20971520
LOG_FILE_COUNT = 10
LOG_FORMAT = '%(asctime)s %(processName)-10s : %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


def get_logger(name=None):
    return logging.getLogger(name)


def _reset_root(level):
    root = logging.getLogger()
    # Forked children inherit the parent's handlers
    for handler in list(root.handlers):
        root.removeHandler(handler)
    root.setLevel(level)
    return root


def server_configurer(verbose=True, logfile=None, level=logging.INFO):
    """
    Install console and/or rotating-file handlers on the root logger.
    Calling it again replaces the previous handlers.

    :param bool verbose: log to stderr
    :param str logfile: path of a rotating log file, if any
    :param int level: root logging level
    """

    root = _reset_root(level)
    if not (verbose or logfile):
        root.addHandler(logging.NullHandler())
        return

    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT)
    if verbose:
        stream_handler = logging.StreamHandler()
        stream_handler.setFormatter(formatter)
        root.addHandler(stream_handler)
    if logfile:
        file_handler = RotatingFileHandler(
            logfile, maxBytes=MAX_FILE_SIZE, backupCount=LOG_FILE_COUNT)
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)


def client_configurer(queue, level=logging.INFO):
    root = _reset_root(level)
    root.addHandler(QueueHandler(queue))


class LogServer(Process):
    def __init__(self, queue, verbose=True, logfile=None):
        super(LogServer, self).__init__(name='LogServer', daemon=True)
        self.queue = queue
        self.verbose = verbose
        self.logfile = logfile

    def run(self):
        server_configurer(self.verbose, self.logfile)
        try:
            for record in iter(self.queue.get, None):
                try:
                    get_logger(record.name).handle(record)
                except Exception:
                    print('LogServer failed to handle a record:', file=sys.stderr)
                    traceback.print_exc(file=sys.stderr)
        except KeyboardInterrupt:
            pass

    def stop(self):
        if self.is_alive():
            self.queue.put(None)
            self.join()
