# -*- coding: utf-8 -*-
"""
app
~~~

Command-line application for the sfpc project
"""

import os
import sys
import json
import argparse
import importlib
from collections import OrderedDict, namedtuple
from modules.exceptions import ArgumentError, handle_exception
from modules.logger import get_logger, server_configurer

__all__ = ['app', 'option', 'main']

Command = namedtuple('Command', 'name func options help')
Option = namedtuple('Option', 'flags kwargs')


def option(*flags, **kwargs):
    return Option(flags, kwargs)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError('%s: %s' % (self.prog, message))


class CommandApp:
    """
    Registry of subcommands. Handlers are registered with :meth:`command`
    and receive the parsed arguments; their return value is ignored and
    exceptions become structured error reports.
    """

    def __init__(self, name):
        self.name = name
        self.config = {}
        self.commands = OrderedDict()
        self._logger = get_logger(name)

    def config_from_object(self, module_name):
        module = importlib.import_module(module_name)
        self.config.update({k: getattr(module, k) for k in dir(module) if k.isupper()})

    def command(self, name, *options, **kwargs):
        def decorator(func):
            self.commands[name] = Command(name, func, options, kwargs.get('help', func.__doc__))
            return func
        return decorator

    def parser(self):
        parser = _Parser(prog=self.config.get('PROG_NAME', self.name))
        commands = parser.add_subparsers(dest='command', metavar='command')
        commands.required = True
        for command in self.commands.values():
            help_text = (command.help or '').strip().split('\n')[0]
            sub = commands.add_parser(command.name, help=help_text, description=command.help)
            sub.add_argument('--config', help='run configuration file')
            sub.add_argument('--output', help='output directory, overrides the run file')
            sub.add_argument('--seed', type=int, help='master random seed')
            sub.add_argument('--workers', type=int, help='worker processes')
            sub.add_argument('--verbose', action='store_true', help='log to stderr')
            sub.add_argument('--logfile', help='rotating log file')
            for opt in command.options:
                sub.add_argument(*opt.flags, **opt.kwargs)
        return parser

    def run(self, argv=None):
        """
        Parse ``argv`` and run the selected command.

        :return: process exit code
        :rtype: int
        """

        args = None
        try:
            args = self.parser().parse_args(argv)
            server_configurer(args.verbose, args.logfile)
            self._logger.info('Running %s' % args.command)
            self.commands[args.command].func(args)
        except Exception as e:
            code, report = handle_exception(e)
            self.report(report, getattr(args, 'error_dir', None))
            return code
        return 0

    @staticmethod
    def report(report, directory=None):
        text = json.dumps(report, indent=2, sort_keys=True)
        sys.stderr.write(text + '\n')
        if directory and os.path.isdir(directory):
            with open(os.path.join(directory, app.config.get('ERROR_REPORT')), 'w') as fp:
                fp.write(text + '\n')


app = CommandApp(__name__)
app.config_from_object('config')


def main(argv=None):
    return app.run(argv)


from . import utils
from . import commands
