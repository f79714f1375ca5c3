# -*- coding: utf-8 -*-

"""
modules.exceptions
~~~~~~~~~~~~~~~~~~

This module contains the set of sFPC exceptions and the handler mapping
them onto process exit codes.
"""
from modules.logger import get_logger

__all__ = [
    'SfpcException',
    'ConfigError',
    'ArgumentError',
    'DataError',
    'ParseError',
    'GeometryError',
    'LocationError',
    'NumericalError',
    'ConditioningError',
    'StationarityError',
    'ConstructionError',
    'FitError',
    'BootstrapError',
    'handle_exception'
]

EXIT_OK = 0
EXIT_UNKNOWN = 1
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


class SfpcException(Exception):
    exit_code = EXIT_UNKNOWN
    prefix = ''

    def __init__(self, message, data=None):
        super(SfpcException, self).__init__(message)
        self.name = self.__class__.__name__
        self.message = message
        self.data = data

    def __str__(self):
        return '%s: %s' % (self.prefix or self.name, self.message)


class ConfigError(SfpcException):
    exit_code = EXIT_CONFIG
    prefix = 'Invalid configuration'


class ArgumentError(SfpcException, ValueError):
    exit_code = EXIT_CONFIG


class DataError(SfpcException):
    exit_code = EXIT_DATA


class ParseError(DataError):
    prefix = 'Malformed input'

    def __init__(self, message, line=None, data=None):
        super(ParseError, self).__init__(message, data)
        self.line = line

    def __str__(self):
        if self.line is None:
            return super(ParseError, self).__str__()
        return '%s: line %d: %s' % (self.prefix, self.line, self.message)


class GeometryError(DataError):
    prefix = 'Invalid geometry'


class LocationError(DataError):
    prefix = 'Point outside domain'

    def __init__(self, message, point=None, data=None):
        super(LocationError, self).__init__(message, data)
        self.point = point


class NumericalError(SfpcException):
    exit_code = EXIT_NUMERICAL


class ConditioningError(NumericalError):
    prefix = 'Ill-conditioned system'


class StationarityError(NumericalError):
    prefix = 'Non-stationary AR coefficients'


class ConstructionError(NumericalError):
    prefix = 'Basis construction failed'


class FitError(NumericalError):
    prefix = 'EM fit failed'

    def __init__(self, message, trace=None, data=None):
        super(FitError, self).__init__(message, data)
        self.trace = trace or []


class BootstrapError(NumericalError):
    pass


_logger = get_logger(__package__)


def handle_exception(exception):
    """
    Log an exception and build the structured report the command app emits.

    :param Exception exception: the exception raised by a command
    :return: exit code and a JSON-serialisable report
    :rtype: tuple[int, dict]
    """

    _logger.error(exception)

    details = {}
    if isinstance(exception, ParseError) and exception.line is not None:
        details['line'] = exception.line
    if isinstance(exception, LocationError) and exception.point is not None:
        details['point'] = [float(v) for v in exception.point]
    if isinstance(exception, FitError) and exception.trace:
        details['iterations'] = len(exception.trace)

    code = getattr(exception, 'exit_code', EXIT_UNKNOWN)
    report = {
        'error': exception.__class__.__name__,
        'message': str(exception),
        'exit_code': code,
        'details': details
    }
    return code, report
