# -*- coding: utf-8 -*-
"""
app.models
~~~~~~~~~~

Run configuration of the command-line application and its schema.
"""

import os
from configparser import ConfigParser, Error as ConfigParserError
from modules.exceptions import ConfigError, SfpcException
from modules.sfpc import Penalties, FitConfig
from modules.temporal import TemporalSpec

__all__ = ['RunConfig', 'SELECT']

# Penalty value asking for cross-validated selection
SELECT = 'select'


class RunConfig:
    """
    Sectioned key-value run file. Each field has one kind that decides how
    its text is parsed; unknown sections or keys are rejected.
    """

    _sections = {
        'paths': ('data', 'triangulation', 'output'),
        'model': ('J', 'p', 'degree', 'smoothness', 'freeze_K', 'stationary_init',
                  'demean', 'start_month'),
        'temporal': ('poly_degree', 'knots', 'fourier', 'period'),
        'penalties': ('lambda_mu_s', 'lambda_mu_t', 'lambda_pc'),
        'cv': ('folds', 'seed', 'budget'),
        'em': ('tol', 'max_iter'),
        'grid': ('spacing',),
        'selection': ('p_candidates', 'J_max', 'criterion', 'tau')
    }

    _int_fields = ('J', 'p', 'degree', 'smoothness', 'start_month', 'poly_degree', 'fourier',
                   'folds', 'seed', 'budget', 'max_iter', 'J_max')
    _float_fields = ('period', 'tol', 'spacing', 'tau')
    _bool_fields = ('freeze_K', 'stationary_init', 'demean')
    _list_fields = ('knots', 'p_candidates')
    _penalty_fields = ('lambda_mu_s', 'lambda_mu_t', 'lambda_pc')
    _path_fields = ('data', 'triangulation', 'output')
    _text_fields = ('criterion',)

    _defaults = {
        'data': None,
        'triangulation': None,
        'output': 'output',
        'J': 2,
        'p': 1,
        'degree': 3,
        'smoothness': 1,
        'freeze_K': False,
        'stationary_init': False,
        'demean': False,
        'start_month': 1,
        'poly_degree': 3,
        'knots': (),
        'fourier': 5,
        'period': 12.0,
        'lambda_mu_s': 1.0,
        'lambda_mu_t': 1.0,
        'lambda_pc': 1.0,
        'folds': 5,
        'seed': 0,
        'budget': 60,
        'tol': 1e-6,
        'max_iter': 200,
        'spacing': 0.05,
        'p_candidates': (),
        'J_max': 0,
        'criterion': 'AIC',
        'tau': 0.95
    }

    def __init__(self, values=None, path=None):
        self.path = path
        self.values = dict(self._defaults)
        self.values.update(values or {})

    def __getattr__(self, field):
        values = self.__dict__.get('values', {})
        if field in values:
            return values[field]
        raise AttributeError(field)

    def __repr__(self):
        return '{}({})'.format(self.__class__.__name__, self.path or 'defaults')

    @classmethod
    def all_fields(cls):
        return cls._int_fields + cls._float_fields + cls._bool_fields + cls._list_fields + \
            cls._penalty_fields + cls._path_fields + cls._text_fields

    @classmethod
    def use_val(cls, value, field):
        value = value.strip()
        try:
            if field in cls._int_fields:
                return int(value)
            elif field in cls._float_fields:
                return float(value)
            elif field in cls._bool_fields:
                return {'yes': True, 'true': True, 'on': True, '1': True,
                        'no': False, 'false': False, 'off': False, '0': False}[value.lower()]
            elif field in cls._list_fields:
                kind = int if field == 'p_candidates' else float
                return tuple(kind(i) for i in value.split(',') if i.strip())
            elif field in cls._penalty_fields:
                return SELECT if value.lower() == SELECT else float(value)
            elif field in cls._path_fields or field in cls._text_fields:
                return value
        except (ValueError, KeyError):
            raise ConfigError('Bad value for %s: "%s"' % (field, value))
        raise NotImplementedError('Unsupported field "%s" with value "%s"' % (field, value))

    @classmethod
    def load(cls, path, overrides=None, require_data=True):
        """
        Read and validate a run file; paths are taken relative to its folder.

        :param str path: INI file
        :param dict overrides: field values taking precedence over the file
        :rtype: RunConfig
        :raises ConfigError: on unreadable files, unknown keys or bad values
        """

        if not os.path.isfile(path):
            raise ConfigError('Run configuration %s does not exist' % path)
        parser = ConfigParser()
        parser.optionxform = str
        try:
            parser.read(path)
        except ConfigParserError as e:
            raise ConfigError('Cannot parse %s: %s' % (path, e))

        values = {}
        base = os.path.dirname(os.path.abspath(path))
        for section in parser.sections():
            if section not in cls._sections:
                raise ConfigError('Unknown section [%s]' % section)
            for key, raw in parser.items(section):
                if key not in cls._sections[section]:
                    raise ConfigError('Unknown key "%s" in [%s]' % (key, section))
                value = cls.use_val(raw, key)
                if key in cls._path_fields and value and not os.path.isabs(value):
                    value = os.path.join(base, value)
                values[key] = value
        values.update({k: v for k, v in (overrides or {}).items() if v is not None})
        config = cls(values, path)
        config.validate(require_data)
        return config

    def validate(self, require_data=True):
        for field in ('data', 'triangulation') if require_data else ():
            path = self.values[field]
            if not path:
                raise ConfigError('[paths] %s is required' % field)
            if not os.path.isfile(path):
                raise ConfigError('[paths] %s: %s does not exist' % (field, path))
        if self.J < 1 or self.p < 1:
            raise ConfigError('J and p must be >= 1')
        if not 0 <= self.smoothness < self.degree:
            raise ConfigError('Need 0 <= smoothness < degree, got r=%d, d=%d'
                              % (self.smoothness, self.degree))
        if not 1 <= self.start_month <= 12:
            raise ConfigError('start_month must lie in 1..12, got %d' % self.start_month)
        if self.folds < 2 or self.budget < 1:
            raise ConfigError('Need folds >= 2 and budget >= 1')
        if not self.spacing > 0:
            raise ConfigError('Grid spacing must be positive')
        if self.criterion.upper() not in ('AIC', 'BIC'):
            raise ConfigError('criterion must be AIC or BIC, got %s' % self.criterion)
        if any(p < 1 for p in self.p_candidates):
            raise ConfigError('p_candidates must be >= 1')
        for field in self._penalty_fields:
            value = self.values[field]
            if value != SELECT and not value >= 0:
                raise ConfigError('%s must be >= 0 or "%s"' % (field, SELECT))
        try:
            self.temporal_spec()
            self.fit_config()
        except SfpcException as e:
            raise ConfigError(e.message)

    @property
    def selecting_penalties(self):
        return any(self.values[f] == SELECT for f in self._penalty_fields)

    def penalties(self, selected=None):
        """
        Fixed penalties, with ``selected`` (log10 values) filling any
        ``select`` entries.
        """

        values = []
        for i, field in enumerate(self._penalty_fields):
            value = self.values[field]
            if value == SELECT:
                if selected is None:
                    value = self._defaults[field]
                else:
                    value = 10.0 ** float(selected[i])
            values.append(value)
        return Penalties(*values)

    def temporal_spec(self):
        return TemporalSpec(self.poly_degree, tuple(self.knots), self.fourier, self.period)

    def fit_config(self, penalties=None, **changes):
        settings = dict(J=self.J, p=self.p, penalties=penalties or self.penalties(),
                        tol=self.tol, max_iter=self.max_iter, freeze_K=self.freeze_K,
                        stationary_init=self.stationary_init)
        settings.update(changes)
        return FitConfig(**settings)
