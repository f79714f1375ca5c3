# -*- coding: utf-8 -*-

"""
sfpc.archive
~~~~~~~~~~~~

Versioned on-disk form of a fitted model: a directory holding
``manifest.txt`` (``key = value`` lines) and one ``<name>.bin`` per
matrix. A matrix file is an int64 little-endian header (ndim, then each
dimension) followed by the row-major float64 little-endian data.
"""
import os
import json
import numpy as np
from modules.exceptions import DataError, ParseError
from modules.logger import get_logger
from modules.spatial import Triangulation, BivariateBasis
from modules.temporal import TemporalSpec, build_temporal_basis
from .model import Penalties, ModelParams, ModelBases, FitConfig, BlockStep, \
    IterationTrace, FittedModel
from .state_space import LatentMoments

__all__ = ['ModelArchive', 'save_model', 'load_model', 'write_matrix', 'read_matrix']

FORMAT_VERSION = 2
MANIFEST = 'manifest.txt'

_logger = get_logger(__name__)


def write_matrix(path, matrix):
    matrix = np.ascontiguousarray(matrix, dtype='<f8')
    header = np.array([matrix.ndim] + list(matrix.shape), dtype='<i8')
    with open(path, 'wb') as fp:
        fp.write(header.tobytes())
        fp.write(matrix.tobytes(order='C'))


def read_matrix(path):
    with open(path, 'rb') as fp:
        raw = fp.read()
    if len(raw) < 8:
        raise DataError('Matrix file %s is truncated' % path)
    ndim = int(np.frombuffer(raw[:8], dtype='<i8')[0])
    if not 0 <= ndim <= 8 or len(raw) < 8 * (ndim + 1):
        raise DataError('Matrix file %s has a bad header' % path)
    shape = tuple(int(v) for v in np.frombuffer(raw[8:8 * (ndim + 1)], dtype='<i8'))
    data = np.frombuffer(raw[8 * (ndim + 1):], dtype='<f8')
    if data.size != int(np.prod(shape)):
        raise DataError('Matrix file %s holds %d values, header says %s' % (path, data.size, shape))
    return data.reshape(shape).astype(float)


class ModelArchive:
    """
    Field registry of the manifest. Each field kind has its own text
    encoding; matrices go to their own files.
    """

    _int_fields = ('format_version', 'n', 'J', 'p', 'degree', 'smoothness', 'iterations',
                   'max_iter', 'poly_degree', 'fourier')
    _float_fields = ('sigma2', 'lambda_mu_s', 'lambda_mu_t', 'lambda_pc', 'tol', 'period',
                     'neg2_loglik')
    _bool_fields = ('converged', 'freeze_K', 'stationary_init', 'demeaned')
    _json_fields = ('knots', 'warnings', 'trace')
    _matrix_fields = ('theta_b', 'theta_c', 'Theta', 'K', 'sigma2_j', 'vertices', 'triangles',
                      'transform', 'gamma', 'penalty', 'state_mean', 'state_cov', 'residuals')
    # Written only for models fitted to demeaned data
    _main_effect_fields = ('demean_mu', 'demean_nu')

    def __init__(self, path):
        self.path = path

    @classmethod
    def all_fields(cls):
        return cls._int_fields + cls._float_fields + cls._bool_fields + cls._json_fields

    @classmethod
    def store_val(cls, value, field):
        if field in cls._int_fields:
            return str(int(value))
        elif field in cls._float_fields:
            return repr(float(value))
        elif field in cls._bool_fields:
            return 'yes' if value else 'no'
        elif field in cls._json_fields:
            return json.dumps(value)
        raise NotImplementedError('Unsupported field "%s" with value "%s"' % (field, value))

    @classmethod
    def use_val(cls, value, field):
        try:
            if field in cls._int_fields:
                return int(value)
            elif field in cls._float_fields:
                return float(value)
            elif field in cls._bool_fields:
                return {'yes': True, 'no': False}[value]
            elif field in cls._json_fields:
                return json.loads(value)
        except (ValueError, KeyError):
            raise ParseError('Bad value for %s: %r' % (field, value))
        raise NotImplementedError('Unsupported field "%s" with value "%s"' % (field, value))

    def write(self, fields, matrices):
        os.makedirs(self.path, exist_ok=True)
        with open(os.path.join(self.path, MANIFEST), 'w') as fp:
            for field in self.all_fields():
                fp.write('%s = %s\n' % (field, self.store_val(fields[field], field)))
        for name in self._matrix_fields + self._main_effect_fields:
            path = os.path.join(self.path, name + '.bin')
            if name in matrices:
                write_matrix(path, matrices[name])
            elif os.path.isfile(path):
                os.remove(path)

    def read(self):
        manifest = os.path.join(self.path, MANIFEST)
        if not os.path.isfile(manifest):
            raise DataError('No model archive at %s' % self.path)
        fields = {}
        with open(manifest) as fp:
            for no, line in enumerate(fp, start=1):
                if not line.strip():
                    continue
                key, sep, value = line.partition('=')
                key = key.strip()
                if not sep or key not in self.all_fields():
                    raise ParseError('Unexpected manifest entry: %s' % line.strip(), line=no)
                fields[key] = self.use_val(value.strip(), key)
        missing = set(self.all_fields()) - set(fields)
        if missing:
            raise ParseError('Manifest lacks %s' % ', '.join(sorted(missing)))
        if fields['format_version'] != FORMAT_VERSION:
            raise DataError('Unsupported archive version %d' % fields['format_version'])
        names = self._matrix_fields + (self._main_effect_fields if fields['demeaned'] else ())
        matrices = {name: read_matrix(os.path.join(self.path, name + '.bin')) for name in names}
        return fields, matrices


def save_model(model, path):
    """
    Write ``model`` under directory ``path``.

    :param FittedModel model: the fitted model
    :param str path: target directory, created if missing
    """

    params, bases, cfg = model.params, model.bases, model.config
    spatial, temporal = bases.spatial, bases.temporal
    fields = {
        'format_version': FORMAT_VERSION,
        'n': model.n,
        'J': params.J,
        'p': params.p,
        'degree': spatial.degree,
        'smoothness': spatial.smoothness,
        'iterations': model.iterations,
        'max_iter': cfg.max_iter,
        'poly_degree': temporal.spec.poly_degree,
        'fourier': temporal.spec.fourier,
        'sigma2': params.sigma2,
        'tol': cfg.tol,
        'period': temporal.spec.period,
        'neg2_loglik': model.moments.neg2_loglik,
        'converged': model.converged,
        'freeze_K': cfg.freeze_K,
        'stationary_init': cfg.stationary_init,
        'demeaned': model.main_effects is not None,
        'knots': [float(k) for k in temporal.spec.knots],
        'warnings': list(model.warnings),
        'trace': [[item.iteration, item.q, item.neg2_loglik,
                   [[step.block, step.q] for step in item.steps], item.start_q]
                  for item in model.trace]
    }
    fields.update(cfg.penalties.as_dict())
    matrices = {
        'theta_b': params.theta_b,
        'theta_c': params.theta_c,
        'Theta': params.Theta,
        'K': params.K,
        'sigma2_j': params.sigma2_j,
        'vertices': spatial.triangulation.vertices,
        'triangles': spatial.triangulation.triangles,
        'transform': spatial.transform,
        'gamma': bases.gamma,
        'penalty': bases.P,
        'state_mean': model.moments.state_mean,
        'state_cov': model.moments.state_cov,
        'residuals': model.residuals
    }
    if model.main_effects is not None:
        matrices.update(zip(ModelArchive._main_effect_fields, model.main_effects))
    ModelArchive(path).write(fields, matrices)
    _logger.info('Saved model (J=%d, p=%d, n=%d) to %s' % (params.J, params.p, model.n, path))


def load_model(path):
    """
    Read a model written by :func:`save_model`. Bases are rebuilt from the
    stored transform and penalty matrices, so the result is bit-identical.

    :rtype: FittedModel
    """

    fields, matrices = ModelArchive(path).read()
    triangulation = Triangulation.from_arrays(matrices['vertices'],
                                              matrices['triangles'].astype(np.int64))
    spatial = BivariateBasis(triangulation, fields['degree'], fields['smoothness'],
                             matrices['transform'], gram_certified=True)
    spatial.__dict__['energy'] = matrices['gamma']
    spec = TemporalSpec(fields['poly_degree'], tuple(fields['knots']), fields['fourier'],
                        fields['period'])
    temporal = build_temporal_basis(spec, fields['n'])
    temporal.penalty = matrices['penalty']
    bases = ModelBases(spatial, temporal)

    params = ModelParams(matrices['theta_b'], matrices['theta_c'], matrices['Theta'],
                         matrices['K'], fields['sigma2'], matrices['sigma2_j'])
    penalties = Penalties(fields['lambda_mu_s'], fields['lambda_mu_t'], fields['lambda_pc'])
    cfg = FitConfig(J=fields['J'], p=fields['p'], penalties=penalties, tol=fields['tol'],
                    max_iter=fields['max_iter'], freeze_K=fields['freeze_K'],
                    stationary_init=fields['stationary_init'])
    moments = LatentMoments(matrices['state_mean'], matrices['state_cov'], fields['J'],
                            fields['p'], fields['neg2_loglik'])
    trace = [IterationTrace(int(i), q, neg2, [BlockStep(block, value) for block, value in steps],
                            start)
             for i, q, neg2, steps, start in fields['trace']]
    main_effects = None
    if fields['demeaned']:
        main_effects = (matrices['demean_mu'], matrices['demean_nu'])
    return FittedModel(params, moments, bases, cfg, trace, fields['converged'],
                       fields['iterations'], matrices['residuals'], fields['warnings'],
                       main_effects)
