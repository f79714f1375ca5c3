# -*- coding: utf-8 -*-

from .basis import TemporalSpec, TemporalBasis, build_temporal_basis, \
    eval_temporal, curvature_matrix

__all__ = ['TemporalSpec', 'TemporalBasis', 'build_temporal_basis',
           'eval_temporal', 'curvature_matrix']
