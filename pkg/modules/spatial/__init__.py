# -*- coding: utf-8 -*-

from .triangulation import Triangulation, barycentric, read_triangulation, write_triangulation
from .bernstein import bernstein_eval, multi_indices
from .basis import BivariateBasis, gram_matrix_raw, smoothness_constraints, \
    orthonormal_basis, energy_matrix, eval_design, evaluate_piece

__all__ = [
    'Triangulation',
    'barycentric',
    'read_triangulation',
    'write_triangulation',
    'bernstein_eval',
    'multi_indices',
    'BivariateBasis',
    'gram_matrix_raw',
    'smoothness_constraints',
    'orthonormal_basis',
    'energy_matrix',
    'eval_design',
    'evaluate_piece'
]
