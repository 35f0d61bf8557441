"""Explicit Schrodinger, dynamical Schrodinger and matrix KdV solutions by GBDT dressing."""
from .core import (Dressing, DynamicField, SMatrixEngine, SolutionRequest, Triple, build_s_engine,
                   dynamic_solution, fundamental_pair, lambda_pair, make_dressing,
                   potential, s_matrix, transfer_matrix, transformed_solution,
                   triple_from_sylvester, validate_triple)
from .errors import GbdtError
from .kdv import build_kdv_engine, kdv_potential, kdv_s_matrix

__version__ = '0.1.0'

__all__ = ['Triple', 'Dressing', 'SMatrixEngine', 'SolutionRequest', 'make_dressing',
           'validate_triple', 'triple_from_sylvester', 'build_s_engine', 'lambda_pair',
           's_matrix', 'potential', 'transfer_matrix', 'transformed_solution',
           'fundamental_pair', 'dynamic_solution', 'DynamicField', 'build_kdv_engine', 'kdv_potential',
           'kdv_s_matrix', 'GbdtError']
