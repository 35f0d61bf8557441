"""Worked examples with closed-form answers.

``ee2``: A = Q = 0 and theta1 = 0, arbitrary Hermitian ``S0`` and ``theta2``.
``ee3``: n = 2, h = 1, nilpotent ``Q``; parameters b, c, d with d != 0.
``ee36``: ``ee3`` with c = 0, where the potential is 6/x^2 and the
fundamental solutions are elementary.

Each preset builds a :class:`Triple` and a :class:`Dressing` for the generic
pipeline, and the module provides the matching reference evaluators.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.special import spherical_jn

from .core import Dressing, Triple, make_dressing
from .errors import SingularGamma, SingularMatrix
from .matfun import as_matrix, rcond

__all__ = ['ExamplePreset', 'PRESETS', 'get_preset', 'ee2_triple', 'ee2_dressing',
           'ee3_triple', 'ee3_dressing', 'ee36_triple', 'ee36_dressing',
           'ee2_potential_reference', 'ee3_potential_reference', 'ee3_gamma',
           'ee36_fundamental']

_NILPOTENT = np.array([[0, 1], [0, 0]], dtype=np.complex128)


def ee2_triple(S0, theta2):
    s0 = as_matrix(S0, name='S0')
    n = s0.shape[0]
    t2 = as_matrix(theta2, n, name='theta2')
    return Triple(np.zeros((n, n)), s0, np.zeros_like(t2), t2)


def ee2_dressing(S0, theta2):
    """``Q = 0`` with the symmetric split ``f1 = f2 = theta2 / 2``."""
    tr = ee2_triple(S0, theta2)
    half = tr.theta2 / 2
    return make_dressing(tr, q=np.zeros((tr.n, tr.n)), f1=half, f2=half)


def _check_d(d):
    if d == 0:
        raise ValueError('d must be nonzero')


def ee3_triple(b, c, d):
    _check_d(d)
    return Triple(np.zeros((2, 2)), np.diag([0.0, float(d)]),
                  np.array([[b], [0.0]]), np.array([[c], [0.0]]))


def ee3_dressing(b, c, d, split=None):
    """Nilpotent ``Q`` with ``f12 = -f22 = i b / 2``.

    ``split`` is ``f11``; ``f21 = c - f11``.  The default is ``c / 2``.
    """
    tr = ee3_triple(b, c, d)
    f11 = c / 2 if split is None else split
    f1 = np.array([[f11], [0.5j * b]])
    f2 = np.array([[c - f11], [-0.5j * b]])
    return make_dressing(tr, q=_NILPOTENT, f1=f1, f2=f2)


def ee36_triple(b, d):
    return ee3_triple(b, 0.0, d)


def ee36_dressing(b, d):
    return ee3_dressing(b, 0.0, d)


def ee2_potential_reference(S0, theta2, x, form='direct'):
    """``2 (theta2* (S0 + x theta2 theta2*)^{-1} theta2)^2``.

    ``form='resolvent'`` evaluates the equivalent h x h expression
    ``2 ((I + x theta2* S0^{-1} theta2)^{-1} theta2* S0^{-1} theta2)^2``,
    which needs ``S0`` invertible.
    """
    s0 = as_matrix(S0, name='S0')
    t2 = as_matrix(theta2, s0.shape[0], name='theta2')
    if form == 'direct':
        s = s0 + x * t2 @ t2.conj().T
        if rcond(s) < 1e-14:
            raise SingularMatrix(f'S0 + x theta2 theta2* is singular at x={x!r}')
        g = t2.conj().T @ np.linalg.solve(s, t2)
    elif form == 'resolvent':
        if rcond(s0) < 1e-14:
            raise SingularMatrix('S0 is singular')
        k = t2.conj().T @ np.linalg.solve(s0, t2)
        m = np.eye(k.shape[0]) + x * k
        if rcond(m) < 1e-14:
            raise SingularMatrix(f'I + x theta2* S0^-1 theta2 is singular at x={x!r}')
        g = np.linalg.solve(m, k)
    else:
        raise ValueError(f'unknown form {form!r}')
    return 2 * g @ g


def ee3_gamma(b, c, x):
    return (b * b / 3) * x ** 3 - b * c * x ** 2 + c * c * x


def ee3_potential_reference(b, c, d, x):
    """Scalar potential of ``ee3``; raises SingularGamma where gamma(x) = 0."""
    _check_d(d)
    g = ee3_gamma(b, c, x)
    if g == 0:
        raise SingularGamma(f'gamma vanishes at x={x!r}')
    poly = (b ** 3 / 3) * x ** 3 - b * b * c * x ** 2 + b * c * c * x - c ** 3
    return 2 * (b * x - c) * poly / g ** 2


def ee36_fundamental(lam, x, which='phi'):
    """``phi``, ``chi`` (same principal ``sqrt(lam)``) or the regular ``phi - chi``.

    The regular combination behaves like ``-2i (x sqrt(lam))^3 / 15`` at 0.
    """
    if x == 0 or lam == 0:
        raise ValueError('ee36_fundamental needs x != 0 and lam != 0')
    lam = complex(lam)
    k = complex(np.sqrt(complex(lam.real, lam.imag + 0.0)))

    def part(sign):
        return np.exp(sign * 1j * x * k) * (1 + sign * 3j / (k * x) - 3 / (lam * x * x))

    if which == 'phi':
        return part(1)
    if which == 'chi':
        return part(-1)
    if which == 'regular':
        # phi - chi = -2i z j_2(z) with z = x sqrt(lam); the direct difference
        # loses everything to cancellation once x sqrt(lam) is small
        z = x * k
        return complex(-2j * z * spherical_jn(2, z))
    raise ValueError(f'unknown solution {which!r}')


@dataclass(frozen=True)
class ExamplePreset:
    """A preset id with its parameters and the associated constructors."""
    id: str
    params: dict = field(default_factory=dict)

    def triple(self) -> Triple:
        p = self.params
        if self.id == 'ee2':
            return ee2_triple(p['S0'], p['theta2'])
        if self.id == 'ee3':
            return ee3_triple(p['b'], p['c'], p['d'])
        return ee36_triple(p['b'], p['d'])

    def dressing(self) -> Dressing:
        p = self.params
        if self.id == 'ee2':
            return ee2_dressing(p['S0'], p['theta2'])
        if self.id == 'ee3':
            return ee3_dressing(p['b'], p['c'], p['d'])
        return ee36_dressing(p['b'], p['d'])

    def potential_reference(self, x):
        """Reference potential as an h x h array."""
        p = self.params
        if self.id == 'ee2':
            return ee2_potential_reference(p['S0'], p['theta2'], x)
        c = p['c'] if self.id == 'ee3' else 0.0
        return np.array([[ee3_potential_reference(p['b'], c, p['d'], x)]])


_DEFAULTS = {
    'ee2': {'S0': [[1.0]], 'theta2': [[1.0]]},
    'ee3': {'b': 1.0, 'c': 1.0, 'd': 1.0},
    'ee36': {'b': 1.0, 'd': 1.0},
}
PRESETS = tuple(_DEFAULTS)


def get_preset(preset_id, **overrides):
    """Preset with default parameters updated by ``overrides`` (None values ignored)."""
    if preset_id not in _DEFAULTS:
        raise KeyError(f'unknown preset {preset_id!r}; choose from {", ".join(PRESETS)}')
    params = dict(_DEFAULTS[preset_id])
    for key, val in overrides.items():
        if val is None:
            continue
        if key not in params:
            raise KeyError(f'preset {preset_id} has no parameter {key!r}')
        params[key] = val
    if 'd' in params:
        _check_d(params['d'])
    return ExamplePreset(preset_id, params)
