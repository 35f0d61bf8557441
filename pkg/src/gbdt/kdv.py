"""Matrix KdV solutions from the same dressing data, now depending on (x, t).

The exponentials carry the phase ``x Q + 4 t Q^3``.  ``S(x, t)`` is either
the time-dependent version of the four-sandwich closed form, or the
path integral of its two partial derivatives along an L-shaped path.
"""
from dataclasses import dataclass, field

import numpy as np

from .core import (COND_TOL, CLOSED_FORM_SEP, QUAD_ABS_TOL, QUAD_ORDER, QUAD_REL_TOL,
                   Dressing, adaptive_integral, closed_form_s, identity_defect, invert_s,
                   make_dressing, potential_from, sylvester_blocks)
from .errors import SingularS, SpectraOverlap
from .matfun import ctranspose, expm

__all__ = ['KdvDressing', 'KdvEngine', 'KdvField', 'make_kdv_dressing',
           'kdv_lambda_pair', 'kdv_lambda_stack', 'build_kdv_engine',
           'kdv_s_matrix', 'kdv_s_path', 'kdv_potential', 'kdv_identity_defect',
           'sample_kdv_field']

# A KdV dressing carries exactly the stationary data; the identity is
# checked once, at (x, t) = (0, 0).
KdvDressing = Dressing
make_kdv_dressing = make_dressing


def _phase_exp(d, xs, ts):
    xs, ts = np.broadcast_arrays(np.asarray(xs, dtype=float), np.asarray(ts, dtype=float))
    arg = 1j * (xs[..., None, None] * d.Q + 4.0 * ts[..., None, None] * d.Q3)
    return expm(arg), expm(-arg)


def kdv_lambda_stack(d, xs, ts):
    """``Lambda1, Lambda2`` on broadcast arrays of x and t."""
    e1, e2 = _phase_exp(d, xs, ts)
    a = e1 @ d.f1
    b = e2 @ d.f2
    return -1j * d.Q @ (a - b), a + b


def kdv_lambda_pair(d, x, t):
    l1, l2 = kdv_lambda_stack(d, np.array([x]), np.array([t]))
    return l1[0], l2[0]


@dataclass(frozen=True, eq=False)
class KdvEngine:
    dressing: Dressing
    mode: str
    Z1: np.ndarray = None
    Z2: np.ndarray = None
    Z3: np.ndarray = None
    D: np.ndarray = None
    abs_tol: float = QUAD_ABS_TOL
    rel_tol: float = QUAD_REL_TOL
    order: int = QUAD_ORDER

    def __call__(self, x, t):
        return kdv_s_matrix(self, x, t)


def build_kdv_engine(d, mode=None, sep=CLOSED_FORM_SEP, abs_tol=QUAD_ABS_TOL,
                     rel_tol=QUAD_REL_TOL, order=QUAD_ORDER):
    """Pick the closed form when its Sylvester systems are solvable, else path quadrature."""
    if mode not in (None, 'closed_form', 'quadrature'):
        raise ValueError(f'unknown S engine mode {mode!r}')
    quad = dict(abs_tol=abs_tol, rel_tol=rel_tol, order=order)
    if mode == 'quadrature':
        return KdvEngine(d, 'quadrature', **quad)
    try:
        z1, z2, z3 = sylvester_blocks(d, sep)
    except SpectraOverlap:
        if mode == 'closed_form':
            raise
        return KdvEngine(d, 'quadrature', **quad)
    offset = d.triple.S0 - (z1 + z2 + z2.conj().T + z3)
    offset = (offset + offset.conj().T) / 2
    return KdvEngine(d, 'closed_form', z1, z2, z3, offset, **quad)


def _rate(d):
    q = np.linalg.norm(d.Q, 2)
    return 1.0 + q, 1.0 + 4.0 * q ** 3


def _x_integrand(d, t):
    def f(xs):
        _, l2 = kdv_lambda_stack(d, xs, t)
        return l2 @ ctranspose(l2)
    return f


def _t_integrand(d, x):
    a = d.A
    ah = a.conj().T

    def f(ts):
        l1, l2 = kdv_lambda_stack(d, x, ts)
        g = l2 @ ctranspose(l2)
        return 4.0 * (a @ g + g @ ah + l1 @ ctranspose(l1))
    return f


def kdv_s_path(engine, x, t, path='tx'):
    """``S(x, t)`` by integrating the two partial derivatives.

    ``path='tx'``: t-leg at ``x = 0`` then the x-leg at fixed t;
    ``path='xt'`` integrates in the opposite order.
    """
    d = engine.dressing
    rx, rt = _rate(d)
    tol = dict(abs_tol=engine.abs_tol, rel_tol=engine.rel_tol, order=engine.order)
    s = np.array(d.triple.S0)
    if path == 'tx':
        legs = [(_t_integrand(d, 0.0), t, rt), (_x_integrand(d, t), x, rx)]
    elif path == 'xt':
        legs = [(_x_integrand(d, 0.0), x, rx), (_t_integrand(d, x), t, rt)]
    else:
        raise ValueError(f'unknown path {path!r}')
    for func, end, rate in legs:
        if end != 0:
            s = s + adaptive_integral(func, 0.0, float(end), rate, **tol)
    return (s + s.conj().T) / 2


def kdv_s_stack(engine, xs, ts):
    xs, ts = np.broadcast_arrays(np.asarray(xs, dtype=float), np.asarray(ts, dtype=float))
    if engine.mode == 'closed_form':
        e1, e2 = _phase_exp(engine.dressing, xs, ts)
        return closed_form_s(engine.Z1, engine.Z2, engine.Z3, engine.D, e1, e2)
    out = [kdv_s_path(engine, float(x), float(t)) for x, t in zip(xs.ravel(), ts.ravel())]
    n = engine.dressing.n
    return np.array(out).reshape(xs.shape + (n, n))


def kdv_s_matrix(engine, x, t):
    """``S(x, t)``; Hermitian, equal to ``S(0, 0)`` at the origin."""
    if engine.mode == 'closed_form':
        return kdv_s_stack(engine, [x], [t])[0]
    return kdv_s_path(engine, x, t)


def kdv_potential(engine, x, t, cond_tol=COND_TOL):
    """KdV solution ``u(x, t) = 2 (X12 + X21 + X22^2)``."""
    d = engine.dressing
    l1, l2 = kdv_lambda_pair(d, x, t)
    s_inv = invert_s(kdv_s_matrix(engine, x, t), x, t, cond_tol)
    return potential_from(l1, l2, s_inv)


def kdv_identity_defect(engine, x, t):
    """``A S - S A* - Pi j Pi*`` at (x, t)."""
    d = engine.dressing
    l1, l2 = kdv_lambda_pair(d, x, t)
    return identity_defect(d.A, kdv_s_matrix(engine, x, t), np.hstack([l1, l2]))


@dataclass(eq=False)
class KdvField:
    """Samples of ``u(x, t)``: ``values[i_t, i_x]`` is h x h, NaN where S is singular."""
    xs: np.ndarray
    ts: np.ndarray
    values: np.ndarray
    singular: list = field(default_factory=list)


def sample_kdv_field(engine, xs, ts, cond_tol=COND_TOL):
    xs = np.asarray(xs, dtype=float)
    ts = np.asarray(ts, dtype=float)
    h = engine.dressing.h
    values = np.full((ts.size, xs.size, h, h), np.nan, dtype=np.complex128)
    singular = []
    for it, t in enumerate(ts):
        for ix, x in enumerate(xs):
            try:
                values[it, ix] = kdv_potential(engine, float(x), float(t), cond_tol)
            except SingularS as exc:
                singular.append((float(x), float(t), exc.rcond))
    return KdvField(xs, ts, values, singular)
