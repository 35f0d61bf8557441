"""GBDT construction for the stationary and dynamical Schrodinger equations.

The seed potential is identically zero.  A parameter triple ``{A, S0, Pi0}``
with ``Pi0 = [theta1 theta2]`` is dressed by a square root ``Q`` of ``A``;
the closed-form generalised eigenfunctions ``Lambda1, Lambda2`` and the
Gram-type matrix ``S(x)`` then give the transformed potential, the transfer
matrix ``w_A(x, lambda)`` and explicit solutions.
"""
import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (DegenerateFrequency, InconsistentRoot, NoDressing,
                     QuadratureFailure, ShapeMismatch, SingularS,
                     SpectraOverlap)
from .matfun import (RANK_TOL, as_matrix, ctranspose, expm, hermitian_residual,
                     rcond, resolvent, solve_sylvester, sqrtm)

__all__ = ['Triple', 'Dressing', 'SMatrixEngine', 'SolutionRequest', 'TripleCheck',
           'j_matrix', 'validate_triple', 'triple_from_sylvester', 'make_dressing',
           'lambda_pair', 'lambda_stack', 'lambda_pair_blockexp', 'build_s_engine',
           's_matrix', 's_stack', 'invert_s', 'potential', 'transfer_matrix',
           'free_matrix', 'free_solution', 'transformed_solution',
           'fundamental_pair', 'dynamic_solution', 'DynamicField', 'identity_defect', 'frame',
           'IDENTITY_TOL', 'COND_TOL', 'ROOT_TOL', 'CLOSED_FORM_SEP']

IDENTITY_TOL = 1e-10
COND_TOL = 1e-12
ROOT_TOL = 1e-10
# Sylvester systems whose spectra are closer than this (relative) are
# treated as unsolvable; S(x) then comes from quadrature.
CLOSED_FORM_SEP = 1e-8

QUAD_ORDER = 16
QUAD_ABS_TOL = 1e-12
QUAD_REL_TOL = 1e-10
QUAD_MAX_LEVELS = 12


def j_matrix(h):
    """The 2h x 2h signature matrix ``[[0, I], [-I, 0]]``."""
    eye = np.eye(h)
    zero = np.zeros((h, h))
    return np.block([[zero, eye], [-eye, zero]]).astype(np.complex128)


@dataclass(frozen=True, eq=False)
class Triple:
    """GBDT parameter triple ``{A, S0, Pi0 = [theta1 theta2]}``.

    Only shapes are checked on construction; use :func:`validate_triple`
    to measure how well the matrix identity holds.
    """
    A: np.ndarray
    S0: np.ndarray
    theta1: np.ndarray
    theta2: np.ndarray

    def __post_init__(self):
        a = as_matrix(self.A, name='A')
        n = a.shape[0]
        if a.shape[1] != n:
            raise ShapeMismatch(f'A must be square, got {a.shape}')
        s0 = as_matrix(self.S0, n, n, name='S0')
        t1 = as_matrix(self.theta1, rows=n, name='theta1')
        t2 = as_matrix(self.theta2, n, t1.shape[1], name='theta2')
        object.__setattr__(self, 'A', a)
        object.__setattr__(self, 'S0', s0)
        object.__setattr__(self, 'theta1', t1)
        object.__setattr__(self, 'theta2', t2)

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def h(self):
        return self.theta1.shape[1]

    @property
    def m(self):
        return 2 * self.h

    @property
    def Pi0(self):
        return np.hstack([self.theta1, self.theta2])

    def scale(self):
        """Magnitude used to make identity residuals relative."""
        return max(1.0, np.linalg.norm(self.A) * np.linalg.norm(self.S0)
                   + np.linalg.norm(self.Pi0) ** 2)


@dataclass(frozen=True, eq=False)
class TripleCheck:
    identity: float
    hermitian: float
    scale: float

    def passed(self, tol=IDENTITY_TOL):
        return self.identity <= tol * self.scale and self.hermitian <= tol * self.scale


def identity_defect(a, s, pi):
    """``A S - S A* - Pi j Pi*`` for a single sample."""
    h = pi.shape[1] // 2
    return a @ s - s @ a.conj().T - pi @ j_matrix(h) @ pi.conj().T


def validate_triple(triple):
    """Frobenius residuals of the matrix identity and of ``S0 = S0*``."""
    defect = identity_defect(triple.A, triple.S0, triple.Pi0)
    return TripleCheck(float(np.linalg.norm(defect)),
                       hermitian_residual(triple.S0), triple.scale())


def triple_from_sylvester(A, theta1, theta2):
    """Complete ``A, theta1, theta2`` to a valid triple by solving for ``S0``.

    Requires ``spec(A)`` and ``spec(A*)`` to be disjoint, in which case the
    solution is unique and therefore Hermitian.
    """
    a = as_matrix(A, name='A')
    pi0 = np.hstack([as_matrix(theta1, name='theta1'), as_matrix(theta2, name='theta2')])
    rhs = pi0 @ j_matrix(pi0.shape[1] // 2) @ pi0.conj().T
    s0 = solve_sylvester(a, -a.conj().T, rhs)
    s0 = (s0 + s0.conj().T) / 2
    return Triple(a, s0, theta1, theta2)


@dataclass(frozen=True, eq=False)
class Dressing:
    """Square root ``Q`` of ``A`` and the amplitudes ``f1, f2``."""
    Q: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    triple: Triple

    @property
    def A(self):
        return self.triple.A

    @property
    def n(self):
        return self.triple.n

    @property
    def h(self):
        return self.triple.h

    @cached_property
    def Q3(self):
        return self.Q @ self.Q @ self.Q

    def root_residual(self):
        return float(np.linalg.norm(self.Q @ self.Q - self.A))

    def initial_residual(self):
        """Residuals of ``-iQ(f1 - f2) = theta1`` and ``f1 + f2 = theta2``."""
        r1 = -1j * self.Q @ (self.f1 - self.f2) - self.triple.theta1
        r2 = self.f1 + self.f2 - self.triple.theta2
        return float(np.linalg.norm(r1)), float(np.linalg.norm(r2))


def make_dressing(triple, q=None, f1=None, f2=None, tol=ROOT_TOL, check_identity=True,
                  identity_tol=IDENTITY_TOL):
    """Choose ``Q`` and ``f1, f2`` for a triple.

    Without ``q`` the principal root of ``A`` is used (``A`` must be
    invertible).  With an invertible ``Q`` the amplitudes are
    ``(theta2 +- i Q^{-1} theta1) / 2``.  For a singular supplied ``Q`` the
    2n x 2n linear system for ``(f1, f2)`` is solved in the minimum-norm
    least-squares sense.  Explicit ``f1, f2`` override both routes but are
    still checked.
    """
    if check_identity:
        chk = validate_triple(triple)
        if not chk.passed(identity_tol):
            raise ValueError(f'triple violates the GBDT identity (residual {chk.identity:.3e}, '
                             f'hermitian defect {chk.hermitian:.3e})')
    a = triple.A
    n = triple.n
    scale = max(1.0, np.linalg.norm(a))
    if q is None:
        qm = sqrtm(a)
    else:
        qm = as_matrix(q, n, n, name='Q')
        if np.linalg.norm(qm @ qm - a) > tol * scale:
            raise InconsistentRoot(f'supplied Q does not square to A '
                                   f'(residual {np.linalg.norm(qm @ qm - a):.3e})')
    t1, t2 = triple.theta1, triple.theta2
    if f1 is not None or f2 is not None:
        g1 = as_matrix(f1, n, triple.h, name='f1')
        g2 = as_matrix(f2, n, triple.h, name='f2')
    else:
        s = np.linalg.svd(qm, compute_uv=False)
        if s[-1] > RANK_TOL * s[0]:
            w = 1j * np.linalg.solve(qm, t1)
            g1, g2 = (t2 + w) / 2, (t2 - w) / 2
        else:
            g1, g2 = _min_norm_amplitudes(qm, t1, t2)
    d = Dressing(qm, np.asarray(g1), np.asarray(g2), triple)
    r1, r2 = d.initial_residual()
    ref = max(1.0, np.linalg.norm(triple.Pi0))
    if max(r1, r2) > tol * ref:
        raise NoDressing(f'f1, f2 do not reproduce Pi0 (residuals {r1:.3e}, {r2:.3e})')
    return d


def _min_norm_amplitudes(q, t1, t2):
    n = q.shape[0]
    eye = np.eye(n)
    system = np.block([[-1j * q, 1j * q], [eye, eye]])
    rhs = np.vstack([t1, t2])
    sol, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    return sol[:n], sol[n:]


def _exp_pair(q, phases):
    """``exp(i p Q)`` and ``exp(-i p Q)`` stacked over the phase array."""
    arg = 1j * np.asarray(phases, dtype=float)[..., None, None] * q
    return expm(arg), expm(-arg)


def lambda_stack(d, xs):
    """``Lambda1, Lambda2`` at every x in ``xs`` as ``(N, n, h)`` stacks."""
    e1, e2 = _exp_pair(d.Q, xs)
    a = e1 @ d.f1
    b = e2 @ d.f2
    return -1j * d.Q @ (a - b), a + b


def lambda_pair(d, x):
    """Closed-form ``(Lambda1(x), Lambda2(x))``."""
    l1, l2 = lambda_stack(d, np.array([x], dtype=float))
    return l1[0], l2[0]


def lambda_pair_blockexp(d, x):
    """``(Lambda1, Lambda2)`` from the first-order block system.

    ``[Lambda1; Lambda2] = expm(x [[0, A], [-I, 0]]) [theta1; theta2]``;
    independent of ``Q`` and used to cross-check :func:`lambda_pair`.
    """
    n = d.n
    gen = np.block([[np.zeros((n, n)), d.A], [-np.eye(n), np.zeros((n, n))]])
    stacked = expm(x * gen) @ np.vstack([d.triple.theta1, d.triple.theta2])
    return stacked[:n], stacked[n:]


def gauss_legendre(func, a, b, panels, order=QUAD_ORDER):
    """Composite Gauss-Legendre rule; ``func`` maps a node array to a stack."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = a + (b - a) * np.arange(panels + 1) / panels
    half = (edges[1:] - edges[:-1]) / 2
    mid = (edges[1:] + edges[:-1]) / 2
    pts = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    wts = (half[:, None] * weights[None, :]).ravel()
    vals = func(pts)
    return np.tensordot(wts, vals, axes=(0, 0))


def adaptive_integral(func, a, b, rate, abs_tol=QUAD_ABS_TOL, rel_tol=QUAD_REL_TOL,
                      order=QUAD_ORDER, max_levels=QUAD_MAX_LEVELS):
    """Integrate a smooth matrix-valued function over ``[a, b]``.

    Starts from a panel count proportional to ``|b - a| * rate`` and doubles
    it until two successive composite rules agree to tolerance.
    """
    if a == b:
        return None
    panels = max(1, math.ceil(abs(b - a) * rate / 2.0))
    coarse = gauss_legendre(func, a, b, panels, order)
    for _ in range(max_levels):
        fine = gauss_legendre(func, a, b, 2 * panels, order)
        err = np.linalg.norm(fine - coarse)
        if err <= max(abs_tol, rel_tol * np.linalg.norm(fine)):
            return fine
        coarse = fine
        panels *= 2
    raise QuadratureFailure(f'no convergence on [{a}, {b}] (last error estimate {err:.3e})')


def _growth_rate(q):
    return 1.0 + float(np.linalg.norm(q, 2))


@dataclass(frozen=True, eq=False)
class SMatrixEngine:
    """Evaluator for ``S(x)``.

    ``mode == 'closed_form'``: four exponential sandwiches of the Sylvester
    solutions ``Z1, Z2, Z3`` plus the constant Hermitian offset ``D`` that
    pins ``S(0) = S0``.  ``mode == 'quadrature'``: ``S0`` plus the adaptive
    integral of ``Lambda2 Lambda2*``.
    """
    dressing: Dressing
    mode: str
    Z1: np.ndarray = None
    Z2: np.ndarray = None
    Z3: np.ndarray = None
    D: np.ndarray = None
    abs_tol: float = QUAD_ABS_TOL
    rel_tol: float = QUAD_REL_TOL
    order: int = QUAD_ORDER

    def __call__(self, x):
        return s_matrix(self, x)


def sylvester_blocks(d, sep=CLOSED_FORM_SEP):
    """Solve the three Sylvester equations behind the closed form of ``S``.

    Raises SpectraOverlap when any of them is (numerically) unsolvable.
    """
    q = d.Q
    qs = q.conj().T
    f1, f2 = d.f1, d.f2
    z1 = solve_sylvester(q, -qs, -1j * f1 @ f1.conj().T, eigen_tol=sep)
    z2 = solve_sylvester(q, qs, -1j * f1 @ f2.conj().T, eigen_tol=sep)
    z3 = solve_sylvester(q, -qs, 1j * f2 @ f2.conj().T, eigen_tol=sep)
    return z1, z2, z3


def build_s_engine(d, mode=None, sep=CLOSED_FORM_SEP, abs_tol=QUAD_ABS_TOL,
                   rel_tol=QUAD_REL_TOL, order=QUAD_ORDER):
    """Closed form when all three Sylvester systems are solvable, else quadrature.

    ``mode`` forces a choice; forcing ``'closed_form'`` re-raises
    SpectraOverlap.
    """
    if mode not in (None, 'closed_form', 'quadrature'):
        raise ValueError(f'unknown S engine mode {mode!r}')
    quad = dict(abs_tol=abs_tol, rel_tol=rel_tol, order=order)
    if mode == 'quadrature':
        return SMatrixEngine(d, 'quadrature', **quad)
    try:
        z1, z2, z3 = sylvester_blocks(d, sep)
    except SpectraOverlap:
        if mode == 'closed_form':
            raise
        return SMatrixEngine(d, 'quadrature', **quad)
    offset = d.triple.S0 - (z1 + z2 + z2.conj().T + z3)
    offset = (offset + offset.conj().T) / 2
    return SMatrixEngine(d, 'closed_form', z1, z2, z3, offset, **quad)


def closed_form_s(z1, z2, z3, offset, e1, e2):
    """Sum of the four sandwiches for exponential stacks ``e1 = exp(iP)``, ``e2 = exp(-iP)``."""
    e1h = ctranspose(e1)
    e2h = ctranspose(e2)
    s = (e1 @ z1 @ e1h + e1 @ z2 @ e2h + e2 @ z2.conj().T @ e1h
         + e2 @ z3 @ e2h + offset)
    return (s + ctranspose(s)) / 2


def s_stack(engine, xs):
    """``S`` at every x in ``xs`` as an ``(N, n, n)`` stack."""
    xs = np.asarray(xs, dtype=float)
    d = engine.dressing
    if engine.mode == 'closed_form':
        e1, e2 = _exp_pair(d.Q, xs)
        return closed_form_s(engine.Z1, engine.Z2, engine.Z3, engine.D, e1, e2)
    return np.stack([s_matrix(engine, float(x)) for x in xs])


def _gram(d):
    def integrand(pts):
        _, l2 = lambda_stack(d, pts)
        return l2 @ ctranspose(l2)
    return integrand


def s_matrix(engine, x):
    """``S(x)``; equals ``S0`` exactly at ``x = 0`` in quadrature mode."""
    d = engine.dressing
    if engine.mode == 'closed_form':
        return s_stack(engine, [x])[0]
    s0 = np.array(d.triple.S0)
    if x == 0:
        return s0
    integral = adaptive_integral(_gram(d), 0.0, float(x), _growth_rate(d.Q),
                                 engine.abs_tol, engine.rel_tol, engine.order)
    s = s0 + integral
    return (s + s.conj().T) / 2


def invert_s(s, x, t=None, cond_tol=COND_TOL):
    """Return ``S^{-1}`` or raise SingularS when ``rcond(S) < cond_tol``."""
    rc = rcond(s)
    if rc < cond_tol:
        raise SingularS(x, t, rc)
    return np.linalg.inv(s)


def potential_from(l1, l2, s_inv):
    """``2 (X12 + X21 + X22^2)`` with ``Xik = Lambda_i* S^{-1} Lambda_k``."""
    x12 = l1.conj().T @ s_inv @ l2
    x21 = l2.conj().T @ s_inv @ l1
    x22 = l2.conj().T @ s_inv @ l2
    return 2 * (x12 + x21 + x22 @ x22)


def frame(d, engine, x):
    """``(Lambda1, Lambda2, S)`` at ``x``, sharing the exponentials when possible."""
    if engine.mode != 'closed_form':
        l1, l2 = lambda_pair(d, x)
        return l1, l2, s_matrix(engine, x)
    e1, e2 = _exp_pair(d.Q, np.array([x], dtype=float))
    a = e1[0] @ d.f1
    b = e2[0] @ d.f2
    s = closed_form_s(engine.Z1, engine.Z2, engine.Z3, engine.D, e1, e2)[0]
    return -1j * d.Q @ (a - b), a + b, s


def potential(d, engine, x, cond_tol=COND_TOL):
    """Transformed ``h x h`` potential at ``x``."""
    l1, l2, s = frame(d, engine, x)
    return potential_from(l1, l2, invert_s(s, x, cond_tol=cond_tol))


def transfer_matrix(d, engine, x, lam, cond_tol=COND_TOL, res=None):
    """``w_A(x, lam) = I - j Pi* S^{-1} (A - lam I)^{-1} Pi``.

    ``res`` may carry a precomputed resolvent ``(A - lam I)^{-1}``.
    """
    l1, l2, s = frame(d, engine, x)
    pi = np.hstack([l1, l2])
    s_inv = invert_s(s, x, cond_tol=cond_tol)
    if res is None:
        res = resolvent(d.A, lam)
    m = pi.shape[1]
    return np.eye(m) - j_matrix(m // 2) @ pi.conj().T @ s_inv @ res @ pi


@dataclass(frozen=True, eq=False)
class SolutionRequest:
    """Spectral parameter and constant vector ``f0`` (length 2h).

    ``sqrt_lambda`` is fixed once (principal branch) and reused by every
    evaluation made with this request.
    """
    lam: complex
    f0: np.ndarray

    def __post_init__(self):
        f0 = np.asarray(self.f0, dtype=np.complex128).ravel()
        if f0.size % 2:
            raise ShapeMismatch('f0 must have even length 2h')
        object.__setattr__(self, 'f0', f0)
        object.__setattr__(self, 'lam', complex(self.lam))

    @property
    def h(self):
        return self.f0.size // 2

    @cached_property
    def sqrt_lambda(self):
        lam = self.lam
        return complex(np.sqrt(complex(lam.real, lam.imag + 0.0)))


def free_matrix(x, h, k):
    """``W0(x, lam)`` for a given ``k = sqrt(lam)``."""
    ep = np.exp(1j * x * k)
    em = np.exp(-1j * x * k)
    eye = np.eye(h)
    return np.block([[ep * eye, em * eye], [1j * k * ep * eye, -1j * k * em * eye]])


def free_solution(x, req):
    """``Y0 = W0(x, lam) f0``, a solution of the zero-potential system and its derivative."""
    if req.lam == 0:
        warnings.warn('lambda = 0: the columns of W0 coincide', DegenerateFrequency,
                      stacklevel=2)
    return free_matrix(x, req.h, req.sqrt_lambda) @ req.f0


def transformed_solution(d, engine, x, req, cond_tol=COND_TOL):
    """``[I_h 0] w_A(x, lam) W0(x, lam) f0`` (length-h vector)."""
    if req.h != d.h:
        raise ShapeMismatch(f'f0 has length {2 * req.h}, expected {2 * d.h}')
    w = transfer_matrix(d, engine, x, req.lam, cond_tol)
    y0 = free_solution(x, req)
    return (w @ y0)[:d.h]


def fundamental_pair(d, engine, x, lam, cond_tol=COND_TOL):
    """Columns of ``[I_h 0] w_A W0``: the ``h x h`` blocks for ``exp(+-ix sqrt(lam))``.

    Both blocks use one and the same ``sqrt(lam)``.
    """
    req = SolutionRequest(lam, np.zeros(2 * d.h))
    w = transfer_matrix(d, engine, x, req.lam, cond_tol)
    top = w[:d.h] @ free_matrix(x, d.h, req.sqrt_lambda)
    return top[:, :d.h], top[:, d.h:], req.sqrt_lambda


def dynamic_solution(d, engine, x, t, cond_tol=COND_TOL):
    """``[0 I_h] Pi(x)* S(x)^{-1} exp(-itA)`` (an h x n matrix)."""
    _, l2, s = frame(d, engine, x)
    s_inv = invert_s(s, x, cond_tol=cond_tol)
    return l2.conj().T @ s_inv @ expm(-1j * t * d.A)


class DynamicField:
    """Callable ``(x, t) -> psi`` that reuses the x and t factors.

    Same values as :func:`dynamic_solution`; the x factor and the time
    exponential are cached separately, so a rectangular grid costs one
    frame per x and one exponential per t.
    """

    def __init__(self, d, engine, cond_tol=COND_TOL):
        self.d, self.engine, self.cond_tol = d, engine, cond_tol
        self._space, self._time = {}, {}

    def space_factor(self, x):
        x = float(x)
        if x not in self._space:
            _, l2, s = frame(self.d, self.engine, x)
            try:
                self._space[x] = l2.conj().T @ invert_s(s, x, cond_tol=self.cond_tol)
            except SingularS as exc:
                self._space[x] = exc
        val = self._space[x]
        if isinstance(val, SingularS):
            raise val
        return val

    def time_factor(self, t):
        t = float(t)
        if t not in self._time:
            self._time[t] = expm(-1j * t * self.d.A)
        return self._time[t]

    def __call__(self, x, t):
        return self.space_factor(x) @ self.time_factor(t)
