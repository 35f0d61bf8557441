"""Dense complex matrix-function kernels.

Everything here works on complex128 ndarrays.  ``expm`` additionally accepts
stacks of shape ``(..., n, n)`` so that quadrature nodes and sampling grids
can be exponentiated in one call.
"""
import numpy as np
from scipy.linalg import schur, solve_triangular

from .errors import (NoRootFound, ShapeMismatch, SingularMatrix, SpectraOverlap,
                     SpectralPoint)

__all__ = ['as_matrix', 'is_hermitian', 'hermitian_residual', 'rcond',
           'sqrtm', 'expm', 'solve_sylvester', 'resolvent', 'ctranspose',
           'RANK_TOL', 'EIGEN_TOL']

RANK_TOL = 1e-12
EIGEN_TOL = 1e-12


def as_matrix(a, rows=None, cols=None, name='matrix'):
    """Coerce ``a`` to a finite 2-D complex128 array of the requested shape.

    Scalars and 1-D inputs are promoted to 1x1 and column matrices.
    """
    m = np.array(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ShapeMismatch(f'{name}: expected a 2-D array, got shape {m.shape}')
    if rows is not None and m.shape[0] != rows:
        raise ShapeMismatch(f'{name}: expected {rows} rows, got {m.shape[0]}')
    if cols is not None and m.shape[1] != cols:
        raise ShapeMismatch(f'{name}: expected {cols} columns, got {m.shape[1]}')
    if not np.all(np.isfinite(m)):
        raise ValueError(f'{name}: entries must be finite')
    m.flags.writeable = False
    return m


def _square(a, name='matrix'):
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ShapeMismatch(f'{name}: expected a square matrix, got shape {m.shape}')
    return m


def ctranspose(m):
    return np.conj(np.swapaxes(m, -1, -2))


def hermitian_residual(m):
    return float(np.linalg.norm(m - ctranspose(m)))


def is_hermitian(m, tol=1e-12):
    return hermitian_residual(m) <= tol * max(np.linalg.norm(m), 1.0)


def rcond(m):
    """Reciprocal 2-norm condition number (0 for exactly singular input)."""
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0.0:
        return 0.0
    return float(s[-1] / s[0])


def _principal_sqrt(z):
    # +0.0 turns a negative-zero imaginary part into +0.0 so that negative
    # reals map onto +i*sqrt(|z|), i.e. arguments are halved from (-pi, pi].
    z = np.asarray(z, dtype=np.complex128)
    w = np.empty_like(z)
    w.real = z.real
    w.imag = z.imag + 0.0
    return np.sqrt(w)


def sqrtm(a, rank_tol=RANK_TOL):
    """Principal square root of an invertible matrix.

    Complex Schur form ``A = U T U*`` followed by the column recurrence for
    an upper-triangular ``R`` with ``R @ R = T``; every eigenvalue gets its
    principal root.

    Raises
    ------
    SingularMatrix
        smallest singular value of ``a`` <= ``rank_tol * ||a||_2``.
    NoRootFound
        a vanishing denominator ``R_ii + R_jj`` in the recurrence.
    """
    a = _square(a, 'A')
    if a.ndim != 2:
        raise ShapeMismatch('sqrtm expects a single matrix')
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[-1] <= rank_tol * s[0]:
        raise SingularMatrix('sqrtm: A is numerically singular; supply a root explicitly')
    t, u = schur(a, output='complex')
    n = t.shape[0]
    r = np.zeros_like(t)
    d = _principal_sqrt(np.diag(t))
    r[np.diag_indices(n)] = d
    for j in range(n):
        for i in range(j - 1, -1, -1):
            denom = r[i, i] + r[j, j]
            if denom == 0:
                raise NoRootFound(f'sqrtm: zero denominator at ({i}, {j})')
            acc = r[i, i + 1:j] @ r[i + 1:j, j]
            r[i, j] = (t[i, j] - acc) / denom
    return u @ r @ u.conj().T


# Pade coefficients b_0..b_m of the [m/m] approximant to exp.
_PADE = {
    3: (120., 60., 12., 1.),
    5: (30240., 15120., 3360., 420., 30., 1.),
    7: (17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.),
    9: (17643225600., 8821612800., 2075673600., 302702400., 30270240.,
        2162160., 110880., 3960., 90., 1.),
    13: (64764752532480000., 32382376266240000., 7771770303897600.,
         1187353796428800., 129060195264000., 10559470521600.,
         670442572800., 33522128640., 1323241920., 40840800., 960960.,
         16380., 182., 1.),
}
_THETA = {3: 1.495585217958292e-2, 5: 2.539398330063230e-1,
          7: 9.504178996162932e-1, 9: 2.097847961257068e0,
          13: 5.371920351148152e0}


def _nilpotent_sum(m):
    """Exact truncated series when every matrix in the stack is nilpotent."""
    n = m.shape[-1]
    term = np.broadcast_to(np.eye(n, dtype=np.complex128), m.shape)
    total = term.copy()
    for k in range(1, n + 1):
        term = (term @ m) / k
        if not np.any(term):
            return total
        total = total + term
    return None


def _pade_uv(m, deg):
    n = m.shape[-1]
    eye = np.broadcast_to(np.eye(n, dtype=np.complex128), m.shape)
    b = _PADE[deg]
    m2 = m @ m
    if deg < 13:
        powers = [eye, m2]
        for _ in range(2, deg // 2 + 1):
            powers.append(powers[-1] @ m2)
        u = sum(b[2 * k + 1] * powers[k] for k in range(deg // 2 + 1))
        v = sum(b[2 * k] * powers[k] for k in range(deg // 2 + 1))
        return m @ u, v
    m4 = m2 @ m2
    m6 = m2 @ m4
    u = m6 @ (b[13] * m6 + b[11] * m4 + b[9] * m2)
    u = m @ (u + b[7] * m6 + b[5] * m4 + b[3] * m2 + b[1] * eye)
    v = m6 @ (b[12] * m6 + b[10] * m4 + b[8] * m2)
    v = v + b[6] * m6 + b[4] * m4 + b[2] * m2 + b[0] * eye
    return u, v


def expm(m):
    """Matrix exponential by scaling and squaring with a diagonal Pade approximant.

    Accepts a single ``(n, n)`` matrix or a stack ``(..., n, n)``; a stack is
    scaled uniformly by its largest 1-norm.  Nilpotent input is summed
    exactly, so ``expm(0)`` is the identity and ``expm(N)`` for ``N @ N == 0``
    is ``I + N`` bit-for-bit.
    """
    m = _square(m, 'M')
    exact = _nilpotent_sum(m)
    if exact is not None:
        return exact
    norm1 = float(np.max(np.sum(np.abs(m), axis=-2)))
    for deg in (3, 5, 7, 9):
        if norm1 <= _THETA[deg]:
            u, v = _pade_uv(m, deg)
            return np.linalg.solve(v - u, v + u)
    s = max(0, int(np.ceil(np.log2(norm1 / _THETA[13]))))
    scaled = m / 2.0 ** s
    u, v = _pade_uv(scaled, 13)
    e = np.linalg.solve(v - u, v + u)
    for _ in range(s):
        e = e @ e
    return e


def solve_sylvester(p, r, c, eigen_tol=EIGEN_TOL):
    """Solve ``P Z + Z R = C`` by the Bartels-Stewart scheme.

    Both coefficients are reduced to complex Schur form, the transformed
    system is solved column by column with triangular solves, and the
    solution is rotated back.

    Raises
    ------
    SpectraOverlap
        if ``min |p_i + r_j| <= eigen_tol * (||P|| + ||R||)``.
    """
    p = _square(p, 'P')
    r = _square(r, 'R')
    c = np.asarray(c, dtype=np.complex128)
    if c.shape != (p.shape[0], r.shape[0]):
        raise ShapeMismatch(f'C has shape {c.shape}, expected {(p.shape[0], r.shape[0])}')
    t, u = schur(p, output='complex')
    w, v = schur(r, output='complex')
    sep = np.min(np.abs(np.diag(t)[:, None] + np.diag(w)[None, :]))
    scale = np.linalg.norm(p, 2) + np.linalg.norm(r, 2)
    if sep <= eigen_tol * scale:
        raise SpectraOverlap(f'spectra of P and -R overlap (separation {sep:.3e})')
    f = u.conj().T @ c @ v
    y = np.zeros_like(f)
    eye = np.eye(t.shape[0])
    for k in range(w.shape[0]):
        rhs = f[:, k] - y[:, :k] @ w[:k, k]
        y[:, k] = solve_triangular(t + w[k, k] * eye, rhs)
    return u @ y @ v.conj().T


def resolvent(a, lam, eigen_tol=EIGEN_TOL):
    """``(A - lam I)^{-1}``; raises SpectralPoint when lam is an eigenvalue."""
    a = _square(a, 'A')
    n = a.shape[0]
    dist = np.min(np.abs(np.linalg.eigvals(a) - lam)) if n else np.inf
    if dist <= eigen_tol * np.linalg.norm(a, 2):
        raise SpectralPoint(f'lambda={lam!r} lies on the spectrum of A (distance {dist:.3e})')
    return np.linalg.solve(a - lam * np.eye(n), np.eye(n, dtype=np.complex128))
