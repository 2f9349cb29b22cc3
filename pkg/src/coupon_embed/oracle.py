"""Brute-force dense linear algebra used as ground truth.

Nothing here uses the lattice structure: the exponential is plain scaling and
squaring with a Taylor kernel, the logarithm is the plain ``log(1 + A)``
series.  Both are deliberately independent of the combinatorial formulas they
are used to check.
"""

import numpy as np

from .exceptions import SpectralRadiusTooLarge

__all__ = ['mat_mul', 'exp_oracle', 'matlog_oracle', 'is_markov', 'is_generator']

SCALE_THRESHOLD = 0.5
TAYLOR_TOL = 1e-18
TAYLOR_MAX_TERMS = 100
LOG_TOL = 1e-15
LOG_MAX_TERMS = 10000


def _square(A, name='matrix'):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError('%s must be square, got shape %s' % (name, A.shape))
    return A


def mat_mul(A, B):
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[0]:
        raise ValueError('dimension mismatch: %s @ %s' % (A.shape, B.shape))
    return A @ B


def exp_oracle(A):
    """Matrix exponential by scaling and squaring.

    ``A`` is scaled by ``2**-s`` until its infinity norm is at most 0.5, the
    Taylor series is summed until a term drops below 1e-18 in max-abs, and
    the result is squared ``s`` times.
    """
    A = _square(A)
    d = A.shape[0]
    norm = np.abs(A).sum(axis=1).max() if d else 0.0
    s = 0
    while norm / 2.0 ** s > SCALE_THRESHOLD:
        s += 1
    X = A / 2.0 ** s
    total = np.eye(d)
    term = np.eye(d)
    for k in range(1, TAYLOR_MAX_TERMS + 1):
        term = mat_mul(term, X) / k
        total += term
        if np.abs(term).max() < TAYLOR_TOL:
            break
    for _ in range(s):
        total = mat_mul(total, total)
    return total


def matlog_oracle(M, tol=LOG_TOL, max_terms=LOG_MAX_TERMS):
    """Principal logarithm ``sum((-1)**(k-1) A**k / k)`` with ``A = M - 1``.

    The input must be upper triangular so that the spectral radius of ``A``
    can be read off its diagonal.

    Raises
    ------
    SpectralRadiusTooLarge
        If ``max |M_ii - 1| >= 1``; the series would not converge.
    """
    M = _square(M)
    if np.any(np.tril(M, -1) != 0):
        raise ValueError('matlog_oracle expects an upper triangular matrix')
    A = M - np.eye(M.shape[0])
    bound = float(np.abs(np.diag(A)).max()) if A.size else 0.0
    if bound >= 1.0:
        raise SpectralRadiusTooLarge('spectral radius of M - 1 is %.6g >= 1' % bound,
                                     bound=bound)
    total = np.zeros_like(A)
    power = np.eye(A.shape[0])
    for k in range(1, max_terms + 1):
        power = mat_mul(power, A)
        term = power / k
        total += term if k % 2 else -term
        if np.abs(term).max() < tol:
            break
    return total


def is_markov(M, tol=1e-12):
    M = _square(M)
    return bool(np.all(M >= -tol) and np.all(np.abs(M.sum(axis=1) - 1.0) <= tol))


def is_generator(Q, tol=1e-12):
    Q = _square(Q)
    off = Q[~np.eye(Q.shape[0], dtype=bool)]
    return bool(np.all(off >= -tol) and np.all(np.abs(Q.sum(axis=1)) <= tol))
