"""Coupon-Markov (CM) and coupon-generator (CG) matrices and their parameters.

A distribution ``p`` on subsets defines the one-step matrix of the multiple
coupon collection process, ``M[I, J] = sum(p[K] for K with I | K == J)``.
The same formula applied to a zero-sum vector ``r`` gives a CG matrix.
Dense matrices are limited to ``N <= 12``; everything else works on vectors.
"""

import numpy as np

from . import lattice
from .exceptions import DegenerateIndependent, NotCG, NotCM, NotStochastic, TooLarge

__all__ = [
    'MAX_DENSE_N',
    'SIMPLEX_TOL',
    'as_distribution',
    'as_rates',
    'is_generator_params',
    'lattice_matrix',
    'cm_from_params',
    'params_from_cm',
    'cg_from_params',
    'params_from_cg',
    'eigenvalues_cm',
    'eigenvalues_cg',
    'eigenbasis',
    'extremal_cm',
    'independent_params',
    'cm_power_params',
]

MAX_DENSE_N = 12
SIMPLEX_TOL = 1e-12


def as_distribution(p, tol=SIMPLEX_TOL):
    """Validate a probability vector on subsets; never renormalises.

    Returns ``(p, n)`` with ``p`` a float64 copy.
    """
    try:
        p, n = lattice.as_subset_vector(p)
    except ValueError as exc:
        raise NotStochastic(str(exc)) from None
    neg = np.flatnonzero(p < 0)
    if neg.size:
        raise NotStochastic('negative probability %.3g at subset %s'
                            % (p[neg[0]], lattice.elements_of(neg[0])))
    total = p.sum()
    if abs(total - 1.0) > tol:
        raise NotStochastic('probabilities sum to %.15g, not 1 (tol %.1e)' % (total, tol))
    return p, n


def as_rates(r, tol=SIMPLEX_TOL):
    """Validate a zero-sum rate vector; returns ``(r, n)``.

    The zero-sum test is ``|sum(r)| <= tol * max(1, sum(|r|))`` so large
    rates are not rejected for rounding alone.
    """
    r, n = lattice.as_subset_vector(r)
    scale = max(1.0, float(np.abs(r).sum()))
    if abs(r.sum()) > tol * scale:
        raise ValueError('rate vector sums to %.3g, not 0' % r.sum())
    return r, n


def is_generator_params(r, tol=1e-10):
    """True iff every rate off the empty set is ``>= -tol``."""
    r = np.asarray(r, dtype=float)
    return bool(np.all(r[1:] >= -tol))


def _check_dense(n):
    if n > MAX_DENSE_N:
        raise TooLarge('dense lattice matrices are limited to N <= %d (got %d)'
                       % (MAX_DENSE_N, n))


def lattice_matrix(x):
    """Dense ``B[I, J] = sum(x[K] for I | K == J)`` for any subset vector."""
    x, n = lattice.as_subset_vector(x)
    _check_dense(n)
    d = 1 << n
    masks = np.arange(d)
    out = np.empty((d, d))
    rows_per_chunk = max(1, (1 << 22) // d)
    for start in range(0, d, rows_per_chunk):
        rows = masks[start:start + rows_per_chunk]
        c = rows.shape[0]
        idx = (rows[:, None] | masks[None, :]) + (np.arange(c) * d)[:, None]
        block = np.bincount(idx.ravel(), weights=np.tile(x, c), minlength=c * d)
        out[start:start + c] = block.reshape(c, d)
    return out


def cm_from_params(p):
    """CM matrix of the distribution ``p``."""
    p, _ = as_distribution(p)
    return lattice_matrix(p)


def cg_from_params(r):
    """CG matrix of the zero-sum vector ``r`` (zero row sums)."""
    r, _ = as_rates(r)
    return lattice_matrix(r)


def _square_lattice(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError('expected a square matrix, got shape %s' % (M.shape,))
    n = lattice.ground_size(M.shape[0])
    _check_dense(n)
    return M, n


def _structure_check(M, rebuilt, tol, exc, kind):
    dev = np.abs(M - rebuilt)
    k = int(np.argmax(dev))
    worst = float(dev.flat[k])
    if worst > tol:
        I, J = divmod(k, M.shape[0])
        raise exc('not a %s matrix: entry (%s, %s) deviates by %.3g'
                  % (kind, lattice.elements_of(I), lattice.elements_of(J), worst),
                  witness=(I, J), deviation=worst)


def params_from_cm(M, tol=SIMPLEX_TOL):
    """Recover ``p`` from a CM matrix (its first row) and verify the structure.

    Raises
    ------
    NotStochastic
        Row ``∅`` is not a probability vector within ``tol``.
    NotCM
        Some entry differs from the matrix rebuilt from row ``∅`` by more
        than ``tol``.
    """
    M, _ = _square_lattice(M)
    p = M[0].copy()
    neg = p < 0
    if np.any(p < -tol):
        raise NotStochastic('row of the empty set has negative entries')
    p[neg] = 0.0
    if abs(p.sum() - 1.0) > tol:
        raise NotStochastic('row of the empty set sums to %.15g' % p.sum())
    _structure_check(M, lattice_matrix(p), tol, NotCM, 'CM')
    return p


def params_from_cg(Q, tol=SIMPLEX_TOL):
    """Recover the zero-sum vector ``r`` of a CG matrix and verify the structure."""
    Q, _ = _square_lattice(Q)
    r = Q[0].copy()
    r[0] = -r[1:].sum()
    _structure_check(Q, lattice_matrix(r), tol, NotCG, 'CG')
    return r


def eigenvalues_cm(p):
    """Spectrum ``lambda[K] = sum(p[I] for I subset of K)`` of the CM matrix."""
    p, _ = as_distribution(p)
    return lattice.zeta_subsets(p)


def eigenvalues_cg(r):
    """Spectrum ``mu[K] = sum(r[I] for I subset of K)`` of the CG matrix."""
    r, _ = as_rates(r)
    return lattice.zeta_subsets(r)


def eigenbasis(n):
    """Matrix whose column ``K`` is ``v^K``, the indicator of subsets of ``K``.

    These vectors diagonalise every CM and CG matrix on ``n`` elements
    simultaneously.
    """
    n = int(n)
    if not 1 <= n <= MAX_DENSE_N:
        raise ValueError('n must be in [1, %d]' % MAX_DENSE_N)
    masks = np.arange(1 << n)
    return ((masks[:, None] & masks[None, :]) == masks[:, None]).astype(float)


def extremal_cm(K, n):
    """0/1 CM matrix of the point mass at ``K``: ``I`` jumps to ``I | K``."""
    n = int(n)
    _check_dense(n)
    d = 1 << n
    K = int(K)
    if not 0 <= K < d:
        raise ValueError('mask %d out of range for n = %d' % (K, n))
    out = np.zeros((d, d))
    masks = np.arange(d)
    out[masks, masks | K] = 1.0
    return out


def independent_params(pi):
    """Distribution of ``Z`` when element ``i`` is drawn independently w.p. ``pi[i]``."""
    pi = np.asarray(pi, dtype=float)
    if pi.ndim != 1 or pi.size == 0:
        raise ValueError('pi must be a nonempty 1-d sequence')
    if pi.size > lattice.MAX_VECTOR_N:
        raise TooLarge('at most %d elements' % lattice.MAX_VECTOR_N)
    if np.any(~(pi > 0)) or np.any(~(pi < 1)):
        raise DegenerateIndependent('need 0 < pi_i < 1, got %s' % pi.tolist())
    p = np.ones(1)
    for x in pi:
        p = np.concatenate([p * (1.0 - x), p * x])
    return p


def cm_power_params(p, m, method='star'):
    """Parameter vector of ``M**m``.

    ``method='star'`` iterates ``p_(k+1) = p_(k) * p`` in the subset algebra;
    ``method='spectral'`` Möbius-inverts ``lambda**m``.
    """
    from .algebra import star

    p, _ = as_distribution(p)
    m = int(m)
    if m < 1:
        raise ValueError('m must be a positive integer')
    if method == 'spectral':
        return lattice.mobius_subsets(lattice.zeta_subsets(p) ** m)
    if method != 'star':
        raise ValueError('unknown method %r' % method)
    out = p.copy()
    for _ in range(m - 1):
        out = star(out, p)
    return out
