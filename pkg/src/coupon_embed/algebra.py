"""The commutative subset algebra on parameter vectors.

``(x * y)[K] = sum(x[I] * y[J] for I | J == K)`` mirrors the product of the
corresponding lattice matrices, and the zeta transform turns it into the
pointwise product.  Exp and Log are provided both as power series in this
algebra and in closed form through the transforms.
"""

from dataclasses import dataclass, field

import numpy as np

from . import lattice
from .exceptions import NonConvergence, NotGenerator, OutOfConvergenceRegion, TooLarge
from .model import as_rates, is_generator_params

__all__ = [
    'unit',
    'basis_vector',
    'moduli_kind',
    'star',
    'star_naive',
    'star_transform',
    'star_power',
    'lattice_norm',
    'exp_series',
    'exp_closed',
    'log_series',
    'euler_limit',
    'semigroup_params',
    'PiecewiseRateSchedule',
    'flow_params',
]

EXP_MAX_TERMS = 400
LOG_MAX_TERMS = 10000
SERIES_TOL = 1e-16


def unit(n):
    """The multiplicative unit ``ε`` (point mass at the empty set)."""
    e = np.zeros(1 << int(n))
    e[0] = 1.0
    return e


def basis_vector(K, n):
    e = np.zeros(1 << int(n))
    e[int(K)] = 1.0
    return e


def moduli_kind(x, tol=1e-12):
    """'zero_sum', 'unit_sum' or 'general' according to the entry sum."""
    s = float(np.sum(x))
    if abs(s) <= tol:
        return 'zero_sum'
    if abs(s - 1.0) <= tol:
        return 'unit_sum'
    return 'general'


def _pair(x, y):
    x, n = lattice.as_subset_vector(x)
    y, m = lattice.as_subset_vector(y)
    if n != m:
        raise ValueError('dimension mismatch: N = %d vs N = %d' % (n, m))
    return x, y, n


def star(x, y):
    """Direct product, summing ``x[I] * y[J]`` into slot ``I | J``.

    Every pair of subsets is visited once, so the cost is O(4**N); limited to
    N <= 12.  Use :func:`star_transform` for larger ground sets.
    """
    x, y, n = _pair(x, y)
    if n > 12:
        raise TooLarge('direct product limited to N <= 12; use star_transform')
    d = 1 << n
    masks = np.arange(d)
    out = np.zeros(d)
    rows_per_chunk = max(1, (1 << 22) // d)
    for start in range(0, d, rows_per_chunk):
        rows = masks[start:start + rows_per_chunk]
        idx = rows[:, None] | masks[None, :]
        out += np.bincount(idx.ravel(), weights=np.outer(x[rows], y).ravel(), minlength=d)
    return out


def star_naive(x, y):
    """Reference product by explicit submask loops (slow, for testing)."""
    x, y, n = _pair(x, y)
    d = 1 << n
    out = [0.0] * d
    for K in range(d):
        acc = 0.0
        for I in lattice.submasks(K):
            rest = K & ~I
            # J must contain K - I and may add any part of I
            for L in lattice.submasks(I):
                acc += x[I] * y[rest | L]
        out[K] = acc
    return np.array(out)


def star_transform(x, y):
    """Product via ``mobius(zeta(x) * zeta(y))``, O(N 2**N)."""
    x, y, _ = _pair(x, y)
    return lattice.mobius_subsets(lattice.zeta_subsets(x) * lattice.zeta_subsets(y))


def star_power(x, m, product=star):
    """``x`` multiplied with itself ``m >= 1`` times, by repeated squaring."""
    m = int(m)
    if m < 1:
        raise ValueError('m must be >= 1')
    x, n = lattice.as_subset_vector(x)
    result = None
    base = x
    while m:
        if m & 1:
            result = base if result is None else product(result, base)
        m >>= 1
        if m:
            base = product(base, base)
    return result


def lattice_norm(x):
    """``max_K |sum(x[I] for I subset of K)|``; submultiplicative for ``star``."""
    return float(np.max(np.abs(lattice.zeta_subsets(x))))


def exp_series(x, tol=SERIES_TOL, max_terms=EXP_MAX_TERMS):
    """``sum(x**n / n!)`` in the subset algebra, by direct products."""
    x, n = lattice.as_subset_vector(x)
    total = unit(n)
    term = unit(n)
    for k in range(1, max_terms + 1):
        term = star(term, x) / k
        total += term
        if lattice_norm(term) < tol:
            return total
    raise NonConvergence('exponential series did not converge in %d terms (norm %.3g)'
                         % (max_terms, lattice_norm(x)))


def exp_closed(r):
    """Closed-form exponential, ``mobius(exp(zeta(r)))``."""
    return lattice.mobius_subsets(np.exp(lattice.zeta_subsets(r)))


def log_series(y, tol=SERIES_TOL, max_terms=LOG_MAX_TERMS):
    """``Log(ε + x) = sum((-1)**(k-1) x**k / k)``, valid for ``||x|| < 1``.

    Raises
    ------
    OutOfConvergenceRegion
        If ``||y - ε|| >= 1``.
    """
    y, n = lattice.as_subset_vector(y)
    x = y - unit(n)
    nrm = lattice_norm(x)
    if nrm >= 1.0:
        raise OutOfConvergenceRegion('||y - ε|| = %.6g >= 1' % nrm, norm=nrm)
    total = np.zeros_like(x)
    power = unit(n)
    for k in range(1, max_terms + 1):
        power = star(power, x)
        term = power / k
        total += term if k % 2 else -term
        if lattice_norm(term) < tol:
            return total
    raise NonConvergence('logarithm series did not converge in %d terms (norm %.6g)'
                         % (max_terms, nrm))


def euler_limit(x, m):
    """``(ε + x/m)**m``, which tends to ``Exp(x)`` as ``m`` grows."""
    x, n = lattice.as_subset_vector(x)
    return star_power(unit(n) + x / int(m), m)


def _clip_probabilities(p, slack=1e-12):
    # rounding can leave entries a hair below zero
    small = (p < 0) & (p >= -slack)
    p[small] = 0.0
    return p


def semigroup_params(r, t, tol=1e-10):
    """Distribution at time ``t`` of the continuous-time process with rates ``r``.

    ``p(t)[K] = sum((-1)**|K-J| exp(t * sum(r[I] for I subset of J)) for J subset of K)``.
    """
    r, _ = as_rates(r)
    if not is_generator_params(r, tol):
        bad = [lattice.elements_of(k) for k in np.flatnonzero(r < -tol) if k]
        raise NotGenerator('negative rates at subsets %s' % bad)
    t = float(t)
    if not t >= 0:
        raise ValueError('time must be nonnegative, got %r' % t)
    # rates within tol below zero count as zero
    r[1:] = np.maximum(r[1:], 0.0)
    r[0] = -r[1:].sum()
    return _clip_probabilities(exp_closed(t * r))


@dataclass
class PiecewiseRateSchedule:
    """Piecewise-constant rate vectors.

    ``rates[j]`` applies on ``[breakpoints[j], breakpoints[j+1])`` and
    ``breakpoints[0]`` must be 0.
    """

    breakpoints: list
    rates: list
    tol: float = 1e-10
    n: int = field(init=False)

    def __post_init__(self):
        bp = [float(b) for b in self.breakpoints]
        if len(bp) < 2 or bp[0] != 0.0:
            raise ValueError('breakpoints must start at 0 and contain at least one interval')
        if any(b1 <= b0 for b0, b1 in zip(bp, bp[1:])):
            raise ValueError('breakpoints must be strictly increasing')
        if len(self.rates) != len(bp) - 1:
            raise ValueError('need one rate vector per interval (%d), got %d'
                             % (len(bp) - 1, len(self.rates)))
        checked = []
        dims = set()
        for j, q in enumerate(self.rates):
            q, n = as_rates(q)
            if not is_generator_params(q, self.tol):
                raise NotGenerator('interval %d does not carry generator rates' % j)
            checked.append(q)
            dims.add(n)
        if len(dims) != 1:
            raise ValueError('rate vectors have different dimensions')
        self.breakpoints = bp
        self.rates = checked
        self.n = dims.pop()

    @property
    def horizon(self):
        return self.breakpoints[-1]

    def integrated_rates(self, t):
        """Exact integral of the rate vector over ``[0, t]``."""
        t = float(t)
        if not 0 <= t <= self.horizon:
            raise ValueError('t = %r outside schedule [0, %r]' % (t, self.horizon))
        total = np.zeros(1 << self.n)
        for (a, b), q in zip(zip(self.breakpoints, self.breakpoints[1:]), self.rates):
            if t <= a:
                break
            total += (min(t, b) - a) * q
        return total


def flow_params(schedule, t):
    """Distribution at time ``t`` for a time-dependent piecewise-constant schedule."""
    if not isinstance(schedule, PiecewiseRateSchedule):
        raise TypeError('expected a PiecewiseRateSchedule')
    return _clip_probabilities(exp_closed(schedule.integrated_rates(t)))
