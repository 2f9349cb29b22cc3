"""Embeddability of coupon-collection Markov matrices.

A nonsingular CM matrix ``M_p`` (``p[∅] > 0``) has exactly one real logarithm
of CG form.  Its parameter vector is the Möbius transform of the log-spectrum,
and ``M_p`` embeds into a continuous-time coupon process iff that vector is
nonnegative away from the empty set.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import lattice
from .exceptions import ConditionOnNullEvent, EmptySet, NotEmbeddable, SingularMatrix, TooLarge
from .model import as_distribution, cg_from_params

__all__ = [
    'Outcome',
    'EmbeddabilityVerdict',
    'CorrelationReport',
    'avoidance_probs',
    'conditional_avoidance',
    'log_params',
    'embeddability_verdict',
    'generator_from_cm',
    'partition_log_param',
    'pair_condition',
    'correlation_function',
    'correlation_report',
]

VERDICT_TOL = 1e-10
SINGULAR_TOL = 1e-12
MAX_PARTITION_FORMULA = 10


class Outcome(str, enum.Enum):
    SINGULAR = 'SingularNotEmbeddable'
    EMBEDDABLE = 'Embeddable'
    NOT_EMBEDDABLE = 'NotEmbeddable'


@dataclass
class EmbeddabilityVerdict:
    """Result of :func:`embeddability_verdict`.

    Attributes
    ----------
    outcome : Outcome
    r : ndarray or None
        Parameters of the CG logarithm; ``None`` when singular.
    witnesses : list of int
        Masks ``K != ∅`` with ``r[K] < -tol``, by cardinality then mask.
    boundary_flags : list of int
        Masks ``K != ∅`` with ``|r[K]| <= tol``.
    spectrum_simple : bool
        Whether all eigenvalues are pairwise separated by more than ``tol``.
    """

    outcome: Outcome
    n: int
    r: np.ndarray = None
    witnesses: list = field(default_factory=list)
    boundary_flags: list = field(default_factory=list)
    spectrum_simple: bool = False
    tol: float = VERDICT_TOL

    @property
    def embeddable(self):
        return self.outcome is Outcome.EMBEDDABLE


def _order(masks):
    return sorted((int(k) for k in masks), key=lambda k: (lattice.popcount(k), k))


def avoidance_probs(p):
    """``q[K] = P(Z ∩ K = ∅)``, which equals the eigenvalue at the complement of K."""
    p, _ = as_distribution(p)
    # complement of mask K is (2**N - 1) - K, i.e. reversed order
    return lattice.zeta_subsets(p)[::-1].copy()


def conditional_avoidance(q, A, B):
    """``P(Z ∩ A = ∅ | Z ∩ B = ∅) = q[A | B] / q[B]``."""
    q = np.asarray(q, dtype=float)
    A, B = int(A), int(B)
    if q[B] <= 0:
        raise ConditionOnNullEvent('P(Z avoids %s) = 0' % lattice.elements_of(B))
    return float(q[A | B] / q[B])


def log_params(p, tol_singular=SINGULAR_TOL):
    """Parameter vector of the CG logarithm of ``M_p``.

    ``r = mobius(log(zeta(p)))``; in particular ``r[∅] = log p[∅]``.

    Raises
    ------
    SingularMatrix
        If ``p[∅] <= tol_singular`` (then ``det M_p = 0`` and no logarithm
        exists).
    """
    p, _ = as_distribution(p)
    if p[0] <= tol_singular:
        raise SingularMatrix('p[∅] = %.3g: the CM matrix is singular' % p[0])
    return lattice.mobius_subsets(np.log(lattice.zeta_subsets(p)))


def _spectrum_simple(lam, tol):
    if lam.size < 2:
        return True
    return bool(np.min(np.diff(np.sort(lam))) > tol)


def embeddability_verdict(p, tol=VERDICT_TOL, tol_singular=SINGULAR_TOL):
    p, n = as_distribution(p)
    lam = lattice.zeta_subsets(p)
    simple = _spectrum_simple(lam, tol)
    if p[0] <= tol_singular:
        return EmbeddabilityVerdict(Outcome.SINGULAR, n, spectrum_simple=simple, tol=tol)
    r = log_params(p, tol_singular)
    rest = r[1:]
    witnesses = _order(np.flatnonzero(rest < -tol) + 1)
    boundary = _order(np.flatnonzero(np.abs(rest) <= tol) + 1)
    outcome = Outcome.NOT_EMBEDDABLE if witnesses else Outcome.EMBEDDABLE
    return EmbeddabilityVerdict(outcome, n, r, witnesses, boundary, simple, tol)


def generator_from_cm(p, tol=VERDICT_TOL):
    """Markov generator ``R`` with ``exp(R) = M_p`` (dense, ``N <= 12``)."""
    verdict = embeddability_verdict(p, tol)
    if verdict.outcome is Outcome.SINGULAR:
        raise SingularMatrix('p[∅] vanishes: M_p has no logarithm')
    if verdict.outcome is Outcome.NOT_EMBEDDABLE:
        raise NotEmbeddable('negative rates at %s'
                            % [lattice.elements_of(k) for k in verdict.witnesses],
                            verdict.witnesses)
    return cg_from_params(verdict.r)


def _check_block_set(K, n):
    K = int(K)
    if K == 0:
        raise EmptySet('K must be nonempty')
    if not 0 < K < (1 << n):
        raise ValueError('mask %d out of range for N = %d' % (K, n))
    if lattice.popcount(K) > MAX_PARTITION_FORMULA:
        raise TooLarge('|K| = %d exceeds %d' % (lattice.popcount(K), MAX_PARTITION_FORMULA))
    return K


def partition_log_param(p, K, tol_singular=SINGULAR_TOL):
    """``r[K]`` by the set-partition formula in conditional avoidance probabilities.

    ``r[K] = (-1)**|K| * sum((-1)**(m-1) (m-1)! log prod(q^{K̄}_A for A in part))``
    over all partitions of ``K`` into ``m`` blocks, with
    ``q^B_A = q[A | B] / q[B]``.  Independent of the Möbius route in
    :func:`log_params`.
    """
    p, n = as_distribution(p)
    K = _check_block_set(K, n)
    if p[0] <= tol_singular:
        raise SingularMatrix('p[∅] = %.3g: the CM matrix is singular' % p[0])
    log_q = np.log(avoidance_probs(p))
    Kbar = lattice.complement(K, n)
    base = log_q[Kbar]
    terms = []
    for part in lattice.enumerate_partitions(K):
        m = len(part)
        coeff = (-1) ** (m - 1) * math.factorial(m - 1)
        for A in part:
            terms.append(coeff * (log_q[A | Kbar] - base))
    return (-1) ** lattice.popcount(K) * math.fsum(terms)


def pair_condition(p, i, j):
    """Sign test for the rate of the pair ``{i, j}`` (1-based elements).

    Returns ``(holds, margin)`` with ``margin = p[∅] p[{i,j}] - p[{i}] p[{j}]``;
    the pair rate is nonnegative iff ``margin >= 0``.
    """
    p, n = as_distribution(p)
    i, j = int(i), int(j)
    if i == j:
        raise ValueError('pair condition needs two distinct elements')
    for e in (i, j):
        if not 1 <= e <= n:
            raise ValueError('element %d outside 1..%d' % (e, n))
    if p[0] <= 0:
        raise SingularMatrix('p[∅] = 0')
    a, b = 1 << (i - 1), 1 << (j - 1)
    margin = float(p[0] * p[a | b] - p[a] * p[b])
    return margin >= 0, margin


def correlation_function(p, K):
    """Joint cumulant of the indicators ``{i ∈ Z}``, ``i ∈ K``, by partition sum."""
    p, n = as_distribution(p)
    K = _check_block_set(K, n)
    incl = lattice.zeta_supersets(p)  # incl[A] = P(A ⊆ Z)
    terms = []
    for part in lattice.enumerate_partitions(K):
        m = len(part)
        prod = 1.0
        for A in part:
            prod *= incl[A]
        terms.append((-1) ** (m - 1) * math.factorial(m - 1) * prod)
    return math.fsum(terms)


@dataclass
class CorrelationReport:
    """Correlation values ``C_K`` and pairwise rate conditions."""

    n: int
    values: dict
    pair_margins: dict


def correlation_report(p, max_order=None):
    """``C_K`` for every nonempty ``K`` with ``|K| <= max_order`` plus pair margins.

    ``max_order`` defaults to ``min(N, 6)``.
    """
    p, n = as_distribution(p)
    if max_order is None:
        max_order = min(n, 6)
    max_order = min(int(max_order), n, MAX_PARTITION_FORMULA)
    values = {}
    for K in lattice.canonical_order(n):
        K = int(K)
        if K and lattice.popcount(K) <= max_order:
            values[K] = correlation_function(p, K)
    margins = {}
    if p[0] > 0:
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                margins[(i, j)] = pair_condition(p, i, j)[1]
    return CorrelationReport(n, values, margins)
