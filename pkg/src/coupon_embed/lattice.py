"""Bitmask model of the subset lattice of ``S = {1, ..., N}``.

A subset ``K`` is stored as the integer whose bit ``i`` is set iff element
``i + 1`` belongs to ``K``.  Vectors indexed by subsets are numpy arrays of
length ``2**N`` in increasing mask order.  Numeric order is a linear extension
of inclusion (``I <= J`` as sets implies ``I <= J`` as integers), so every
lattice matrix built on top of it is upper triangular without permutation.
"""

import numpy as np

from .exceptions import EmptySet, TooLarge

__all__ = [
    'MAX_VECTOR_N',
    'MAX_PARTITION_SIZE',
    'ground_size',
    'as_subset_vector',
    'popcount',
    'mask_of',
    'elements_of',
    'complement',
    'submasks',
    'cardinalities',
    'canonical_order',
    'zeta_subsets',
    'zeta_subsets_naive',
    'mobius_subsets',
    'zeta_supersets',
    'enumerate_partitions',
    'partition_alternating_sum',
]

MAX_VECTOR_N = 24
MAX_PARTITION_SIZE = 12


def ground_size(length):
    """Return ``N`` such that ``length == 2**N``; raise otherwise."""
    length = int(length)
    if length < 1 or length & (length - 1):
        raise ValueError('length %d is not a power of two' % length)
    n = length.bit_length() - 1
    if n > MAX_VECTOR_N:
        raise TooLarge('ground set size %d exceeds %d' % (n, MAX_VECTOR_N))
    return n


def as_subset_vector(x):
    """Validate ``x`` as a finite float vector of length ``2**N``.

    Returns a fresh float64 copy and ``N``.
    """
    x = np.array(x, dtype=float)
    if x.ndim != 1:
        raise ValueError('subset vector must be one-dimensional, got shape %s' % (x.shape,))
    n = ground_size(x.shape[0])
    if not np.all(np.isfinite(x)):
        raise ValueError('subset vector has non-finite entries')
    return x, n


def popcount(mask):
    return int(mask).bit_count()


def mask_of(elements):
    """Mask of a collection of 1-based elements."""
    mask = 0
    for e in elements:
        e = int(e)
        if e < 1:
            raise ValueError('elements are 1-based, got %d' % e)
        mask |= 1 << (e - 1)
    return mask


def elements_of(mask):
    """Sorted 1-based elements of ``mask``."""
    mask = int(mask)
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i + 1)
        mask >>= 1
        i += 1
    return out


def complement(mask, n):
    return ((1 << n) - 1) ^ int(mask)


def submasks(mask):
    """Yield every submask of ``mask`` in decreasing numeric order, ending with 0."""
    sub = int(mask)
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def cardinalities(n):
    """Array of ``|K|`` for every mask ``K`` of an ``n``-element ground set."""
    card = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        card.reshape(-1, 2, 1 << i)[:, 1, :] += 1
    return card


def canonical_order(n):
    """Masks sorted by cardinality, then by mask value (report order)."""
    masks = np.arange(1 << n)
    return masks[np.lexsort((masks, cardinalities(n)))]


def zeta_subsets(x):
    """Subset-sum (zeta) transform, ``y[K] = sum(x[I] for I subset of K)``.

    Runs the per-bit sweep in ascending bit order, O(N 2**N).
    """
    y, n = as_subset_vector(x)
    for i in range(n):
        v = y.reshape(-1, 2, 1 << i)
        v[:, 1, :] += v[:, 0, :]
    return y


def mobius_subsets(y):
    """Inverse of :func:`zeta_subsets`, ``x[K] = sum((-1)**|K-I| y[I])``."""
    x, n = as_subset_vector(y)
    for i in range(n):
        v = x.reshape(-1, 2, 1 << i)
        v[:, 1, :] -= v[:, 0, :]
    return x


def zeta_supersets(x):
    """Superset-sum transform, ``y[A] = sum(x[J] for J superset of A)``."""
    y, n = as_subset_vector(x)
    for i in range(n):
        v = y.reshape(-1, 2, 1 << i)
        v[:, 0, :] += v[:, 1, :]
    return y


def zeta_subsets_naive(x):
    """Reference zeta transform by explicit O(4**N) inclusion test."""
    x, n = as_subset_vector(x)
    if n > 12:
        raise TooLarge('naive transform limited to N <= 12')
    masks = np.arange(1 << n)
    incl = (masks[:, None] & masks[None, :]) == masks[:, None]  # incl[I, K]: I subset K
    return x @ incl


def enumerate_partitions(K):
    """Yield all set partitions of the subset ``K``.

    Each partition is a tuple of disjoint nonempty block masks whose union is
    ``K``.  Order follows restricted growth strings: the element ``e_j`` (in
    increasing order) goes to block ``a_j`` with ``a_0 = 0`` and
    ``a_j <= max(a_0..a_{j-1}) + 1``, strings visited lexicographically.
    """
    K = int(K)
    elems = [1 << i for i in range(K.bit_length()) if K >> i & 1]
    m = len(elems)
    if m == 0:
        raise EmptySet('cannot partition the empty set')
    if m > MAX_PARTITION_SIZE:
        raise TooLarge('partitions of %d elements exceed the limit of %d'
                       % (m, MAX_PARTITION_SIZE))

    blocks = [0] * m

    def rec(j, nblocks):
        if j == m:
            yield tuple(blocks[:nblocks])
            return
        bit = elems[j]
        for b in range(nblocks + 1):
            blocks[b] |= bit
            yield from rec(j + 1, max(nblocks, b + 1))
            blocks[b] &= ~bit

    yield from rec(0, 0)


def partition_alternating_sum(n):
    """Exact ``sum((-1)**|A| * |A|!)`` over all partitions ``A`` of an n-set."""
    n = int(n)
    if n < 1:
        raise EmptySet('ground set must be nonempty')
    if n > 10:
        raise TooLarge('n = %d exceeds 10' % n)
    total = 0
    fact = [1]
    for k in range(1, n + 1):
        fact.append(fact[-1] * k)
    for part in enumerate_partitions((1 << n) - 1):
        m = len(part)
        total += (-1) ** m * fact[m]
    return total
