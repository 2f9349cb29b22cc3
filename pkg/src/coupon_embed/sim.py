"""Monte Carlo engines for discrete- and continuous-time coupon collection.

Random numbers come from numpy's Philox4x64 counter-based generator.  A
stream is addressed by the 128-bit key ``(seed, stream)``; batch routines
split trials into blocks of ``BLOCK_SIZE`` and give block ``b`` the stream
``b``, so results depend only on ``seed`` and ``trials`` and not on how the
blocks are scheduled.  Set ``COUPON_EMBED_THREADS`` to run blocks in parallel.
"""

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import lattice
from .exceptions import NotGenerator, Unreachable
from .model import as_distribution, as_rates, is_generator_params

__all__ = [
    'BLOCK_SIZE',
    'Trajectory',
    'make_rng',
    'sample_step',
    'run_discrete',
    'run_continuous',
    'simulate_discrete',
    'simulate_continuous',
    'empirical_transition',
    'collection_time_stats',
    'write_trajectory_csv',
]

BLOCK_SIZE = 1 << 16
_KEY_MASK = (1 << 64) - 1


def make_rng(seed=0, stream=0):
    """Philox generator keyed by ``(seed, stream)``."""
    key = np.array([int(seed) & _KEY_MASK, int(stream) & _KEY_MASK], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _threads():
    try:
        return max(1, int(os.environ.get('COUPON_EMBED_THREADS', '1')))
    except ValueError:
        return 1


def _run_blocks(fn, trials, seed):
    """Call ``fn(rng, size)`` per block and return the list of block results."""
    trials = int(trials)
    if trials < 1:
        raise ValueError('trials must be >= 1')
    sizes = [min(BLOCK_SIZE, trials - s) for s in range(0, trials, BLOCK_SIZE)]
    jobs = [(make_rng(seed, b), size) for b, size in enumerate(sizes)]
    workers = _threads()
    if workers == 1 or len(jobs) == 1:
        return [fn(rng, size) for rng, size in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


@dataclass
class Trajectory:
    """Path of the collected set.

    ``times`` are step indices (discrete) or jump times (continuous, starting
    with 0); ``states[k]`` is the mask held from ``times[k]`` on.
    """

    kind: str
    n: int
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    absorbed_at: float = None

    def rows(self):
        for t, s in zip(self.times, self.states):
            yield t, s, ' '.join(str(e) for e in lattice.elements_of(s))


def _cdf(p):
    cdf = np.cumsum(p)
    cdf[-1] = max(cdf[-1], 1.0)
    return cdf


def _draw(cdf, rng, size=None):
    u = rng.random(size)
    return np.minimum(np.searchsorted(cdf, u, side='right'), cdf.size - 1)


def sample_step(p, rng):
    """One draw of the sampled set ``Z`` (inverse CDF over mask order)."""
    p, _ = as_distribution(p)
    return int(_draw(_cdf(p), rng))


def run_discrete(p, steps, x0=0, rng=None, early_exit=True):
    """Single discrete-time path ``X_0 = x0, X_{k+1} = X_k | Z_k``.

    The path always has ``steps + 1`` states; with ``early_exit`` no further
    random numbers are drawn once the full set is reached.
    """
    p, n = as_distribution(p)
    steps = int(steps)
    if steps < 0:
        raise ValueError('steps must be >= 0')
    rng = make_rng() if rng is None else rng
    full = (1 << n) - 1
    cdf = _cdf(p)
    traj = Trajectory('discrete', n, [0], [int(x0)])
    state = int(x0)
    if state == full:
        traj.absorbed_at = 0
    for k in range(1, steps + 1):
        if not (early_exit and state == full):
            state |= int(_draw(cdf, rng))
            if state == full and traj.absorbed_at is None:
                traj.absorbed_at = k
        traj.times.append(k)
        traj.states.append(state)
    return traj


def _generator_rates(r, tol):
    r, n = as_rates(r)
    if not is_generator_params(r, tol):
        bad = [lattice.elements_of(k) for k in np.flatnonzero(r < -tol) if k]
        raise NotGenerator('negative rates at subsets %s' % bad)
    rates = np.maximum(r[1:], 0.0)
    return rates, n


def run_continuous(r, horizon, y0=0, rng=None, tol=1e-10):
    """Single continuous-time path: one exponential clock per ``K != ∅`` at rate ``r[K]``.

    The next event comes after an exponential time with the total rate, and
    the ringing clock is chosen proportionally to its rate.
    """
    rates, n = _generator_rates(r, tol)
    horizon = float(horizon)
    if not horizon >= 0:
        raise ValueError('horizon must be >= 0')
    rng = make_rng() if rng is None else rng
    full = (1 << n) - 1
    total = rates.sum()
    state = int(y0)
    traj = Trajectory('continuous', n, [0.0], [state])
    if state == full:
        traj.absorbed_at = 0.0
    if total <= 0:
        return traj
    cdf = np.cumsum(rates) / total
    cdf[-1] = 1.0
    t = 0.0
    while state != full:
        t += rng.exponential(1.0 / total)
        if t > horizon:
            break
        new = state | (int(_draw(cdf, rng)) + 1)
        if new != state:
            state = new
            traj.times.append(t)
            traj.states.append(state)
            if state == full:
                traj.absorbed_at = t
    return traj


def simulate_discrete(p, steps, trials, seed=0, x0=0):
    """States ``X_steps`` of ``trials`` independent discrete-time chains."""
    p, n = as_distribution(p)
    cdf = _cdf(p)
    full = (1 << n) - 1

    def block(rng, size):
        states = np.full(size, int(x0), dtype=np.int64)
        for _ in range(int(steps)):
            live = np.flatnonzero(states != full)
            if live.size == 0:
                break
            states[live] |= _draw(cdf, rng, live.size)
        return states

    return np.concatenate(_run_blocks(block, trials, seed))


def simulate_continuous(r, horizon, trials, seed=0, y0=0, tol=1e-10):
    """States ``Y_horizon`` of ``trials`` independent continuous-time chains."""
    rates, n = _generator_rates(r, tol)
    full = (1 << n) - 1
    total = rates.sum()
    horizon = float(horizon)
    if not horizon >= 0:
        raise ValueError('horizon must be >= 0')

    def block(rng, size):
        states = np.full(size, int(y0), dtype=np.int64)
        if total <= 0:
            return states
        cdf = np.cumsum(rates) / total
        cdf[-1] = 1.0
        clock = np.zeros(size)
        live = np.flatnonzero(states != full)
        while live.size:
            clock[live] += rng.exponential(1.0 / total, live.size)
            live = live[clock[live] <= horizon]
            states[live] |= _draw(cdf, rng, live.size) + 1
            live = live[states[live] != full]
        return states

    return np.concatenate(_run_blocks(block, trials, seed))


def empirical_transition(p, trials, seed=0):
    """Row-stochastic estimate of the one-step matrix; ``trials`` draws per row."""
    p, n = as_distribution(p)
    d = 1 << n
    out = np.zeros((d, d))
    for I in range(d):
        # distinct seed offset per row keeps rows independent
        end = simulate_discrete(p, 1, trials, seed=(int(seed) << 16) + I, x0=I)
        out[I] = np.bincount(end, minlength=d) / float(trials)
    return out


def collection_time_stats(p, trials, seed=0, max_steps=None):
    """Empirical law of ``min{k : X_k = S}`` started from the empty set.

    Returns a dict with ``mean``, ``median``, ``p95``, ``std`` and ``trials``.

    Raises
    ------
    Unreachable
        If some element is never sampled.
    """
    p, n = as_distribution(p)
    inclusion = lattice.zeta_supersets(p)
    missing = [i + 1 for i in range(n) if inclusion[1 << i] <= 0]
    if missing:
        raise Unreachable('elements %s are never sampled' % missing, missing)
    cdf = _cdf(p)
    full = (1 << n) - 1
    if max_steps is None:
        max_steps = 1 << 24

    def block(rng, size):
        states = np.zeros(size, dtype=np.int64)
        times = np.zeros(size, dtype=np.int64)
        live = np.arange(size)
        k = 0
        while live.size and k < max_steps:
            k += 1
            states[live] |= _draw(cdf, rng, live.size)
            done = states[live] == full
            times[live[done]] = k
            live = live[~done]
        if live.size:
            raise RuntimeError('collection not finished after %d steps' % max_steps)
        return times

    times = np.concatenate(_run_blocks(block, trials, seed))
    return {
        'trials': int(times.size),
        'mean': float(times.mean()),
        'std': float(times.std()),
        'median': float(np.median(times)),
        'p95': float(np.quantile(times, 0.95)),
    }


def write_trajectory_csv(traj, fh):
    """Write ``step_or_time,state_mask,state_elements`` rows to a text stream."""
    writer = csv.writer(fh)
    writer.writerow(['step_or_time', 'state_mask', 'state_elements'])
    for row in traj.rows():
        writer.writerow(row)
