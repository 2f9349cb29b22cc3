"""JSON model specifications.

A spec names the ground-set size ``n`` and exactly one of::

    "distribution": [{"subset": [1, 2], "prob": 0.2}, ...]   # unlisted subsets get 0
    "independent":  {"pi": [0.3, 0.5]}
    "rates":        [{"subset": [1], "rate": 0.7}, ...]       # rate of ∅ is implied

Subsets are lists of 1-based elements.
"""

import json
from dataclasses import dataclass

import numpy as np

from . import lattice
from .model import SIMPLEX_TOL, as_distribution, independent_params

__all__ = ['SpecError', 'ModelSpec', 'load_spec']

KINDS = ('distribution', 'independent', 'rates')


class SpecError(ValueError):
    """Malformed spec; the message carries the JSON location or field path."""


def _subset(value, n, where):
    if not isinstance(value, list) or not all(isinstance(e, int) and not isinstance(e, bool)
                                              for e in value):
        raise SpecError('%s: subset must be a list of integers' % where)
    if len(set(value)) != len(value):
        raise SpecError('%s: repeated element in subset %s' % (where, value))
    for e in value:
        if not 1 <= e <= n:
            raise SpecError('%s: element %d outside 1..%d' % (where, e, n))
    return tuple(sorted(value))


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecError('%s: expected a number, got %r' % (where, value))
    value = float(value)
    if not np.isfinite(value):
        raise SpecError('%s: non-finite value' % where)
    return value


@dataclass(frozen=True)
class ModelSpec:
    """Parsed model spec; ``entries`` holds ``(subset, value)`` pairs or the pi tuple."""

    n: int
    kind: str
    entries: tuple

    @classmethod
    def from_dict(cls, data, tol=SIMPLEX_TOL):
        if not isinstance(data, dict):
            raise SpecError('top level: expected a JSON object')
        n = data.get('n')
        if isinstance(n, bool) or not isinstance(n, int) or not 1 <= n <= lattice.MAX_VECTOR_N:
            raise SpecError('n: expected an integer in 1..%d, got %r' % (lattice.MAX_VECTOR_N, n))
        present = [k for k in KINDS if k in data]
        if len(present) != 1:
            raise SpecError('top level: need exactly one of %s, found %s' % (list(KINDS), present))
        unknown = set(data) - set(KINDS) - {'n'}
        if unknown:
            raise SpecError('top level: unknown fields %s' % sorted(unknown))
        kind = present[0]
        body = data[kind]
        if kind == 'independent':
            if not isinstance(body, dict) or 'pi' not in body or not isinstance(body['pi'], list):
                raise SpecError('independent: expected {"pi": [...]}')
            pi = tuple(_number(v, 'independent.pi[%d]' % i) for i, v in enumerate(body['pi']))
            if len(pi) != n:
                raise SpecError('independent.pi: expected %d values, got %d' % (n, len(pi)))
            for i, v in enumerate(pi):
                if not 0 < v < 1:
                    raise SpecError('independent.pi[%d]: need 0 < pi < 1, got %r' % (i, v))
            spec = cls(n, kind, pi)
        else:
            value_key = 'prob' if kind == 'distribution' else 'rate'
            if not isinstance(body, list):
                raise SpecError('%s: expected a list of entries' % kind)
            seen = {}
            for i, item in enumerate(body):
                where = '%s[%d]' % (kind, i)
                if not isinstance(item, dict) or set(item) != {'subset', value_key}:
                    raise SpecError('%s: expected {"subset": [...], "%s": x}' % (where, value_key))
                s = _subset(item['subset'], n, where + '.subset')
                if s in seen:
                    raise SpecError('%s.subset: %s already listed at %s' % (where, list(s), seen[s][0]))
                seen[s] = (where, _number(item[value_key], '%s.%s' % (where, value_key)))
            spec = cls(n, kind, tuple((s, v) for s, (_, v) in seen.items()))
        spec.vector(tol)
        return spec

    def to_dict(self):
        if self.kind == 'independent':
            return {'n': self.n, 'independent': {'pi': list(self.entries)}}
        key = 'prob' if self.kind == 'distribution' else 'rate'
        return {'n': self.n,
                self.kind: [{'subset': list(s), key: v} for s, v in self.entries]}

    def vector(self, tol=SIMPLEX_TOL):
        """Distribution ``p`` (distribution/independent) or rate vector ``r`` (rates)."""
        if self.kind == 'independent':
            return independent_params(self.entries)
        x = np.zeros(1 << self.n)
        for s, v in self.entries:
            x[lattice.mask_of(s)] = v
        if self.kind == 'distribution':
            try:
                p, _ = as_distribution(x, tol)
            except ValueError as exc:
                raise SpecError('distribution: %s' % exc) from None
            return p
        listed_empty = any(len(s) == 0 for s, _ in self.entries)
        implied = -x[1:].sum()
        if listed_empty and abs(x[0] - implied) > tol * max(1.0, np.abs(x).sum()):
            raise SpecError('rates: rate of [] must equal minus the sum of the others (%.15g)'
                            % implied)
        x[0] = implied
        return x


def load_spec(path, tol=SIMPLEX_TOL):
    """Read and validate a spec file; JSON syntax errors report line and column."""
    try:
        with open(path, encoding='utf-8') as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SpecError('%s: line %d column %d: %s' % (path, exc.lineno, exc.colno, exc.msg)) from None
    except OSError as exc:
        raise SpecError('%s: %s' % (path, exc.strerror)) from None
    return ModelSpec.from_dict(data, tol)
