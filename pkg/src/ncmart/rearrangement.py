"""Generalized singular values as decreasing step functions."""
from __future__ import annotations

import numpy as np

from . import config


class StepFunction:
    """Decreasing right-continuous step function on ``[0, domain_total)``.

    ``values`` are strictly decreasing and nonnegative, ``lengths`` positive.
    The function vanishes beyond the last step.
    """

    __slots__ = ("values", "lengths")

    def __init__(self, values, lengths, validate=True):
        v = np.asarray(values, dtype=float).reshape(-1)
        ln = np.asarray(lengths, dtype=float).reshape(-1)
        if validate:
            if v.shape != ln.shape:
                raise ValueError("values and lengths differ in size")
            if (ln <= 0).any() or not np.all(np.isfinite(ln)):
                raise ValueError("step lengths must be positive and finite")
            if (v < 0).any() or not np.all(np.isfinite(v)):
                raise ValueError("step values must be finite and nonnegative")
            if (np.diff(v) >= 0).any():
                raise ValueError("step values must be strictly decreasing")
        v.flags.writeable = False
        ln.flags.writeable = False
        self.values = v
        self.lengths = ln

    @classmethod
    def from_pairs(cls, pairs):
        pairs = list(pairs)
        if not pairs:
            return cls.zero()
        v, ln = zip(*pairs)
        return cls(v, ln)

    @classmethod
    def zero(cls):
        return cls(np.empty(0), np.empty(0))

    @classmethod
    def rearrange(cls, values, weights, rtol=config.MERGE_RTOL):
        """Decreasing rearrangement of a weighted multiset of nonnegative values.

        Values within ``rtol * max`` of their neighbour are merged (length weighted
        mean, so the integral is preserved) and values below that threshold drop.
        """
        v = np.abs(np.asarray(values, dtype=float).reshape(-1))
        w = np.asarray(weights, dtype=float).reshape(-1)
        if v.size == 0:
            return cls.zero()
        top = v.max()
        if top <= 0:
            return cls.zero()
        tol = rtol * top
        order = np.argsort(-v, kind="stable")
        v, w = v[order], w[order]
        keep = v > tol
        v, w = v[keep], w[keep]
        # single linkage clusters of near ties
        new = np.concatenate([[True], (v[:-1] - v[1:]) > tol])
        ids = np.cumsum(new) - 1
        lengths = np.bincount(ids, weights=w)
        mass = np.bincount(ids, weights=v * w)
        vals = mass / lengths
        # merging by mean keeps order; guard against float ties
        if (np.diff(vals) >= 0).any():
            return cls.rearrange(vals, lengths, rtol * 2)
        return cls(vals, lengths, validate=False)

    @property
    def steps(self):
        return list(zip(self.values.tolist(), self.lengths.tolist()))

    @property
    def domain_total(self):
        return float(self.lengths.sum())

    @property
    def breakpoints(self):
        return np.cumsum(self.lengths)

    @property
    def sup(self):
        return float(self.values[0]) if self.values.size else 0.0

    def __len__(self):
        return self.values.size

    def __repr__(self):
        return f"StepFunction({self.steps!r})"

    def __mul__(self, c):
        c = float(c)
        if c < 0:
            raise ValueError("step functions scale by nonnegative factors")
        if c == 0:
            return StepFunction.zero()
        return StepFunction(self.values * c, self.lengths, validate=False)

    __rmul__ = __mul__

    def power(self, p):
        if self.values.size == 0:
            return self
        return StepFunction(self.values ** p, self.lengths, validate=False)

    def value_at(self, t):
        """mu_t for an array or scalar of t >= 0."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="right")
        vals = np.concatenate([self.values, [0.0]])
        return vals[idx]

    def partial_integral(self, t, p=1.0):
        """int_0^t f^p, vectorized over t."""
        t = np.asarray(t, dtype=float)
        if self.values.size == 0:
            return np.zeros_like(t)
        starts = self.breakpoints - self.lengths
        over = np.clip(t[..., None] - starts, 0.0, self.lengths)
        return np.sum(self.values ** p * over, axis=-1)

    def shift_down(self, s):
        """The step function ``(f - s)_+``."""
        keep = self.values > s
        if not keep.any():
            return StepFunction.zero()
        return StepFunction(self.values[keep] - s, self.lengths[keep], validate=False)

    def truncate_above(self, s):
        """The step function ``min(f, s)``."""
        if self.values.size == 0 or s <= 0:
            return StepFunction.zero()
        v = np.minimum(self.values, s)
        return StepFunction.rearrange(v, self.lengths, rtol=1e-15)

    def restrict(self, a, b=np.inf):
        """Rearrangement of ``f * 1_[a, b)``."""
        starts = self.breakpoints - self.lengths
        ends = self.breakpoints
        lo = np.maximum(starts, a)
        hi = np.minimum(ends, b)
        ln = hi - lo
        keep = ln > 0
        if not keep.any():
            return StepFunction.zero()
        return StepFunction(self.values[keep], ln[keep], validate=False)

    def __add__(self, other):
        """Pointwise sum; the result is again decreasing."""
        if not isinstance(other, StepFunction):
            return NotImplemented
        if len(other) == 0:
            return self
        if len(self) == 0:
            return other
        cuts = np.union1d(self.breakpoints, other.breakpoints)
        lengths = np.diff(np.concatenate([[0.0], cuts]))
        mids = cuts - lengths / 2
        vals = self.value_at(mids) + other.value_at(mids)
        keep = lengths > 0
        return StepFunction.rearrange(vals[keep], lengths[keep], rtol=1e-15)

    def to_json(self):
        return [[float(v), float(ln)] for v, ln in zip(self.values, self.lengths)]

    @classmethod
    def from_json(cls, obj):
        return cls.from_pairs(obj)


def mu(x, algebra):
    """Generalized singular value function of ``x``."""
    x = algebra.check(x)
    s = algebra.singular_values(x)
    return StepFunction.rearrange(s, algebra.coord_weights)


def mu_positive(x, algebra, power=1.0):
    """``mu(x**power)`` for a positive operator, from its eigenvalues."""
    vals, _ = algebra.eigh(algebra.hermitian_part(x, check=False))
    vals = np.clip(vals, 0.0, None)
    if power != 1.0:
        vals = vals ** power
    return StepFunction.rearrange(vals, algebra.coord_weights)


def integrate_power(f, p, upper=np.inf):
    """Exact ``int_0^upper f(t)^p dt``."""
    if not p > 0:
        raise ValueError("p must be positive")
    if not upper > 0:
        raise ValueError("upper limit must be positive")
    if len(f) == 0:
        return 0.0
    if np.isinf(upper):
        return float(np.sum(f.values ** p * f.lengths))
    return float(f.partial_integral(upper, p))


def submajorizes(g, f, rtol=config.SUBMAJ_RTOL):
    """True iff ``f ≺≺ g``: ``int_0^t f <= int_0^t g`` for every t."""
    cuts = np.union1d(f.breakpoints, g.breakpoints)
    if cuts.size == 0:
        return True
    fi = f.partial_integral(cuts)
    gi = g.partial_integral(cuts)
    scale = max(float(fi.max(initial=0.0)), float(gi.max(initial=0.0)), 1e-300)
    return bool(np.all(fi <= gi + rtol * scale))
