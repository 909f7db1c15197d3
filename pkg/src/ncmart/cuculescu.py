"""Cuculescu projections: the noncommutative stopping times.

Given positive operators ``w_1, ..., w_N`` and a threshold ``lam2``, the
recursion ``q_0 = 1``, ``q_k = q_{k-1} 1_[0, lam2](q_{k-1} w_k q_{k-1})`` yields
decreasing projections with ``q_k w_k q_k <= lam2 q_k``.  In a commutative
algebra ``q_k`` is the indicator of ``{stopping time > k}`` for the first
time ``w_k`` exceeds ``lam2``.
"""
from __future__ import annotations

import numpy as np

from . import config
from .algebra import AlgebraError


class CuculescuRun:
    """Output of one recursion together with its certification data."""

    def __init__(self, filtration, weights, lam2, projections, rounding, offset):
        self.filtration = filtration
        self.weights = tuple(weights)
        self.lam2 = float(lam2)
        self.projections = tuple(projections)
        self.rounding = tuple(rounding)
        self.offset = offset

    @property
    def levels(self):
        return len(self.weights)

    @property
    def final(self):
        return self.projections[-1]

    @property
    def scale(self):
        top = max((self.filtration.algebra.opnorm(w) for w in self.weights), default=0.0)
        return 1.0 + self.lam2 + top

    def violations(self):
        """Worst violation of each certified property, in absolute units."""
        A, F = self.filtration.algebra, self.filtration
        qs, lam2 = self.projections, self.lam2
        out = dict.fromkeys(("measurable", "commutes", "bounded", "covering",
                             "nested", "idempotent", "selfadjoint"), 0.0)
        cover = np.zeros_like(qs[0])
        for k, w in enumerate(self.weights, 1):
            prev, q = qs[k - 1], qs[k]
            if self.offset is not None:
                lev = max(1, k + self.offset)
                out["measurable"] = max(out["measurable"], A.opnorm(F.expectation(q, lev) - q))
            a = prev @ w @ prev
            out["commutes"] = max(out["commutes"], A.opnorm(q @ a - a @ q))
            gap = lam2 * q - q @ w @ q
            out["bounded"] = max(out["bounded"], -A.min_eigenvalue(gap))
            out["nested"] = max(out["nested"], A.opnorm(q @ prev - q))
            out["idempotent"] = max(out["idempotent"], A.opnorm(q @ q - q))
            out["selfadjoint"] = max(out["selfadjoint"], A.opnorm(q - q.conj().T))
            d = prev - q
            cover = cover + d @ w @ d
        fin = self.final
        for q in qs:
            out["nested"] = max(out["nested"], A.opnorm(fin @ q - fin))
        out["covering"] = max(0.0, -A.min_eigenvalue(cover - lam2 * (A.identity() - fin)))
        return out

    def certify(self, rtol=config.CUCULESCU_CERT_RTOL):
        """Dict of property -> bool at absolute tolerance ``rtol * scale``."""
        tol = rtol * self.scale
        v = self.violations()
        out = {k: v[k] <= tol for k in ("measurable", "commutes", "bounded", "covering")}
        out["nested"] = v["nested"] <= config.NESTED_TOL
        out["idempotent"] = v["idempotent"] <= config.NESTED_TOL
        out["selfadjoint"] = v["selfadjoint"] <= 1e-10
        return out


def cuculescu(weights, lam2, filtration, offset=-1, check=True):
    """Run the recursion.

    ``offset`` names the level the weights are measurable in relative to ``k``:
    ``-1`` for predictable weights (``w_k`` in ``M_{k-1}``, as for conditioned
    square functions), ``0`` for adapted ones, ``None`` to skip the projection
    onto the subalgebra.
    """
    A = filtration.algebra
    if lam2 < 0:
        raise ValueError("threshold must be nonnegative")
    weights = [A.hermitian_part(A.check(w), check=False) for w in weights]
    # Frobenius norm bounds the operator norm; only a tolerance scale is needed
    top = max((float(np.linalg.norm(w)) for w in weights), default=0.0)
    if check:
        for w in weights:
            if A.min_eigenvalue(w) < -1e-9 * max(top, 1.0):
                raise AlgebraError("Cuculescu weights must be positive")
    cut = lam2 + config.CUCULESCU_INCLUDE_RTOL * max(lam2, top, 1e-300)
    q = A.identity()
    qs, rounding = [q], []
    for k, w in enumerate(weights, 1):
        a = q @ w @ q
        chi = A.spectral_projection(a, -np.inf, cut, check=False)
        raw = q @ chi
        raw = (raw + raw.conj().T) / 2
        if offset is not None:
            raw = filtration.expectation(raw, max(1, k + offset))
        new = A.round_projection(raw)
        rounding.append(float(np.abs(new - raw).max(initial=0.0)))
        q = new
        qs.append(q)
    return CuculescuRun(filtration, weights, lam2, qs, rounding, offset)
