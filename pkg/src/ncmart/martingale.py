"""Martingales, square functions and Hardy type quasi-norms."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraError
from .rearrangement import StepFunction, mu_positive

# kind -> (side, conditioning); side "c" uses a*a, "r" uses aa*;
# conditioning None, -1 (E_{k-1}) or 0 (E_k)
SQUARE_KINDS = {
    "S_c": ("c", None), "S_r": ("r", None),
    "s_c": ("c", -1), "s_r": ("r", -1),
    "calS_c": ("c", None), "calS_r": ("r", None),
    "sigma_c": ("c", -1), "sigma_r": ("r", -1),
    "sigma_c_plus": ("c", 0),
}

HARDY_KINDS = {"Hc": "S_c", "hc": "s_c", "Hr": "S_r", "hr": "s_r"}


class Martingale:
    """The martingale ``x_n = E_n x`` generated by a terminal operator."""

    def __init__(self, filtration, terminal):
        self.filtration = filtration
        self.algebra = filtration.algebra
        x = self.algebra.check(terminal)
        self.terminal = x
        steps = [filtration.expectation(x, n) for n in range(1, filtration.levels + 1)]
        self.steps = tuple(steps)
        prev = [np.zeros_like(x)] + steps[:-1]
        self.differences = tuple(a - b for a, b in zip(steps, prev))
        self._cache = {}

    @property
    def levels(self):
        return self.filtration.levels

    @property
    def terms(self):
        return self.differences

    def scaled(self, c):
        return Martingale(self.filtration, c * self.terminal)


class SequenceBundle:
    """A finite sequence ``(a_1, ..., a_N)`` of operators, adapted if flagged."""

    def __init__(self, filtration, terms, adapted=True, tol=1e-10):
        self.filtration = filtration
        self.algebra = filtration.algebra
        terms = tuple(self.algebra.check(a) for a in terms)
        if len(terms) != filtration.levels:
            raise AlgebraError(f"bundle needs {filtration.levels} terms, got {len(terms)}")
        self.adapted = bool(adapted)
        if adapted:
            for n, a in enumerate(terms, 1):
                if not filtration.in_level(a, n, tol):
                    raise AlgebraError(f"term {n} is not measurable at level {n}")
        self.terms = terms
        self._cache = {}

    @property
    def levels(self):
        return self.filtration.levels

    def scaled(self, c):
        return SequenceBundle(self.filtration, [c * a for a in self.terms], self.adapted, tol=1.0)


def term_squares(filtration, terms, kind):
    """Summands of the squared square function of the given kind."""
    try:
        side, cond = SQUARE_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown square function kind {kind!r}") from None
    out = []
    for k, a in enumerate(terms, 1):
        sq = a.conj().T @ a if side == "c" else a @ a.conj().T
        if cond is not None:
            sq = filtration.expectation(sq, k + cond)
        out.append((sq + sq.conj().T) / 2)
    return out


def partial_squares(obj, kind):
    """``[w_1, ..., w_N]`` with ``w_n`` the squared square function up to level n."""
    key = ("partial", kind)
    if key in obj._cache:
        return obj._cache[key]
    acc = np.zeros_like(obj.terms[0])
    out = []
    for sq in term_squares(obj.filtration, obj.terms, kind):
        acc = acc + sq
        out.append(acc)
    obj._cache[key] = out
    return out


def square_function_sq(obj, kind, upto=None):
    w = partial_squares(obj, kind)
    if upto is None or upto >= len(w):
        return w[-1]
    if upto < 1:
        raise ValueError("upto must be at least 1")
    return w[upto - 1]


def square_function(obj, kind, upto=None):
    """Positive square root of the chosen squared square function."""
    return obj.algebra.sqrt_positive(square_function_sq(obj, kind, upto))


def square_mu(obj, kind):
    """Generalized singular values of the square function (not squared)."""
    key = ("mu", kind)
    if key not in obj._cache:
        obj._cache[key] = mu_positive(square_function_sq(obj, kind), obj.algebra, power=0.5)
    return obj._cache[key]


def diagonal_mu(obj):
    """mu of diag(dx_1, ..., dx_N) on the N-fold amplified algebra."""
    A = obj.algebra
    s = np.concatenate([A.singular_values(d) for d in obj.terms])
    w = np.tile(A.coord_weights, len(obj.terms))
    return StepFunction.rearrange(s, w)


def _norm(spec, f):
    if spec is None:
        return f.sup
    return spec.norm(f)


def hardy_norm(m, kind, spec=None):
    """Hardy type quasi-norm; ``spec=None`` means the operator norm."""
    if kind in ("h_inf_c", "h∞c"):
        return square_mu(m, "s_c").sup
    if kind in ("H_inf_c", "H∞c"):
        return square_mu(m, "S_c").sup
    if kind == "hd":
        return _norm(spec, diagonal_mu(m))
    if kind not in HARDY_KINDS:
        raise ValueError(f"unknown Hardy kind {kind!r}")
    return _norm(spec, square_mu(m, HARDY_KINDS[kind]))


def sequence_norm(obj, kind, spec=None):
    """Norm of the square function of a bundle (or martingale) in ``spec``."""
    return _norm(spec, square_mu(obj, kind))


def bmo_c_norm(m):
    """``sup_n ||E_n |x - x_{n-1}|^2||^(1/2)`` with ``x_0 = 0``."""
    A, F, x = m.algebra, m.filtration, m.terminal
    best = 0.0
    prev = np.zeros_like(x)
    for n in range(1, m.levels + 1):
        r = x - prev
        e = F.expectation(r.conj().T @ r, n)
        best = max(best, A.opnorm((e + e.conj().T) / 2))
        prev = m.steps[n - 1]
    return float(np.sqrt(best))


@dataclass(frozen=True)
class MixedNorm:
    value: float
    upper_bound: bool


def mixed_hardy_norm(m, side, spec, candidates=None, tol=1e-9):
    """Norm in H_E^c + H_E^r (``sum``) or H_F^c ∩ H_F^r (``intersection``).

    The sum norm is an infimum over splittings; only the supplied candidate
    splittings are searched, so the value is flagged as an upper bound.
    """
    if side == "intersection":
        return MixedNorm(max(hardy_norm(m, "Hc", spec), hardy_norm(m, "Hr", spec)), False)
    if side != "sum":
        raise ValueError("side must be 'sum' or 'intersection'")
    if candidates is None:
        candidates = [(m.terminal, 0 * m.terminal), (0 * m.terminal, m.terminal)]
    best = np.inf
    scale = max(1.0, np.abs(m.terminal).max())
    for a, b in candidates:
        if np.abs(a + b - m.terminal).max() > tol * scale:
            raise ValueError("candidate splitting does not sum to x")
        ma, mb = Martingale(m.filtration, a), Martingale(m.filtration, b)
        best = min(best, hardy_norm(ma, "Hc", spec) + hardy_norm(mb, "Hr", spec))
    return MixedNorm(float(best), True)


def l2_of_differences(m):
    """``(sum_k ||dx_k||_2^2)^(1/2)``."""
    return float(np.sqrt(sum(m.algebra.trace(d.conj().T @ d).real for d in m.differences)))
