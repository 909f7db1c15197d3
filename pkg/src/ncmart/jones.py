"""Two-step Cuculescu decomposition for (h_2^c, h_inf^c) and K-functional tools.

For ``t > 0`` set ``lam = (2 + eps)/t * (int_0^{t^2} mu(s_c(x))^2)^(1/2)``.
A first Cuculescu run on ``s_{c,k}^2(x)`` gives ``q_k``; the martingale with
differences ``dx_k q_k`` feeds a second run giving ``pi_k``.  Then
``dz_k = dx_k q_k pi_{k-1}`` and ``y = x - z`` satisfy

    ||z||_{h_inf^c} <= sqrt(2) lam,
    ||y||_{h_2^c}   <= (sqrt(10) + 4) K_ref,
    tau(1 - q), tau(1 - pi) <= t^2,

so ``K(x, t; h_2^c, h_inf^c) <= (sqrt(10) + 4 + 2 sqrt(2) + sqrt(2) eps) K_ref``.
The same recursion runs on sequences with sigma_c or the plain column
square function in place of s_c.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import config
from .cuculescu import cuculescu
from .martingale import (Martingale, SequenceBundle, bmo_c_norm, partial_squares,
                         square_function_sq, square_mu)
from .rearrangement import StepFunction, integrate_power, submajorizes, mu_positive
from .symspaces import Lp, truncation_k

# square kind -> (square function, measurability offset of the weights)
SQUARE_KINDS = {
    "martingale": ("s_c", -1),
    "conditioned": ("sigma_c", -1),
    "adapted": ("calS_c", 0),
}


def _kind_of(x, kind):
    if kind is None:
        if isinstance(x, Martingale):
            return "martingale"
        raise ValueError("sequence input needs square_kind 'conditioned' or 'adapted'")
    if kind not in SQUARE_KINDS:
        raise ValueError(f"unknown square kind {kind!r}")
    if kind == "martingale" and not isinstance(x, Martingale):
        raise ValueError("square kind 'martingale' needs a Martingale")
    if kind == "adapted" and isinstance(x, SequenceBundle) and not x.adapted:
        raise ValueError("square kind 'adapted' needs an adapted bundle")
    return kind


def k_ref(x, t, p=2.0, square_kind=None):
    """``(int_0^{t^p} mu(sq(x))^p)^(1/p)``; a certified lower bound of K at p = 2."""
    if not p > 0:
        raise ValueError("p must be positive")
    if not t > 0:
        raise ValueError("t must be positive")
    kind = _kind_of(x, square_kind)
    f = square_mu(x, SQUARE_KINDS[kind][0])
    return integrate_power(f, p, t ** p) ** (1.0 / p) if len(f) else 0.0


def lambda_for(x, t, eps=config.EPSILON, square_kind=None):
    return (2.0 + eps) / t * k_ref(x, t, 2.0, square_kind)


def _bundle(filtration, terms):
    return SequenceBundle(filtration, terms, adapted=False)


class JonesDecomposition:
    """Result of the two-step decomposition with its certificates."""

    def __init__(self, x, t, eps, kind, lam, lam_build, first, second, d_alpha, d_beta, d_y, d_z):
        self.x = x
        self.t = float(t)
        self.eps = float(eps)
        self.kind = kind
        self.lam = float(lam)
        self.lam_build = float(lam_build)
        self.first = first
        self.second = second
        F = x.filtration
        self.alpha = _bundle(F, d_alpha)
        self.beta = _bundle(F, d_beta)
        self.y = _bundle(F, d_y)
        self.z = _bundle(F, d_z)
        A = x.algebra
        sq = SQUARE_KINDS[kind][0]
        self._sq = sq
        self.k_ref = k_ref(x, t, 2.0, kind)
        self.y_norm = math.sqrt(max(0.0, A.trace(square_function_sq(self.y, sq)).real))
        self.z_norm = square_mu(self.z, sq).sup
        one = A.identity()
        self.trace_q = A.trace(one - first.final).real
        self.trace_pi = A.trace(one - second.final).real
        self.cost = self.y_norm + self.t * self.z_norm

    @property
    def y_part(self):
        return sum(self.y.terms)

    @property
    def z_part(self):
        return sum(self.z.terms)

    def y_norm_in(self, spec):
        return spec.norm(square_mu(self.y, self._sq))

    def z_bmo(self):
        return bmo_c_norm(Martingale(self.x.filtration, self.z_part))

    def certificates(self, rtol=config.CERT_RTOL):
        """Dict name -> bool.  The y, trace and cost bounds are only claimed
        when ``lam`` is at least the constructive value."""
        x, A, F = self.x, self.x.algebra, self.x.filtration
        sq = self._sq
        tiny = 1e-12 * (1.0 + max(A.opnorm(d) for d in x.terms))
        lam2 = self.lam ** 2
        out = {}
        out["x_equals_y_plus_z"] = bool(
            np.abs(self.y_part + self.z_part - sum(x.terms)).max() <= 1e-10 * (1 + np.abs(sum(x.terms)).max()))
        out["z_bound"] = self.z_norm <= math.sqrt(2) * self.lam * (1 + rtol) + tiny
        cond = SQUARE_KINDS[self.kind][1] if self.kind != "adapted" else None
        worst = 0.0
        for k, a in enumerate(self.alpha.terms, 1):
            s = a.conj().T @ a
            if cond is not None:
                s = F.expectation(s, k + cond)
            worst = max(worst, A.opnorm(s))
        out["alpha_increment"] = worst <= lam2 * (1 + rtol) + tiny ** 2
        sx = mu_positive(square_function_sq(x, sq), A)
        sa = mu_positive(square_function_sq(self.alpha, sq), A)
        sb = mu_positive(square_function_sq(self.beta, sq), A)
        sz = mu_positive(square_function_sq(self.z, sq), A)
        out["beta_submajorized"] = submajorizes(sx, sb)
        out["alpha_submajorized"] = submajorizes(4 * sx, sa)
        out["z_submajorized"] = submajorizes(sa, sz)
        out["first_run"] = all(self.first.certify(rtol).values())
        out["second_run"] = all(self.second.certify(rtol).values())
        if self.lam >= self.lam_build * (1 - 1e-12):
            t2 = self.t ** 2
            kr = self.k_ref
            out["y_bound"] = self.y_norm <= config.Y_CONSTANT * kr * (1 + rtol) + tiny
            out["trace_q"] = self.trace_q <= t2 * (1 + rtol) + 1e-12
            out["trace_pi"] = self.trace_pi <= t2 * (1 + rtol) + 1e-12
            out["cost_bound"] = self.cost <= config.jones_constant(self.eps) * kr * (1 + rtol) + tiny
        return out

    def to_json(self):
        cert = self.certificates()
        return {
            "square_kind": self.kind, "t": self.t, "epsilon": self.eps,
            "lambda": self.lam, "k_ref": self.k_ref,
            "y_norm": self.y_norm, "z_norm": self.z_norm,
            "trace_1_minus_q": self.trace_q, "trace_1_minus_pi": self.trace_pi,
            "cost": self.cost, "constant": config.jones_constant(self.eps),
            "certificates": cert, "all_certified": all(cert.values()),
        }


def jones_decompose(x, t, eps=config.EPSILON, square_kind=None, lam=None):
    """Two-step Cuculescu decomposition ``x = y + z`` at scale ``t``."""
    if not t > 0:
        raise ValueError("t must be positive")
    if not eps > 0:
        raise ValueError("epsilon must be positive")
    kind = _kind_of(x, square_kind)
    sq, offset = SQUARE_KINDS[kind]
    F = x.filtration
    lam_build = lambda_for(x, t, eps, kind)
    if lam is None:
        lam = lam_build
    lam2 = float(lam) ** 2
    d = x.terms
    first = cuculescu(partial_squares(x, sq), lam2, F, offset, check=False)
    q = first.projections
    d_alpha = [a @ q[k] for k, a in enumerate(d, 1)]
    d_beta = [a @ q[k - 1] for k, a in enumerate(d, 1)]
    second = cuculescu(partial_squares(_bundle(F, d_alpha), sq), lam2, F, offset, check=False)
    pi = second.projections
    d_z = [a @ q[k] @ pi[k - 1] for k, a in enumerate(d, 1)]
    d_y = [a - b for a, b in zip(d, d_z)]
    return JonesDecomposition(x, t, eps, kind, lam, lam_build, first, second,
                              d_alpha, d_beta, d_y, d_z)


# ---------------------------------------------------------------- K curves


@dataclass(frozen=True)
class HardyCouple:
    """(h_E^c-type, h_inf^c-type) or, with ``endpoint='bmo'``, (h_E^c, bmo^c)."""

    space: object = field(default_factory=lambda: Lp(2.0))
    endpoint: str = "h_inf"

    @property
    def label(self):
        return f"hardy[{self.space.to_json()}|{self.endpoint}]"


@dataclass(frozen=True)
class FunctionCouple:
    """(E, L_inf) when ``q`` is inf, else (L_p, L_q) with ``space = Lp(p)``."""

    space: object = field(default_factory=lambda: Lp(1.0))
    q: float = math.inf

    @property
    def label(self):
        return f"function[{self.space.to_json()}|q={self.q}]"


class KCurve:
    """Certified two-sided samples of ``t -> K(x, t)``.

    ``lower_fn`` and ``upper_fn`` re-evaluate the bounds on any grid, which lets
    the quadrature refine without new decompositions.
    """

    def __init__(self, label, t, lower, upper, lower_id, upper_id,
                 lower_fn=None, upper_fn=None, a0=None, a1=None, lower_violations=0,
                 breaks=()):
        self.label = label
        self.t = np.asarray(t, dtype=float)
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        self.lower_id = list(lower_id)
        self.upper_id = list(upper_id)
        self.lower_fn = lower_fn
        self.upper_fn = upper_fn
        self.a0 = a0
        self.a1 = a1
        self.lower_violations = lower_violations
        # t where the lower curve may have kinks (sup candidates at gamma = inf)
        self.breaks = np.asarray(breaks, dtype=float)

    def evaluate(self, grid):
        if self.lower_fn is None or self.upper_fn is None:
            raise ValueError("this curve cannot be re-evaluated")
        grid = np.asarray(grid, dtype=float)
        lo, lid = self.lower_fn(grid)
        up, uid = self.upper_fn(grid)
        return KCurve(self.label, grid, lo, up, lid, uid, self.lower_fn, self.upper_fn,
                      self.a0, self.a1, self.lower_violations, self.breaks)

    @property
    def ratio(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.lower > 0, self.upper / self.lower, np.inf)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["t", "lower", "upper", "certificate_id"])
        for row in zip(self.t, self.lower, self.upper, self.upper_id):
            w.writerow([repr(float(row[0])), repr(float(row[1])), repr(float(row[2])), row[3]])
        return buf.getvalue()


def default_grid(x, kind=None, points=config.TGRID_POINTS, decades=config.TGRID_DECADES):
    """Log grid around ``t* = ||x||_{h_2} / ||x||_{h_inf}``."""
    kind = _kind_of(x, kind)
    f = square_mu(x, SQUARE_KINDS[kind][0])
    if len(f) == 0:
        return np.logspace(-decades, decades, points)
    tstar = Lp(2.0).norm(f) / f.sup
    return tstar * np.logspace(-decades, decades, points)


def lambda_factors(points=config.LAMBDA_GRID_POINTS, span=config.LAMBDA_GRID_SPAN):
    if points <= 1:
        return np.array([1.0])
    return np.geomspace(1.0 / span, span, points)


def _envelope(pairs, grid):
    a = np.array([p[0] for p in pairs])
    b = np.array([p[1] for p in pairs])
    costs = a[None, :] + grid[:, None] * b[None, :]
    j = np.argmin(costs, axis=1)
    return costs[np.arange(grid.size), j], j


def _single_difference(x):
    if not isinstance(x, Martingale):
        return False
    scale = max(1.0, np.abs(x.terminal).max())
    return all(np.abs(d).max(initial=0.0) <= 1e-12 * scale for d in x.terms[1:])


def _hardy_curve(x, couple, grid, eps, factors, kind):
    sq = SQUARE_KINDS[kind][0]
    spec = couple.space
    f = square_mu(x, sq)
    a0 = spec.norm(f)
    if couple.endpoint == "bmo":
        if kind != "martingale":
            raise ValueError("bmo endpoint needs a martingale")
        a1 = bmo_c_norm(x)
    else:
        a1 = f.sup
    pairs = [(a0, 0.0, "trivial:A0"), (0.0, a1, "trivial:A1")]
    checks = []
    # a decomposition depends on lam only; off-centre grid values are snapped
    # to a global geometric lattice so that neighbouring t reuse them
    cache = {}
    step = math.log(factors[1] / factors[0]) if len(factors) > 1 else math.log(2.0)
    anchor = (2.0 + eps) * max(f.sup, 1e-300)

    def record(dec, tag):
        zn = dec.z_bmo() if couple.endpoint == "bmo" else dec.z_norm
        yn = dec.y_norm if isinstance(spec, Lp) and spec.p == 2 else dec.y_norm_in(spec)
        pairs.append((yn, zn, tag))
        if couple.endpoint != "bmo":
            checks.append((dec.y_norm, dec.z_norm))

    if len(f):
        for t in grid:
            lp = lambda_for(x, t, eps, kind)
            record(jones_decompose(x, t, eps, kind), f"jones:t={t:.6g}:exact")
            for fac in factors:
                if abs(math.log(fac)) < 1e-12:
                    continue
                k = round(math.log(lp * fac / anchor) / step)
                if k in cache:
                    continue
                lam = anchor * math.exp(k * step)
                cache[k] = True
                record(jones_decompose(x, t, eps, kind, lam=lam), f"jones:lam={lam:.6g}")
    if _single_difference(x) and couple.endpoint != "bmo":
        # one-term martingale: functional calculus splits of |x_1| live in M_1
        for t in grid:
            _, s = truncation_k(spec, f, t, return_level=True)
            pairs.append((spec.norm(f.shift_down(s)), min(s, f.sup), f"truncation:t={t:.6g}"))

    ids = [p[2] for p in pairs]

    def upper_fn(g):
        vals, j = _envelope([(p[0], p[1]) for p in pairs], np.asarray(g, dtype=float))
        return vals, [ids[i] for i in j]

    memo = {}
    breaks = ()
    if couple.endpoint == "bmo":
        def one(t):
            return 0.0
        tag = "none"
    elif isinstance(spec, Lp):
        p = spec.p
        c = min(1.0, 2.0 ** (1.0 - 1.0 / p))

        def one(t):
            return c * k_ref(x, t, p, kind)
        tag = "k_ref"
        breaks = np.cumsum(f.lengths) ** (1.0 / p) if len(f) else ()
    else:
        def one(t):
            return truncation_k(spec, f, t)
        tag = "truncation"

    def lower_fn(g):
        g = np.asarray(g, dtype=float)
        out = np.empty(g.size)
        for i, t in enumerate(g.tolist()):
            if t not in memo:
                memo[t] = one(t)
            out[i] = memo[t]
        return out, [tag] * g.size

    # every decomposition must dominate the p = 2 reference functional
    violations = 0
    if couple.endpoint != "bmo":
        for t in grid:
            kr = k_ref(x, t, 2.0, kind)
            for yn, zn in checks:
                if kr > yn + t * zn + 1e-8 * (1 + kr):
                    violations += 1
    lo, lid = lower_fn(grid)
    up, uid = upper_fn(grid)
    return KCurve(couple.label, grid, lo, up, lid, uid, lower_fn, upper_fn, a0, a1, violations,
                  breaks)


def holmstedt_k(f, t, p, q):
    """``(int_0^{t^a} mu^p)^(1/p) + t (int_{t^a}^inf mu^q)^(1/q)``, 1/a = 1/p - 1/q."""
    if not 0 < p < q:
        raise ValueError("need 0 < p < q")
    if not t > 0:
        raise ValueError("t must be positive")
    if len(f) == 0:
        return 0.0
    alpha = p if math.isinf(q) else 1.0 / (1.0 / p - 1.0 / q)
    a = t ** alpha
    head = float(f.partial_integral(a, p)) ** (1.0 / p)
    if math.isinf(q):
        return head + t * float(f.value_at(a))
    tail = integrate_power(f, q) - float(f.partial_integral(a, q))
    return head + t * max(tail, 0.0) ** (1.0 / q)


def _dual_lower(f, t, p, q, n=41):
    """Hoelder lower bound ``<f, g> / max(||g||_{p'}, ||g||_{q'}/t)`` over a family of g."""
    alpha = 1.0 / (1.0 / p - 1.0 / q)
    a = t ** alpha
    head = f.restrict(0.0, a).power(p - 1)
    tail = f.restrict(a).power(q - 1)
    pc = math.inf if p == 1 else p / (p - 1)
    qc = q / (q - 1)
    best = 0.0
    for c in np.concatenate([[0.0], np.geomspace(1e-6, 1e6, n)]):
        # g = head part + c * tail part, placed on the same positions as f
        pair = integrate_power(f.restrict(0.0, a), p) + c * integrate_power(f.restrict(a), q)
        g0 = _lp_of_parts(head, tail, c, pc, a)
        g1 = _lp_of_parts(head, tail, c, qc, a)
        den = max(g0, g1 / t)
        if den > 0:
            best = max(best, pair / den)
    return best


def _lp_of_parts(head, tail, c, r, a):
    if math.isinf(r):
        return max(head.sup, c * tail.sup)
    total = integrate_power(head, r) if len(head) else 0.0
    if len(tail):
        total += c ** r * integrate_power(tail, r)
    return total ** (1.0 / r)


def _function_curve(f, couple, grid):
    spec = couple.space
    if math.isinf(couple.q):
        a0, a1 = spec.norm(f), f.sup

        def both(g):
            vals = np.array([truncation_k(spec, f, t) for t in np.asarray(g, dtype=float)])
            return vals, ["truncation"] * len(vals)
        lo, lid = both(grid)
        return KCurve(couple.label, grid, lo, lo, lid, lid, both, both, a0, a1)
    if not isinstance(spec, Lp) or spec.p < 1:
        raise ValueError("(L_p, L_q) couple needs Lp with p >= 1")
    p, q = spec.p, couple.q
    a0, a1 = spec.norm(f), Lp(q).norm(f)

    def upper_fn(g):
        g = np.asarray(g, dtype=float)
        vals = np.array([min(holmstedt_k(f, t, p, q), a0, t * a1) for t in g])
        return vals, ["time_split"] * g.size

    def lower_fn(g):
        g = np.asarray(g, dtype=float)
        return np.array([_dual_lower(f, t, p, q) for t in g]), ["duality"] * g.size
    lo, lid = lower_fn(grid)
    up, uid = upper_fn(grid)
    return KCurve(couple.label, grid, lo, up, lid, uid, lower_fn, upper_fn, a0, a1)


def k_curve(x, couple=None, grid=None, eps=config.EPSILON, factors=None, square_kind=None):
    """Sampled certified bounds on the K-functional of ``x`` in ``couple``."""
    if couple is None:
        couple = HardyCouple()
    if isinstance(x, StepFunction):
        if grid is None:
            raise ValueError("step function curves need an explicit grid")
        grid = np.asarray(grid, dtype=float)
        if grid.size == 0:
            raise ValueError("empty grid")
        return _function_curve(x, couple, grid)
    kind = _kind_of(x, square_kind)
    if grid is None:
        grid = default_grid(x, kind)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty grid")
    if (grid <= 0).any() or (np.diff(grid) <= 0).any():
        raise ValueError("grid must be positive and increasing")
    if factors is None:
        factors = lambda_factors()
    return _hardy_curve(x, couple, grid, eps, np.asarray(factors, dtype=float), kind)


# ---------------------------------------------------------------- quadrature


class TailRegimeError(ValueError):
    pass


def _segment_integral(t, k, rho_log, gamma):
    """``sum_i int_{t_i}^{t_{i+1}} (K/rho)^gamma dt/t`` with K/rho a power on each piece."""
    lt = np.log(t)
    with np.errstate(divide="ignore"):
        lg = np.log(k) - rho_log
    h = np.diff(lt)
    g0, g1 = gamma * lg[:-1], gamma * lg[1:]
    d = g1 - g0
    small = np.abs(d) < 1e-10
    with np.errstate(over="ignore", invalid="ignore"):
        body = np.where(small, np.exp(g0) * h * (1 + d / 2),
                        (np.exp(g1) - np.exp(g0)) / np.where(small, 1.0, d) * h)
    body = np.where(np.isneginf(g0) & np.isneginf(g1), 0.0, body)
    return float(np.sum(body))


def _concave_sup(t, k, theta, rho):
    """``sup K/rho`` over the sampled range for a concave increasing K.

    Between samples ``K(s) <= min(K_i s / t_i, K_{i+1})``, so the ratio peaks
    where the two bounds cross.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        cross = np.clip(t[:-1] * k[1:] / k[:-1], t[:-1], t[1:])
    cross = np.where(k[:-1] > 0, cross, t[1:])
    pts = np.concatenate([t, cross])
    vals = np.concatenate([k, k[1:]])
    logr = theta * np.log(pts) if rho is None else rho.log_at(pts)
    return float(np.max(vals / np.exp(logr)))


def _interp_one(t, k, theta, gamma, rho, upper=False):
    k = np.asarray(k, dtype=float)
    if rho is None:
        rho_log = theta * np.log(t)
        b0 = b1 = theta
    else:
        rho_log = rho.log_at(t)
        b0 = (rho_log[1] - rho_log[0]) / (np.log(t[1]) - np.log(t[0]))
        b1 = (rho_log[-1] - rho_log[-2]) / (np.log(t[-1]) - np.log(t[-2]))
    if not (0 < b0 < 1 and 0 < b1 < 1):
        raise ValueError("interpolation weight must have exponent in (0, 1) at the ends")
    if (k <= 0).all():
        return 0.0
    head = k[0] / math.exp(rho_log[0])
    tail = k[-1] / math.exp(rho_log[-1])
    if math.isinf(gamma):
        if upper:
            return _concave_sup(t, k, theta, rho)
        return float(np.max(k / np.exp(rho_log)))
    body = _segment_integral(t, k, rho_log, gamma)
    total = head ** gamma / ((1 - b0) * gamma) + body + tail ** gamma / (b1 * gamma)
    return total ** (1.0 / gamma)


def _check_tails(t, k, name):
    if k[0] <= 0:
        return
    lin = (k[1] / t[1]) / (k[0] / t[0])
    flat = k[-1] / k[-2]
    if lin < 1 - config.TAIL_RTOL:
        raise TailRegimeError(f"{name} curve is not linear at t_min (ratio {lin:.4f}); widen the grid")
    if flat > 1 + config.TAIL_RTOL:
        raise TailRegimeError(f"{name} curve is not flat at t_max (ratio {flat:.4f}); widen the grid")


def real_interp_norm(curve, theta=None, gamma=2.0, rho=None, rtol=config.QUAD_RTOL,
                     max_points=config.QUAD_MAX_POINTS, normalize=False):
    """``(int_0^inf (K(t)/rho(t))^gamma dt/t)^(1/gamma)`` for the lower and upper curves.

    ``rho`` defaults to ``t^theta``.  Between samples ``log K`` is linear in
    ``log t``; outside the grid K continues as ``c t`` below and as a constant
    above.  At ``gamma = inf`` the upper value bounds the supremum between
    samples using concavity of K, and the lower value also takes the lower
    curve at its breakpoints.  Curves that can be re-evaluated are refined by doubling until both
    ends move by less than ``rtol``.  ``normalize`` multiplies by
    ``(theta (1 - theta) gamma)^(1/gamma)`` so that ``K = min(1, t)`` has norm 1.
    """
    if rho is None:
        if theta is None or not 0 < theta < 1:
            raise ValueError("theta must lie in (0, 1)")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if curve.t.size < 2:
        raise ValueError("curve needs at least two points")

    def run(c):
        _check_tails(c.t, c.upper, "upper")
        _check_tails(c.t, c.lower, "lower")
        lo = _interp_one(c.t, c.lower, theta, gamma, rho)
        if math.isinf(gamma) and c.breaks.size and c.lower_fn is not None:
            b = c.breaks[c.breaks > 0]
            kb = np.asarray(c.lower_fn(b)[0], dtype=float)
            logr = theta * np.log(b) if rho is None else rho.log_at(b)
            lo = max(lo, float(np.max(kb / np.exp(logr))))
        return lo, _interp_one(c.t, c.upper, theta, gamma, rho, upper=True)

    lo, hi = run(curve)
    cur = curve
    if cur.lower_fn is not None:
        while 2 * cur.t.size - 1 <= max_points:
            grid = np.exp(np.linspace(math.log(cur.t[0]), math.log(cur.t[-1]), 2 * cur.t.size - 1))
            cur = cur.evaluate(grid)
            lo2, hi2 = run(cur)
            done = abs(lo2 - lo) <= rtol * max(lo2, 1e-300) and abs(hi2 - hi) <= rtol * max(hi2, 1e-300)
            lo, hi = lo2, hi2
            if done:
                break
    if normalize:
        if rho is not None:
            raise ValueError("normalization is defined for power weights only")
        c = 1.0 if math.isinf(gamma) else (theta * (1 - theta) * gamma) ** (1.0 / gamma)
        lo, hi = lo * c, hi * c
    return lo, hi


class FunctionCurve:
    """A K-curve given by an exact function of t (for tests and closed forms)."""

    def __init__(self, fn, t):
        self.fn = fn
        t = np.asarray(t, dtype=float)
        v = np.asarray(fn(t), dtype=float)
        self._curve = KCurve("function", t, v, v, ["exact"] * t.size, ["exact"] * t.size,
                             self._eval, self._eval)

    def _eval(self, g):
        v = np.asarray(self.fn(np.asarray(g, dtype=float)), dtype=float)
        return v, ["exact"] * v.size

    @property
    def curve(self):
        return self._curve
