"""Symmetric quasi-norms on step functions.

The spaces are L_p, Lorentz L_{p,q}, Orlicz L_Phi (Luxemburg norm),
Orlicz-Lorentz L_{Phi,r}, generalized Lorentz Lambda^r(phi) and the parameter
spaces F_{rho,q} of the general K-method.  Apart from the Orlicz norm every
norm is an exact finite sum, because each integrand is a power of t on every
step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import config
from .rearrangement import StepFunction

INF = math.inf


def _parse_num(v):
    if v is None:
        return INF
    if isinstance(v, str):
        if v.lower() in ("inf", "infinity", "∞"):
            return INF
        return float(v)
    return float(v)


def _dump_num(v):
    return "inf" if math.isinf(v) else float(v)


def _bisect_log(fn, target, lo, hi, iters=config.INVERSE_ITERS):
    """Vectorized bisection for an increasing ``fn`` on ``exp([lo, hi])``."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    for _ in range(200):
        bad_lo = fn(np.exp(lo)) > target
        bad_hi = fn(np.exp(hi)) < target
        if not (bad_lo.any() or bad_hi.any()):
            break
        lo = np.where(bad_lo, lo - (hi - lo) - 1.0, lo)
        hi = np.where(bad_hi, hi + (hi - lo) + 1.0, hi)
    else:
        raise ArithmeticError("could not bracket the inverse")
    for _ in range(iters):
        mid = (lo + hi) / 2
        up = fn(np.exp(mid)) < target
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
    return np.exp((lo + hi) / 2)


# ---------------------------------------------------------------- Orlicz functions


@dataclass(frozen=True)
class OrliczFunction:
    """Orlicz function from a closed family.

    ``power``      Phi(t) = t^p
    ``two_power``  Phi(t) = (t^p + t^q) / 2, which is p-convex and q-concave
    ``llogl``      Phi(t) = t log(1 + t), 1-convex and 2-concave

    ``stretch`` composes with ``t -> t^stretch`` (the theta transform of the
    ``llogl`` family); the power families absorb it into their exponents.
    """

    family: str = "power"
    p: float = 1.0
    q: float | None = None
    stretch: float = 1.0

    def __post_init__(self):
        fam = self.family
        if fam == "power":
            if not self.p > 0:
                raise ValueError("power Orlicz function needs p > 0")
            object.__setattr__(self, "q", float(self.p))
        elif fam == "two_power":
            if self.q is None or not (0 < self.p <= self.q < INF):
                raise ValueError("two_power needs 0 < p <= q < inf")
        elif fam == "llogl":
            object.__setattr__(self, "p", 1.0)
            object.__setattr__(self, "q", 2.0)
        else:
            raise ValueError(f"unknown Orlicz family {fam!r}")
        if not self.stretch > 0:
            raise ValueError("stretch must be positive")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", float(self.q))

    @property
    def exponents(self):
        """Declared (convexity, concavity) exponents."""
        return self.p * self.stretch, self.q * self.stretch

    def _base(self, t):
        if self.family == "power":
            return t ** self.p
        if self.family == "two_power":
            return (t ** self.p + t ** self.q) / 2
        return t * np.log1p(t)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if (t < 0).any():
            raise ValueError("Orlicz functions act on nonnegative arguments")
        return self._base(t ** self.stretch if self.stretch != 1.0 else t)

    def inverse(self, s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        pos = s > 0
        sp = s[pos]
        if self.family == "power":
            u = sp ** (1.0 / self.p)
        elif self.family == "two_power" and self.p == 1.0 and self.q == 2.0:
            u = (np.sqrt(1.0 + 8.0 * sp) - 1.0) / 2.0
        else:
            g = np.log(sp)
            u = _bisect_log(self._base, sp, g - 1.0, g + 1.0)
        if self.stretch != 1.0:
            u = u ** (1.0 / self.stretch)
        out[pos] = u
        return out

    def to_json(self):
        out = {"family": self.family, "p": self.p}
        if self.family == "two_power":
            out["q"] = self.q
        if self.family == "llogl":
            out = {"family": "llogl"}
        if self.stretch != 1.0:
            out["stretch"] = self.stretch
        return out

    @classmethod
    def from_json(cls, obj):
        return cls(obj["family"], float(obj.get("p", 1.0)),
                   None if obj.get("q") is None else float(obj["q"]),
                   float(obj.get("stretch", 1.0)))

    def shape_violations(self, grid=None):
        """Sampled checks of monotonicity, p-convexity and q-concavity.

        Returns the worst relative violation of each property (0 means none).
        """
        if grid is None:
            grid = np.logspace(-4, 4, 801)
        p, q = self.exponents
        vals = self(grid)
        out = {"phi0": float(abs(self(np.array([0.0]))[0])),
               "increasing": float(max(0.0, -(np.diff(vals) / vals[1:]).min()))}
        for name, e, sign in (("p_convex", p, 1.0), ("q_concave", q, -1.0)):
            s = np.linspace(grid[0] ** e, grid[-1] ** e, 4001)
            g = self(s ** (1.0 / e))
            d2 = g[2:] - 2 * g[1:-1] + g[:-2]
            scale = np.abs(g[2:] - g[:-2]).max()
            out[name] = float(max(0.0, -(sign * d2).min() / scale))
        return out


def theta_transform(phi, theta):
    """Orlicz function Phi_0 with Phi_0^{-1} = (Phi^{-1})^(1 - theta)."""
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    k = 1.0 / (1.0 - theta)
    if phi.family == "power":
        return OrliczFunction("power", phi.p * phi.stretch * k)
    if phi.family == "two_power":
        return OrliczFunction("two_power", phi.p * phi.stretch * k, phi.q * phi.stretch * k)
    return OrliczFunction(phi.family, phi.p, phi.q, phi.stretch * k)


# ---------------------------------------------------------------- weights


class WeightFunction:
    """Positive weight on (0, inf), piecewise a power of t.

    Stored as knots in log-log coordinates with linear interpolation, which is
    monotone between samples; outside the knots the end slopes continue.  The
    power weight ``t^a`` is a single knot with slope ``a`` on both sides.
    """

    def __init__(self, log_t, log_v, left_slope, right_slope, bounds=None):
        self.log_t = np.asarray(log_t, dtype=float)
        self.log_v = np.asarray(log_v, dtype=float)
        if self.log_t.ndim != 1 or self.log_t.size == 0 or self.log_t.shape != self.log_v.shape:
            raise ValueError("weight knots malformed")
        if (np.diff(self.log_t) <= 0).any():
            raise ValueError("weight knots must increase")
        inner = np.diff(self.log_v) / np.diff(self.log_t)
        self.slopes = np.concatenate([[left_slope], inner, [right_slope]])
        lo, hi = float(self.slopes.min()), float(self.slopes.max())
        if bounds is None:
            bounds = (lo, hi)
        self.bounds = (float(bounds[0]), float(bounds[1]))
        if lo < self.bounds[0] - 1e-12 or hi > self.bounds[1] + 1e-12:
            raise ValueError(f"weight slopes [{lo}, {hi}] leave the declared class {self.bounds}")

    @classmethod
    def power(cls, a):
        if not a > 0:
            raise ValueError("power weight needs a > 0")
        return cls([0.0], [0.0], a, a, (a, a))

    @classmethod
    def from_samples(cls, t, v, bounds=None):
        t = np.asarray(t, dtype=float)
        v = np.asarray(v, dtype=float)
        if (t <= 0).any() or (v <= 0).any():
            raise ValueError("weight samples must be positive")
        lt, lv = np.log(t), np.log(v)
        if lt.size < 2:
            raise ValueError("need at least two samples")
        return cls(lt, lv, (lv[1] - lv[0]) / (lt[1] - lt[0]),
                   (lv[-1] - lv[-2]) / (lt[-1] - lt[-2]), bounds)

    @property
    def exponent(self):
        """The power if this weight is t^a, else None."""
        if np.allclose(self.slopes, self.slopes[0], rtol=0, atol=1e-14) and abs(self.log_v[0] - self.slopes[0] * self.log_t[0]) < 1e-14:
            return float(self.slopes[0])
        return None

    def log_at(self, t):
        lt = np.log(np.asarray(t, dtype=float))
        idx = np.searchsorted(self.log_t, lt, side="right")
        anchor = np.clip(idx - 1, 0, self.log_t.size - 1)
        with np.errstate(invalid="ignore"):
            return self.log_v[anchor] + self.slopes[idx] * (lt - self.log_t[anchor])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = np.exp(self.log_at(t[pos]))
        return out

    def pow(self, r):
        """The weight phi^r (r may be negative)."""
        b = (self.bounds[0] * r, self.bounds[1] * r)
        return WeightFunction(self.log_t, self.log_v * r, self.slopes[0] * r,
                              self.slopes[-1] * r, (min(b), max(b)))

    def times_power(self, b):
        """The weight t^b phi(t)."""
        return WeightFunction(self.log_t, self.log_v + b * self.log_t, self.slopes[0] + b,
                              self.slopes[-1] + b, (self.bounds[0] + b, self.bounds[1] + b))

    def integral(self, lo, hi):
        """``int_lo^hi phi(u) du/u`` exactly, vectorized; lo may be 0, hi may be inf."""
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            llo, lhi = np.log(lo), np.log(hi)
            edges = np.concatenate([[-np.inf], self.log_t, [np.inf]])
            total = np.zeros(np.broadcast(llo, lhi).shape)
            for j, s in enumerate(self.slopes):
                a = np.clip(llo, edges[j], edges[j + 1])
                b = np.clip(lhi, edges[j], edges[j + 1])
                live = b > a
                if not live.any():
                    continue
                anchor = self.log_t[min(max(j - 1, 0), self.log_t.size - 1)]
                base = self.log_v[min(max(j - 1, 0), self.log_t.size - 1)]
                if s == 0:
                    part = np.exp(base) * (b - a)
                else:
                    fa = np.exp(base + s * (a - anchor))
                    fb = np.exp(base + s * (b - anchor))
                    part = (fb - fa) / s
                total = total + np.where(live, part, 0.0)
        return total

    def to_json(self):
        a = self.exponent
        if a is not None:
            return {"power": a}
        return {"log_t": self.log_t.tolist(), "log_v": self.log_v.tolist(),
                "left": float(self.slopes[0]), "right": float(self.slopes[-1]),
                "bounds": list(self.bounds)}

    @classmethod
    def from_json(cls, obj):
        if "power" in obj:
            return cls.power(float(obj["power"]))
        return cls(obj["log_t"], obj["log_v"], obj["left"], obj["right"], obj.get("bounds"))

    def __eq__(self, other):
        return isinstance(other, WeightFunction) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(repr(self.to_json()))

    def __repr__(self):
        a = self.exponent
        return f"WeightFunction.power({a})" if a is not None else f"WeightFunction(<{self.log_t.size} knots>)"


def compose_weight(phi, rho, grid=None):
    """The weight t -> phi(t) / rho(phi(t))."""
    a, b = phi.exponent, rho.exponent
    if a is not None and b is not None:
        return WeightFunction.power(a * (1 - b))
    if grid is None:
        grid = np.logspace(-12, 12, 481)
    v = phi(grid)
    return WeightFunction.from_samples(grid, v / rho(v))


# ---------------------------------------------------------------- spaces


def _cum(f):
    return f.breakpoints, np.concatenate([[0.0], f.breakpoints[:-1]])


@dataclass(frozen=True)
class Lp:
    p: float = 2.0

    def __post_init__(self):
        if not self.p > 0:
            raise ValueError("L_p needs p > 0")

    @property
    def convex(self):
        return self.p >= 1

    def norm(self, f):
        if len(f) == 0:
            return 0.0
        if math.isinf(self.p):
            return f.sup
        return float(np.sum(f.values ** self.p * f.lengths) ** (1.0 / self.p))

    def to_json(self):
        return {"space": "lp", "p": _dump_num(self.p)}


@dataclass(frozen=True)
class Lorentz:
    p: float = 2.0
    q: float = 2.0

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0):
            raise ValueError("Lorentz needs p, q > 0")
        if math.isinf(self.p) and not math.isinf(self.q):
            raise ValueError("L_{inf,q} with q < inf is trivial")

    @property
    def convex(self):
        return 1 <= self.q <= self.p

    def norm(self, f):
        if len(f) == 0:
            return 0.0
        p, q = self.p, self.q
        if math.isinf(p):
            return f.sup
        big, small = _cum(f)
        if math.isinf(q):
            return float(np.max(f.values * big ** (1.0 / p)))
        e = q / p
        return float(np.sum(f.values ** q * (big ** e - small ** e)) ** (1.0 / q))

    def to_json(self):
        return {"space": "lorentz", "p": _dump_num(self.p), "q": _dump_num(self.q)}


def indicator_norm(phi, measure):
    """``||1_A||_Phi = 1 / Phi^{-1}(1/|A|)``."""
    m = np.asarray(measure, dtype=float)
    return 1.0 / phi.inverse(1.0 / m)


def orlicz_modular(phi, x, algebra=None):
    """``tau(Phi(|x|))`` for an operator, or ``int Phi(f)`` for a step function."""
    if isinstance(x, StepFunction):
        if len(x) == 0:
            return 0.0
        return float(np.sum(x.lengths * phi(x.values)))
    if algebra is None:
        raise ValueError("operator modular needs its algebra")
    s = algebra.singular_values(algebra.check(x))
    return float(np.sum(algebra.coord_weights * phi(s)))


@dataclass(frozen=True)
class Orlicz:
    phi: OrliczFunction = field(default_factory=OrliczFunction)

    @property
    def convex(self):
        return self.phi.exponents[0] >= 1

    def norm(self, f):
        if len(f) == 0:
            return 0.0
        phi = self.phi
        if phi.family == "power":
            return float(np.sum(f.values ** (phi.p * phi.stretch) * f.lengths)
                         ** (1.0 / (phi.p * phi.stretch)))
        top = f.sup
        v, ln = f.values, f.lengths

        def excess(c):
            return float(np.sum(ln * phi(v / c))) - 1.0

        lo = top / float(phi.inverse(np.array([1.0 / ln[0]]))[0])
        hi = top / float(phi.inverse(np.array([1.0 / f.domain_total]))[0])
        for _ in range(config.ORLICZ_MAXITER):
            if excess(lo) >= 0:
                break
            lo /= 2
        else:
            raise ArithmeticError("Orlicz norm: lower bracket failed")
        for _ in range(config.ORLICZ_MAXITER):
            if excess(hi) <= 0:
                break
            hi *= 2
        else:
            raise ArithmeticError("Orlicz norm: upper bracket failed")
        return float(brentq(excess, lo, hi, xtol=1e-300, rtol=config.ORLICZ_RTOL,
                            maxiter=config.ORLICZ_MAXITER))

    def to_json(self):
        return {"space": "orlicz", "phi": self.phi.to_json()}


@dataclass(frozen=True)
class OrliczLorentz:
    """``(r int_0^inf (s ||1_{|f|>s}||_Phi)^r ds/s)^(1/r)``, sup form at r = inf."""

    phi: OrliczFunction = field(default_factory=OrliczFunction)
    r: float = 2.0

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("r must be positive")

    @property
    def convex(self):
        return False

    def norm(self, f):
        if len(f) == 0:
            return 0.0
        c = indicator_norm(self.phi, f.breakpoints)
        v = f.values
        if math.isinf(self.r):
            return float(np.max(v * c))
        r = self.r
        nxt = np.concatenate([v[1:], [0.0]])
        return float(np.sum(c ** r * (v ** r - nxt ** r)) ** (1.0 / r))

    def to_json(self):
        return {"space": "orlicz_lorentz", "phi": self.phi.to_json(), "r": _dump_num(self.r)}


@dataclass(frozen=True)
class GenLorentz:
    """``(int_0^inf (mu_t phi(t))^r dt/t)^(1/r)``, sup form at r = inf."""

    phi: WeightFunction = field(default_factory=lambda: WeightFunction.power(0.5))
    r: float = 2.0

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("r must be positive")
        if not self.phi.bounds[0] > 0:
            raise ValueError("generalized Lorentz weight must have a positive lower index")

    @property
    def convex(self):
        return self.r >= 1 and self.phi.bounds[1] * self.r <= 1

    def norm(self, f):
        if len(f) == 0:
            return 0.0
        big, small = _cum(f)
        if math.isinf(self.r):
            return float(np.max(f.values * self.phi(big)))
        w = self._phi_r.integral(small, big)
        return float(np.sum(f.values ** self.r * w) ** (1.0 / self.r))

    @cached_property
    def _phi_r(self):
        return self.phi.pow(self.r)

    def to_json(self):
        return {"space": "gen_lorentz", "phi": self.phi.to_json(), "r": _dump_num(self.r)}


@dataclass(frozen=True)
class FParam:
    """Parameter space F_{rho,q}: ``(int_0^inf (|g(t)|/rho(t))^q dt/t)^(1/q)``."""

    rho: WeightFunction = field(default_factory=lambda: WeightFunction.power(0.5))
    q: float = 2.0

    def __post_init__(self):
        if not self.q > 0:
            raise ValueError("q must be positive")

    def to_json(self):
        return {"space": "fparam", "rho": self.rho.to_json(), "q": _dump_num(self.q)}


SPACES = (Lp, Lorentz, Orlicz, OrliczLorentz, GenLorentz)


def norm(spec, f):
    if not isinstance(f, StepFunction):
        raise TypeError("norm expects a StepFunction")
    return spec.norm(f)


def space_from_json(obj):
    kind = obj["space"]
    if kind == "lp":
        return Lp(_parse_num(obj["p"]))
    if kind == "linf":
        return Lp(INF)
    if kind == "lorentz":
        return Lorentz(_parse_num(obj["p"]), _parse_num(obj["q"]))
    if kind == "orlicz":
        return Orlicz(OrliczFunction.from_json(obj["phi"]))
    if kind == "orlicz_lorentz":
        return OrliczLorentz(OrliczFunction.from_json(obj["phi"]), _parse_num(obj["r"]))
    if kind == "gen_lorentz":
        return GenLorentz(WeightFunction.from_json(obj["phi"]), _parse_num(obj["r"]))
    if kind == "fparam":
        return FParam(WeightFunction.from_json(obj["rho"]), _parse_num(obj["q"]))
    raise ValueError(f"unknown space {kind!r}")


def phi_label(phi):
    if phi.family == "power":
        body = f"{phi.p:g}"
    elif phi.family == "two_power":
        body = f"{phi.p:g},{phi.q:g}"
    else:
        body = ""
    if phi.stretch != 1.0:
        body += f";stretch={phi.stretch:g}"
    return f"{phi.family}({body})"


def _weight_label(w):
    a = w.exponent
    return f"t^{a:g}" if a is not None else f"weight<{w.log_t.size}>"


def space_label(spec):
    """Short readable name, e.g. ``L_1``, ``L_{2,4}``, ``Orlicz[two_power(1,2)]``."""
    if isinstance(spec, Lp):
        return f"L_{spec.p:g}"
    if isinstance(spec, Lorentz):
        return f"L_{{{spec.p:g},{spec.q:g}}}"
    if isinstance(spec, Orlicz):
        return f"Orlicz[{phi_label(spec.phi)}]"
    if isinstance(spec, OrliczLorentz):
        return f"OrliczLorentz[{phi_label(spec.phi)},{spec.r:g}]"
    if isinstance(spec, GenLorentz):
        return f"Lambda^{spec.r:g}[{_weight_label(spec.phi)}]"
    if isinstance(spec, FParam):
        return f"F[{_weight_label(spec.rho)},{spec.q:g}]"
    raise TypeError(f"not a space: {spec!r}")


# ---------------------------------------------------------------- K for (E, L_inf)


def _golden(fn, a, b, tol=1e-7):
    """Minimum of a unimodal ``fn`` on ``[a, b]`` by bounded Brent search."""
    if b <= a:
        return a, fn(a)
    res = minimize_scalar(fn, bounds=(a, b), method="bounded",
                          options={"xatol": tol * max(abs(a), abs(b), 1e-300)})
    return float(res.x), float(res.fun)


def truncation_k(spec, f, t, return_level=False):
    """``inf_s ||(f - s)_+||_E + t s``, the K-functional of (E, L_inf) at t."""
    if not t > 0:
        raise ValueError("t must be positive")
    if len(f) == 0:
        return (0.0, 0.0) if return_level else 0.0
    levels = np.concatenate([[0.0], f.values[::-1]])
    seen = {}

    def obj(s):
        return spec.norm(f.shift_down(s)) + t * s

    def at(k):
        if k not in seen:
            seen[k] = obj(levels[k])
        return seen[k]

    convex = getattr(spec, "convex", False)
    if convex:
        # s -> ||(f - s)_+|| is convex for a lattice norm: bisect on the slope sign
        lo, hi = 0, levels.size - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if at(mid + 1) < at(mid):
                lo = mid + 1
            else:
                hi = mid
        j = lo
    else:
        vals = [at(k) for k in range(levels.size)]
        j = int(np.argmin(vals))
    best_s, best = float(levels[j]), at(j)
    if convex:
        spans = [k for k in (j - 1, j) if 0 <= k < levels.size - 1]
    else:
        spans = range(levels.size - 1)
    for k in spans:
        s, v = _golden(obj, levels[k], levels[k + 1])
        if v < best:
            best_s, best = float(s), float(v)
    return (best, best_s) if return_level else best


def rho_function(base, t):
    """Holmstedt scale ``t ||1_(t,inf)||_F + ||u 1_(0,t)(u)||_F`` for F = F_{rho,q}."""
    if not isinstance(base, FParam):
        raise TypeError("rho_function expects an FParam")
    t = np.asarray(t, dtype=float)
    rho, q = base.rho, base.q
    a1, a2 = rho.bounds
    if math.isinf(q):
        if a1 < 0 or a2 > 1:
            raise ValueError("F_{rho,inf}: rho must lie in the class Q[0,1]")
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = 2 * t[pos] / rho(t[pos])
        return out
    if not (a1 > 0 and a2 < 1):
        raise ValueError("F_{rho,q}: divergent terms unless rho lies in Q(0,1)")
    out = np.zeros_like(t)
    pos = t > 0
    tp = t[pos]
    head = rho.pow(-q).integral(tp, np.full_like(tp, np.inf))
    tail = rho.pow(-q).times_power(q).integral(np.zeros_like(tp), tp)
    out[pos] = tp * head ** (1 / q) + tail ** (1 / q)
    return out
