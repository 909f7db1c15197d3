"""Seeded instance generation and the inequality verification harness.

Each check runs on one instance and returns one :class:`RatioReport` per
inequality it exercises.  :func:`run_suite` runs checks over a seeded corpus,
merges the per-instance reports by name and applies the trend guard to every
ratio without an asserted constant.
"""
from __future__ import annotations

import csv
import io
import math
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import binomtest

from . import config
from .algebra import (Filtration, TracialAlgebra, dyadic_averaging, dyadic_pinching,
                      random_pinching, tensor_filtration)
from .cuculescu import cuculescu
from .jones import HardyCouple, k_curve, lambda_factors, real_interp_norm
from .martingale import Martingale, SequenceBundle, hardy_norm, partial_squares, square_mu
from .rearrangement import mu, mu_positive
from .symspaces import (GenLorentz, Lorentz, Lp, Orlicz, OrliczFunction, OrliczLorentz,
                        WeightFunction, compose_weight, orlicz_modular, space_from_json,
                        phi_label, space_label, theta_transform)

MODES = ("noncommutative", "dyadic")
FILTRATIONS = ("pinching", "tensor", "random")


# ---------------------------------------------------------------- instances


@dataclass(frozen=True)
class InstanceSpec:
    """Recipe for a seeded random instance.

    ``mode='dyadic'`` gives the commutative dyadic model: ``dim`` atoms of a
    (weighted if flagged) measure space with the dyadic averaging filtration.
    Otherwise the algebra is ``blocks`` equal matrix blocks with a halving
    pinching (``pinching``), random nested pinching (``random``) or tensor
    filtration.
    """

    dim: int = 8
    levels: int = 3
    mode: str = "noncommutative"
    filtration: str = "pinching"
    blocks: int = 1
    weighted: bool = False
    rank: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if not 1 <= self.dim <= 64:
            raise ValueError("dim must lie in 1..64")
        if not 1 <= self.levels <= 8:
            raise ValueError("levels must lie in 1..8")
        if self.filtration not in FILTRATIONS:
            raise ValueError(f"filtration must be one of {FILTRATIONS}")
        if self.blocks < 1 or self.dim % self.blocks:
            raise ValueError("blocks must divide dim")
        if self.rank is not None and self.rank < 1:
            raise ValueError("rank must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def rng(self, tag=""):
        """Generator determined by the instance recipe and a stream tag."""
        mode = MODES.index(self.mode)
        filt = FILTRATIONS.index(self.filtration)
        key = [self.seed & 0xFFFFFFFF, self.seed >> 32, self.dim, self.levels, mode, filt,
               self.blocks, int(self.weighted), self.rank or 0, zlib.crc32(tag.encode())]
        return np.random.default_rng(np.random.SeedSequence(key))

    def to_json(self):
        return asdict(self)

    @classmethod
    def from_json(cls, obj):
        return cls(**obj)


class Instance:
    """A generated algebra, filtration and terminal operator."""

    def __init__(self, spec, filtration, terminal):
        self.spec = spec
        self.filtration = filtration
        self.algebra = filtration.algebra
        self.terminal = terminal
        self._martingale = None
        self._objects = {}
        self._curves = {}

    @property
    def martingale(self):
        if self._martingale is None:
            self._martingale = Martingale(self.filtration, self.terminal)
        return self._martingale

    @property
    def dim(self):
        return self.algebra.total_dim

    def square_object(self, kind):
        """The martingale, or the generated sequence for the other square kinds."""
        if kind == "martingale":
            return self.martingale
        if kind not in self._objects:
            if kind not in ("conditioned", "adapted"):
                raise ValueError(f"unknown square kind {kind!r}")
            self._objects[kind] = self.sequence(kind, adapted=kind == "adapted")
        return self._objects[kind]

    def curve(self, couple, kind="martingale", grid=None, eps=config.EPSILON):
        """K-curve of the kind's object, cached so several checks share it."""
        key = (couple, kind, None if grid is None else np.asarray(grid, float).tobytes(), eps)
        if key not in self._curves:
            self._curves[key] = k_curve(self.square_object(kind), couple, grid=grid, eps=eps,
                                        square_kind=kind)
        return self._curves[key]

    def gaussian(self, rng, rank=None):
        """Complex Gaussian operator supported on the blocks, optionally rank-cut."""
        n = self.dim
        g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
        if self.spec.mode == "dyadic":
            g = np.diag(np.diagonal(g))
        g = np.where(self.algebra.support_mask, g, 0)
        if rank is not None:
            within = np.arange(n) - self.algebra.offsets[self.algebra.coord_block]
            g = g * (within < rank)[None, :]
        return g

    def positive(self, rng, rank=None):
        g = self.gaussian(rng, rank)
        p = g.conj().T @ g
        return (p + p.conj().T) / 2

    def sequence(self, tag, adapted=False):
        """N Gaussian operators; ``adapted`` projects the n-th into M_n."""
        rng = self.spec.rng(tag)
        F = self.filtration
        terms = [self.gaussian(rng, self.spec.rank) for _ in range(F.levels)]
        if adapted:
            terms = [F.expectation(a, n) for n, a in enumerate(terms, 1)]
        return SequenceBundle(F, terms, adapted=adapted)

    def positive_sequence(self, tag):
        rng = self.spec.rng(tag)
        return [self.positive(rng, self.spec.rank) for _ in range(self.filtration.levels)]


def generate_instance(spec):
    """Deterministic instance for ``spec``; the same spec gives identical arrays."""
    rng = spec.rng("instance")
    if spec.mode == "dyadic":
        w = rng.uniform(0.5, 2.0, spec.dim) if spec.weighted else np.ones(spec.dim)
        algebra = TracialAlgebra(tuple((1, float(v)) for v in w))
        filt = dyadic_averaging(algebra, spec.levels) if spec.levels > 1 else _trivial(algebra)
    else:
        d = spec.dim // spec.blocks
        w = rng.uniform(0.5, 2.0, spec.blocks) if spec.weighted else np.ones(spec.blocks)
        algebra = TracialAlgebra(tuple((d, float(v)) for v in w))
        if spec.levels == 1:
            filt = _trivial(algebra)
        elif spec.filtration == "tensor":
            if spec.blocks != 1:
                raise ValueError("tensor filtration needs a single block")
            filt = tensor_filtration(algebra, spec.levels)
        elif spec.filtration == "random":
            filt = random_pinching(algebra, spec.levels, spec.rng("filtration"))
        else:
            filt = dyadic_pinching(algebra, spec.levels)
    inst = Instance(spec, filt, None)
    inst.terminal = inst.gaussian(rng, spec.rank)
    return inst


def _trivial(algebra):
    """One-level filtration ``M_1 = M``, stored as a repeated last level."""
    n = algebra.total_dim
    if all(d == 1 for d, _ in algebra.blocks):
        part = tuple((i,) for i in range(n))
        return Filtration(algebra, "averaging", partitions=(part, part))
    part = tuple(tuple(range(a, b)) for a, b in zip(algebra.offsets[:-1], algebra.offsets[1:]))
    return Filtration(algebra, "pinching", partitions=(part, part))


# ---------------------------------------------------------------- reports


@dataclass
class RatioReport:
    """Per-seed ``lhs / rhs`` ratios of one inequality with its verdict.

    ``constant`` is an asserted upper bound; ``band`` an asserted two-sided
    range for ``[ratio_lo, ratio]``.  Without either the ratio is reported
    and guarded only by the trend test.
    """

    name: str
    seeds: list = field(default_factory=list)
    dims: list = field(default_factory=list)
    modes: list = field(default_factory=list)
    lhs: list = field(default_factory=list)
    rhs: list = field(default_factory=list)
    ratio: list = field(default_factory=list)
    ratio_lo: list = field(default_factory=list)
    constant: float | None = None
    band: tuple | None = None
    tol: float = config.RATIO_TOL
    violations: int = 0
    trend: dict | None = None
    notes: str = ""
    reported_only: bool = False

    def add(self, spec, lhs, rhs, ratio_lo=None, lhs_lo=None):
        if not rhs > 0:
            if lhs <= 0:
                ratio = 1.0
            else:
                raise ZeroDivisionError(f"{self.name}: right-hand side vanishes")
        else:
            ratio = lhs / rhs
        self.seeds.append(spec.seed)
        self.dims.append(spec.dim)
        self.modes.append(spec.mode)
        self.lhs.append(float(lhs))
        self.rhs.append(float(rhs))
        self.ratio.append(float(ratio))
        if ratio_lo is None and lhs_lo is not None:
            ratio_lo = lhs_lo / rhs if rhs > 0 else 1.0
        self.ratio_lo.append(float(ratio if ratio_lo is None else ratio_lo))
        return self

    @property
    def asserted(self):
        return self.constant is not None or self.band is not None

    def failures(self):
        """Indices of rows that break the asserted constant or band."""
        bad = []
        for i, (lo, hi) in enumerate(zip(self.ratio_lo, self.ratio)):
            if self.constant is not None and hi > self.constant * (1 + self.tol):
                bad.append(i)
            elif self.band is not None and (lo < self.band[0] * (1 - self.tol)
                                            or hi > self.band[1] * (1 + self.tol)):
                bad.append(i)
        return bad

    @property
    def passed(self):
        if self.failures() or self.violations:
            return False
        return self.reported_only or self.trend is None or self.trend["passed"]

    def summary(self):
        r = np.asarray(self.ratio, dtype=float)
        if r.size == 0:
            return {"max": None, "min": None, "median": None, "count": 0}
        lo = np.asarray(self.ratio_lo, dtype=float)
        return {"max": float(r.max()), "min": float(lo.min()), "median": float(np.median(r)),
                "count": int(r.size)}

    def to_json(self):
        return {
            "name": self.name, "passed": self.passed, "asserted": self.asserted,
            "reported_only": self.reported_only,
            "constant": self.constant, "band": list(self.band) if self.band else None,
            "tol": self.tol, "violations": self.violations, "trend": self.trend,
            "summary": self.summary(), "notes": self.notes,
            "rows": [{"seed": s, "dim": d, "mode": m, "lhs": a, "rhs": b, "ratio": r, "ratio_lo": q}
                     for s, d, m, a, b, r, q in zip(self.seeds, self.dims, self.modes, self.lhs,
                                                    self.rhs, self.ratio, self.ratio_lo)],
        }

    @classmethod
    def merge(cls, reports):
        reports = list(reports)
        first = reports[0]
        out = cls(first.name, constant=first.constant, band=first.band, tol=first.tol,
                  notes=first.notes, reported_only=first.reported_only)
        for r in reports:
            if (r.constant, r.band) != (first.constant, first.band):
                raise ValueError(f"{first.name}: cannot merge reports with different assertions")
            for name in ("seeds", "dims", "modes", "lhs", "rhs", "ratio", "ratio_lo"):
                getattr(out, name).extend(getattr(r, name))
            out.violations += r.violations
        return out


def trend_test(report, alpha=config.TREND_ALPHA):
    """Sign test for growth of the ratio with dimension.

    Rows are grouped by mode and dimension; the k-th seed of one dimension is
    paired with the k-th seed of the next.  The guard fails only when the
    two-sided sign test rejects at ``alpha`` in the direction of growth and the
    per-dimension maxima increase strictly across every dimension.
    """
    groups, lows = {}, {}
    for m, d, r, q in zip(report.modes, report.dims, report.ratio, report.ratio_lo):
        groups.setdefault(m, {}).setdefault(d, []).append(r)
        lows.setdefault(m, {}).setdefault(d, []).append(q)
    out = {"alpha": alpha, "modes": {}, "passed": True}
    for m, by_dim in sorted(groups.items()):
        dims = sorted(by_dim)
        if len(dims) < 2:
            continue
        ups = downs = 0
        for a, b in zip(dims[:-1], dims[1:]):
            for u, v in zip(by_dim[a], by_dim[b]):
                if v > u * (1 + 1e-12):
                    ups += 1
                elif v < u * (1 - 1e-12):
                    downs += 1
        n = ups + downs
        pval = binomtest(ups, n, 0.5).pvalue if n else 1.0
        maxima = [max(by_dim[d]) for d in dims]
        monotone = all(b > a for a, b in zip(maxima[:-1], maxima[1:]))
        ok = not (pval < alpha and ups > downs and monotone)
        out["modes"][m] = {"dims": dims, "max_by_dim": maxima,
                           "max_lo_by_dim": [max(lows[m][d]) for d in dims],
                           "ups": ups, "downs": downs,
                           "p_value": float(pval), "passed": ok}
        out["passed"] = out["passed"] and ok
    return out


# ---------------------------------------------------------------- checks


def _sqrt2r(r):
    return math.sqrt(2.0 / r)


def check_k_closedness(inst, p=2.0, kind="martingale", grid=None, eps=config.EPSILON):
    """``sup_t upper/lower`` of the Hardy-couple K-curve; constant asserted at p = 2."""
    if not p > 0:
        raise ValueError("p must be positive")
    curve = inst.curve(HardyCouple(Lp(p)), kind, grid, eps)
    ratio = curve.ratio
    j = int(np.argmax(ratio))
    const = config.jones_constant(eps) if p == 2 else None
    rep = RatioReport(f"k_closedness[{kind},p={p:g}]", constant=const)
    rep.violations = curve.lower_violations
    if not np.isfinite(ratio[j]):
        rep.add(inst.spec, 1.0, 1.0)
    else:
        rep.add(inst.spec, float(curve.upper[j]), float(curve.lower[j]))
    return [rep]


def power_band(theta, gamma, grid_step, eps=config.EPSILON):
    """Range of ``(lower, upper)`` interpolation norms over the L_{r,gamma} norm.

    For ``f = mu(s_c)`` and ``1/r = (1 - theta)/2`` the lower curve satisfies
    ``(r/(2 gamma))^(1/gamma) ||f||_{r,gamma} <= ||K_ref||_{theta,gamma}`` and,
    by Hardy's inequality, ``||K_ref||_{theta,gamma} <= (C r/(2 gamma))^(1/gamma)
    ||f||_{r,gamma}``.  Between grid points the upper envelope exceeds the
    decomposition constant by at most ``sqrt(grid_step)``.
    """
    slack = config.jones_constant(eps) * math.sqrt(grid_step)
    if math.isinf(gamma):
        return 1.0, slack / math.sqrt(theta)
    r = 2.0 / (1.0 - theta)
    if gamma >= 2:
        c = theta ** (-gamma / 2)
    else:
        c = 2 ** ((1 - theta) * gamma / 2) / (1 - 2 ** (-theta * gamma / 2))
    lo = (r / (2 * gamma)) ** (1 / gamma)
    hi = slack * (c * r / (2 * gamma)) ** (1 / gamma)
    return lo, hi


GENERAL_BAND = (0.01, 100.0)
QUAD_SLACK = 2e-3


def interpolation_setup(family, theta=None, gamma=2.0):
    """``(couple, theta, rho, target space)`` for a family of interpolation identities."""
    if family in ("power", "bmo"):
        theta = 0.5 if theta is None else theta
        r = 2.0 / (1.0 - theta)
        endpoint = "bmo" if family == "bmo" else "h_inf"
        return HardyCouple(Lp(2.0), endpoint), theta, None, Lorentz(r, gamma)
    if family == "orlicz":
        theta = 1.0 / 3.0 if theta is None else theta
        phi = OrliczFunction("two_power", 1.0, 2.0)
        return (HardyCouple(Orlicz(phi)), theta, None,
                OrliczLorentz(theta_transform(phi, theta), gamma))
    if family == "gen_lorentz":
        phi = WeightFunction.power(0.4)
        rho = WeightFunction.power(0.5 if theta is None else theta)
        return (HardyCouple(GenLorentz(phi, 2.0)), None, rho,
                GenLorentz(compose_weight(phi, rho), gamma))
    raise ValueError(f"unknown interpolation family {family!r}")


def check_interpolation_identity(inst, family="power", theta=None, gamma=2.0, grid=None,
                                 eps=config.EPSILON):
    """Bracket of ``||x||_{(A0, A1)_{theta,gamma}}`` over the norm of the target space."""
    gamma = float(gamma)
    m = inst.martingale
    couple, theta, rho, target = interpolation_setup(family, theta, gamma)
    curve = inst.curve(couple, "martingale", grid, eps)
    lo, hi = real_interp_norm(curve, theta, gamma, rho=rho)
    rhs = target.norm(square_mu(m, "s_c"))
    tlabel = "rho" if theta is None else f"{theta:.4g}"
    name = f"interpolation[{family},theta={tlabel},gamma={gamma:g}]"
    if family == "power":
        step = float(np.exp(np.round(np.log(curve.t[1] / curve.t[0]), 9)))
        b = power_band(theta, gamma, step, eps)
        band = (b[0] * (1 - QUAD_SLACK), b[1] * (1 + QUAD_SLACK))
    elif family == "bmo":
        band = None
    else:
        band = GENERAL_BAND
    rep = RatioReport(name, band=band)
    if family == "bmo":
        rep.notes = "bmo endpoint: no certified lower curve; upper ratio reported"
        rep.reported_only = True
    rep.add(inst.spec, hi, rhs, lhs_lo=lo)
    return [rep]


def _positive_sum(ops):
    s = sum(ops)
    return (s + s.conj().T) / 2


def _measure(spec_or_phi, op, algebra, flavor):
    f = mu_positive(op, algebra)
    if flavor == "norm":
        return spec_or_phi.norm(f)
    return orlicz_modular(spec_or_phi, f)


def check_dual_doob(inst, space=None, direction="forward", flavor="norm", phi=None, terms=None):
    """Dual Doob ``||sum E_k x_k|| vs ||sum x_k||`` on positive sequences.

    ``terms`` replaces the generated sequence.
    """
    A, F = inst.algebra, inst.filtration
    seq = inst.positive_sequence("dual_doob") if terms is None else [A.check(a) for a in terms]
    for a in seq:
        if A.min_eigenvalue(a) < -1e-9 * max(1.0, A.opnorm(a)):
            raise ValueError("dual Doob needs positive operators")
    cond = _positive_sum(F.expectation(a, k) for k, a in enumerate(seq, 1))
    plain = _positive_sum(seq)
    if flavor == "norm":
        space = Lp(1.0) if space is None else space
        _check_dual_range(space, direction)
        meas, label = space, space_label(space)
    elif flavor == "phi_moment":
        if phi is None:
            phi = OrliczFunction("two_power", 1.0, 2.0) if direction == "forward" \
                else OrliczFunction("power", 0.5)
        meas, label = phi, f"Phi={phi_label(phi)}"
    else:
        raise ValueError("flavor must be 'norm' or 'phi_moment'")
    lhs_op, rhs_op = (cond, plain) if direction == "forward" else (plain, cond)
    lhs = _measure(meas, lhs_op, A, flavor)
    rhs = _measure(meas, rhs_op, A, flavor)
    exact = flavor == "norm" and direction == "forward" and isinstance(space, Lp) and space.p == 1
    rep = RatioReport(f"dual_doob[{direction},{flavor},{label}]",
                      band=(1.0, 1.0) if exact else None, tol=1e-10 if exact else config.RATIO_TOL)
    rep.add(inst.spec, lhs, rhs)
    return [rep]


def _check_dual_range(space, direction):
    if direction == "forward":
        ok = (isinstance(space, Lp) and 1 <= space.p < math.inf) or \
             (isinstance(space, Orlicz) and space.convex)
    elif direction == "reverse":
        ok = (isinstance(space, Lp) and 0 < space.p < 1) or \
             (isinstance(space, Orlicz) and space.phi.exponents[1] <= 1)
    else:
        raise ValueError("direction must be 'forward' or 'reverse'")
    if not ok:
        raise ValueError(f"space {space_label(space)} is outside the {direction} range")


def check_stein_lepingle_yor(inst, space=None, which="stein", flavor="norm", phi=None,
                             terms=None):
    """Stein ``(a_n) -> (E_n a_n)`` or Lepingle-Yor ``(xi_n) -> (E_{n-1} xi_n)``.

    ``terms`` replaces the generated sequence; for Lepingle-Yor it is projected
    to an adapted one first.
    """
    F = inst.filtration
    if which == "stein":
        space = Lp(2.0) if space is None else space
        if flavor == "norm" and not (isinstance(space, Lp) and 1 < space.p < math.inf):
            raise ValueError("Stein needs L_p with 1 < p < inf")
        src = inst.sequence("stein", adapted=False) if terms is None else \
            SequenceBundle(F, list(terms), adapted=False)
        image = [F.expectation(a, n) for n, a in enumerate(src.terms, 1)]
    elif which == "lepingle_yor":
        space = Lp(1.0) if space is None else space
        if terms is None:
            src = inst.sequence("lepingle_yor", adapted=True)
        else:
            src = SequenceBundle(F, [F.expectation(a, n) for n, a in enumerate(terms, 1)])
        if not src.adapted:
            raise ValueError("Lepingle-Yor needs an adapted sequence")
        image = [F.expectation(a, n - 1) for n, a in enumerate(src.terms, 1)]
    else:
        raise ValueError("which must be 'stein' or 'lepingle_yor'")
    img = SequenceBundle(F, image, adapted=False)
    f_img, f_src = square_mu(img, "calS_c"), square_mu(src, "calS_c")
    if flavor == "norm":
        lhs, rhs, label = space.norm(f_img), space.norm(f_src), space_label(space)
    elif flavor == "phi_moment":
        phi = OrliczFunction("two_power", 1.0, 2.0) if phi is None else phi
        lhs, rhs = orlicz_modular(phi, f_img), orlicz_modular(phi, f_src)
        label = f"Phi={phi_label(phi)}"
    else:
        raise ValueError("flavor must be 'norm' or 'phi_moment'")
    rep = RatioReport(f"{which}[{flavor},{label}]")
    rep.add(inst.spec, lhs, rhs)
    return [rep]


def _check_int_range(space, top, what):
    if isinstance(space, Lp):
        ok = 0 < space.p <= top
    elif isinstance(space, Orlicz):
        lo, hi = space.phi.exponents
        ok = hi <= top
    else:
        ok = False
    if not ok:
        raise ValueError(f"{what}: space {space_label(space)} is out of range")


def _splits(inst, x, count=6):
    """Splittings ``x = a + b``: the two trivial ones and random perturbations."""
    rng = inst.spec.rng("splits")
    out = [(x, np.zeros_like(x)), (np.zeros_like(x), x)]
    scale = math.sqrt(max(inst.algebra.trace(x.conj().T @ x).real, 1e-300) / inst.algebra.unit_trace)
    for _ in range(count):
        c = rng.uniform(0.0, 1.0)
        g = inst.gaussian(rng) * scale * rng.uniform(0.05, 1.0)
        a = c * x + g
        out.append((a, x - a))
    return out


def check_hardy_inequalities(inst, space=None, phi=None):
    """``||S_c||`` and ``||x||`` against ``||s_c||``, BG-1 over column/row splittings
    and, when ``phi`` is given, the Phi-moment form."""
    space = Lp(1.0) if space is None else space
    _check_int_range(space, 2.0, "Hardy comparisons")
    m, A, F = inst.martingale, inst.algebra, inst.filtration
    spec = inst.spec
    label = space_label(space)
    const = _sqrt2r(space.p) if isinstance(space, Lp) else None
    s_small = space.norm(square_mu(m, "s_c"))
    reps = []
    reps.append(RatioReport(f"hardy[S_c/s_c,{label}]", constant=const)
                .add(spec, space.norm(square_mu(m, "S_c")), s_small))
    reps.append(RatioReport(f"hardy[x/s_c,{label}]", constant=const)
                .add(spec, space.norm(mu(m.terminal, A)), s_small))
    # ||x||_E <= C (||S_c(a)||_E + ||S_r(b)||_E) over splittings x = a + b
    best = math.inf
    for a, b in _splits(inst, m.terminal):
        cost = hardy_norm(Martingale(F, a), "Hc", space) + hardy_norm(Martingale(F, b), "Hr", space)
        best = min(best, cost)
    reps.append(RatioReport(f"hardy[BG1,{label}]").add(spec, space.norm(mu(m.terminal, A)), best))
    if phi is None:
        return reps
    if phi.exponents[1] > 2:
        raise ValueError("Phi-moment comparison needs a 2-concave Phi")
    big = max(orlicz_modular(phi, square_mu(m, "S_c")), orlicz_modular(phi, mu(m.terminal, A)))
    reps.append(RatioReport(f"hardy[phi_moment,Phi={phi_label(phi)}]")
                .add(spec, big, orlicz_modular(phi, square_mu(m, "s_c"))))
    return reps


def davis_splittings(m, points=9, span=16.0):
    """Candidate splittings ``x = x_d + x_c`` cut by Cuculescu runs on S_c.

    With ``q_k`` from the adapted run on the partial column squares at level
    ``lam``, ``dx_k q_{k-1}`` are martingale differences; they form ``x_c`` and
    the rest forms ``x_d``.
    """
    F = m.filtration
    w = partial_squares(m, "S_c")
    top = square_mu(m, "S_c").sup
    x = m.terminal
    out = [(x, np.zeros_like(x)), (np.zeros_like(x), x)]
    if top <= 0:
        return out
    for fac in lambda_factors(points, span):
        run = cuculescu(w, (fac * top) ** 2, F, offset=0, check=False)
        q = run.projections
        xc = sum(d @ q[k - 1] for k, d in enumerate(m.differences, 1))
        out.append((x - xc, xc))
    return out


def check_davis_inclusions(inst, space=None):
    """``S_c`` against ``s_c`` and against the diagonal norm; Davis splittings reported."""
    space = Lp(1.0) if space is None else space
    _check_int_range(space, 2.0, "Davis inclusions")
    if isinstance(space, Lp) and space.p < 1:
        raise ValueError("Davis inclusions need a space between L_1 and L_2")
    if isinstance(space, Orlicz) and space.phi.exponents[0] < 1:
        raise ValueError("Davis inclusions need a space between L_1 and L_2")
    m, F, spec = inst.martingale, inst.filtration, inst.spec
    label = space_label(space)
    s_big = space.norm(square_mu(m, "S_c"))
    p2 = isinstance(space, Lp) and space.p == 2
    const_a = _sqrt2r(space.p) if isinstance(space, Lp) else None
    reps = [
        RatioReport(f"davis[a:S_c/s_c,{label}]", constant=const_a)
        .add(spec, s_big, space.norm(square_mu(m, "s_c"))),
        RatioReport(f"davis[b:S_c/h_d,{label}]", constant=1.0 if p2 else None)
        .add(spec, s_big, hardy_norm(m, "hd", space)),
    ]
    best = math.inf
    for xd, xc in davis_splittings(m):
        cost = hardy_norm(Martingale(F, xd), "hd", space) + \
            space.norm(square_mu(Martingale(F, xc), "s_c"))
        best = min(best, cost)
    split = RatioReport(f"davis[splitting,{label}]", reported_only=True,
                        notes="upper bound on the Davis decomposition cost; reported only")
    reps.append(split.add(spec, best, s_big))
    return reps


CHECKS = {
    "k_closedness": check_k_closedness,
    "interpolation": check_interpolation_identity,
    "dual_doob": check_dual_doob,
    "stein": lambda inst, **kw: check_stein_lepingle_yor(inst, which="stein", **kw),
    "lepingle_yor": lambda inst, **kw: check_stein_lepingle_yor(inst, which="lepingle_yor", **kw),
    "hardy": check_hardy_inequalities,
    "davis": check_davis_inclusions,
}

_SPACE_KEYS = ("space",)


def _check_params(entry):
    params = {k: v for k, v in entry.items() if k != "name"}
    for key in _SPACE_KEYS:
        if key in params and isinstance(params[key], dict):
            params[key] = space_from_json(params[key])
    if "phi" in params and isinstance(params["phi"], dict):
        params["phi"] = OrliczFunction.from_json(params["phi"])
    if "gamma" in params:
        params["gamma"] = float(params["gamma"])
    return params


def run_check(inst, entry):
    """Run one config entry ``{"name": ..., params}`` on an instance."""
    try:
        fn = CHECKS[entry["name"]]
    except KeyError:
        raise ValueError(f"unknown check {entry.get('name')!r}") from None
    return fn(inst, **_check_params(entry))


# ---------------------------------------------------------------- suites


@dataclass(frozen=True)
class SuiteConfig:
    """Seeds, corpus shape and the list of checks of a suite run."""

    seeds: tuple = (0,)
    dims: tuple = (4, 8, 16)
    levels: tuple = (2, 3, 4)
    modes: tuple = MODES
    filtrations: tuple = FILTRATIONS
    blocks: tuple = (1, 2)
    weighted: tuple = (False, True)
    checks: tuple = ()
    epsilon: float = config.EPSILON
    ratio_tol: float = config.RATIO_TOL
    trend_alpha: float = config.TREND_ALPHA

    @classmethod
    def from_json(cls, obj):
        obj = dict(obj)
        known = set(cls.__dataclass_fields__)
        extra = set(obj) - known
        if extra:
            raise ValueError(f"unknown config keys {sorted(extra)}")
        seeds = obj.get("seeds", [0])
        if isinstance(seeds, dict):
            seeds = range(int(seeds.get("start", 0)), int(seeds.get("start", 0)) + int(seeds["count"]))
        obj["seeds"] = tuple(int(s) for s in seeds)
        if isinstance(obj.get("weighted"), bool):
            obj["weighted"] = (obj["weighted"],)
        for key in ("dims", "levels", "modes", "filtrations", "blocks", "weighted"):
            if key in obj:
                obj[key] = tuple(obj[key])
        obj["checks"] = tuple(dict(c) for c in obj.get("checks", ()))
        for c in obj["checks"]:
            if c.get("name") not in CHECKS:
                raise ValueError(f"unknown check {c.get('name')!r}")
        cfg = cls(**obj)
        for m in cfg.modes:
            if m not in MODES:
                raise ValueError(f"unknown mode {m!r}")
        return cfg

    def to_json(self):
        out = asdict(self)
        out["checks"] = [dict(c) for c in self.checks]
        return out

    def corpus(self):
        """Instance specs in a fixed order: mode, dim, seed.

        The k-th seed cycles independently through levels, filtrations, block
        counts and weighting, so small seed sets still mix every variant.
        """
        out = []
        for mode in self.modes:
            for dim in self.dims:
                for i, seed in enumerate(self.seeds):
                    levels = self.levels[i % len(self.levels)]
                    weighted = self.weighted[i % len(self.weighted)]
                    filt, blocks = "pinching", 1
                    if mode == "noncommutative":
                        filt = self.filtrations[i % len(self.filtrations)]
                        if filt != "tensor":
                            blocks = self.blocks[i % len(self.blocks)]
                            if dim % blocks or dim // blocks < 2:
                                blocks = 1
                    out.append(InstanceSpec(dim=dim, levels=levels, mode=mode, filtration=filt,
                                            blocks=blocks, weighted=weighted, seed=seed))
        return out


def _apply_eps(entry, eps):
    if entry["name"] in ("k_closedness", "interpolation") and "eps" not in entry:
        return {**entry, "eps": eps}
    return entry


def _unit(args):
    spec, checks, eps = args
    inst = generate_instance(spec)
    out = []
    for entry in checks:
        out.extend(run_check(inst, _apply_eps(entry, eps)))
    return out


def run_suite(cfg):
    """Run every check over the corpus and return the report document."""
    if isinstance(cfg, dict):
        cfg = SuiteConfig.from_json(cfg)
    start = time.time()
    specs = cfg.corpus() if cfg.checks else []
    work = [(s, cfg.checks, cfg.epsilon) for s in specs]
    workers = config.threads()
    if workers > 1 and len(work) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_unit, work))
    else:
        results = [_unit(w) for w in work]
    by_name = {}
    for reps in results:
        for r in reps:
            by_name.setdefault(r.name, []).append(r)
    merged = []
    for name in sorted(by_name):
        rep = RatioReport.merge(by_name[name])
        if rep.tol == config.RATIO_TOL:
            rep.tol = cfg.ratio_tol
        if rep.constant is None:
            rep.trend = trend_test(rep, cfg.trend_alpha)
        merged.append(rep)
    return {
        "header": {"generated": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(start)),
                   "seconds": round(time.time() - start, 3)},
        "config": cfg.to_json(),
        "passed": all(r.passed for r in merged),
        "reports": [r.to_json() for r in merged],
    }


CSV_COLUMNS = ("check", "seed", "dim", "mode", "lhs", "rhs", "ratio", "ratio_lo", "constant",
               "band_lo", "band_hi", "passed")


def report_csv(report):
    """One RFC-4180 row per seed and check."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(CSV_COLUMNS)
    for rep in report["reports"]:
        band = rep["band"] or [None, None]
        for row in rep["rows"]:
            hi, lo = row["ratio"], row["ratio_lo"]
            ok = True
            if rep["constant"] is not None:
                ok = hi <= rep["constant"] * (1 + rep["tol"])
            elif rep["band"] is not None:
                ok = band[0] * (1 - rep["tol"]) <= lo and hi <= band[1] * (1 + rep["tol"])
            w.writerow([rep["name"], row["seed"], row["dim"], row["mode"], repr(row["lhs"]),
                        repr(row["rhs"]), repr(hi), repr(lo), _fmt(rep["constant"]),
                        _fmt(band[0]), _fmt(band[1]), "true" if ok else "false"])
    return buf.getvalue()


def _fmt(v):
    return "" if v is None else repr(float(v))


def summary_table(report):
    """Fixed width text summary of a report document."""
    lines = [f"{'check':58s} {'n':>4s} {'min':>10s} {'median':>10s} {'max':>10s} {'bound':>16s}  verdict"]
    for rep in report["reports"]:
        s = rep["summary"]
        if rep["constant"] is not None:
            bound = f"<= {rep['constant']:.6g}"
        elif rep["band"] is not None:
            bound = f"[{rep['band'][0]:.3g}, {rep['band'][1]:.3g}]"
        elif rep.get("reported_only"):
            bound = "reported"
        else:
            bound = "trend"
        fmt = (lambda v: f"{v:10.5g}" if v is not None else f"{'-':>10s}")
        lines.append(f"{rep['name'][:58]:58s} {s['count']:4d} {fmt(s['min'])} {fmt(s['median'])} "
                     f"{fmt(s['max'])} {bound:>16s}  {'pass' if rep['passed'] else 'FAIL'}")
    lines.append(f"overall: {'pass' if report['passed'] else 'FAIL'}")
    return "\n".join(lines) + "\n"
