"""Capacity-side objects: weights sigma, the gauge ``Psi = sigma A_{n-1}``,
the kernel ``I_Psi``, the capacity upper bound obtained from a test density,
Hausdorff gauge normalization and the Stieltjes admissibility test for
Hausdorff gauges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate
from scipy.special import gamma as gamma_fn

from .errors import (Febbraio1Violated, InvariantViolation, NotIncreasing, PreconditionFailed,
                     SingularEvaluation, ZeroPotential)
from .growth import delta2_check
from .numerics import (Evidence, IntegralVerdict, Mode, Outcome, PowerLogForm, get_config,
                       classify_power_log_integral, improper_integral,
                       stieltjes_exponents, stieltjes_integral, weakest)
from .transforms import DimensionContext, _ctx, a_n_minus_1
from .young import PowerLog, YoungFunction

LAMBDA_PROBE = (0.25, 0.5, 1.0, 2.0, 4.0)
GAUGE_GRID = np.logspace(-20, 0, 801)
FEBBRAIO1_DECAY = 0.5


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / gamma_fn(n / 2 + 1)


def make_sigma(spec: str | float | None = None) -> PowerLogForm:
    """Weights of the form ``log(e + t)^k``: ``"1"``, ``"log"``, ``"log^k"``."""
    if spec is None:
        k = 0.0
    elif isinstance(spec, (int, float)):
        k = float(spec)
    else:
        s = str(spec).strip().replace(" ", "")
        if s in ("1", "one", "log^0"):
            k = 0.0
        elif s == "log":
            k = 1.0
        elif s.startswith("log^"):
            k = float(s[4:])
        else:
            raise ValueError(f"unknown sigma {spec!r}; use 1, log or log^k")
    return PowerLogForm(0.0, k, 1.0, Mode.AT_INFINITY, math.e)


def _sigma_label(sigma) -> str:
    if isinstance(sigma, PowerLogForm) and sigma.power == 0:
        k = sigma.log_power
        return "1" if k == 0 else ("log(e+t)" if k == 1 else f"log^{k:g}(e+t)")
    return getattr(sigma, "label", "sigma") if isinstance(getattr(sigma, "label", None), str) else "sigma"


@dataclass
class CapacityGauge:
    """``Psi(t) = sigma(t) A_{n-1}(t)``."""

    sigma: Callable
    psi: Callable
    label: str
    An1: Optional[YoungFunction] = None
    asymptotic: Optional[tuple] = None  # (P, kappa): Psi ~ t^P log^kappa t
    admissibility: Optional[IntegralVerdict] = None

    def __call__(self, t):
        return self.psi(t)

    @classmethod
    def from_callable(cls, psi: Callable, label: str = "Psi", asymptotic=None):
        return cls(sigma=make_sigma(None), psi=psi, label=label, asymptotic=asymptotic)

    def to_dict(self, grid=None):
        t = np.logspace(0, 12, 25) if grid is None else np.asarray(grid, dtype=float)
        with np.errstate(over="ignore"):
            v = np.asarray(self.psi(t), dtype=float)
        return {"label": self.label, "sigma": _sigma_label(self.sigma),
                "asymptotic": None if self.asymptotic is None else {"power": self.asymptotic[0], "log_power": self.asymptotic[1]},
                "admissibility": None if self.admissibility is None else self.admissibility.to_dict(),
                "samples": [[float(a), float(b) if math.isfinite(b) else "inf"] for a, b in zip(t, v)]}


def _an1_asymptotic(A: YoungFunction, n: int):
    if not isinstance(A, PowerLog):
        return None
    p, a = A.params.p, A.params.alpha_log
    if n == 2 or p > n - 1:
        return (p, a)
    return (float(n - 1), a + 2 - n)


def sigma_admissible(sigma: Callable, An1: YoungFunction, lambda_probe: Sequence[float] = LAMBDA_PROBE) -> IntegralVerdict:
    """Divergence of ``int^inf A_{n-1}(l t)/(t sigma(t) A_{n-1}(t)) dt`` for the
    probed ``l``; under Delta_2 the simpler ``int^inf dt/(t sigma(t))``."""
    if delta2_check(An1).holds:
        form = None
        if isinstance(sigma, PowerLogForm) and sigma.at == Mode.AT_INFINITY:
            form = PowerLogForm(-1 - sigma.power, -sigma.log_power, 1 / sigma.coef, Mode.AT_INFINITY, sigma.shift)

        def h(t):
            return 1.0 / (t * np.asarray(sigma(t), dtype=float))

        h.form = form
        v = improper_integral(h, 1.0, math.inf, Mode.AT_INFINITY, label="int^inf dt/(t sigma(t))")
        v.notes.append("A_{n-1} is Delta_2 near infinity: the lambda quantifier drops out")
        return v
    cap = An1.domain_cap
    cfg = get_config()
    if math.isfinite(cap):
        import dataclasses
        top = int(math.floor(math.log10(cap / max(lambda_probe))))
        if top < 2:
            return IntegralVerdict(Outcome.INCONCLUSIVE, Evidence([], math.nan, 0.0),
                                   label="int^inf A(l t)/(t sigma A(t)) dt",
                                   notes=[f"domain cap {cap:g} leaves fewer than two decades to probe"])
        cfg = dataclasses.replace(cfg, decades_infinity=min(cfg.decades_infinity, top))
    out = []
    for lam in lambda_probe:
        def h(t, lam=lam):
            return An1._value_capped(lam * t) / (t * np.asarray(sigma(t), dtype=float) * An1._value_capped(t))
        out.append(improper_integral(h, 1.0, math.inf, Mode.AT_INFINITY, config=cfg,
                                     label=f"int^inf A(l t)/(t sigma A(t)) dt, l={lam:g}"))
    v = weakest(out)
    v.notes.append(f"'for every lambda > 0' relaxed to lambda in {list(lambda_probe)}")
    return v


def capacity_gauge(A: YoungFunction, ctx, sigma=None, An1: YoungFunction | None = None) -> CapacityGauge:
    ctx = _ctx(ctx)
    sigma = make_sigma(sigma) if not callable(sigma) or sigma is None else sigma
    An1 = An1 or a_n_minus_1(A, ctx)
    asym = _an1_asymptotic(A, ctx.n)
    if asym is not None and isinstance(sigma, PowerLogForm) and sigma.power == 0:
        asym = (asym[0], asym[1] + sigma.log_power)
    elif not isinstance(sigma, PowerLogForm):
        asym = None

    def psi(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            return np.asarray(sigma(t), dtype=float) * An1._value_capped(t)

    sl = _sigma_label(sigma)
    label = f"A_{ctx.n - 1}" if sl == "1" else f"{sl}*A_{ctx.n - 1}"
    return CapacityGauge(sigma, psi, label, An1, asym, sigma_admissible(sigma, An1))


# ---------------------------------------------------------------------------
# densities and potentials

@dataclass
class DiscreteDensity:
    """Atoms (or grid cells with ``cell_volume``) or a radial profile about ``center``."""

    points: Optional[np.ndarray] = None
    weights: Optional[np.ndarray] = None
    cell_volume: Optional[float] = None
    radial_profile: Optional[Callable] = None
    radius: Optional[float] = None
    center: Optional[np.ndarray] = None
    n: Optional[int] = None

    def __post_init__(self):
        if self.radial_profile is not None:
            if self.radius is None or self.radius <= 0 or self.n is None:
                raise InvariantViolation("radial densities need a positive radius and a dimension")
            self.center = np.zeros(self.n) if self.center is None else np.asarray(self.center, dtype=float)
            return
        self.points = np.atleast_2d(np.asarray(self.points if self.points is not None else np.zeros((0, self.n or 1)), dtype=float))
        w = np.ones(len(self.points)) if self.weights is None else np.asarray(self.weights, dtype=float)
        if self.cell_volume is not None:
            w = w * self.cell_volume
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise InvariantViolation("weights must be finite and non-negative")
        self.weights = w
        self.n = self.points.shape[1]

    @classmethod
    def uniform_ball(cls, n: int, R: float, density: float = 1.0, center=None):
        return cls(radial_profile=lambda r: density + 0 * r, radius=R, n=n, center=center)

    def mass(self) -> float:
        if self.radial_profile is not None:
            n = self.n
            f = lambda r: self.radial_profile(r) * r ** (n - 1)
            return n * unit_ball_volume(n) * integrate.quad(f, 0, self.radius)[0]
        return float(self.weights.sum())

    def scaled(self, k: float) -> "DiscreteDensity":
        if self.radial_profile is not None:
            prof = self.radial_profile
            return DiscreteDensity(radial_profile=lambda r: k * prof(r), radius=self.radius, n=self.n, center=self.center)
        return DiscreteDensity(points=self.points.copy(), weights=k * self.weights, n=self.n)


def kernel_potential(f: DiscreteDensity, x, psi: Callable) -> float:
    """``I_Psi f(x) = int f(y) / (|x-y|^n Psi(1/|x-y|)) dy``."""
    x = np.asarray(x, dtype=float)
    n = f.n
    if f.radial_profile is not None:
        if not np.allclose(x, f.center):
            raise PreconditionFailed("radial densities are evaluated at their center only")
        prof = f.radial_profile

        def g(u):  # r = e^u
            r = math.exp(u)
            return float(prof(r)) * r ** n / (r ** n * float(psi(1.0 / r)))

        lo = math.log(f.radius) - 80.0
        edges = np.linspace(lo, math.log(f.radius), 81)
        total = sum(integrate.quad(g, a, b, epsabs=0, epsrel=1e-12, limit=200)[0] for a, b in zip(edges[:-1], edges[1:]))
        return n * unit_ball_volume(n) * total
    if len(f.weights) == 0:
        return 0.0
    d = np.linalg.norm(f.points - x, axis=1)
    pos = f.weights > 0
    if np.any((d == 0) & pos):
        raise SingularEvaluation("evaluation point coincides with an atom of positive weight")
    d, w = d[pos], f.weights[pos]
    if d.size == 0:
        return 0.0
    return float(np.sum(w / (d ** n * np.asarray(psi(1.0 / d), dtype=float))))


def capacity_upper_bound(E, psi: Callable, f: DiscreteDensity) -> float:
    """``mass(f) / min_E I_Psi f``, an upper bound for the capacity of ``E``."""
    E = np.atleast_2d(np.asarray(E, dtype=float))
    lam = min(kernel_potential(f, x, psi) for x in E)
    if not lam > 0:
        raise ZeroPotential("the potential vanishes somewhere on E")
    return f.mass() / lam


# ---------------------------------------------------------------------------
# Hausdorff gauges

@dataclass
class HausdorffGauge:
    h: Callable
    normalized: bool = False
    label: str = "h"
    degenerate: bool = False
    form: Optional[PowerLogForm] = None
    notes: list = field(default_factory=list)

    def __call__(self, s):
        return self.h(s)

    def to_dict(self):
        return {"label": self.label, "normalized": self.normalized, "degenerate": self.degenerate,
                "notes": self.notes}


def hausdorff_power_log(power: float, log_power: float) -> HausdorffGauge:
    """``h(s) = s^power log^log_power(1/s)``."""
    form = PowerLogForm(power, log_power, 1.0, Mode.AT_ZERO)
    return HausdorffGauge(form, False, form.label("s"), False, form)


def normalize_gauge(h: Callable, ctx, s0: float = 1.0, grid=None) -> HausdorffGauge:
    """Replace ``h`` by ``r^n inf_{(0, r]} h(s)/s^n`` so ``h/r^n`` is non-increasing.

    The infimum runs over the probe grid below ``r``; the result never
    exceeds ``h`` and leaves gauges that already qualify untouched.
    """
    n = _ctx(ctx).n
    r = (GAUGE_GRID * s0) if grid is None else np.asarray(grid, dtype=float)
    hv = np.asarray(h(r), dtype=float)
    if np.any(np.diff(hv) <= 0):
        raise NotIncreasing("h is not increasing on the probe grid")
    ratio = hv / r ** n
    run = np.minimum.accumulate(ratio)
    hbar = r ** n * run
    k = max(10, len(r) // 7)
    slope = np.polyfit(np.log(r[:k]), np.log(ratio[:k]), 1)[0]
    degenerate = bool(slope > 0.05 or ratio[0] < 1e-12 * ratio[-1])
    unchanged = bool(np.allclose(hbar, hv, rtol=1e-12, atol=0))
    form = getattr(h, "form", h if isinstance(h, PowerLogForm) else None)

    def hb(s):
        s = np.asarray(s, dtype=float)
        out = np.exp(np.interp(np.log(np.maximum(s, 1e-300)), np.log(r), np.log(hbar)))
        # the exact infimum never exceeds h(s); log-log interpolation of a convex piece could
        out = np.minimum(out, np.asarray(h(np.maximum(s, 1e-300)), dtype=float))
        return np.where(s > 0, out, 0.0)

    notes = ["liminf h(r)/r^n = 0: every set is h-null"] if degenerate else []
    label = getattr(h, "label", "h")
    label = label("s") if callable(label) else label
    return HausdorffGauge(h if unchanged else hb, True, label, degenerate,
                          form if unchanged else None, notes)


def check_febbraio1(psi: Callable, n: int, s=None) -> np.ndarray:
    """``s -> s^n Psi(1/s)`` must be non-decreasing and decay toward 0."""
    cfg = get_config()
    if s is None:
        levels, sub = cfg.stieltjes_levels, cfg.stieltjes_subcells
        s = cfg.stieltjes_s0 * cfg.stieltjes_base ** (-np.arange(levels * sub + 1, dtype=float) / sub)
    s = np.sort(np.asarray(s, dtype=float))
    with np.errstate(over="ignore"):
        w = s ** n * np.asarray(psi(1.0 / s), dtype=float)
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise Febbraio1Violated("s^n Psi(1/s) is not finite and positive on the probe grid")
    if np.any(np.diff(w) < -1e-9 * w[1:]):
        raise Febbraio1Violated("s^n Psi(1/s) decreases somewhere on the probe grid")
    if w[0] > FEBBRAIO1_DECAY * w[-1]:
        raise Febbraio1Violated("s^n Psi(1/s) does not decay toward 0 on the probe grid")
    return w


def hausdorff_admissible(h, psi: CapacityGauge, ctx) -> IntegralVerdict:
    """``int_0 h(s) d(-1/(s^n Psi(1/s))) < inf``: Converges means the gauge is admissible."""
    n = _ctx(ctx).n
    check_febbraio1(psi, n)
    g = h.form if isinstance(h, HausdorffGauge) and h.form is not None else (h.h if isinstance(h, HausdorffGauge) else h)
    asym = getattr(psi, "asymptotic", None)
    if isinstance(g, PowerLogForm) and asym is not None:
        P, kappa = asym
        V = PowerLogForm(P - n, -kappa, -1.0, Mode.AT_ZERO)
        if not (P < n or (P == n and kappa < 0)):
            raise Febbraio1Violated("the asymptotic form of s^n Psi(1/s) does not decay at 0")
        Vn = lambda s: -1.0 / (s ** n * np.asarray(psi(1.0 / s), dtype=float))
        v = stieltjes_integral(g, Vn, label="int_0 h d(-1/(s^n Psi(1/s)))")
        numeric = v.outcome
        power, log_power = stieltjes_exponents(g, V)
        v.outcome = classify_power_log_integral(power, log_power, Mode.AT_ZERO)
        v.method = "symbolic"
        v.evidence.confidence = 1.0
        if v.outcome == Outcome.DIVERGES:
            v.value = math.inf
        v.notes.append(f"Psi ~ t^{P:g} log^{kappa:g} t; integrand ~ s^{power:g} log^{log_power:g}(1/s); "
                       f"numeric tier said {numeric.value}")
        return v

    def V(s):
        s = np.asarray(s, dtype=float)
        with np.errstate(over="ignore"):
            return -1.0 / (s ** n * np.asarray(psi(1.0 / s), dtype=float))

    return stieltjes_integral(g, V, label="int_0 h d(-1/(s^n Psi(1/s)))")
