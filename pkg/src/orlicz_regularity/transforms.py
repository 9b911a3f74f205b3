"""Derived Young functions: ``A_{n-1}``, the modulus kernel ``B`` and the
modulus of continuity, together with the integral criteria built on them.

For ``n >= 3`` the transform is the conjugate of
``F(t) = t^nu int_t^inf A~(r) / r^(1+nu) dr`` with ``nu = (n-1)/(n-2)``.
Pure powers go through a closed form; everything else is tabulated on a
log grid (cumulative Simpson in ``log r``) and conjugated through the
Fenchel equality ``A_{n-1}(f(s)) = s f(s) - F(s)``, ``f = F'``.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize

from .errors import DomainExceeded, InvariantViolation, PreconditionFailed
from .growth import delta2_check
from .numerics import (Evidence, IntegralVerdict, Mode, Outcome, PowerLogForm, get_config,
                       improper_integral)
from .young import CallableYoung, PiecewiseAffine, PowerLog, YoungFunction

GRID_PER_DECADE = 60
S_LOW = 1e-30
S_HIGH = 1e120
MODULUS_SAMPLES = 256
MODULUS_R_RANGE = (1e-8, 1.0)
TAIL_MIN_DECAY = 0.02


@dataclass(frozen=True)
class DimensionContext:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise InvariantViolation(f"dimension must be an integer >= 2, got {self.n}")

    @property
    def nu(self) -> float:
        """Exponent ``(n-1)/(n-2)`` used for ``n >= 3``."""
        return (self.n - 1) / (self.n - 2)


def _ctx(ctx) -> DimensionContext:
    return ctx if isinstance(ctx, DimensionContext) else DimensionContext(int(ctx))


@dataclass
class ModulusOfContinuity:
    B: YoungFunction
    omega: Callable
    asymptotic_label: Optional[str] = None
    samples: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def __call__(self, r):
        return self.omega(r)

    def to_dict(self):
        return {"asymptotic_label": self.asymptotic_label, "samples": [[r, w] for r, w in self.samples],
                "notes": self.notes}


def _generator(A):
    return getattr(A, "generator", None) if isinstance(A, PiecewiseAffine) else None


def _loglog_interp(x, xs, ys):
    """Interpolate positive data linearly in log-log coordinates."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.exp(np.interp(np.log(x), np.log(xs), np.log(ys), left=np.nan, right=np.nan))
    return out


def _tail_beyond(u, g):
    """``int_{u[-1]}^inf g du`` for a positive decaying tail.

    Exponential decay in ``u`` (a power of ``r``) is tried first, then a power
    of ``u`` (a power of ``log r``). Raises PreconditionFailed when neither
    tail is summable.
    """
    m = max(4, len(u) // 20)
    lg = np.log(g[-m:])
    slope = np.polyfit(u[-m:], lg, 1)[0]
    if slope < -TAIL_MIN_DECAY:
        return float(g[-1] / -slope)
    if u[-1] > 1:
        beta = -np.polyfit(np.log(u[-m:]), lg, 1)[0]
        if beta > 1 + TAIL_MIN_DECAY:
            return float(g[-1] * u[-1] / (beta - 1))
    raise PreconditionFailed("the integrand defining F does not decay; the transform is not finite")


def _reverse_cumulative(u, g):
    """``int_{u_i}^{u[-1]} g du`` for every grid point."""
    rev = integrate.cumulative_simpson(g[::-1], x=-u[::-1], initial=0.0)
    return rev[::-1]


# ---------------------------------------------------------------------------
# the A_{n-1} transform

def F_function(A: YoungFunction, ctx) -> Callable:
    """``F(t) = t^nu int_t^inf A~(r)/r^(1+nu) dr`` evaluated point by point
    with adaptive quadrature. Slow; used as an independent oracle."""
    ctx = _ctx(ctx)
    if ctx.n == 2:
        raise PreconditionFailed("F is only defined for n >= 3")
    At = A.conjugate()
    nu = ctx.nu

    def integrand(u):
        r = math.exp(u)
        return float(At._value_capped(np.array([r]))[0]) * math.exp(-nu * u)

    def F(t):
        lo = math.log(t)
        total, edge = 0.0, lo
        for _ in range(400):
            piece = integrate.quad(integrand, edge, edge + 2.0, epsabs=0, epsrel=1e-12, limit=200)[0]
            total += piece
            edge += 2.0
            if piece < 1e-15 * total:
                break
        return math.exp(nu * lo) * total

    return F


def sup_conjugate(F: Callable, t: float, lo: float = 1e-6, hi: float = 1e6, points: int = 121) -> float:
    """``sup_s (t s - F(s))`` by a log-grid scan refined with a bounded search."""
    s = np.logspace(math.log10(lo), math.log10(hi), points)
    vals = np.array([t * x - F(x) for x in s])
    i = int(np.argmax(vals))
    a, b = math.log(s[max(i - 1, 0)]), math.log(s[min(i + 1, len(s) - 1)])
    res = optimize.minimize_scalar(lambda u: -(t * math.exp(u) - F(math.exp(u))), bounds=(a, b),
                                   method="bounded", options={"xatol": 1e-14})
    return max(float(vals[i]), -float(res.fun))


def a_n_minus_1(A: YoungFunction, ctx) -> YoungFunction:
    """The Young function ``A_{n-1}``: ``A`` itself for ``n = 2``."""
    ctx = _ctx(ctx)
    if ctx.n == 2:
        return A
    v = condition_equiv2bis(A, ctx)
    if v.outcome == Outcome.DIVERGES:
        raise PreconditionFailed(f"int^inf (t/A(t))^(1/(n-2)) dt diverges for {A.label}; A_{ctx.n - 1} is not finite")
    if isinstance(A, PowerLog) and A.is_pure_power:
        return _pure_power_transform(A, ctx)
    return _tabulated_transform(A, ctx)


def _pure_power_transform(A: PowerLog, ctx: DimensionContext) -> PowerLog:
    At = A.conjugate()
    q, K = At.params.p, At.params.coef
    nu = ctx.nu
    F = PowerLog(q, coef=K / (nu - q))
    out = PowerLog(A.params.p, coef=F.conjugate().params.coef)
    out.label = f"A_{ctx.n - 1}[{A.label}] = {out.label}"
    return out


def _tabulated_transform(A: YoungFunction, ctx: DimensionContext) -> CallableYoung:
    nu = ctx.nu
    At = A.conjugate()
    top = min(S_HIGH, At.domain_cap / 2)
    if top <= S_LOW * 1e10:
        raise PreconditionFailed("the conjugate is finite only on a tiny interval")
    decades = math.log10(top / S_LOW)
    s = np.logspace(math.log10(S_LOW), math.log10(top), int(decades * GRID_PER_DECADE) + 1)
    u = np.log(s)
    Av = np.asarray(At._value_capped(s), dtype=float)
    if not np.all(np.isfinite(Av)):
        raise PreconditionFailed("the conjugate is not finite on the tabulation grid")
    g = Av * np.exp(-nu * u)
    pos = g > 0
    tail = _tail_beyond(u[pos], g[pos])
    I = _reverse_cumulative(u, g) + tail
    F = s ** nu * I
    f = (nu * F - Av) / s
    keep = (f > 0) & np.isfinite(f)
    s, F, f = s[keep], F[keep], f[keep]
    f = np.maximum.accumulate(f)
    strict = np.concatenate([[True], np.diff(f) > 0])
    s, F, f = s[strict], F[strict], f[strict]
    val = f * s - F
    good = val > 0
    s, f, val = s[good], f[good], val[good]
    if len(s) < 10:
        raise PreconditionFailed("tabulated transform degenerated")
    tmin, tmax = float(f[0]), float(f[-1])
    # power-law continuation below the table
    k0 = np.polyfit(np.log(f[:5]), np.log(val[:5]), 1)[0]

    def value(t):
        t = np.asarray(t, dtype=float)
        out = _loglog_interp(np.clip(t, tmin, tmax), f, val)
        low = (t < tmin) & (t > 0)
        out = np.where(low, val[0] * (np.maximum(t, 1e-300) / tmin) ** k0, out)
        return np.where(t > 0, out, 0.0)

    def density(t):
        t = np.asarray(t, dtype=float)
        out = _loglog_interp(np.clip(t, tmin, tmax), f, s)
        low = t < tmin
        return np.where(low, s[0] * (np.maximum(t, 1e-300) / tmin) ** (k0 - 1), out)

    out = CallableYoung(density, value, domain_cap=tmax, label=f"A_{ctx.n - 1}[{A.label}]")
    out.table = (f, val)
    return out


# ---------------------------------------------------------------------------
# integral criteria

def _capped_config(cap: float, lo: float = 1.0):
    cfg = get_config()
    if math.isfinite(cap):
        dec = int(math.floor(math.log10(cap / lo))) - 1
        if dec < cfg.decades_infinity:
            cfg = dataclasses.replace(cfg, decades_infinity=max(dec, 4))
    return cfg


def _tail_verdict(h: Callable, cap: float, label: str, form=None) -> IntegralVerdict:
    cfg = _capped_config(cap)

    def f(t):
        return np.asarray(h(np.asarray(t, dtype=float)), dtype=float)

    f.form = form
    v = improper_integral(f, 1.0, math.inf, Mode.AT_INFINITY, config=cfg, label=label)
    if math.isfinite(cap) and v.method == "numeric":
        v.notes.append(f"probed up to t = {10.0 ** cfg.decades_infinity:.3g} (domain cap {cap:.3g})")
    return v


def condition_equiv2bis(A: YoungFunction, ctx) -> IntegralVerdict:
    """``int^inf (t/A(t))^(1/(n-2)) dt < inf``; vacuous when ``n = 2``."""
    ctx = _ctx(ctx)
    label = "int^inf (t/A(t))^(1/(n-2)) dt"
    if ctx.n == 2:
        return IntegralVerdict(Outcome.CONVERGES, Evidence([], math.nan, 1.0), method="vacuous",
                               label=label, notes=["n = 2: the condition is not needed"])
    k = 1.0 / (ctx.n - 2)
    gen = _generator(A)
    if gen is not None and gen.n == ctx.n:
        from .counterexamples import _tail_ratio
        rho = _tail_ratio(gen.n, gen.alpha, gen.beta)
        return IntegralVerdict(Outcome.CONVERGES, Evidence([], math.nan, 1.0), method="certificate",
                               label=label, notes=[f"generated slopes: geometric series with ratio {rho!r} < 1"])
    form = None
    if isinstance(A, PowerLog):
        pr = A.params
        form = PowerLogForm((1 - pr.p) * k, -pr.alpha_log * k, pr.coef ** -k, Mode.AT_INFINITY, pr.c_shift)

    def h(t):
        with np.errstate(divide="ignore", over="ignore"):
            return (t / A._value_capped(t)) ** k

    return _tail_verdict(h, A.domain_cap, label, form)


def condition_iwaniec(A: YoungFunction, ctx) -> IntegralVerdict:
    """``int^inf A(t)/t^(n+1) dt``; Diverges is the continuity side."""
    ctx = _ctx(ctx)
    n = ctx.n
    label = f"int^inf A(t)/t^{n + 1} dt"
    gen = _generator(A)
    if gen is not None and gen.n == 2 and n == 2:
        from .counterexamples import certify_divergence
        return certify_divergence(A.spec, gen)
    form = None
    if isinstance(A, PowerLog):
        pr = A.params
        form = PowerLogForm(pr.p - n - 1, pr.alpha_log, pr.coef, Mode.AT_INFINITY, pr.c_shift)
    v = _tail_verdict(lambda t: A._value_capped(t) / t ** (n + 1), A.domain_cap, label, form)
    if gen is not None:
        v.notes.append("generated function truncated at its last knot; the verdict concerns the truncation")
    return v


def condition_ours(A: YoungFunction, ctx, An1: YoungFunction | None = None) -> IntegralVerdict:
    """``int^inf A_{n-1}(t)/t^(n+1) dt = inf`` is the continuity criterion."""
    ctx = _ctx(ctx)
    n = ctx.n
    label = f"int^inf A_{n - 1}(t)/t^{n + 1} dt"
    if n == 2:
        v = condition_iwaniec(A, ctx)
        v.label = label
        return v
    eq = condition_equiv2bis(A, ctx)
    if eq.outcome != Outcome.CONVERGES:
        raise PreconditionFailed(f"A_{n - 1} unavailable: equiv2bis verdict is {eq.outcome.value}")
    gen = _generator(A)
    if gen is not None and gen.n == n:
        from .counterexamples import certify_divergence
        v = certify_divergence(A.spec, gen)
        v.notes.append("equivalent to the continuity criterion under Delta_2")
        return v
    if isinstance(A, PowerLog):
        pr = A.params
        if pr.p > n - 1:
            power, log_power = pr.p - n - 1, pr.alpha_log
            note = "A_{n-1} is equivalent to A (index above n-1)"
        else:
            power, log_power = -2.0, pr.alpha_log + 2 - n
            note = "p = n-1: A_{n-1} ~ t^(n-1) log^(alpha+2-n) t"
        from .numerics import classify_power_log_integral
        outcome = classify_power_log_integral(power, log_power, Mode.AT_INFINITY)
        return IntegralVerdict(outcome, Evidence([], power, 1.0), method="symbolic",
                               value=math.inf if outcome == Outcome.DIVERGES else None,
                               label=label, notes=[note, f"integrand ~ t^{power:g} log^{log_power:g} t"])
    An1 = An1 or a_n_minus_1(A, ctx)
    return _tail_verdict(lambda t: An1._value_capped(t) / t ** (n + 1), An1.domain_cap, label)


def condition_condelta2(A: YoungFunction, ctx) -> IntegralVerdict:
    """Reformulation of the continuity criterion valid under Delta_2:
    ``int^inf (t/A)^(2/(n-2)) (int_t^inf (s/A)^(1/(n-2)) ds)^(-n) dt = inf``."""
    ctx = _ctx(ctx)
    n = ctx.n
    label = "int^inf (t/A)^(2/(n-2)) (int_t^inf (s/A)^(1/(n-2)) ds)^(-n) dt"
    if n < 3:
        raise PreconditionFailed("the Delta_2 reformulation needs n >= 3")
    if not delta2_check(A).holds:
        raise PreconditionFailed("A is not Delta_2 near infinity (on probe)")
    gen = _generator(A)
    if gen is not None and gen.n == n:
        from .counterexamples import certify_divergence
        return certify_divergence(A.spec, gen)
    if isinstance(A, PowerLog):
        pr = A.params
        if pr.p > n - 1:
            power, log_power = pr.p - n - 1, pr.alpha_log
        elif pr.alpha_log > n - 2:
            power, log_power = -2.0, 0.0
        else:
            raise PreconditionFailed("the inner integral diverges")
        from .numerics import classify_power_log_integral
        outcome = classify_power_log_integral(power, log_power, Mode.AT_INFINITY)
        return IntegralVerdict(outcome, Evidence([], power, 1.0), method="symbolic",
                               value=math.inf if outcome == Outcome.DIVERGES else None, label=label,
                               notes=[f"integrand ~ t^{power:g} log^{log_power:g} t"])
    k = 1.0 / (n - 2)
    top = min(1e60, A.domain_cap / 2)
    t = np.logspace(0, math.log10(top), int(math.log10(top) * GRID_PER_DECADE) + 1)
    u = np.log(t)
    g = (t / A._value_capped(t)) ** k * t
    inner = _reverse_cumulative(u, g) + _tail_beyond(u, g)
    h = (t / A._value_capped(t)) ** (2 * k) * inner ** (-n)
    return _tail_verdict(lambda x: _loglog_interp(x, t, h), t[-1] * 0.999, label)


# ---------------------------------------------------------------------------
# modulus of continuity

def _modulus_label(A: YoungFunction, n: int) -> Optional[str]:
    if not isinstance(A, PowerLog):
        return None
    p, a = A.params.p, A.params.alpha_log
    if p > n:
        s = f"r^{{1-{n}/{p:g}}}"
        return s + (f"*log^{{{-a:g}/{p:g}}}(1/r)" if a else "")
    if p == n and a > -1:
        return f"log^{{-({a:g}+1)/{n}}}(1/r)"
    if p == n and a == -1:
        return f"(log log)^{{-1/{n}}}(1/r)"
    return None


def modulus_of_continuity(A: YoungFunction, ctx, An1: YoungFunction | None = None,
                          r_range=MODULUS_R_RANGE, samples: int = MODULUS_SAMPLES,
                          ours: IntegralVerdict | None = None) -> ModulusOfContinuity:
    """``omega(r) = r B^{-1}(r^-n)`` with ``B(t) = t^n int_0^t A_{n-1}(s)/s^(1+n) ds``.

    On ``[0, 1]`` the function ``A_{n-1}`` is replaced by ``A_{n-1}(1) s^(n+1)``
    so the integral converges at 0; only the behaviour of ``omega`` near 0,
    which depends on ``A_{n-1}`` near infinity, is affected by ``A`` itself.
    """
    ctx = _ctx(ctx)
    n = ctx.n
    v = ours or condition_ours(A, ctx, An1)
    if v.outcome != Outcome.DIVERGES:
        raise PreconditionFailed(f"the continuity criterion is {v.outcome.value}, no modulus is available")
    An1 = An1 or a_n_minus_1(A, ctx)
    A1 = float(An1.eval(1.0))
    r_lo, r_hi = r_range
    target = r_lo ** -n
    cap = min(An1.domain_cap, 1e200)
    # extend the t grid until B reaches the largest requested level
    hi = 1e4
    while True:
        hi = min(hi, cap * (1 - 1e-9))
        t = np.logspace(0, math.log10(hi), max(50, int(math.log10(hi) * 100)) + 1)
        u = np.log(t)
        g = An1._value_capped(t) / t ** n
        J = A1 + integrate.cumulative_simpson(g, x=u, initial=0.0)
        Bv = t ** n * J
        if Bv[-1] >= target or hi >= cap * (1 - 1e-6):
            break
        hi = hi ** 2
    if Bv[-1] < target:
        raise DomainExceeded(f"B does not reach r^-n on the domain of A_{n - 1}")
    Bmin = A1  # B(1)

    def B_inv(y):
        y = np.asarray(y, dtype=float)
        inner = _loglog_interp(np.clip(y, Bmin, Bv[-1]), Bv, t)
        return np.where(y <= Bmin, (np.maximum(y, 0) / A1) ** (1.0 / (n + 1)), inner)

    def omega(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            out = r * B_inv(r ** -float(n))
        out = np.where(r > 0, out, 0.0)
        return out if out.ndim else float(out)

    def B_val(x):
        x = np.asarray(x, dtype=float)
        low = A1 * np.maximum(x, 0) ** (n + 1)
        return np.where(x <= 1, low, _loglog_interp(np.clip(x, 1, t[-1]), t, Bv))

    def B_dens(x):
        x = np.asarray(x, dtype=float)
        low = (n + 1) * A1 * np.maximum(x, 0) ** n
        xc = np.clip(x, 1, t[-1])
        gi = _loglog_interp(xc, t, np.maximum(g, 1e-300))
        Ji = _loglog_interp(xc, t, J)
        return np.where(x <= 1, low, n * xc ** (n - 1) * Ji + xc ** (n - 1) * gi)

    B = CallableYoung(B_dens, B_val, domain_cap=float(t[-1]), label=f"B[{A.label}, n={n}]")
    r = np.logspace(math.log10(r_lo), math.log10(r_hi), samples)
    w = omega(r)
    notes = ["A_{n-1} replaced by A_{n-1}(1) s^(n+1) on [0, 1]",
             "bounds hold up to the dimensional constant"]
    if np.any(np.diff(w) < -1e-12 * np.abs(w[1:])):
        raise InvariantViolation("sampled modulus is not non-decreasing")
    return ModulusOfContinuity(B, omega, _modulus_label(A, n), list(zip(r.tolist(), w.tolist())), notes)
