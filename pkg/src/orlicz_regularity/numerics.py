"""Improper integrals and Stieltjes sums with divergence verdicts.

Two tiers:

* integrands tagged with a :class:`PowerLogForm` are classified exactly by
  comparing exponents (numeric partial sums are still attached as evidence);
* anything else gets a heuristic numeric verdict built from per-decade
  increments. Such verdicts are never promoted to certainty: ``method`` is
  ``"numeric"`` and ``confidence`` stays below 1.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .errors import NonFinite, NonPositiveIntegrand, NotMonotone

_EXP_TOL = 1e-12


class Outcome(str, Enum):
    DIVERGES = "diverges"
    CONVERGES = "converges"
    INCONCLUSIVE = "inconclusive"


class Mode(str, Enum):
    AT_ZERO = "at_zero"
    AT_INFINITY = "at_infinity"


@dataclass(frozen=True)
class NumericConfig:
    divergence_threshold: float = 1e6
    divergence_increment: float = 1e-3
    tol_cauchy: float = 1e-8
    decades_infinity: int = 60
    decades_zero: int = 30
    panels_per_decade: int = 4
    nodes: int = 15
    # fitted decay rates within this margin of the borderline are inconclusive
    fit_margin: float = 0.05
    stieltjes_levels: int = 60
    stieltjes_base: float = 2.0
    stieltjes_s0: float = 1 / math.e
    stieltjes_subcells: int = 32
    monotone_tol: float = 1e-12


_config = NumericConfig()


def get_config() -> NumericConfig:
    return _config


def set_config(**overrides) -> NumericConfig:
    """Replace process-wide numeric defaults (used by the CLI ``--config``)."""
    global _config
    _config = dataclasses.replace(_config, **overrides)
    return _config


def reset_config() -> None:
    global _config
    _config = NumericConfig()


@dataclass(frozen=True)
class PowerLogForm:
    """``coef * x**power * L(x)**log_power`` with ``L(x) = log(shift + x)``
    near infinity or ``L(x) = log(1/x)`` near zero.

    Used both as an evaluable map and as the symbolic tag that lets verdicts
    be decided by exponent comparison.
    """

    power: float
    log_power: float = 0.0
    coef: float = 1.0
    at: Mode = Mode.AT_INFINITY
    shift: float = 0.0

    def log_factor(self, x):
        x = np.asarray(x, dtype=float)
        if self.at == Mode.AT_ZERO:
            return np.log(1.0 / x)
        return np.log(self.shift + x)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = self.coef * x ** self.power * self.log_factor(x) ** self.log_power
        return out if out.ndim else float(out)

    def label(self, var="t"):
        arg = f"1/{var}" if self.at == Mode.AT_ZERO else var
        lg = f"log^{{{self.log_power:g}}}({arg})" if self.log_power else ""
        pw = f"{var}^{{{self.power:g}}}" if self.power else ""
        body = "*".join(x for x in (pw, lg) if x) or "1"
        return body if self.coef == 1 else f"{self.coef:g}*{body}"


def classify_power_log_integral(power: float, log_power: float, at: Mode) -> Outcome:
    """Exact verdict for ``int x^power L(x)^log_power dx`` at the singular end."""
    if at == Mode.AT_INFINITY:
        if power < -1 - _EXP_TOL:
            return Outcome.CONVERGES
        if power > -1 + _EXP_TOL:
            return Outcome.DIVERGES
    else:
        if power > -1 + _EXP_TOL:
            return Outcome.CONVERGES
        if power < -1 - _EXP_TOL:
            return Outcome.DIVERGES
    return Outcome.CONVERGES if log_power < -1 - _EXP_TOL else Outcome.DIVERGES


@dataclass
class Evidence:
    partial_values: list = field(default_factory=list)
    fitted_tail_exponent: float = math.nan
    confidence: float = 0.0

    def to_dict(self):
        return {
            "partial_values": [[_num(a), _num(b)] for a, b in self.partial_values],
            "fitted_tail_exponent": _num(self.fitted_tail_exponent),
            "confidence": _num(self.confidence),
        }


def _num(x):
    x = float(x)
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass
class IntegralVerdict:
    outcome: Outcome
    evidence: Evidence = field(default_factory=Evidence)
    method: str = "numeric"
    value: Optional[float] = None
    label: str = ""
    notes: list = field(default_factory=list)

    @property
    def diverges(self):
        return self.outcome == Outcome.DIVERGES

    @property
    def converges(self):
        return self.outcome == Outcome.CONVERGES

    def to_dict(self):
        return {
            "label": self.label,
            "outcome": self.outcome.value,
            "method": self.method,
            "value": None if self.value is None else _num(self.value),
            "evidence": self.evidence.to_dict(),
            "notes": list(self.notes),
        }


def weakest(verdicts) -> IntegralVerdict:
    """Combine verdicts of a ``for every`` condition of divergence type.

    Any convergence refutes; any inconclusive blocks a positive answer.
    """
    verdicts = list(verdicts)
    for v in verdicts:
        if v.outcome == Outcome.CONVERGES:
            return v
    for v in verdicts:
        if v.outcome == Outcome.INCONCLUSIVE:
            return v
    return verdicts[-1]


# ---------------------------------------------------------------------------

def _gauss_panels(f, edges, nodes):
    """Integrate ``f`` over consecutive [edges[i], edges[i+1]] in log variable."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    lo = np.log(edges[:-1])[:, None]
    hi = np.log(edges[1:])[:, None]
    u = 0.5 * (hi - lo) * x[None, :] + 0.5 * (hi + lo)
    t = np.exp(u)
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.asarray(f(t.ravel()), dtype=float).reshape(t.shape)
    if np.any(np.isnan(vals)) or np.any(np.isinf(vals)):
        raise NonFinite("integrand produced a non-finite sample")
    if np.any(vals < 0):
        raise NonPositiveIntegrand(f"integrand negative at t={float(t[vals < 0][0])!r}")
    return (0.5 * (hi - lo)[:, 0]) * np.sum(w[None, :] * vals * t, axis=1)


def _decade_increments(f, start, direction, decades, cfg):
    per = cfg.panels_per_decade
    exps = np.arange(decades * per + 1) / per
    edges = start * 10.0 ** (direction * exps)
    if direction < 0:
        edges = edges[::-1]
    panels = _gauss_panels(f, edges, cfg.nodes)
    if direction < 0:
        panels = panels[::-1]
    return panels.reshape(decades, per).sum(axis=1), start * 10.0 ** (direction * np.arange(1, decades + 1))


def _numeric_verdict(increments, limits, base_value, cfg, decades_scale=1.0):
    """Verdict from per-step increments; ``decades_scale`` = decades per step."""
    partial = base_value + np.cumsum(increments)
    pv = list(zip(limits.tolist(), partial.tolist()))
    n = len(increments)
    half = increments[n // 2:]
    ks = np.arange(n)[n // 2:] * decades_scale
    positive = half > 0
    if positive.sum() >= 3:
        slope, icept = np.polyfit(ks[positive], np.log10(half[positive]), 1)
        resid = np.log10(half[positive]) - (slope * ks[positive] + icept)
        rms = float(np.sqrt(np.mean(resid ** 2)))
    else:
        slope, rms = -math.inf, 0.0
    exponent = 1.0 - slope
    conf_fit = float(max(0.0, min(0.99, 1.0 - rms)))
    ev = Evidence(pv, exponent, conf_fit)
    tail3 = float(np.sum(increments[-3:]))
    if partial[-1] > cfg.divergence_threshold and np.all(increments[-3:] >= cfg.divergence_increment):
        ev.confidence = 0.99
        return IntegralVerdict(Outcome.DIVERGES, ev, value=math.inf)
    if tail3 < cfg.tol_cauchy:
        ev.confidence = 0.99
        return IntegralVerdict(Outcome.CONVERGES, ev, value=float(partial[-1]))
    sustained = half[-1] >= (1 - cfg.fit_margin) * half[0]
    if exponent <= 1 + cfg.fit_margin and sustained and np.all(half >= cfg.divergence_increment * decades_scale):
        return IntegralVerdict(Outcome.DIVERGES, ev, value=math.inf)
    if exponent > 1 + cfg.fit_margin and math.isfinite(slope) and rms < 0.1:
        r = 10.0 ** (slope * decades_scale)
        tail = float(increments[-1] * r / (1 - r))
        return IntegralVerdict(Outcome.CONVERGES, ev, value=float(partial[-1]) + tail)
    return IntegralVerdict(Outcome.INCONCLUSIVE, ev, value=None)


def improper_integral(f: Callable, lo: float, hi: float, mode: Mode | str,
                      config: NumericConfig | None = None, label: str = "") -> IntegralVerdict:
    """Decide whether ``int_lo^hi f`` is finite at the singular endpoint.

    ``mode`` names the singular endpoint. The regular part (``[lo, 1]`` when
    integrating to infinity from 0, say) is handled by the first panels.
    """
    cfg = config or _config
    mode = Mode(mode)
    form = f if isinstance(f, PowerLogForm) else getattr(f, "form", None)
    if mode == Mode.AT_INFINITY:
        start = lo if lo > 0 else 1.0
        base = 0.0
        if lo <= 0:
            base = float(np.sum(_gauss_panels(f, 10.0 ** np.linspace(-12, 0, 49), cfg.nodes)))
        inc, lim = _decade_increments(f, start, +1, cfg.decades_infinity, cfg)
    else:
        start = hi
        inc, lim = _decade_increments(f, start, -1, cfg.decades_zero, cfg)
        base = 0.0
    verdict = _numeric_verdict(inc, lim, base, cfg)
    verdict.label = label
    if form is not None and form.at == mode:
        exact = classify_power_log_integral(form.power, form.log_power, mode)
        verdict.method = "symbolic"
        verdict.evidence.confidence = 1.0
        if exact != verdict.outcome:
            verdict.notes.append(f"numeric tier said {verdict.outcome.value}; exponent comparison overrides")
        verdict.outcome = exact
        if exact == Outcome.DIVERGES:
            verdict.value = math.inf
        elif verdict.value is None or math.isinf(verdict.value):
            verdict.value = None
    return verdict


def stieltjes_integral(g: Callable, V: Callable, s0: float | None = None,
                       config: NumericConfig | None = None, label: str = "") -> IntegralVerdict:
    """Riemann-Stieltjes sums of ``int_0^{s0} g dV`` on geometric partitions.

    ``V`` must be non-decreasing; sums use the geometric midpoint of every
    cell. When ``g`` and ``V`` are both :class:`PowerLogForm` at zero the
    verdict is decided by exponent comparison.
    """
    cfg = config or _config
    s0 = cfg.stieltjes_s0 if s0 is None else s0
    levels, sub = cfg.stieltjes_levels, cfg.stieltjes_subcells
    s = s0 * cfg.stieltjes_base ** (-np.arange(levels * sub + 1, dtype=float) / sub)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        v = np.asarray(V(s), dtype=float)
        mid = np.sqrt(s[:-1] * s[1:])
        gv = np.asarray(g(mid), dtype=float)
    if np.any(~np.isfinite(v)) and not np.all(np.isfinite(v[:-1])):
        raise NonFinite("V is not finite on the probe grid")
    dv = v[:-1] - v[1:]
    scale = np.maximum(np.abs(v[:-1]), np.abs(v[1:]))
    if np.any(dv < -cfg.monotone_tol * scale):
        i = int(np.nonzero(dv < -cfg.monotone_tol * scale)[0][0])
        raise NotMonotone(f"V decreases between s={s[i + 1]!r} and s={s[i]!r}")
    if np.any(gv < 0) or np.any(~np.isfinite(gv)):
        raise NonPositiveIntegrand("g must be finite and nonnegative")
    inc = (gv * np.maximum(dv, 0.0)).reshape(levels, sub).sum(axis=1)
    decades_per_level = math.log10(cfg.stieltjes_base)
    verdict = _numeric_verdict(inc, s[sub::sub], 0.0, cfg, decades_scale=decades_per_level)
    verdict.label = label
    if isinstance(g, PowerLogForm) and isinstance(V, PowerLogForm) and g.at == V.at == Mode.AT_ZERO:
        power, log_power = stieltjes_exponents(g, V)
        exact = classify_power_log_integral(power, log_power, Mode.AT_ZERO)
        verdict.method = "symbolic"
        verdict.evidence.confidence = 1.0
        verdict.outcome = exact
        verdict.value = math.inf if exact == Outcome.DIVERGES else (verdict.value if verdict.value is not None and math.isfinite(verdict.value) else None)
    return verdict


def stieltjes_exponents(g: PowerLogForm, V: PowerLogForm):
    """Leading exponents of ``g(s) V'(s)`` near 0 for power-log forms.

    With ``V = k s^c L^d`` and ``L = log(1/s)``, ``V' = k s^(c-1) L^(d-1) (c L - d)``.
    """
    c, d = V.power, V.log_power
    if abs(c) > _EXP_TOL:
        return g.power + c - 1, g.log_power + d
    return g.power - 1, g.log_power + d - 1
