"""Growth conditions near infinity: Delta_2, nabla_2, lower Boyd index and
domination.

"Near infinity" means: on a log-spaced probe grid beyond some rung of the
ladder 1, 10, ..., 1e8. Symbolic answers are used for the power-log family and
for generated piecewise-affine functions; everything else is probed, and a
probe that exhausts its ladders reports "fails on probe", which is not a
mathematical negative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import Unstable
from .young import PiecewiseAffine, PowerLog, YoungFunction

T0_LADDER = tuple(10.0 ** k for k in range(9))
EPS_LADDER = tuple(2.0 ** -j for j in range(21))
C_LADDER = tuple(2.0 ** j for j in range(21))
LAMBDA_LADDER = (2.0, 4.0, 8.0, 16.0, 32.0)
PROBE_TOP = 1e12
DOMINATION_TOP = 1e16
POINTS_PER_DECADE = 40
BOYD_SPREAD = 0.05


@dataclass
class Delta2Result:
    holds: bool
    C: Optional[float] = None
    t0: Optional[float] = None
    method: str = "numeric"
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {"holds": self.holds, "C": self.C, "t0": self.t0, "method": self.method, "notes": self.notes}


@dataclass
class Nabla2Result:
    holds: bool
    epsilon: Optional[float] = None
    t0: Optional[float] = None
    C: Optional[float] = None
    method: str = "numeric"
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {"holds": self.holds, "C": self.C, "t0": self.t0, "epsilon": self.epsilon,
                "method": self.method, "notes": self.notes}


@dataclass
class DominationResult:
    dominates: bool
    C: Optional[float] = None
    t0: Optional[float] = None
    method: str = "numeric"

    def __bool__(self):
        return self.dominates

    def to_dict(self):
        return {"dominates": self.dominates, "C": self.C, "t0": self.t0, "method": self.method}


@dataclass
class GrowthReport:
    delta2: Delta2Result
    nabla2: Nabla2Result
    boyd_lower: Optional[float]
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {"delta2": self.delta2.to_dict(), "nabla2": self.nabla2.to_dict(),
                "boyd_lower": self.boyd_lower, "notes": self.notes}


def _top(A: YoungFunction, factor: float = 2.0, top: float = PROBE_TOP) -> float:
    return min(top, A.domain_cap / factor * (1 - 1e-12))


def probe_grid(lo: float, hi: float, per_decade: int = POINTS_PER_DECADE) -> np.ndarray:
    if hi <= lo:
        return np.array([lo])
    n = max(2, int(math.ceil(math.log10(hi / lo) * per_decade)) + 1)
    return np.logspace(math.log10(lo), math.log10(hi), n)


def _finite_ratio(num, den):
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        r = num / den
    return r


# ---------------------------------------------------------------------------

def delta2_check(A: YoungFunction) -> Delta2Result:
    """Does ``A(2t) <= C A(t)`` hold near infinity?"""
    if isinstance(A, PowerLog):
        pr = A.params
        C = 2.0 ** pr.p * max(1.0, (1 + math.log(2) / math.log(pr.c_shift)) ** pr.alpha_log)
        return Delta2Result(True, max(C, 2 * (1 + 1e-9)), 0.0, "symbolic",
                            ["power-log: A(2t)/A(t) = 2^p (log(c+2t)/log(c+t))^alpha"])
    gen = getattr(A, "generator", None)
    if isinstance(A, PiecewiseAffine) and gen is not None:
        from .counterexamples import delta2_constant
        c = delta2_constant(gen)
        return Delta2Result(True, 2 * c, 0.0, "symbolic",
                            ["generated piecewise: a(2t) <= c a(t) with the closed-form c, hence A(2t) <= 2c A(t)"])
    return _delta2_numeric(A)


def _delta2_numeric(A: YoungFunction) -> Delta2Result:
    top = _top(A)
    note = f"probed t in [t0, {top:.3g}], {POINTS_PER_DECADE} points per decade"
    for t0 in T0_LADDER:
        if t0 * 100 > top:
            break
        t = probe_grid(t0, top)
        with np.errstate(over="ignore"):
            r = _finite_ratio(A._value_capped(2 * t), A._value_capped(t))
        if not np.all(np.isfinite(r)):
            continue
        half = len(r) // 2
        lower, upper = r[:half].max(), r[half:].max()
        if upper <= lower * 1.05 and upper < 2.0 ** 64:
            C = max(float(r.max()) * (1 + 1e-9), 2 * (1 + 1e-9))
            return Delta2Result(True, C, t0, "numeric", [note])
    return Delta2Result(False, None, None, "numeric", [note, "fails on probe: A(2t)/A(t) keeps growing"])


def nabla2_check(A: YoungFunction) -> Nabla2Result:
    """Largest dyadic epsilon with ``A(t)/t^(1+eps)`` increasing near infinity."""
    if isinstance(A, PowerLog):
        p = A.params.p
        if p <= 1:
            return Nabla2Result(False, method="symbolic",
                                notes=["p = 1: A(t)/t^(1+eps) eventually decreases for every eps"])
        eps = next(e for e in EPS_LADDER if e < p - 1)
        t0 = _ratio_increasing_rung(A, eps)
        return Nabla2Result(True, eps, t0, 2.0 ** (1 + eps), "symbolic",
                            [f"power-log: exponent p-1 = {p - 1:g} > eps"])
    top = _top(A, 1.0)
    note = f"probed t in [t0, {top:.3g}]"
    excess = _doubling_excess_limit(A)
    if excess is None or excess <= NABLA2_MIN_EXCESS:
        return Nabla2Result(False, method="numeric",
                            notes=[note, "fails on probe: A(2t)/A(t) - 2 extrapolates to 0 (fit in powers of 1/log t)"])
    for eps in EPS_LADDER:
        if 2.0 ** (1 + eps) > 2 + excess:
            continue
        t0 = _ratio_increasing_rung(A, eps)
        if t0 is not None:
            return Nabla2Result(True, eps, t0, 2.0 ** (1 + eps), "numeric", [note])
    return Nabla2Result(False, method="numeric", notes=[note, "fails on probe for every eps in the ladder"])


NABLA2_MIN_EXCESS = 0.01


def _doubling_excess_limit(A: YoungFunction) -> Optional[float]:
    """Limit of ``A(2t)/A(t) - 2`` from a least-squares fit ``a + b/L + c/L^2``, ``L = log t``.

    Logarithmic corrections make the ratio creep toward its limit; the fit
    separates ``t log t`` (limit 0) from ``t^(1+eps)`` (limit ``2^(1+eps) - 2``).
    """
    top = _top(A)
    if top < 1e4:
        return None
    t = probe_grid(10.0, top)
    r = _finite_ratio(A._value_capped(2 * t), A._value_capped(t))
    ok = np.isfinite(r)
    if ok.sum() < 10:
        return None
    L = np.log(t[ok])
    X = np.column_stack([np.ones(ok.sum()), 1 / L, 1 / L ** 2])
    coef, *_ = np.linalg.lstsq(X, r[ok] - 2, rcond=None)
    return float(coef[0])


def _ratio_increasing_rung(A: YoungFunction, eps: float) -> Optional[float]:
    top = _top(A, 1.0)
    for t0 in T0_LADDER:
        if t0 * 100 > top:
            return None
        t = probe_grid(t0, top)
        v = A._value_capped(t)
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            continue
        logr = np.log(v) - (1 + eps) * np.log(t)
        if np.all(np.diff(logr) > 0):
            return t0
    return None


def boyd_lower_index(A: YoungFunction) -> float:
    """Lower Boyd index at infinity, ``lim log(liminf A(lt)/A(t)) / log l``."""
    if isinstance(A, PowerLog):
        return A.params.p
    estimates = []
    for lam in LAMBDA_LADDER:
        top = min(1e12, A.domain_cap / lam * (1 - 1e-12))
        if top <= 1e6:
            raise Unstable("tail grid [1e6, 1e12] does not fit inside the domain")
        t = probe_grid(1e6, top)
        r = _finite_ratio(A._value_capped(lam * t), A._value_capped(t))
        estimates.append(math.log(float(np.min(r))) / math.log(lam))
    if max(estimates) - min(estimates) > BOYD_SPREAD:
        raise Unstable(f"Boyd index estimates spread over {estimates}")
    return estimates[-1]


def dominates_near_infinity(A: YoungFunction, B: YoungFunction) -> DominationResult:
    """Search ``C`` and ``t0`` with ``B(t) <= A(C t)`` for ``t >= t0``."""
    method = "numeric"
    if isinstance(A, PowerLog) and isinstance(B, PowerLog):
        pa, pb = A.params, B.params
        same_p = math.isclose(pa.p, pb.p, rel_tol=1e-12)
        sym = (pa.p > pb.p and not same_p) or (same_p and pa.alpha_log >= pb.alpha_log - 1e-12)
        if not sym:
            return DominationResult(False, method="symbolic")
        method = "symbolic"
    for C in C_LADDER:
        top = min(DOMINATION_TOP, B.domain_cap * (1 - 1e-12), A.domain_cap / C * (1 - 1e-12))
        for t0 in (0.0,) + T0_LADDER:
            lo = max(t0, 1e-3)
            if lo * 100 > top:
                break
            t = probe_grid(lo, top)
            if np.all(B._value_capped(t) <= A._value_capped(C * t) * (1 + 1e-12)):
                return DominationResult(True, C, t0, method)
    if method == "symbolic":
        return DominationResult(True, None, None, method)
    return DominationResult(False, method=method)


def equivalent_near_infinity(A: YoungFunction, B: YoungFunction) -> bool:
    return bool(dominates_near_infinity(A, B)) and bool(dominates_near_infinity(B, A))


def power_ratio_witness(A: YoungFunction, q: float, t_grid) -> Optional[tuple]:
    """A pair ``t < s`` with ``A(t)/t^q > A(s)/s^q``, or None if the ratio
    increases along ``t_grid``."""
    t = np.asarray(t_grid, dtype=float)
    r = A.eval(t) / t ** q
    bad = np.nonzero(np.diff(r) < 0)[0]
    if bad.size == 0:
        return None
    i = int(bad[0])
    return float(t[i]), float(t[i + 1])


def growth_report(A: YoungFunction) -> GrowthReport:
    d2 = delta2_check(A)
    n2 = nabla2_check(A)
    try:
        boyd = boyd_lower_index(A)
        notes = []
    except Unstable as exc:
        boyd, notes = None, [f"Boyd index unstable: {exc}"]
    return GrowthReport(d2, n2, boyd, notes + d2.notes + n2.notes)
