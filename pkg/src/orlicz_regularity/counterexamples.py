"""Piecewise-affine Young functions that satisfy the continuity criterion while
``A(t)/t^q`` fails to be increasing.

Slopes follow ``m_k = m_0 / (alpha - beta)^k`` and knots the explicit recursion
``t_{k+1} = alpha t_1 (m_1 - m_0) beta^(k-1) / (m_1 (alpha - 1)^k)``. Every
emitted instance is certified: knots increase geometrically, the knot identity
``m_{k-1} t_k = alpha A(t_k)`` holds for ``k >= 2`` and a witness pair breaks
the monotonicity of ``A(t)/t^q``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import CertificationFailed, ParameterWindow
from .numerics import Evidence, IntegralVerdict, Outcome
from .young import PiecewiseAffine, PiecewiseAffineSpec, YoungFunction

KNOT_IDENTITY_RTOL = 1e-10
BETA_GAP_LADDER = (0.05, 0.025, 0.01, 0.005, 0.0025, 0.001)
DIVERGENCE_TERMS = 40


@dataclass(frozen=True)
class CounterexampleParams:
    n: int
    q: float
    alpha: float
    beta: Optional[float] = None
    t1: float = 1.0
    m0: float = 1.0
    K: int = 40
    m1: Optional[float] = None

    def __post_init__(self):
        n, q, a = self.n, self.q, self.alpha
        if n < 2:
            raise ParameterWindow("n must be >= 2")
        if q <= 1:
            raise ParameterWindow("q must exceed 1")
        if self.K < 8:
            raise ParameterWindow("K must be >= 8")
        if self.t1 <= 0 or self.m0 <= 0:
            raise ParameterWindow("t1 and m0 must be positive")
        if n == 2:
            if not 1 < a < min(q, 2.0):
                raise ParameterWindow(f"n=2 needs alpha in (1, min(q, 2)) = (1, {min(q, 2.0):g}); got {a:g}")
            if self.beta is None:
                object.__setattr__(self, "beta", 1.0)
            elif self.beta != 1.0:
                raise ParameterWindow("n=2 needs beta = 1")
        else:
            if not 1 < a < q:
                raise ParameterWindow(f"n>=3 needs alpha in (1, q) = (1, {q:g}); got {a:g}")
            if self.beta is None:
                object.__setattr__(self, "beta", choose_beta(n, a))
            _check_beta_window(n, a, self.beta)
        m1 = self.m0 / (a - self.beta)
        if self.m1 is not None and not math.isclose(self.m1, m1, rel_tol=1e-12):
            raise ParameterWindow(f"m1 is forced to m0/(alpha-beta) = {m1!r}; got {self.m1!r}")
        object.__setattr__(self, "m1", m1)

    @property
    def b(self) -> float:
        """Knot growth ratio beta/(alpha-1)."""
        return self.beta / (self.alpha - 1)

    def divergence_ratio(self) -> float:
        """Ratio of the geometric lower-bound series; must be >= 1."""
        return ((self.alpha - 1) / self.beta) ** (self.n - 1) / (self.alpha - self.beta)

    def to_dict(self):
        return asdict(self)


def _tail_ratio(n, alpha, beta):
    return beta * (alpha - beta) ** (1.0 / (n - 2)) / (alpha - 1)


def _check_beta_window(n, alpha, beta):
    if not alpha - 1 < beta < alpha:
        raise ParameterWindow(f"beta must lie in (alpha-1, alpha) = ({alpha - 1:g}, {alpha:g}); got {beta:g}")
    ratio = ((alpha - 1) / beta) ** (n - 1) / (alpha - beta)
    if ratio < 1:
        raise ParameterWindow(f"((alpha-1)/beta)^(n-1)/(alpha-beta) = {ratio:g} < 1; take alpha-beta smaller")
    if _tail_ratio(n, alpha, beta) >= 1:
        raise ParameterWindow("beta (alpha-beta)^(1/(n-2)) / (alpha-1) must be < 1")


def choose_beta(n: int, alpha: float) -> float:
    """First gap alpha-beta from a decreasing ladder meeting every window condition."""
    for gap in BETA_GAP_LADDER:
        beta = alpha - gap
        try:
            _check_beta_window(n, alpha, beta)
        except ParameterWindow:
            continue
        return beta
    raise ParameterWindow(f"no beta in the ladder works for n={n}, alpha={alpha}")


def _sequences(params: CounterexampleParams, K: int):
    a, beta, t1, m0, m1 = params.alpha, params.beta, params.t1, params.m0, params.m1
    k = np.arange(K)
    slopes = m0 / (a - beta) ** k
    knots = np.empty(K + 1)
    knots[0], knots[1] = 0.0, t1
    j = np.arange(1, K)
    knots[2:] = a * t1 * (m1 - m0) * beta ** (j - 1) / (m1 * (a - 1) ** j)
    return knots, slopes


def generate(params: CounterexampleParams, certify: bool = True) -> PiecewiseAffineSpec:
    """Knots ``t_0..t_K`` and slopes ``m_0..m_{K-1}``; the last knot closes the range."""
    knots, slopes = _sequences(params, params.K)
    spec = PiecewiseAffineSpec(tuple(knots.tolist()), tuple(slopes.tolist()))
    if certify:
        certify_generation(spec, params)
    return spec


def counterexample_young(params: CounterexampleParams) -> PiecewiseAffine:
    spec = generate(params)
    return PiecewiseAffine(spec, generator=params,
                           label=f"counterexample(n={params.n}, q={params.q:g}, alpha={params.alpha:g}, beta={params.beta:g})")


def knot_identity_residuals(spec: PiecewiseAffineSpec, alpha: float) -> np.ndarray:
    """Relative residuals of ``a(t_k^-) t_k - alpha A(t_k)`` for k = 1..K."""
    t = np.asarray(spec.knots, dtype=float)
    m = np.asarray(spec.slopes, dtype=float)
    At = spec.knot_values()
    lhs = m[: len(t) - 1] * t[1:]
    rhs = alpha * At[1:]
    return (lhs - rhs) / rhs


def find_witness(A: YoungFunction, q: float, knots, start: int = 2):
    """A pair ``(t, s)``, ``t < s``, with ``A(t)/t^q > A(s)/s^q`` just left of a knot."""
    knots = np.asarray(knots, dtype=float)
    for k in range(start, len(knots)):
        s = float(knots[k])
        for frac in (0.8, 0.9, 0.95, 0.99):
            t = frac * s
            if t > knots[k - 1] and A.eval(t) / t ** q > A.eval(s) / s ** q:
                return t, s
    return None


def certify_generation(spec: PiecewiseAffineSpec, params: CounterexampleParams) -> dict:
    """Checks (a) knots increase geometrically, (b) knot identity for k >= 2,
    (c) a witness against monotonicity of ``A(t)/t^q``."""
    t = np.asarray(spec.knots, dtype=float)
    if np.any(np.diff(t) <= 0):
        k = int(np.nonzero(np.diff(t) <= 0)[0][0]) + 1
        raise CertificationFailed(f"knots not increasing at k={k}", k=k)
    if params.b <= 1:
        raise CertificationFailed("knot ratio beta/(alpha-1) <= 1, knots do not tend to infinity")
    res = knot_identity_residuals(spec, params.alpha)
    tail = res[1:]  # k >= 2
    bad = np.nonzero(np.abs(tail) > KNOT_IDENTITY_RTOL)[0]
    if bad.size:
        k = int(bad[0]) + 2
        raise CertificationFailed(f"knot identity fails at k={k} (residual {tail[bad[0]]:.3e})", k=k)
    A = PiecewiseAffine(spec)
    witness = find_witness(A, params.q, t)
    if witness is None:
        raise CertificationFailed(f"no witness against monotonicity of A(t)/t^{params.q:g}")
    tw, sw = witness
    return {
        "knots_increasing": True,
        "knot_ratio": params.b,
        "knot_identity_max_residual_k_ge_2": float(np.max(np.abs(tail))) if tail.size else 0.0,
        "knot_identity_residual_k1": float(res[0]),
        "knot_identity_note": "k = 1 is not constrained by the recursion and is reported only",
        "witness": [tw, sw],
        "witness_ratios": [A.eval(tw) / tw ** params.q, A.eval(sw) / sw ** params.q],
    }


def _check_matches(spec: PiecewiseAffineSpec, params: CounterexampleParams):
    knots, slopes = _sequences(params, len(spec.slopes))
    got_t = np.asarray(spec.knots, dtype=float)
    got_m = np.asarray(spec.slopes, dtype=float)
    for k in range(len(got_m)):
        if not math.isclose(got_m[k], slopes[k], rel_tol=1e-12):
            raise CertificationFailed(f"slope m_{k} differs from the recursion", k=k)
    for k in range(len(got_t)):
        if not math.isclose(got_t[k], knots[k], rel_tol=1e-12, abs_tol=0.0 if k else 1e-300):
            raise CertificationFailed(f"knot t_{k} differs from the recursion", k=k)


def interval_contributions(spec: PiecewiseAffineSpec) -> np.ndarray:
    """``int_{t_k}^{t_{k+1}} a(t)/t^2 dt = m_k (1/t_k - 1/t_{k+1})`` for k = 1..K-1."""
    t = np.asarray(spec.knots, dtype=float)
    m = np.asarray(spec.slopes, dtype=float)
    k = np.arange(1, len(m))
    return m[k] * (1 / t[k] - 1 / t[k + 1])


def lower_bound_terms(params: CounterexampleParams, count: int = DIVERGENCE_TERMS) -> np.ndarray:
    """Terms ``(t_{k+1}-t_k) m_k^(-2/(n-2)) S_k^(-n)``, k = 1..count, where
    ``S_k = sum_{h>=k} (t_{h+1}-t_h) m_h^(-1/(n-2))`` bounds the inner integral."""
    n = params.n
    K = count + 2
    t, m = _sequences(params, K)
    d = np.diff(t)[: K]
    inner = d / m ** (1.0 / (n - 2))
    rho = _tail_ratio(n, params.alpha, params.beta)
    S = np.cumsum(inner[::-1])[::-1] + inner[-1] * rho / (1 - rho)
    k = np.arange(1, count + 1)
    return d[k] / m[k] ** (2.0 / (n - 2)) * S[k] ** (-n)


def certify_divergence(spec: PiecewiseAffineSpec, params: CounterexampleParams) -> IntegralVerdict:
    """Certified divergence of the continuity criterion for a generated spec."""
    _check_matches(spec, params)
    if params.n == 2:
        c = interval_contributions(spec)
        t = np.asarray(spec.knots, dtype=float)
        ref = c[1]
        # predicted constant m_0 (2 - alpha) / ((alpha - 1)^2 t_2) for k >= 2
        pred = params.m0 * (2 - params.alpha) / ((params.alpha - 1) ** 2 * t[2])
        for k, v in enumerate(c[1:], start=2):
            if not math.isclose(v, pred, rel_tol=1e-9):
                raise CertificationFailed(f"interval contribution at k={k} is {v!r}, expected {pred!r}", k=k)
        partial = np.cumsum(c)
        ev = Evidence(list(zip(t[2:].tolist(), partial.tolist())), 1.0, 1.0)
        return IntegralVerdict(Outcome.DIVERGES, ev, method="certificate", value=math.inf,
                               label="int a(t)/t^2 dt over [t_1, inf)",
                               notes=[f"per-interval contribution constant = {float(ref)!r} for k >= 2",
                                      "partial sums grow linearly in k"])
    terms = lower_bound_terms(params)
    for k in range(1, len(terms)):
        if terms[k] < terms[k - 1] * (1 - 1e-9):
            raise CertificationFailed(f"lower-bound term decreases at k={k + 1}", k=k + 1)
    t, _ = _sequences(params, len(terms) + 2)
    ev = Evidence(list(zip(t[2: len(terms) + 2].tolist(), np.cumsum(terms).tolist())), 1.0, 1.0)
    return IntegralVerdict(Outcome.DIVERGES, ev, method="certificate", value=math.inf,
                           label="Delta_2 reformulation of the continuity criterion",
                           notes=[f"lower-bound terms non-decreasing for k=1..{len(terms)}",
                                  f"geometric ratio ((alpha-1)/beta)^(n-1)/(alpha-beta) = {float(params.divergence_ratio())!r}"])


def delta2_constant(params: CounterexampleParams) -> float:
    """``c = (alpha - beta)^-([gamma] + 2)`` with ``gamma = 1 + log_b 2``."""
    gamma = 1 + math.log(2) / math.log(params.b)
    return (params.alpha - params.beta) ** -(math.floor(gamma) + 2)


def certify_delta2(A, params: CounterexampleParams | None = None, per_decade: int = 400) -> dict:
    """Verify ``a(2t) <= c a(t)`` on a dense grid.

    With ``params`` the closed-form constant is checked on ``(0, t_K/2]``;
    without, ``A`` is any Young function and ``c`` is the probed supremum.
    """
    if isinstance(A, PiecewiseAffineSpec):
        A = PiecewiseAffine(A)
    if params is None:
        t = np.logspace(-3, 6, 9 * per_decade + 1)
        r = A.density(2 * t) / A.density(t)
        return {"c": float(r.max()), "source": "probed", "points": int(t.size), "holds": True}
    c = delta2_constant(params)
    knots = np.asarray(A.spec.knots, dtype=float)
    top = knots[-1] / 2
    lo = knots[1] / 100
    t = np.logspace(math.log10(lo), math.log10(top), int(math.log10(top / lo) * per_decade) + 1)
    eps = 1e-9
    near = np.concatenate([knots[1:] * (1 - eps), knots[1:] * (1 + eps), knots[1:] / 2 * (1 - eps), knots[1:] / 2 * (1 + eps)])
    t = np.unique(np.concatenate([t, near[(near > 0) & (near <= top)]]))
    r = A.density(2 * t) / A.density(t)
    bad = np.nonzero(r > c * (1 + 1e-12))[0]
    if bad.size:
        w = float(t[bad[0]])
        raise CertificationFailed(f"a(2t) > c a(t) at t={w!r} (ratio {r[bad[0]]:g}, c={c:g})", witness=w)
    return {"c": c, "source": "closed form", "points": int(t.size), "max_ratio": float(r.max()), "holds": True,
            "range": [float(t[0]), float(top)]}


def certification_report(params: CounterexampleParams, spec: PiecewiseAffineSpec | None = None) -> dict:
    spec = spec or generate(params, certify=False)
    checks = []

    def run(name, fn):
        try:
            checks.append({"check": name, "passed": True, "detail": fn()})
        except CertificationFailed as exc:
            checks.append({"check": name, "passed": False, "detail": str(exc), "k": exc.k, "witness": exc.witness})

    run("generation", lambda: certify_generation(spec, params))
    run("divergence", lambda: certify_divergence(spec, params).to_dict())
    run("delta2", lambda: certify_delta2(spec, params))
    return {"params": params.to_dict(), "checks": checks, "passed": all(c["passed"] for c in checks)}
