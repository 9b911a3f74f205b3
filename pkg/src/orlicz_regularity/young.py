"""Finite-valued Young functions: evaluation, density, generalized inverses
and Young conjugation.

A Young function is stored through one of three concrete families:

* :class:`PowerLog` -- ``coef * t**p * log(c + t)**alpha`` in closed form,
* :class:`PiecewiseAffine` -- knots ``t_k`` and slopes ``m_k``,
* :class:`CallableYoung` -- a user supplied density (and optionally value).

All evaluation methods accept scalars or numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from .errors import DomainExceeded, InvariantViolation, PreconditionFailed, RangeExceeded

SCHEMA_VERSION = 1

TOL_INVERSE = 1e-10
MAX_BISECTION = 200
TOL_CONVEXITY = 1e-9

POWER_LOG_CAP = 1e300
CALLABLE_CAP = 1e12

_TINY = 1e-300
_LOG_TINY = math.log(_TINY)
_SNAP_ZERO = 1e-150


def _as_array(t):
    arr = np.asarray(t, dtype=float)
    return arr, arr.ndim == 0


def _out(arr, scalar):
    return float(arr) if scalar else arr


def monotone_sup(f, y, cap=math.inf, strict=False, max_iter=MAX_BISECTION):
    """Return ``sup{t in (0, cap]: f(t) <= y}`` for a non-decreasing ``f``.

    With ``strict=True`` the predicate is ``f(t) < y``. The search runs on
    ``log t`` so relative accuracy is uniform over many decades. ``f`` must
    accept numpy arrays. Points where the predicate already fails at the
    bottom of the bracket get 0.
    """
    y, scalar = _as_array(y)
    y = np.atleast_1d(y)
    upper = min(cap, POWER_LOG_CAP)
    lo = np.full(y.shape, _LOG_TINY)
    hi = np.full(y.shape, math.log(upper))

    def pred(logt):
        with np.errstate(over="ignore", invalid="ignore"):
            v = f(np.exp(logt))
        v = np.asarray(v, dtype=float)
        return v < y if strict else v <= y

    result = np.empty(y.shape)
    ok_lo = pred(lo)
    ok_hi = pred(hi)
    result[~ok_lo] = 0.0
    result[ok_lo & ok_hi] = upper
    active = ok_lo & ~ok_hi
    # log-width 1e-13 is a relative accuracy far below TOL_INVERSE
    for _ in range(max_iter):
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        p = pred(mid)
        lo = np.where(active & p, mid, lo)
        hi = np.where(active & ~p, mid, hi)
        active = active & ((hi - lo) > 1e-13)
    mask = ok_lo & ~ok_hi
    result[mask] = np.exp(lo[mask])
    result[result < _SNAP_ZERO] = 0.0
    return float(result[0]) if scalar else result


class YoungFunction:
    """Base class. Subclasses implement ``_value`` and ``_density`` on arrays."""

    kind = "abstract"
    domain_cap = math.inf
    label = "A"
    # True when A is +inf beyond domain_cap (a conjugate of a function with
    # bounded density) rather than merely unsupported numerically there
    infinite_beyond_cap = False

    # -- subclass hooks ---------------------------------------------------
    def _value(self, t):
        raise NotImplementedError

    def _density(self, t):
        raise NotImplementedError

    # -- public API -------------------------------------------------------
    def _check_domain(self, arr, allow_zero=True):
        if np.any(arr < 0) or (not allow_zero and np.any(arr <= 0)):
            raise DomainExceeded(f"{self.label}: argument must be {'>=' if allow_zero else '>'} 0")
        if np.any(arr >= self.domain_cap):
            raise DomainExceeded(
                f"{self.label}: argument {float(np.max(arr)):g} >= domain_cap {self.domain_cap:g}")

    def eval(self, t):
        arr, scalar = _as_array(t)
        self._check_domain(arr)
        return _out(np.asarray(self._value(arr), dtype=float), scalar)

    __call__ = eval

    def density(self, t):
        arr, scalar = _as_array(t)
        self._check_domain(arr, allow_zero=False)
        return _out(np.asarray(self._density(arr), dtype=float), scalar)

    def _value_capped(self, t):
        # used inside bisection: beyond the cap the function is +inf
        t = np.asarray(t, dtype=float)
        inside = t < self.domain_cap
        out = np.full(t.shape, np.inf)
        if inside.any():
            out[inside] = self._value(t[inside])
        return out

    def _density_capped(self, t):
        t = np.asarray(t, dtype=float)
        inside = t < self.domain_cap
        out = np.full(t.shape, np.inf)
        if inside.any():
            out[inside] = self._density(t[inside])
        return out

    def sup_value(self):
        """Supremum of A over its domain (finite only for capped functions)."""
        if math.isinf(self.domain_cap):
            return math.inf
        return float(self._value(np.array([self.domain_cap]))[0])

    def sup_density(self):
        if math.isinf(self.domain_cap):
            return math.inf
        with np.errstate(over="ignore"):
            return float(self._density(np.array([self.domain_cap]))[0])

    def inverse(self, y):
        """Right-continuous generalized inverse ``sup{t : A(t) <= y}``."""
        arr, scalar = _as_array(y)
        if np.any(arr < 0):
            raise RangeExceeded("inverse needs y >= 0")
        top = self.sup_value()
        if not self.infinite_beyond_cap and not math.isinf(top) and np.any(arr > top * (1 + 1e-15)):
            raise RangeExceeded(f"{self.label}: value {float(np.max(arr)):g} above A(domain_cap-) = {top:g}")
        return _out(np.asarray(monotone_sup(self._value_capped, arr, self.domain_cap)), scalar)

    def density_inverse(self, r):
        """Left-continuous generalized inverse of the density, ``inf{s : a(s) >= r}``."""
        arr, scalar = _as_array(r)
        if np.any(arr < 0):
            raise RangeExceeded("density inverse needs r >= 0")
        s = np.asarray(monotone_sup(self._density_capped, arr, self.domain_cap, strict=True))
        s = np.atleast_1d(s)
        if not math.isinf(self.domain_cap) and not self.infinite_beyond_cap:
            # density values beyond a(cap) would need s >= cap
            beyond = np.atleast_1d(arr) > self.sup_density() * (1 + 1e-15)
            if beyond.any():
                raise DomainExceeded(f"{self.label}: density level beyond a(domain_cap)")
        return float(s[0]) if scalar else s

    def conjugate(self) -> "YoungFunction":
        return _fenchel_conjugate(self)

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.label})"


# ---------------------------------------------------------------------------
# power-log family

_C_LADDER = (math.e, 3.0, 10.0, 1e2, 1e3, 1e4, 1e5, 1e6)
_CONVEXITY_GRID = np.logspace(-8, 12, 2001)


def _powerlog_density(t, p, alpha, c, coef):
    t = np.asarray(t, dtype=float)
    L = np.log(c + t)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        base = np.exp(math.log(coef) + (p - 1) * np.log(t) + (alpha - 1) * np.log(L))
        out = base * (p * L + alpha * t / (c + t))
    return np.where(t > 0, out, 0.0)


def _sampled_convex(density_values, tol=TOL_CONVEXITY):
    d = np.asarray(density_values)
    if np.any(~np.isfinite(d)) or np.any(d < 0):
        return False
    return bool(np.all(d[1:] >= d[:-1] * (1 - tol) - tol * 1e-300))


@dataclass(frozen=True)
class PowerLogParams:
    p: float
    alpha_log: float = 0.0
    c_shift: float = math.e
    coef: float = 1.0


def default_c_shift(p: float, alpha: float) -> float:
    """Smallest shift from the ladder e, 3, 10, 100, ... keeping A convex on the sample grid."""
    if alpha == 0:
        return math.e
    for c in _C_LADDER:
        if _sampled_convex(_powerlog_density(_CONVEXITY_GRID, p, alpha, c, 1.0)):
            return c
    raise InvariantViolation(f"no shift in the ladder makes t^{p} log^{alpha}(c+t) convex")


class PowerLog(YoungFunction):
    """``A(t) = coef * t**p * log(c + t)**alpha``."""

    kind = "power_log"

    def __init__(self, p: float, alpha: float = 0.0, c: Optional[float] = None,
                 coef: float = 1.0, domain_cap: float = POWER_LOG_CAP):
        p, alpha, coef = float(p), float(alpha), float(coef)
        if p < 1 or (p == 1 and alpha < 0):
            raise InvariantViolation(f"power_log needs p > 1, or p = 1 with alpha >= 0 (got p={p}, alpha={alpha})")
        if coef <= 0:
            raise InvariantViolation("coef must be positive")
        if c is None:
            c = default_c_shift(p, alpha)
        c = float(c)
        if c < math.e * (1 - 1e-12):
            raise InvariantViolation("c_shift must be >= e")
        if alpha != 0 and not _sampled_convex(_powerlog_density(_CONVEXITY_GRID, p, alpha, c, 1.0)):
            raise InvariantViolation(f"t^{p} log^{alpha}({c}+t) is not convex on the sample grid")
        self.params = PowerLogParams(p, alpha, c, coef)
        self.domain_cap = float(domain_cap)
        self.label = _powerlog_label(p, alpha, coef)

    @property
    def p(self):
        return self.params.p

    @property
    def alpha(self):
        return self.params.alpha_log

    @property
    def is_pure_power(self):
        return self.params.alpha_log == 0

    def _value(self, t):
        p, alpha, c, coef = self.params.p, self.params.alpha_log, self.params.c_shift, self.params.coef
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            logv = math.log(coef) + p * np.log(t) + alpha * np.log(np.log(c + t))
            out = np.exp(logv)
        return np.where(t > 0, out, 0.0)

    def _density(self, t):
        pr = self.params
        return _powerlog_density(t, pr.p, pr.alpha_log, pr.c_shift, pr.coef)

    def conjugate(self):
        pr = self.params
        if pr.alpha_log == 0 and pr.p > 1:
            q = pr.p / (pr.p - 1)
            k = (pr.p - 1) * pr.coef * (pr.coef * pr.p) ** (-q)
            return PowerLog(q, 0.0, coef=k)
        if pr.p == 1 and pr.alpha_log == 0:
            raise PreconditionFailed("the conjugate of a linear function jumps to infinity")
        return _fenchel_conjugate(self)

    def to_dict(self):
        pr = self.params
        return {"schema_version": SCHEMA_VERSION, "kind": "power_log", "p": pr.p,
                "alpha": pr.alpha_log, "c": pr.c_shift, "coef": pr.coef}


def _fmt(x):
    return f"{x:g}"


def _powerlog_label(p, alpha, coef=1.0):
    s = "" if coef == 1 else f"{_fmt(coef)}*"
    s += f"t^{_fmt(p)}"
    if alpha != 0:
        s += f"*log^{_fmt(alpha)}(c+t)"
    return s


# ---------------------------------------------------------------------------
# piecewise-affine family

@dataclass(frozen=True)
class PiecewiseAffineSpec:
    """Knots ``0 = t_0 < t_1 < ...`` and slopes ``m_0 < m_1 < ...``.

    Slope ``m_k`` is the density on ``(t_k, t_{k+1}]``; the last slope extends
    to the right up to ``domain_cap``. ``knots`` may carry one extra closing
    knot marking the end of the generated range; it does not start a new piece.
    """

    knots: tuple
    slopes: tuple

    def __post_init__(self):
        k, m = self.knots, self.slopes
        if len(m) == 0 or len(k) not in (len(m), len(m) + 1):
            raise InvariantViolation("need one slope per knot, optionally plus a closing knot")
        if k[0] != 0:
            raise InvariantViolation("first knot must be 0")
        if any(b <= a for a, b in zip(k, k[1:])):
            raise InvariantViolation("knots must be strictly increasing")
        if m[0] < 0 or any(b <= a for a, b in zip(m, m[1:])):
            raise InvariantViolation("slopes must be nonnegative and strictly increasing")
        if m[-1] <= 0:
            raise InvariantViolation("a Young function is non-constant")

    def knot_values(self) -> np.ndarray:
        """A(t_k) as the telescoping sum of m_h (t_{h+1} - t_h)."""
        k = np.asarray(self.knots, dtype=float)
        m = np.asarray(self.slopes, dtype=float)
        return np.concatenate([[0.0], np.cumsum(m[: len(k) - 1] * np.diff(k))])


class PiecewiseAffine(YoungFunction):
    kind = "piecewise_affine"

    def __init__(self, spec: PiecewiseAffineSpec | None = None, *, knots: Sequence[float] | None = None,
                 slopes: Sequence[float] | None = None, domain_cap: float = math.inf,
                 generator=None, label: str = "piecewise"):
        if spec is None:
            spec = PiecewiseAffineSpec(tuple(float(x) for x in knots), tuple(float(x) for x in slopes))
        if domain_cap <= spec.knots[-1]:
            raise InvariantViolation("domain_cap must exceed the last knot")
        self.spec = spec
        self.domain_cap = float(domain_cap)
        self.generator = generator
        self.label = label
        self._m = np.asarray(spec.slopes, dtype=float)
        self._k = np.asarray(spec.knots, dtype=float)[: len(self._m)]
        self._v = spec.knot_values()[: len(self._m)]

    @property
    def knots(self):
        return self._k

    @property
    def slopes(self):
        return self._m

    def _value(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self._k, t, side="right") - 1, 0, None)
        return self._v[idx] + self._m[idx] * (t - self._k[idx])

    def _density(self, t):
        t = np.asarray(t, dtype=float)
        # left-continuous: at a knot the slope of the piece to its left is used
        idx = np.clip(np.searchsorted(self._k, t, side="left") - 1, 0, None)
        return self._m[idx]

    def conjugate(self):
        knots, slopes = [], []
        if self._m[0] > 0:
            knots.append(0.0)
            slopes.append(0.0)
        for j in range(1, len(self._k)):
            knots.append(float(self._m[j - 1]))
            slopes.append(float(self._k[j]))
        if math.isinf(self.domain_cap):
            cap = float(self._m[-1])
        else:
            knots.append(float(self._m[-1]))
            slopes.append(self.domain_cap)
            cap = math.inf
        if knots[0] != 0:
            # only happens when m_0 == 0 and the first conjugate knot is m_0 = 0
            raise InvariantViolation("malformed conjugate knots")
        out = PiecewiseAffine(knots=knots, slopes=slopes, domain_cap=cap, label=f"conjugate({self.label})")
        out.infinite_beyond_cap = not math.isinf(cap)
        return out

    def to_dict(self):
        d = {"schema_version": SCHEMA_VERSION, "kind": "piecewise_affine",
             "knots": [repr(float(x)) for x in self.spec.knots],
             "slopes": [repr(float(x)) for x in self._m],
             "domain_cap": "inf" if math.isinf(self.domain_cap) else repr(self.domain_cap)}
        return d


# ---------------------------------------------------------------------------
# generic callable family

class CallableYoung(YoungFunction):
    """Young function given by a density sampler.

    ``value`` is optional; without it ``A(t)`` is computed by quadrature of
    the density. Both callables must accept numpy arrays.
    """

    kind = "callable"

    def __init__(self, density: Callable, value: Callable | None = None, *,
                 domain_cap: float = CALLABLE_CAP, label: str = "callable", ref: str | None = None):
        self._dens = density
        self._val = value
        self.domain_cap = float(domain_cap)
        self.label = label
        self.ref = ref

    def _density(self, t):
        return np.asarray(self._dens(np.asarray(t, dtype=float)), dtype=float)

    def _value(self, t):
        t = np.asarray(t, dtype=float)
        if self._val is not None:
            return np.asarray(self._val(t), dtype=float)
        flat = t.reshape(-1)
        out = np.array([self._quad(x) for x in flat])
        return out.reshape(t.shape)

    def _quad(self, t):
        if t <= 0:
            return 0.0
        f = lambda s: float(self._density(np.array([s]))[0])
        total = 0.0
        hi = t
        for _ in range(14):
            lo = hi / 10
            total += integrate.quad(f, lo, hi, limit=200, epsabs=0, epsrel=1e-12)[0]
            hi = lo
        return total + f(hi) * hi

    def to_dict(self):
        if self.ref is None:
            raise PreconditionFailed("anonymous callables cannot be serialized; register them by name")
        return {"schema_version": SCHEMA_VERSION, "kind": "callable_ref", "name": self.ref}


def _fenchel_conjugate(A: YoungFunction) -> CallableYoung:
    """Conjugate with density a^{-1}, evaluated through the Fenchel equality
    ``A~(t) = t s - A(s)`` at ``s = a^{-1}(t)``."""
    cap = A.sup_density()

    def dens(t):
        return np.asarray(A.density_inverse(np.asarray(t)), dtype=float)

    def value(t):
        t = np.asarray(t, dtype=float)
        s = np.asarray(A.density_inverse(t), dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            v = t * s - A._value_capped(s)
        v = np.where(np.isnan(v) & np.isinf(s), np.inf, v)
        return np.where(t > 0, v, 0.0)

    out = CallableYoung(dens, value, domain_cap=cap, label=f"conjugate({A.label})")
    out.infinite_beyond_cap = not math.isinf(cap)
    return out


# ---------------------------------------------------------------------------
# named callables for serialization

def _exp_young():
    dens = lambda t: np.expm1(t)
    val = lambda t: np.expm1(t) - t
    return CallableYoung(dens, val, domain_cap=700.0, label="exp(t)-1-t", ref="exp_minus_one")


def _t_log():
    dens = lambda t: np.log(math.e + t) + t / (math.e + t)
    val = lambda t: t * np.log(math.e + t)
    return CallableYoung(dens, val, domain_cap=1e300, label="t*log(e+t)", ref="t_log")


CALLABLE_REGISTRY: dict[str, Callable[[], CallableYoung]] = {
    "exp_minus_one": _exp_young,
    "t_log": _t_log,
}


def register_callable(name: str, factory: Callable[[], CallableYoung]) -> None:
    CALLABLE_REGISTRY[name] = factory


def from_dict(doc: dict) -> YoungFunction:
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {version}")
    kind = doc.get("kind")
    if kind == "power_log":
        return PowerLog(float(doc["p"]), float(doc.get("alpha", 0.0)),
                        None if doc.get("c") is None else float(doc["c"]), float(doc.get("coef", 1.0)))
    if kind == "piecewise_affine":
        cap = doc.get("domain_cap", "inf")
        return PiecewiseAffine(knots=[float(x) for x in doc["knots"]], slopes=[float(x) for x in doc["slopes"]],
                               domain_cap=math.inf if cap in ("inf", None) else float(cap))
    if kind == "callable_ref":
        name = doc["name"]
        if name not in CALLABLE_REGISTRY:
            raise ValueError(f"unknown callable_ref {name!r}")
        return CALLABLE_REGISTRY[name]()
    raise ValueError(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# elementary identities

def sandwich_check(A: YoungFunction, t_grid, rtol: float = 1e-9) -> dict:
    """Check ``A(t) <= a(t) t <= A(2t)`` and ``t <= A^{-1}(t) A~^{-1}(t) <= 2t``.

    Returns the smallest relative slack of each inequality; raises
    :class:`InvariantViolation` naming the identity and the first failing point.
    """
    t = np.asarray(t_grid, dtype=float)
    t = t[t > 0]
    At, at, A2t = A.eval(t), A.density(t), A.eval(2 * t)
    left = (at * t - At) / np.maximum(np.abs(at * t), 1e-300)
    right = (A2t - at * t) / np.maximum(np.abs(A2t), 1e-300)
    for name, slack in (("A(t) <= a(t) t", left), ("a(t) t <= A(2t)", right)):
        bad = np.nonzero(slack < -rtol)[0]
        if bad.size:
            raise InvariantViolation(f"{name} fails at t={t[bad[0]]!r}")
    Ac = A.conjugate()
    prod = A.inverse(t) * Ac.inverse(t)
    lower = (prod - t) / t
    upper = (2 * t - prod) / t
    for name, slack in (("t <= A^-1(t) A~^-1(t)", lower), ("A^-1(t) A~^-1(t) <= 2t", upper)):
        bad = np.nonzero(slack < -rtol)[0]
        if bad.size:
            raise InvariantViolation(f"{name} fails at t={t[bad[0]]!r}")
    return {
        "points": int(t.size),
        "gen9_left": float(left.min()),
        "gen9_right": float(right.min()),
        "conjugate_inverse_lower": float(lower.min()),
        "conjugate_inverse_upper": float(upper.min()),
    }
