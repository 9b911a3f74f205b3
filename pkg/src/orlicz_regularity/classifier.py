"""Map ``(A, n)`` to the strongest regularity statement the criteria license.

The cascade tries everywhere continuity first (the continuity criterion, its
Delta_2 reformulation, and the high-index route through the classical
integral), then continuity off a capacity-null set, then gives up. Every
criterion consulted lands in the provenance list with its verdict.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import Febbraio1Violated, OrliczError, PreconditionFailed, Unstable
from .gauges import (CapacityGauge, HausdorffGauge, capacity_gauge, hausdorff_admissible,
                     hausdorff_power_log)
from .growth import boyd_lower_index, delta2_check
from .numerics import IntegralVerdict, Outcome
from .transforms import (DimensionContext, ModulusOfContinuity, _ctx, a_n_minus_1, condition_condelta2,
                         condition_equiv2bis, condition_iwaniec, condition_ours, modulus_of_continuity)
from .young import PowerLog, YoungFunction

DIMENSIONAL_CONSTANT_NOTE = "bounds hold up to an unspecified dimensional constant c(n)"

TAG_BOUNDEDNESS = "local boundedness [equiv2bis]"
TAG_CONTINUITY = "everywhere continuity [ours]"
TAG_CONTINUITY_D2 = "everywhere continuity under Delta_2 [condelta2]"
TAG_HIGH_INDEX = "everywhere continuity, index above n-1 [Iwcond]"
TAG_CAPACITY = "continuity off a capacity-null set [ott21]"
TAG_CAPACITY_D2 = "continuity off a capacity-null set under Delta_2 [dini]"
TAG_HAUSDORFF = "continuity off an h-null set [hB]"


class Grade(str, Enum):
    CONTINUOUS_EVERYWHERE = "continuous_everywhere"
    OFF_SINGULAR_SET = "off_singular_set"
    INCONCLUSIVE = "inconclusive"


@dataclass
class RegularityVerdict:
    grade: Grade
    modulus: Optional[ModulusOfContinuity] = None
    capacity_gauge: Optional[CapacityGauge] = None
    hausdorff_gauges: list = field(default_factory=list)
    provenance: list = field(default_factory=list)
    hausdorff_family: Optional[dict] = None
    extra_gauges: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if self.grade == Grade.CONTINUOUS_EVERYWHERE and self.modulus is None:
            raise ValueError("a continuity verdict needs a modulus")
        if self.grade == Grade.OFF_SINGULAR_SET and self.capacity_gauge is None:
            raise ValueError("an off-singular-set verdict needs a capacity gauge")

    def to_dict(self):
        return {
            "grade": self.grade.value,
            "modulus": None if self.modulus is None else self.modulus.to_dict(),
            "capacity_gauge": None if self.capacity_gauge is None else self.capacity_gauge.to_dict(),
            "extra_capacity_gauges": [g.to_dict() for g in self.extra_gauges],
            "hausdorff_family": self.hausdorff_family,
            "hausdorff_gauges": [g.to_dict() | {"verdict": v.to_dict()} for g, v in self.hausdorff_gauges],
            "provenance": [{"tag": tag, "verdict": v if isinstance(v, dict) else v.to_dict()} for tag, v in self.provenance],
            "notes": self.notes,
        }


@dataclass
class DirichletSample:
    n: int
    r: float
    dirichlet_mean: float

    def __post_init__(self):
        if self.r <= 0 or self.dirichlet_mean < 0 or self.n < 2:
            raise ValueError("need n >= 2, r > 0 and a non-negative Dirichlet mean")


def _failure(exc: Exception) -> dict:
    return {"outcome": "not_evaluated", "reason": f"{type(exc).__name__}: {exc}"}


def hausdorff_family(asymptotic, n: int) -> Optional[dict]:
    """Threshold on ``gamma`` for the family ``s^(n-P) log^-gamma(1/s)`` when
    ``Psi ~ t^P log^kappa t``."""
    if asymptotic is None:
        return None
    P, kappa = asymptotic
    if P < n:
        power, thr = n - P, 1 - kappa
    elif P == n and kappa < 0:
        power, thr = 0.0, -kappa
    else:
        return None
    head = f"s^{{{power:g}}}*" if power else ""
    return {"form": f"{head}log^{{-gamma}}(1/s)", "power": power, "gamma_threshold": thr,
            "admissible_when": f"gamma > {thr:g}"}


def classify(A: YoungFunction, ctx, sigmas: Sequence = (), gauges_h: Sequence = ()) -> RegularityVerdict:
    """The verdict cascade. ``sigmas`` are extra weights (``"log"``, ...);
    ``gauges_h`` extra Hausdorff gauges to test against the default ``Psi``."""
    ctx = _ctx(ctx)
    n = ctx.n
    prov: list = []
    eq = condition_equiv2bis(A, ctx)
    if n >= 3:
        prov.append((TAG_BOUNDEDNESS, eq))
    if n >= 3 and eq.outcome != Outcome.CONVERGES:
        return RegularityVerdict(Grade.INCONCLUSIVE, provenance=prov,
                                 notes=["A_{n-1} is unavailable: equiv2bis does not converge"])
    try:
        An1 = a_n_minus_1(A, ctx)
    except OrliczError as exc:
        prov.append(("transform A_{n-1}", _failure(exc)))
        return RegularityVerdict(Grade.INCONCLUSIVE, provenance=prov)

    route = None
    try:
        ours = condition_ours(A, ctx, An1)
        prov.append((TAG_CONTINUITY, ours))
        if ours.outcome == Outcome.DIVERGES:
            route = ours
    except OrliczError as exc:
        prov.append((TAG_CONTINUITY, _failure(exc)))
    if route is None and n >= 3 and delta2_check(A).holds:
        try:
            cd = condition_condelta2(A, ctx)
            prov.append((TAG_CONTINUITY_D2, cd))
            if cd.outcome == Outcome.DIVERGES:
                route = cd
        except OrliczError as exc:
            prov.append((TAG_CONTINUITY_D2, _failure(exc)))
    if route is None:
        try:
            idx = boyd_lower_index(A)
        except Unstable:
            idx = None
        if idx is not None and idx > n - 1:
            iw = condition_iwaniec(A, ctx)
            prov.append((TAG_HIGH_INDEX, iw))
            if iw.outcome == Outcome.DIVERGES:
                route = iw
    if route is not None:
        try:
            mod = modulus_of_continuity(A, ctx, An1, ours=route)
            return RegularityVerdict(Grade.CONTINUOUS_EVERYWHERE, modulus=mod, provenance=prov,
                                     notes=[DIMENSIONAL_CONSTANT_NOTE])
        except OrliczError as exc:
            prov.append(("modulus of continuity", _failure(exc)))

    gauge = capacity_gauge(A, ctx, None, An1)
    d2 = delta2_check(A).holds
    prov.append((TAG_CAPACITY_D2 if d2 else TAG_CAPACITY, gauge.admissibility))
    if gauge.admissibility.outcome != Outcome.DIVERGES:
        return RegularityVerdict(Grade.INCONCLUSIVE, provenance=prov,
                                 notes=["default weight sigma = 1 not confirmed admissible"])
    extra = []
    for s in sigmas:
        g = capacity_gauge(A, ctx, s, An1)
        prov.append((TAG_CAPACITY_D2 if d2 else TAG_CAPACITY, g.admissibility))
        if g.admissibility.outcome == Outcome.DIVERGES:
            extra.append(g)
    fam = hausdorff_family(gauge.asymptotic, n)
    hs = []
    candidates = list(gauges_h)
    if fam is not None:
        thr = fam["gamma_threshold"]
        candidates += [hausdorff_power_log(fam["power"], -(thr + d)) for d in (0.25, 1.0)]
    for h in candidates:
        try:
            v = hausdorff_admissible(h, gauge, ctx)
        except (Febbraio1Violated, OrliczError) as exc:
            prov.append((TAG_HAUSDORFF, _failure(exc)))
            continue
        prov.append((TAG_HAUSDORFF, v))
        if v.outcome == Outcome.CONVERGES:
            hs.append((h if isinstance(h, HausdorffGauge) else HausdorffGauge(h, label=getattr(h, "label", "h")), v))
    return RegularityVerdict(Grade.OFF_SINGULAR_SET, capacity_gauge=gauge, hausdorff_gauges=hs,
                             provenance=prov, hausdorff_family=fam, extra_gauges=extra,
                             notes=[DIMENSIONAL_CONSTANT_NOTE])


def oscillation_bound(A: YoungFunction, sample: DirichletSample) -> float:
    """Shape ``r A_{n-1}^{-1}(mean)`` of the oscillation estimate, without c(n)."""
    An1 = a_n_minus_1(A, DimensionContext(sample.n))
    if sample.dirichlet_mean == 0:
        return 0.0
    return sample.r * float(An1.inverse(sample.dirichlet_mean))


def measured_oscillation_ratio(A: YoungFunction, n: int, r: float, points_per_axis: int = 41) -> float:
    """For ``u(x) = x_1`` sampled on a grid over ``B_2r``: (osc over ``B_r``) / shape."""
    axis = np.linspace(-2 * r, 2 * r, points_per_axis)
    grids = np.meshgrid(*([axis] * n), indexing="ij")
    u = grids[0]
    grad = np.sqrt(sum(g ** 2 for g in np.gradient(u, axis[1] - axis[0])))
    dist = np.sqrt(sum(g ** 2 for g in grids))
    in2, in1 = dist <= 2 * r, dist <= r
    mean = float(np.mean(A.eval(grad[in2])))
    osc = float(u[in1].max() - u[in1].min())
    return osc / oscillation_bound(A, DirichletSample(n, r, mean))
