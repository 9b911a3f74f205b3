import math

import numpy as np
import pytest

from orlicz_regularity.errors import NotMonotone
from orlicz_regularity.numerics import (Mode, Outcome, PowerLogForm, classify_power_log_integral,
                                        improper_integral, reset_config, set_config, stieltjes_integral,
                                        weakest)


@pytest.mark.parametrize("sigma,outcome", [(0.5, Outcome.DIVERGES), (0.9, Outcome.DIVERGES),
                                           (1.0, Outcome.DIVERGES), (1.1, Outcome.CONVERGES),
                                           (2.0, Outcome.CONVERGES)])
def test_power_tails_numeric(sigma, outcome):
    v = improper_integral(lambda t: t ** -sigma, 1.0, math.inf, Mode.AT_INFINITY)
    assert v.method == "numeric"
    assert v.outcome == outcome


def test_converged_value():
    v = improper_integral(lambda t: t ** -2.0, 1.0, math.inf, Mode.AT_INFINITY)
    assert v.value == pytest.approx(1.0, rel=1e-6)


def test_log_borderline_symbolic_beats_numeric():
    f = lambda t: 1.0 / (t * np.log(math.e + t) ** 2)
    numeric = improper_integral(f, 1.0, math.inf, Mode.AT_INFINITY)
    assert numeric.outcome != Outcome.DIVERGES  # never a false divergence
    form = PowerLogForm(-1.0, -2.0, shift=math.e)
    assert improper_integral(form, 1.0, math.inf, Mode.AT_INFINITY).outcome == Outcome.CONVERGES
    assert improper_integral(PowerLogForm(-1.0, -1.0, shift=math.e), 1.0, math.inf,
                             Mode.AT_INFINITY).outcome == Outcome.DIVERGES


@pytest.mark.parametrize("power,log_power,mode,expected", [
    (-1, -1, Mode.AT_INFINITY, Outcome.DIVERGES),
    (-1, -1.01, Mode.AT_INFINITY, Outcome.CONVERGES),
    (-0.5, -5, Mode.AT_INFINITY, Outcome.DIVERGES),
    (-1, -2, Mode.AT_ZERO, Outcome.CONVERGES),
    (-1, 0, Mode.AT_ZERO, Outcome.DIVERGES),
    (-0.9, 3, Mode.AT_ZERO, Outcome.CONVERGES),
])
def test_exponent_classification(power, log_power, mode, expected):
    assert classify_power_log_integral(power, log_power, mode) == expected


def test_at_zero_numeric():
    assert improper_integral(lambda s: s ** -0.5, 0.0, 1.0, Mode.AT_ZERO).outcome == Outcome.CONVERGES
    assert improper_integral(lambda s: s ** -1.5, 0.0, 1.0, Mode.AT_ZERO).outcome == Outcome.DIVERGES


def test_stieltjes_identity_measure():
    v = stieltjes_integral(lambda s: s, lambda s: s, s0=1.0)
    assert v.outcome == Outcome.CONVERGES
    assert v.value == pytest.approx(0.5, rel=1e-3)


def test_stieltjes_requires_monotone():
    with pytest.raises(NotMonotone):
        stieltjes_integral(lambda s: s, lambda s: -s, s0=1.0)


@pytest.mark.parametrize("gamma,expected", [(1.5, Outcome.DIVERGES), (2.0, Outcome.DIVERGES),
                                            (2.25, Outcome.CONVERGES), (3.0, Outcome.CONVERGES)])
def test_stieltjes_symbolic(gamma, expected):
    g = PowerLogForm(0.0, -gamma, at=Mode.AT_ZERO)
    V = PowerLogForm(0.0, 2.0, coef=-1.0, at=Mode.AT_ZERO)
    assert stieltjes_integral(g, V, s0=0.1).outcome == expected


def test_weakest_and_config():
    c = improper_integral(lambda t: t ** -2.0, 1.0, math.inf, Mode.AT_INFINITY)
    d = improper_integral(lambda t: t ** -0.5, 1.0, math.inf, Mode.AT_INFINITY)
    assert weakest([d, c]).outcome == Outcome.CONVERGES
    assert weakest([d, d]).outcome == Outcome.DIVERGES
    try:
        set_config(decades_infinity=10)
        v = improper_integral(lambda t: t ** -2.0, 1.0, math.inf, Mode.AT_INFINITY)
        assert len(v.evidence.partial_values) <= 10
    finally:
        reset_config()


def test_verdict_serializes():
    v = improper_integral(lambda t: t ** -0.5, 1.0, math.inf, Mode.AT_INFINITY)
    d = v.to_dict()
    assert d["outcome"] == "diverges"
    assert d["value"] == "inf"
