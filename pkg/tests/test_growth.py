import numpy as np
import pytest

from _family import pure_power
from orlicz_regularity.growth import (boyd_lower_index, delta2_check, dominates_near_infinity,
                                      equivalent_near_infinity, nabla2_check, power_ratio_witness)
from orlicz_regularity.young import CALLABLE_REGISTRY, CallableYoung, PowerLog


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 7.0])
def test_powers_are_delta2_and_nabla2(p):
    A = pure_power(p)
    assert delta2_check(A).holds
    assert nabla2_check(A).holds
    assert delta2_check(A.conjugate()).holds
    assert nabla2_check(A.conjugate()).holds


def test_symbolic_delta2_constant():
    r = delta2_check(PowerLog(3))
    assert r.method == "symbolic" and r.C == pytest.approx(8.0)


def test_exponential_fails_delta2_but_conjugate_passes():
    exp = CALLABLE_REGISTRY["exp_minus_one"]()
    assert not delta2_check(exp).holds
    assert not nabla2_check(exp).holds
    assert delta2_check(exp.conjugate()).holds


def test_t_log_is_not_nabla2():
    assert not nabla2_check(CALLABLE_REGISTRY["t_log"]()).holds
    assert not nabla2_check(PowerLog(1, 1)).holds


def test_numeric_nabla2_small_excess():
    A = CallableYoung(lambda t: 1.05 * t ** 0.05, lambda t: t ** 1.05, label="t^1.05")
    r = nabla2_check(A)
    assert r.holds and r.epsilon <= 0.05


def test_boyd_index():
    assert boyd_lower_index(PowerLog(2.5, 1)) == 2.5
    A = CallableYoung(lambda t: 3.5 * t ** 2.5, lambda t: t ** 3.5, label="t^3.5")
    assert boyd_lower_index(A) == pytest.approx(3.5, abs=1e-6)


def test_domination():
    assert dominates_near_infinity(PowerLog(3), PowerLog(2))
    assert not dominates_near_infinity(PowerLog(2), PowerLog(3))
    assert equivalent_near_infinity(PowerLog(3, coef=1 / 3), PowerLog(3, coef=1 / 12))


def test_power_ratio_witness():
    A = PowerLog(2)
    assert power_ratio_witness(A, 1.5, np.logspace(-1, 3, 50)) is None
    assert power_ratio_witness(A, 2.5, np.logspace(-1, 3, 50)) is not None
