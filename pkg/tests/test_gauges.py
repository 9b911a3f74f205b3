import math

import numpy as np
import pytest

from orlicz_regularity.errors import Febbraio1Violated, NotIncreasing, SingularEvaluation, ZeroPotential
from orlicz_regularity.gauges import (DiscreteDensity, capacity_gauge, capacity_upper_bound,
                                      hausdorff_admissible, hausdorff_power_log, kernel_potential,
                                      make_sigma, normalize_gauge, sigma_admissible, unit_ball_volume)
from orlicz_regularity.numerics import Outcome, PowerLogForm
from orlicz_regularity.transforms import a_n_minus_1
from orlicz_regularity.young import PowerLog


def test_unit_ball_volume():
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)


@pytest.mark.parametrize("sigma,expected", [("1", Outcome.DIVERGES), ("log", Outcome.DIVERGES),
                                            ("log^2", Outcome.CONVERGES)])
def test_sigma_admissibility_delta2(sigma, expected):
    T = a_n_minus_1(PowerLog(2.5), 3)
    assert sigma_admissible(make_sigma(sigma), T).outcome == expected


def test_sigma_admissibility_without_delta2():
    from orlicz_regularity.young import CALLABLE_REGISTRY
    exp = CALLABLE_REGISTRY["exp_minus_one"]()
    v = sigma_admissible(make_sigma("1"), exp)
    # exp(l t)/exp(t) decays for l < 1: never admissible, at best unconfirmed on the short domain
    assert v.outcome != Outcome.DIVERGES


@pytest.mark.parametrize("alpha", [0.5, 1.0])
def test_riesz_reduction(alpha):
    f = DiscreteDensity.uniform_ball(3, 1.5, density=2.0)
    got = kernel_potential(f, np.zeros(3), PowerLogForm(alpha))
    ref = 3 * unit_ball_volume(3) * 1.5 ** alpha / alpha * 2.0
    assert got == pytest.approx(ref, rel=1e-10)


def test_single_atom_and_zero():
    psi = PowerLogForm(2.0)
    f = DiscreteDensity(points=[[0.0, 3.0]], weights=[5.0])
    assert kernel_potential(f, [0.0, 0.0], psi) == pytest.approx(5.0 / (9.0 * (1 / 3) ** 2))
    assert kernel_potential(DiscreteDensity(points=[[1.0, 1.0]], weights=[0.0]), [0, 0], psi) == 0.0
    with pytest.raises(SingularEvaluation):
        kernel_potential(f, [0.0, 3.0], psi)


def test_potential_additive_and_homogeneous():
    psi = PowerLogForm(1.5)
    f = DiscreteDensity(points=[[1, 0], [0, 2]], weights=[1.0, 3.0])
    g = DiscreteDensity(points=[[2, 2]], weights=[0.5])
    both = DiscreteDensity(points=[[1, 0], [0, 2], [2, 2]], weights=[1.0, 3.0, 0.5])
    x = [0.1, 0.1]
    assert kernel_potential(both, x, psi) == pytest.approx(kernel_potential(f, x, psi) + kernel_potential(g, x, psi))
    assert kernel_potential(f.scaled(3.0), x, psi) == pytest.approx(3 * kernel_potential(f, x, psi))


def test_capacity_bound():
    psi = PowerLogForm(1.5)
    d = 2.0
    f = DiscreteDensity(points=[[d, 0.0]], weights=[1.0])
    assert capacity_upper_bound([[0.0, 0.0]], psi, f) == pytest.approx(d ** 2 * (1 / d) ** 1.5)
    assert capacity_upper_bound([[0.0, 0.0]], psi, f.scaled(7.0)) == pytest.approx(d ** 2 * (1 / d) ** 1.5)
    small = capacity_upper_bound([[0.0, 0.0]], psi, f)
    big = capacity_upper_bound([[0.0, 0.0], [-5.0, 0.0]], psi, f)
    assert big >= small
    with pytest.raises(ZeroPotential):
        capacity_upper_bound([[0.0, 0.0]], psi, DiscreteDensity(points=[[1.0, 0.0]], weights=[0.0]))


def test_normalize_gauge():
    H = normalize_gauge(lambda r: r ** 2.0, 3)
    assert not H.degenerate
    r = np.logspace(-10, 0, 50)
    np.testing.assert_allclose(H(r), r ** 2, rtol=1e-12)
    assert normalize_gauge(lambda r: r ** 4.0, 3).degenerate
    wobble = lambda r: r ** 2 * (2 + np.sin(np.log(r)) * 0.5)
    H = normalize_gauge(wobble, 3)
    r = np.logspace(-15, -1, 200)
    assert np.all(H(r) <= wobble(r) * (1 + 1e-9))
    ratio = H(r) / r ** 3
    assert np.all(np.diff(ratio) <= 1e-9 * ratio[1:])
    with pytest.raises(NotIncreasing):
        normalize_gauge(lambda r: 1 - r, 3)


@pytest.mark.parametrize("gamma,expected", [(1.5, Outcome.DIVERGES), (2.0, Outcome.DIVERGES),
                                            (2.25, Outcome.CONVERGES), (3.0, Outcome.CONVERGES)])
def test_hausdorff_log_gauges(gamma, expected):
    G = capacity_gauge(PowerLog(3, -2), 3)
    assert hausdorff_admissible(hausdorff_power_log(0.0, -gamma), G, 3).outcome == expected


@pytest.mark.parametrize("gamma,expected", [(0.5, Outcome.DIVERGES), (1.0, Outcome.DIVERGES),
                                            (1.5, Outcome.CONVERGES)])
def test_hausdorff_intermediate_power(gamma, expected):
    G = capacity_gauge(PowerLog(2.5), 3)
    assert hausdorff_admissible(hausdorff_power_log(0.5, -gamma), G, 3).outcome == expected


def test_hausdorff_monotone_in_h():
    G = capacity_gauge(PowerLog(2.5), 3)
    small = hausdorff_power_log(0.5, -3.0)
    big = hausdorff_power_log(0.5, -1.5)
    assert hausdorff_admissible(big, G, 3).outcome == Outcome.CONVERGES
    assert hausdorff_admissible(small, G, 3).outcome == Outcome.CONVERGES


def test_febbraio1_violation():
    G = capacity_gauge(PowerLog(2), 2)  # s^2 Psi(1/s) = 1 does not decay
    with pytest.raises(Febbraio1Violated):
        hausdorff_admissible(hausdorff_power_log(2.0, 0.0), G, 2)
