import math

import numpy as np
import pytest

from _family import PIECEWISE_SPECS, family, grid, pure_power
from orlicz_regularity.errors import DomainExceeded, InvariantViolation, PreconditionFailed, RangeExceeded
from orlicz_regularity.young import (CallableYoung, PiecewiseAffine, PiecewiseAffineSpec, PowerLog,
                                     default_c_shift, from_dict, monotone_sup, sandwich_check)


def test_power_values_and_density():
    A = PowerLog(2)
    assert A.eval(3.0) == pytest.approx(9.0, rel=1e-14)
    assert A.density(3.0) == pytest.approx(6.0, rel=1e-14)
    assert A.inverse(4.0) == pytest.approx(2.0, rel=1e-10)


def test_piecewise_example():
    A = PiecewiseAffine(knots=[0, 1, 3.75], slopes=[1, 4])
    assert A.eval(3.75) == pytest.approx(12.0)
    assert A.density(1.0) == 1.0  # left-continuous
    assert A.density(2.0) == 4.0
    assert A.inverse(5.0) == pytest.approx(2.0)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 7.0])
def test_conjugate_of_power_oracle(p):
    q = p / (p - 1)
    t = grid()
    got = pure_power(p).conjugate().eval(t)
    np.testing.assert_allclose(got, t ** q / q, rtol=1e-12)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 7.0])
def test_fenchel_route_matches_closed_form(p):
    from orlicz_regularity.young import _fenchel_conjugate
    t = grid(1e-1, 1e3, 20)
    q = p / (p - 1)
    np.testing.assert_allclose(_fenchel_conjugate(pure_power(p)).eval(t), t ** q / q, rtol=1e-8)


def test_conjugate_of_linear_rejected():
    with pytest.raises(PreconditionFailed):
        PowerLog(1).conjugate()


@pytest.mark.parametrize("knots,slopes", PIECEWISE_SPECS)
def test_piecewise_involution_exact(knots, slopes):
    A = PiecewiseAffine(knots=knots, slopes=slopes)
    AA = A.conjugate().conjugate()
    t = grid(1e-2, 1e2)
    np.testing.assert_allclose(AA.eval(t), A.eval(t), rtol=1e-12)


def test_powerlog_double_conjugate():
    A = PowerLog(3, 2)
    t = grid(1e-1, 1e3, 30)
    np.testing.assert_allclose(A.conjugate().conjugate().eval(t), A.eval(t), rtol=1e-8)


@pytest.mark.parametrize("A", family(), ids=lambda A: A.label)
def test_sandwich_family(A):
    t = grid(1e-2, min(1e4, A.domain_cap / 4), 256)
    report = sandwich_check(A, t)
    assert report["points"] == 256


def test_sandwich_reports_violation():
    class Broken(CallableYoung):
        pass
    bad = Broken(lambda t: np.ones_like(t), lambda t: 3 * t, label="bad")  # A(t) > a(t) t
    with pytest.raises(InvariantViolation, match="A\\(t\\) <= a\\(t\\) t"):
        sandwich_check(bad, [1.0, 2.0])


def test_domain_and_range_errors():
    A = PowerLog(2)
    with pytest.raises(DomainExceeded):
        A.eval(-1.0)
    exp = from_dict({"kind": "callable_ref", "name": "exp_minus_one"})
    with pytest.raises(DomainExceeded):
        exp.eval(1e4)
    with pytest.raises(RangeExceeded):
        exp.inverse(1e305)


def test_spec_validation():
    with pytest.raises(InvariantViolation):
        PiecewiseAffineSpec((0.0, 1.0), (2.0, 1.0))
    with pytest.raises(InvariantViolation):
        PiecewiseAffineSpec((0.5, 1.0), (1.0, 2.0))
    with pytest.raises(InvariantViolation):
        PowerLog(0.5)


def test_serialization_roundtrip():
    for A in (PowerLog(3, 2), PiecewiseAffine(knots=[0, 1, 3.75], slopes=[1, 4]),
              from_dict({"kind": "callable_ref", "name": "t_log"})):
        B = from_dict(A.to_dict())
        t = grid(1e-1, 1e3, 10)
        np.testing.assert_allclose(B.eval(t), A.eval(t), rtol=1e-15)
    with pytest.raises(ValueError):
        from_dict({"kind": "power_log", "p": 2, "schema_version": 99})


def test_monotone_sup():
    f = lambda t: t ** 2
    assert monotone_sup(f, 4.0) == pytest.approx(2.0, rel=1e-12)
    assert monotone_sup(f, 0.0) == 0.0


def test_default_shift_is_e_for_plain_logs():
    assert default_c_shift(3.0, 2.0) == pytest.approx(math.e)
