import numpy as np
import pytest

from orlicz_regularity.counterexamples import (CounterexampleParams, certification_report, certify_delta2,
                                               certify_divergence, counterexample_young, delta2_constant,
                                               generate, knot_identity_residuals, lower_bound_terms)
from orlicz_regularity.errors import CertificationFailed, ParameterWindow
from orlicz_regularity.numerics import Outcome
from orlicz_regularity.young import PiecewiseAffine, PiecewiseAffineSpec, PowerLog

N2 = CounterexampleParams(n=2, q=1.5, alpha=1.25, K=40)


def test_recursion_values():
    spec = generate(N2)
    np.testing.assert_allclose(spec.slopes[:6], 4.0 ** np.arange(6))
    assert spec.knots[2] == pytest.approx(3.75)
    assert spec.knots[3] == pytest.approx(15.0)
    assert PiecewiseAffine(spec).eval(3.75) == pytest.approx(12.0)


def test_knot_identity():
    res = knot_identity_residuals(generate(N2), N2.alpha)
    assert np.all(np.abs(res[1:]) <= 1e-10)
    assert abs(res[0]) > 1e-3  # k = 1 is not constrained


def test_witness():
    from orlicz_regularity.counterexamples import certify_generation
    rep = certify_generation(generate(N2), N2)
    assert rep["witness"] == [pytest.approx(3.0), pytest.approx(3.75)]
    a, b = rep["witness_ratios"]
    assert a == pytest.approx(9 / 3 ** 1.5, rel=1e-9)  # A(3) = 1 + 4 * 2
    assert a > b


def test_parameter_windows():
    with pytest.raises(ParameterWindow):
        CounterexampleParams(n=2, q=3.0, alpha=2.0)
    with pytest.raises(ParameterWindow):
        CounterexampleParams(n=2, q=1.5, alpha=1.25, beta=0.9)
    with pytest.raises(ParameterWindow):
        CounterexampleParams(n=2, q=1.5, alpha=1.25, m1=3.0)
    with pytest.raises(ParameterWindow):
        CounterexampleParams(n=3, q=2.5, alpha=1.9, beta=1.2)
    with pytest.raises(ParameterWindow):
        CounterexampleParams(n=2, q=1.5, alpha=1.25, K=4)


def test_divergence_n2():
    spec = generate(N2)
    v = certify_divergence(spec, N2)
    assert v.outcome == Outcome.DIVERGES and v.method == "certificate"
    from orlicz_regularity.counterexamples import interval_contributions
    np.testing.assert_allclose(interval_contributions(spec)[1:], 3.2, rtol=1e-9)


def test_tampered_slope_reports_k2():
    spec = generate(N2)
    m = list(spec.slopes)
    m[2] /= 2
    with pytest.raises(CertificationFailed) as exc:
        certify_divergence(PiecewiseAffineSpec(spec.knots, tuple(m)), N2)
    assert exc.value.k == 2


def test_n3_auto_beta_and_terms():
    p = CounterexampleParams(n=3, q=2.5, alpha=1.9)
    assert 0 < p.alpha - p.beta <= 0.05 + 1e-12
    assert p.divergence_ratio() >= 1
    terms = lower_bound_terms(p, 40)
    assert np.all(np.diff(terms) >= 0)
    assert certify_divergence(generate(p), p).outcome == Outcome.DIVERGES


def test_delta2_certificates():
    assert delta2_constant(N2) == pytest.approx(64.0)
    rep = certify_delta2(generate(N2), N2)
    assert rep["holds"] and rep["max_ratio"] <= 64.0
    p3 = CounterexampleParams(n=3, q=2.5, alpha=1.9)
    assert certify_delta2(generate(p3), p3)["c"] == pytest.approx(delta2_constant(p3))
    rep = certify_delta2(PowerLog(3.0))
    assert rep["c"] == pytest.approx(4.0, rel=1e-9)


def test_delta2_tampered_gap_fails():
    spec = generate(N2)
    m = [x * (1e6 if k >= 5 else 1.0) for k, x in enumerate(spec.slopes)]
    with pytest.raises(CertificationFailed):
        certify_delta2(PiecewiseAffine(knots=spec.knots, slopes=m), N2)


def test_truncation_stability():
    a = generate(CounterexampleParams(n=2, q=1.5, alpha=1.25, K=12))
    b = generate(CounterexampleParams(n=2, q=1.5, alpha=1.25, K=30))
    assert a.knots == b.knots[:13]
    assert a.slopes == b.slopes[:12]


def test_report_and_convexity():
    rep = certification_report(N2)
    assert rep["passed"] and [c["check"] for c in rep["checks"]] == ["generation", "divergence", "delta2"]
    A = counterexample_young(N2)
    assert np.all(np.diff(A.slopes) > 0)
