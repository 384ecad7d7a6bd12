import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from sblfem.problem import (AssumptionViolation, Coefficient, ProblemSpec, Regime,
                            classify_regime, compute_layer_parameters,
                            constant_coefficient_exact, get_problem, validate_assumptions)

# u(0.5) for eps1 = eps2 = 1, b = c = f = 1; 50-digit mpmath solve of the
# 2x2 boundary system with lambda = (1 -+ sqrt 5)/2
U_HALF_UNPERTURBED = 0.11112788437005242993


def test_rejects_bad_parameters():
    one = Coefficient.const(1.0)
    with pytest.raises(ValueError):
        ProblemSpec(0.0, 1.0, one, one, one)
    with pytest.raises(ValueError):
        ProblemSpec(1.0, 2.0, one, one, one)
    with pytest.raises(ValueError, match="eps1 <= eps2"):
        ProblemSpec(1e-2, 1e-3, one, one, one)


def test_validate_example1():
    d = validate_assumptions(get_problem("example1", 1e-9, 1e-4))
    assert (d.beta, d.gamma, d.rho) == (1.0, 1.0, 1.0)
    d = validate_assumptions(get_problem("example1", 1.0, 1.0), sample_count=2)
    assert d.rho == 1.0


@pytest.mark.filterwarnings("ignore:example2")
def test_validate_example2_is_advisory():
    p = get_problem("example2", 1e-9, 1e-4)
    with pytest.warns(UserWarning, match="c\\(x\\) >= gamma"):
        d = validate_assumptions(p)
    assert d.gamma == 0.0
    with pytest.raises(AssumptionViolation, match="x=0"):
        validate_assumptions(p, strict=True)


def test_user_problem_violation_is_fatal():
    p = ProblemSpec(0.1, 0.5, Coefficient.const(1.0),
                    Coefficient(lambda x: x - 0.5, lambda x: np.ones_like(x)),
                    Coefficient.const(1.0))
    with pytest.raises(AssumptionViolation):
        validate_assumptions(p)


def test_validate_needs_two_samples():
    with pytest.raises(ValueError):
        validate_assumptions(get_problem("example1", 1, 1), sample_count=1)


@pytest.mark.parametrize("eps1, eps2, regime, ratio", [
    (1e-9, 1e-4, Regime.BALANCED, 0.1),
    (1e-12, 1e-12, Regime.REACTION_DIFFUSION, 1e12),
    (1e-10, 1e-5, Regime.BALANCED, 1.0),
    (1e-11, 1e-4, Regime.CONVECTION_REACTION_DIFFUSION, 1e-3),
    (1e-6, 1.0, Regime.CONVECTION_DIFFUSION, 1e-6),
])
def test_classify_regime(eps1, eps2, regime, ratio):
    got, r = classify_regime(eps1, eps2)
    assert got is regime
    assert r == pytest.approx(ratio, rel=1e-12)


@given(st.floats(-10, -1), st.floats(-6, 0), st.floats(-3, 3))
def test_classify_depends_on_ratio_only(lr, le2, shift):
    e2 = 10.0 ** le2
    e1 = 10.0 ** lr * e2 * e2
    s = 10.0 ** shift
    e2b, e1b = e2 * s, e1 * s * s
    if not (0 < e1 <= e2 <= 1 and 0 < e1b <= e2b < 1 and e2 < 1):
        return
    # rescaling may flip the last bit of r right on a threshold
    assume(abs(lr + 1) > 1e-9 and abs(lr - 1) > 1e-9)
    assert classify_regime(e1, e2)[0] == classify_regime(e1b, e2b)[0]


def test_layer_parameters_golden_ratio():
    L = compute_layer_parameters(get_problem("example1", 1.0, 1.0))
    assert L.mu0 == pytest.approx((math.sqrt(5) - 1) / 2, rel=1e-14)
    assert L.mu1 == pytest.approx((math.sqrt(5) + 1) / 2, rel=1e-14)
    assert not L.degenerate


def test_layer_parameters_small_eps():
    # mpmath, 50 digits
    L = compute_layer_parameters(get_problem("example1", 1e-9, 1e-4))
    assert L.mu0 == pytest.approx(9160.7978309961604257, rel=1e-13)
    assert L.mu1 == pytest.approx(109160.79783099616043, rel=1e-13)
    L = compute_layer_parameters(get_problem("example1", 1e-12, 1e-12))
    assert L.mu0 == pytest.approx(999999.50000012500, rel=1e-13)
    assert L.mu1 == pytest.approx(1000000.5000001250, rel=1e-13)


def test_convection_diffusion_scaling():
    # eps2 = 1, eps1 -> 0: mu0 = O(1), mu1 = O(1/eps1)
    for e1 in (1e-4, 1e-6, 1e-8):
        L = compute_layer_parameters(get_problem("example1", e1, 1.0))
        assert 0.5 < L.mu0 < 1.0
        assert 0.9 < L.mu1 * e1 < 1.1


def test_layer_parameters_variable_coefficients():
    # b = 1 + x, c = 2 - x: brute force minimum over a fine grid
    p = ProblemSpec(1e-3, 1e-1, Coefficient(lambda x: 1 + x, lambda x: np.ones_like(x)),
                    Coefficient(lambda x: 2 - x, lambda x: -np.ones_like(x)),
                    Coefficient.const(1.0))
    L = compute_layer_parameters(p, sample_count=64)
    x = np.linspace(0, 1, 200001)
    b, c = 1 + x, 2 - x
    s = np.sqrt((0.1 * b) ** 2 + 4e-3 * c)
    assert L.mu0 == pytest.approx(np.min((-0.1 * b + s) / 2e-3), rel=1e-8)
    assert L.mu1 == pytest.approx(np.min((0.1 * b + s) / 2e-3), rel=1e-8)


def test_degenerate_example2_uses_local_scales():
    with pytest.warns(UserWarning, match="local layer scales"):
        L = compute_layer_parameters(get_problem("example2", 1e-9, 1e-4))
    assert L.degenerate
    # d0 * (-lambda0(d0)) = 1 and d1 * lambda1(1 - d1) = 1
    e1, e2 = 1e-9, 1e-4
    d0 = 1 / L.mu0
    s = math.sqrt((e2 * math.exp(d0)) ** 2 + 4 * e1 * d0)
    assert d0 * 2 * d0 / (e2 * math.exp(d0) + s) == pytest.approx(1.0, rel=1e-9)
    d1 = 1 / L.mu1
    x = 1 - d1
    s = math.sqrt((e2 * math.exp(x)) ** 2 + 4 * e1 * x)
    assert d1 * (e2 * math.exp(x) + s) / (2 * e1) == pytest.approx(1.0, rel=1e-9)
    assert 0 < L.mu0 <= L.mu1


@settings(max_examples=100)
@given(st.floats(-12, 0), st.floats(0, 1))
def test_mu_bounds_constant_coefficients(le2, frac):
    # eps1 in [eps2 * 1e-12, eps2], on a log scale
    e2 = 10.0 ** le2
    e1 = e2 * 10.0 ** (-12 * frac)
    L = compute_layer_parameters(get_problem("example1", e1, e2), sample_count=4)
    assert 0 < L.mu0 <= L.mu1 and math.isfinite(L.mu1)
    assert math.sqrt(e1) * L.mu0 <= 1.0 + 1e-12
    assert e2 * L.mu0 <= 1.0 + 1e-12


def test_cancellation_free_form_matches_naive():
    for e1, e2 in [(2e-2, 1e-1), (2e-4, 1e-2), (0.5, 0.5), (1e-6, 1e-3)]:
        assert e1 >= e2 * e2
        L = compute_layer_parameters(get_problem("example1", e1, e2), sample_count=4)
        naive = (-e2 + math.sqrt(e2 * e2 + 4 * e1)) / (2 * e1)
        assert L.mu0 == pytest.approx(naive, rel=1e-8)


def test_exact_solution_boundary_and_value():
    u = constant_coefficient_exact(get_problem("example1", 1.0, 1.0))
    assert u.lambda0 < 0 < u.lambda1
    v, _ = u(np.array([0.0, 1.0]))
    assert np.all(np.abs(v) <= 1e-12)
    assert float(u(0.5)[0]) == pytest.approx(U_HALF_UNPERTURBED, rel=1e-14)


def test_exact_solution_no_overflow():
    u = constant_coefficient_exact(get_problem("example1", 1e-9, 1e-4))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        v, dv = u(np.linspace(0, 1, 1001))
    assert np.isfinite(v).all() and np.isfinite(dv).all()
    assert abs(float(u(0.5)[0]) - 1.0) <= 1e-300
    assert abs(v[0]) <= 1e-12 and abs(v[-1]) <= 1e-12


@pytest.mark.parametrize("e1, e2", [(1.0, 1.0), (1e-2, 1e-1), (1e-3, 1e-3), (1e-4, 1e-2)])
def test_exact_solution_residual(e1, e2):
    prob = get_problem("example1", e1, e2)
    u = constant_coefficient_exact(prob)
    k = np.arange(50)
    x = 0.5 - 0.5 * np.cos((2 * k + 1) * np.pi / 100)
    v, dv = u(x)
    res = -e1 * u.second_derivative(x) + e2 * dv + v - 1.0
    assert np.max(np.abs(res)) <= 1e-8


def test_exact_needs_constant_coefficients():
    with pytest.raises(ValueError):
        constant_coefficient_exact(get_problem("example2", 1.0, 1.0))


def test_unknown_problem():
    with pytest.raises(KeyError):
        get_problem("example9", 1, 1)
