"""Bessel evaluations, root finding, quadrature, and the decay fit."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nfpurcell import numerics as nm
from nfpurcell.errors import BracketError, DomainError, FitDegenerateError

# Frozen 20-digit references from arbitrary-precision (mpmath) evaluation.
K0_AT_1 = 0.42102443824070833334
K1_AT_2 = 0.13986588181652242728
J0_FIRST_ZERO = 2.4048255576957727686
J1_AT_1P7 = 0.5777652315290232198
K2_AT_0P37 = 14.141531927790908444


class TestBessel:
    def test_j0_at_zero_limit(self):
        assert nm.bessel_j(0, 1e-12).value == pytest.approx(1.0, abs=1e-12)

    def test_j1_at_zero_limit(self):
        assert nm.bessel_j(1, 1e-12).value == pytest.approx(0.0, abs=1e-12)

    def test_j0_first_zero(self):
        assert abs(nm.bessel_j(0, J0_FIRST_ZERO).value) < 1e-15

    def test_j1_reference_value(self):
        ev = nm.bessel_j(1, 1.7)
        assert ev.value == pytest.approx(J1_AT_1P7, rel=1e-12)

    def test_k0_reference_value(self):
        assert nm.bessel_k(0, 1.0).value == pytest.approx(K0_AT_1, rel=1e-12)

    def test_k_reference_values(self):
        assert nm.bessel_k(1, 2.0).value == pytest.approx(K1_AT_2, rel=1e-12)
        assert nm.bessel_k(2, 0.37).value == pytest.approx(K2_AT_0P37, rel=1e-12)

    @given(st.floats(min_value=1.5, max_value=60.0))
    def test_k_matches_asymptotic_form_at_large_x(self, x):
        # K_i(x) ~ sqrt(pi/2x) e^-x with relative error bounded by the first
        # neglected term of the expansion, (4 n^2 - 1)/(8x).
        for order in (0, 1):
            lead = math.sqrt(math.pi / (2 * x)) * math.exp(-x)
            rel = nm.bessel_k(order, x).value / lead - 1.0
            bound = (abs(4 * order * order - 1) / (8 * x)) * 1.5 + 1e-12
            assert abs(rel) <= bound

    @given(st.floats(min_value=0.05, max_value=100.0))
    @settings(max_examples=200)
    def test_wronskian_identity(self, x):
        # I_n K_n' - I_n' K_n = -1/x
        from scipy.special import iv, ivp
        for n in (0, 1, 2):
            k = nm.bessel_k(n, x)
            lhs = iv(n, x) * k.derivative - ivp(n, x) * k.value
            assert lhs * x == pytest.approx(-1.0, rel=1e-10)

    @given(st.floats(min_value=0.05, max_value=100.0))
    def test_k_recurrence(self, x):
        k0 = nm.bessel_k(0, x).value
        k1 = nm.bessel_k(1, x).value
        k2 = nm.bessel_k(2, x).value
        assert k2 == pytest.approx(k0 + 2.0 * k1 / x, rel=1e-10)

    def test_k_positive_decreasing(self):
        for n in (0, 1, 2):
            for x in (0.1, 1.0, 7.0, 50.0):
                ev = nm.bessel_k(n, x)
                assert ev.value > 0
                assert ev.derivative < 0

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            nm.bessel_k(0, 0.0)
        with pytest.raises(DomainError):
            nm.bessel_k(1, -2.0)
        with pytest.raises(DomainError):
            nm.bessel_j(0, float("nan"))
        with pytest.raises(DomainError):
            nm.bessel_j(3, 1.0)


class TestFindRoot:
    def test_sqrt2(self):
        root = nm.find_root(lambda x: x * x - 2.0, nm.RootBracket(1.0, 2.0))
        assert root == pytest.approx(math.sqrt(2.0), rel=1e-14)

    def test_cosine(self):
        root = nm.find_root(math.cos, nm.RootBracket(1.0, 2.0))
        assert root == pytest.approx(math.pi / 2.0, rel=1e-14)

    def test_no_sign_change_raises(self):
        with pytest.raises(BracketError):
            nm.find_root(lambda x: x * x + 1.0, nm.RootBracket(0.0, 1.0))

    def test_deterministic_bitwise(self):
        f = lambda x: math.exp(x) - 3.0 * x
        r1 = nm.find_root(f, nm.RootBracket(0.0, 1.0))
        r2 = nm.find_root(f, nm.RootBracket(0.0, 1.0))
        assert r1 == r2

    def test_stays_inside_bracket(self):
        # steep function with a pole just outside the bracket
        f = lambda x: 1.0 / (x - 0.999) - 10.0
        root = nm.find_root(f, nm.RootBracket(1.0, 3.0))
        assert 1.0 <= root <= 3.0
        assert abs(f(root)) < 1e-8


class TestIntegrate:
    def test_linear(self):
        assert nm.integrate(lambda x: x, 0.0, 1.0) == pytest.approx(0.5, rel=1e-12)

    def test_truncated_exponential(self):
        val = nm.integrate(math.exp, -50.0, 0.0, tol=1e-12)
        assert val == pytest.approx(1.0, abs=1e-10)

    def test_against_fine_riemann_sum(self):
        f = lambda x: math.sin(3.0 * x) ** 2 / (1.0 + x)
        val = nm.integrate(f, 0.0, 4.0, tol=1e-10)
        xs = np.linspace(0.0, 4.0, 400_001)
        riemann = np.trapezoid([f(x) for x in xs], xs)
        assert val == pytest.approx(riemann, rel=1e-3)

    def test_nonfinite_integrand_raises(self):
        with pytest.raises(DomainError):
            nm.integrate(lambda x: 1.0 / x, -1.0, 1.0)


def _make_problem(rate, amp=1000.0, offset=0.0, t_max=200.0, n=201):
    t = np.linspace(0.0, t_max, n)
    y = amp * np.exp(-rate * t) + offset
    w = 1.0 / np.maximum(y, 1.0)
    return nm.FitProblem(t, y, w)


class TestFitExpOffset:
    RATE = 1.0 / 26.24   # 1/ns

    def test_noiseless_recovery(self):
        prob = _make_problem(self.RATE)
        res = nm.fit_exp_offset(prob, (5.0, 80.0), offset=0.0)
        assert res.rate == pytest.approx(self.RATE, rel=1e-7)
        assert res.amplitude == pytest.approx(1000.0, rel=1e-7)
        assert res.chi2_reduced < 1e-12

    def test_window_shift_stability(self):
        # windows anywhere within one to three lifetimes: < 0.1% variation
        prob = _make_problem(self.RATE, offset=2.0)
        tau = 1.0 / self.RATE
        rates = []
        for start in np.linspace(tau, 2.0 * tau, 7):
            res = nm.fit_exp_offset(prob, (start, start + tau), offset=2.0)
            rates.append(res.rate)
        spread = (max(rates) - min(rates)) / self.RATE
        assert spread < 1e-3

    def test_two_rate_mixture_returns_weighted_mean(self):
        t = np.linspace(0.0, 200.0, 201)
        y = 500.0 * np.exp(-0.95 * self.RATE * t) + 500.0 * np.exp(-1.05 * self.RATE * t)
        w = 1.0 / np.maximum(y, 1.0)
        prob = nm.FitProblem(t, y, w)
        tau = 1.0 / self.RATE
        res = nm.fit_exp_offset(prob, (tau, 3.0 * tau), offset=0.0)
        assert res.rate == pytest.approx(self.RATE, rel=0.01)

    def test_offset_estimated_from_tail(self):
        prob = _make_problem(self.RATE, offset=7.5, t_max=300.0, n=301)
        res = nm.fit_exp_offset(prob, (20.0, 80.0))
        assert res.offset == pytest.approx(7.5, rel=0.01)
        assert res.rate == pytest.approx(self.RATE, rel=1e-3)

    @given(st.floats(min_value=0.01, max_value=0.5),
           st.floats(min_value=10.0, max_value=1e5))
    @settings(max_examples=30, deadline=None)
    def test_exact_model_recovery_property(self, rate, amp):
        t = np.linspace(0.0, 6.0 / rate, 200)
        y = amp * np.exp(-rate * t)
        prob = nm.FitProblem(t, y, np.ones_like(t))
        res = nm.fit_exp_offset(prob, (0.5 / rate, 4.0 / rate), offset=0.0)
        assert res.rate == pytest.approx(rate, rel=1e-6)
        assert res.amplitude == pytest.approx(amp, rel=1e-6)

    def test_window_needs_ten_bins(self):
        prob = _make_problem(self.RATE, n=30)
        with pytest.raises(DomainError):
            nm.fit_exp_offset(prob, (0.0, 10.0), offset=0.0)

    def test_degenerate_data_raises(self):
        t = np.linspace(0.0, 10.0, 50)
        prob = nm.FitProblem(t, np.zeros_like(t), np.ones_like(t))
        with pytest.raises(FitDegenerateError):
            nm.fit_exp_offset(prob, (0.0, 10.0), offset=0.0)
