import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from infocapture.detection import (
    DetectionParams,
    detection_probability,
    expected_information,
    information_integral,
    saturation_time,
    truncation_tail,
)
from infocapture.errors import DomainError
from infocapture.learning import gompertz
from infocapture.spread import SimulationTrace


def trace_from(values, dt=1.0):
    v = np.asarray(values, dtype=float)
    return SimulationTrace(np.arange(len(v)) * dt, np.ones(len(v)), v, v, v, 10, 10, 0.0, dt)


class TestRichards:
    def test_at_m(self):
        assert detection_probability(4.0, DetectionParams(0.5, 1.0, 4.0)) == pytest.approx(0.25, rel=1e-12)

    def test_upper_asymptote(self):
        p = DetectionParams(0.2, 3.0, 10.0)
        assert detection_probability(p.m + 100 / p.rho, p) > 1 - 1e-9

    def test_lower_asymptote(self):
        p = DetectionParams(0.5, 1.0, 300.0)
        assert detection_probability(p.m - 100 / p.rho, p) < 1e-9

    def test_no_overflow_far_left(self):
        p = DetectionParams(1.0, 1.0, 5000.0)
        assert detection_probability(0.0, p) == 0.0

    @pytest.mark.parametrize("rho,sigma,m", [(0, 1, 0), (1.1, 1, 0), (0.5, 0, 0), (0.5, 1, float("nan"))])
    def test_invalid(self, rho, sigma, m):
        with pytest.raises(DomainError):
            DetectionParams(rho, sigma, m)

    @given(st.floats(0.01, 1), st.floats(0.1, 12), st.floats(0.1, 30), st.floats(0, 200), st.floats(0.01, 10))
    def test_increasing_in_t(self, rho, sigma, m, t, dt):
        p = DetectionParams(rho, sigma, m)
        a, b = detection_probability(t, p), detection_probability(t + dt, p)
        assert 0 <= a <= b <= 1

    @given(st.floats(0.01, 1), st.floats(0.1, 6), st.floats(0.01, 6), st.floats(0.1, 30), st.floats(0, 50))
    def test_decreasing_in_sigma(self, rho, sigma, extra, m, t):
        # log(1 + e^{-rho(t-M)}) > 0, so a larger sigma/rho exponent lowers the value
        lo = detection_probability(t, DetectionParams(rho, sigma, m))
        hi = detection_probability(t, DetectionParams(rho, sigma + extra, m))
        assert hi <= lo

    def test_saturation_time(self):
        p = DetectionParams(0.05, 2.0, 3.0)
        t = saturation_time(p)
        assert detection_probability(t, p) == pytest.approx(1 - 1e-6, abs=1e-12)
        assert detection_probability(t - 1, p) < 1 - 1e-6


class TestIntegral:
    def test_no_detection_returns_final(self):
        tr = trace_from([0.1, 0.3, 0.3, 0.8])
        assert expected_information(tr, "edges", None) == pytest.approx(0.8, rel=1e-15)

    def test_zero_increments(self):
        assert expected_information(trace_from([0.0] * 5), "vertices", DetectionParams(0.5, 1, 1)) == 0.0

    def test_two_step_example(self):
        weights = {0.0: 0.0, 0.5: 0.25, 1.5: 0.75}
        got = information_integral([0.0, 0.5, 1.0], [0.0, 1.0, 2.0], lambda t: np.array([weights[x] for x in t]))
        assert got == pytest.approx(0.5 * 0.75 + 0.5 * 0.25, rel=1e-15)

    def test_non_monotone(self):
        with pytest.raises(ValueError, match="non-decreasing"):
            expected_information(trace_from([0.0, 0.5, 0.4]), "edges", None)

    def test_bad_which(self):
        with pytest.raises(DomainError):
            expected_information(trace_from([0.0, 0.1]), "faces", None)

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(0, 0.2), min_size=1, max_size=40), st.floats(0.01, 1), st.floats(0.1, 12), st.floats(0.1, 30))
    def test_bounded_by_final(self, incs, rho, sigma, m):
        values = np.minimum(np.cumsum(incs), 1.0)
        tr = trace_from(values)
        got = expected_information(tr, "edges", DetectionParams(rho, sigma, m))
        assert 0 <= got <= values[-1] + 1e-15

    def test_against_quadrature(self):
        # smooth Lambda(t) = gompertz; the midpoint sum converges to the integral of Lambda'(t)(1 - p(t))
        alpha, r = 30.0, 0.4
        p = DetectionParams(0.1, 1.5, 8.0)

        def integrand(t):
            dlam = alpha * r * math.exp(-r * t) * gompertz(alpha, r, t)
            return dlam * (1 - detection_probability(t, p))

        exact = quad(integrand, 0, 400, limit=400)[0] + gompertz(alpha, r, 0)  # jump at t=0
        for dt in (0.05, 0.02):
            t = np.arange(0, 400 + dt / 2, dt)
            tr = trace_from(gompertz(alpha, r, t), dt)
            got = expected_information(tr, "edges", p)
            assert got == pytest.approx(exact, rel=1e-3)

    def test_grid_refinement_stable(self):
        # constant-rate trace sampled at two resolutions
        p = DetectionParams(0.2, 1.0, 5.0)
        a = expected_information(trace_from(np.linspace(0, 1, 201), 1.0), "edges", p)
        b = expected_information(trace_from(np.linspace(0, 1, 401), 0.5), "edges", p)
        c = expected_information(trace_from(np.linspace(0, 1, 1601), 0.125), "edges", p)
        assert abs(a - b) <= 0.01 * a
        assert abs(a - c) <= 0.01 * a

    def test_tail_bound(self):
        tr = trace_from([0.0, 0.4, 0.6])
        p = DetectionParams(0.5, 1.0, 0.0)
        assert truncation_tail(tr, "edges", p) == pytest.approx(0.4 * (1 - detection_probability(2.0, p)))
        assert truncation_tail(tr, "edges", None) == pytest.approx(0.4)
