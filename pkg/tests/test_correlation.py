"""Exchange-sensitive correlation function on a fixed plane behind a grating."""

import math

import numpy as np
import pytest

from pairwave import (
    Axis,
    ConvergenceError,
    GratingSpec,
    PlaneWaveMode,
    Statistics,
    correlation_closed,
    correlation_curve,
    correlation_numeric,
    correlation_two_coefficient,
    free_correlation_reference,
    normalize_coefficients,
    pair_probability_expanded,
    pair_probability_on_plane,
    phase_mismatch,
    small_eta_asymptotics,
)
from pairwave.correlation import term_phase_crossed, term_phase_direct

K = PlaneWaveMode(2 * math.pi / 0.5)
P = PlaneWaveMode(2 * math.pi / 0.3)


def random_grating(rng, n_max, d=1.0):
    coeffs = {n: complex(*rng.normal(size=2)) for n in range(-n_max, n_max + 1)}
    return normalize_coefficients(GratingSpec(d, coeffs))


def two_coeff_grating(a0=0.8, a1=0.6):
    return normalize_coefficients(GratingSpec(1.0, {0: a0, 1: a1}))


class TestTermPhases:
    # hand-enumerable tuple (n,m,r,s) = (0,1,0,1): the direct phase must be
    # exactly -phi_kp and the crossed phase must cancel to zero
    def test_direct_phase_pins_to_mismatch(self):
        g = two_coeff_grating()
        L = 3.7
        phi = phase_mismatch(K, P, g.d, L)
        tp = term_phase_direct(g, K, P, L, 0, 1, 0, 1)
        assert tp.value == pytest.approx(-phi, abs=1e-14)
        assert tp.kind == "direct"
        assert tp.indices == (0, 1, 0, 1)

    def test_crossed_phase_cancels_on_diagonal_tuple(self):
        g = two_coeff_grating()
        tp = term_phase_crossed(g, K, P, 3.7, 0, 1, 0, 1)
        assert tp.value == pytest.approx(0.0, abs=1e-14)
        assert tp.kind == "crossed"

    def test_crossed_phase_on_swapped_tuple(self):
        g = two_coeff_grating()
        L = 3.7
        phi = phase_mismatch(K, P, g.d, L)
        tp = term_phase_crossed(g, K, P, L, 0, 1, 1, 0)
        assert tp.value == pytest.approx(-phi, abs=1e-14)

    def test_coefficient_phases_enter(self):
        g = normalize_coefficients(GratingSpec(1.0, {0: 1.0, 1: 1.0j}))
        tp = term_phase_direct(g, K, P, 0.0, 0, 1, 0, 1)
        # xi_1 - xi_0 - xi_1 + xi_0 = 0 for this tuple
        assert tp.value == pytest.approx(0.0, abs=1e-14)
        tp = term_phase_crossed(g, K, P, 0.0, 0, 0, 1, 1)
        # xi_r + xi_s - xi_n - xi_m = pi/2 + pi/2
        assert tp.value == pytest.approx(math.pi, abs=1e-14)


class TestCorrelationClosed:
    def test_matches_quadrature_on_random_gratings(self):
        rng = np.random.default_rng(99)
        worst = 0.0
        for _ in range(3):
            g = random_grating(rng, 2)
            k = PlaneWaveMode(rng.uniform(4, 30))
            p = PlaneWaveMode(rng.uniform(4, 30))
            L = rng.uniform(0.1, 5.0)
            etas = rng.uniform(0.0, g.d, 4)
            for s in (Statistics.BOSON, Statistics.FERMION):
                closed = correlation_closed(g, k, p, s, L, etas)
                for i, eta in enumerate(etas):
                    numeric = correlation_numeric(g, k, p, s, L, eta, tol=1e-10)
                    worst = max(worst, abs(closed[i] - numeric))
        assert worst <= 1e-8

    def test_periodic_in_eta(self):
        rng = np.random.default_rng(7)
        g = random_grating(rng, 3)
        etas = np.linspace(0.0, g.d, 17)
        for s in (Statistics.BOSON, Statistics.FERMION):
            a = correlation_closed(g, K, P, s, 2.2, etas)
            b = correlation_closed(g, K, P, s, 2.2, etas + g.d)
            np.testing.assert_allclose(a, b, atol=1e-12)

    def test_single_coefficient_extremes(self):
        g = normalize_coefficients(GratingSpec(1.0, {0: 1.0}))
        etas = np.linspace(0, 1, 9)
        np.testing.assert_allclose(
            correlation_closed(g, K, P, Statistics.BOSON, 4.0, etas), 2.0, atol=1e-14)
        np.testing.assert_allclose(
            correlation_closed(g, K, P, Statistics.FERMION, 4.0, etas), 0.0, atol=1e-14)

    def test_requires_exchange_statistics(self):
        g = two_coeff_grating()
        with pytest.raises(ValueError):
            correlation_closed(g, K, P, Statistics.DISTINGUISHABLE, 1.0, 0.1)

    def test_requires_normalized_grating(self):
        g = GratingSpec(1.0, {0: 2.0, 1: 1.0})
        with pytest.raises(ValueError):
            correlation_closed(g, K, P, Statistics.BOSON, 1.0, 0.1)


class TestTwoCoefficientCase:
    def test_matches_general_sum(self):
        g = two_coeff_grating()
        L = 3.3
        phi = phase_mismatch(K, P, g.d, L)
        etas = np.linspace(0.0, 1.0, 21)
        for s in (Statistics.BOSON, Statistics.FERMION):
            general = correlation_closed(g, K, P, s, L, etas)
            special = correlation_two_coefficient(0.8, 0.6, phi, s, etas, 1.0)
            np.testing.assert_allclose(general, special, atol=1e-12)

    def test_fermion_contact_is_exact_zero(self):
        phi = 1.234
        assert correlation_two_coefficient(0.8, 0.6, phi, Statistics.FERMION, 0.0, 1.0) == 0.0

    def test_boson_contact_value(self):
        phi = 0.77
        a02, a12 = 0.64, 0.36
        got = correlation_two_coefficient(0.8, 0.6, phi, Statistics.BOSON, 0.0, 1.0)
        assert got == pytest.approx(2 + 4 * a02 * a12 * math.cos(phi), abs=1e-14)

    def test_balanced_zero_mismatch_gives_three(self):
        a = 1 / math.sqrt(2)
        got = correlation_two_coefficient(a, a, 0.0, Statistics.BOSON, 0.0, 1.0)
        assert got == pytest.approx(3.0, abs=1e-14)

    def test_normalization_enforced(self):
        with pytest.raises(ValueError):
            correlation_two_coefficient(0.8, 0.7, 0.0, Statistics.BOSON, 0.0, 1.0)


class TestSmallEtaAsymptotics:
    def test_zero_mismatch_flattens_fermions(self):
        fermion_coeff, _, c0 = small_eta_asymptotics(0.8, 0.6, 0.0, 1.0)
        assert c0 == 0.0
        assert fermion_coeff == 0.0

    def test_balanced_pi_mismatch(self):
        a = 1 / math.sqrt(2)
        fermion_coeff, _, c0 = small_eta_asymptotics(a, a, math.pi, 1.0)
        assert c0 == pytest.approx(2.0, abs=1e-14)
        assert fermion_coeff == pytest.approx((2 * math.pi) ** 2 / 2, rel=1e-12)

    @pytest.mark.parametrize("phi", [0.4, 1.9, 2.8])
    def test_finite_difference_agreement(self, phi):
        d = 1.0
        h = 1e-3 * d
        fermion_coeff, boson_coeff, _ = small_eta_asymptotics(0.8, 0.6, phi, d)
        cf = correlation_two_coefficient(0.8, 0.6, phi, Statistics.FERMION, h, d)
        assert cf / h**2 == pytest.approx(fermion_coeff, rel=0.01)
        cb0 = correlation_two_coefficient(0.8, 0.6, phi, Statistics.BOSON, 0.0, d)
        cbh = correlation_two_coefficient(0.8, 0.6, phi, Statistics.BOSON, h, d)
        assert (cbh - cb0) / h**2 == pytest.approx(boson_coeff, rel=0.01)


class TestCorrelationNumeric:
    def test_single_coefficient_constants(self):
        g = normalize_coefficients(GratingSpec(1.0, {0: 1.0}))
        for eta in (0.0, 0.3, 0.8):
            assert correlation_numeric(g, K, P, Statistics.BOSON, 4.0, eta) == pytest.approx(2.0, abs=1e-9)
            assert correlation_numeric(g, K, P, Statistics.FERMION, 4.0, eta) == pytest.approx(0.0, abs=1e-9)

    def test_fermion_contact_zero_for_any_grating(self):
        rng = np.random.default_rng(17)
        for _ in range(3):
            g = random_grating(rng, 2)
            L = rng.uniform(0.5, 5.0)
            assert abs(correlation_numeric(g, K, P, Statistics.FERMION, L, 0.0)) <= 1e-10

    def test_mean_of_statistics_is_no_exchange(self):
        rng = np.random.default_rng(27)
        g = random_grating(rng, 2)
        for eta in (0.1, 0.45):
            cb = correlation_numeric(g, K, P, Statistics.BOSON, 2.0, eta)
            cf = correlation_numeric(g, K, P, Statistics.FERMION, 2.0, eta)
            cne = correlation_numeric(g, K, P, Statistics.NO_EXCHANGE, 2.0, eta)
            assert 0.5 * (cb + cf) == pytest.approx(cne, abs=1e-8)

    def test_budget_exhaustion_raises(self):
        rng = np.random.default_rng(37)
        g = random_grating(rng, 3)
        with pytest.raises(ConvergenceError):
            correlation_numeric(g, PlaneWaveMode(9.0), PlaneWaveMode(17.0),
                                Statistics.BOSON, 2.0, 0.3, tol=1e-14, budget=60)


class TestFreeReference:
    def test_contact_values(self):
        assert free_correlation_reference(K, P, Statistics.FERMION, 0.0) == pytest.approx(0.0)
        assert free_correlation_reference(K, P, Statistics.BOSON, 0.0) == pytest.approx(2.0)

    def test_period_set_by_wavevector_difference(self):
        period = 2 * math.pi / abs(P.k - K.k)
        etas = np.linspace(0, 3, 11)
        a = free_correlation_reference(K, P, Statistics.BOSON, etas)
        b = free_correlation_reference(K, P, Statistics.BOSON, etas + period)
        np.testing.assert_allclose(a, b, atol=1e-12)


class TestExpandedProbability:
    def test_matches_amplitude_composition(self):
        rng = np.random.default_rng(47)
        worst = 0.0
        for _ in range(4):
            g = random_grating(rng, 3)
            k = PlaneWaveMode(rng.uniform(4, 30))
            p = PlaneWaveMode(rng.uniform(4, 30))
            L = rng.uniform(0.1, 5.0)
            xs = rng.uniform(0, g.d, 12)
            ys = rng.uniform(0, g.d, 12)
            for s in Statistics:
                direct = pair_probability_on_plane(g, k, p, s, L, xs, ys)
                expanded = pair_probability_expanded(g, k, p, s, L, xs, ys)
                worst = max(worst, float(np.max(np.abs(direct - expanded))))
        assert worst <= 1e-12


class TestCorrelationCurve:
    def test_default_grid_and_statistics(self):
        g = two_coeff_grating()
        curve = correlation_curve(g, K, P, (Statistics.BOSON, Statistics.FERMION), 3.0)
        assert curve.eta_axis.count == 257
        assert curve.eta_axis.lo == 0.0
        assert curve.eta_axis.hi == g.d
        assert set(curve.values) == {Statistics.BOSON, Statistics.FERMION}
        assert len(curve.values[Statistics.BOSON]) == 257

    def test_no_exchange_is_mean(self):
        g = two_coeff_grating()
        stats = (Statistics.BOSON, Statistics.FERMION, Statistics.NO_EXCHANGE)
        curve = correlation_curve(g, K, P, stats, 3.0, Axis("eta", 0.0, 1.0, 33))
        mean = 0.5 * (curve.values[Statistics.BOSON] + curve.values[Statistics.FERMION])
        np.testing.assert_allclose(curve.values[Statistics.NO_EXCHANGE], mean, atol=1e-14)

    def test_length_mismatch_rejected(self):
        from pairwave import CorrelationCurve
        g = two_coeff_grating()
        with pytest.raises(ValueError):
            CorrelationCurve(Axis("eta", 0.0, 1.0, 5),
                             {Statistics.BOSON: np.zeros(4)}, g, K.k, P.k, 1.0)
