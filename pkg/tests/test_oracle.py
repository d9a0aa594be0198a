"""Adaptive quadrature, seeded rejection sampling, and histogram comparison."""

import math

import numpy as np
import pytest

from pairwave import (
    ConvergenceError,
    PacketPair,
    Statistics,
    WavePacket1D,
    histogram_compare,
    integrate,
    integrate_complex,
    joint_probability_closed,
    sample_joint,
)

SIGMA = math.sqrt(0.125)
PAIR = PacketPair(WavePacket1D(1.0, SIGMA, 1.0), WavePacket1D(-1.0, SIGMA, 1.0))
T = 0.1
DOMAIN = (-2.5, 2.5, -2.5, 2.5)


def boson_density(x, y):
    return joint_probability_closed(PAIR, Statistics.BOSON, x, y, T, reduced=True)


def fermion_density(x, y):
    return joint_probability_closed(PAIR, Statistics.FERMION, x, y, T, reduced=True)


def as_float(x):
    return np.ones_like(np.asarray(x, dtype=float))


class TestIntegrate:
    def test_constant(self):
        res = integrate(lambda x: as_float(x), 0.0, 1.0, tol=1e-12)
        assert res.converged
        assert res.value == pytest.approx(1.0, abs=1e-15)

    def test_cosine_over_full_period(self):
        d = 2.7
        res = integrate(lambda x: 1.0 + np.cos(2 * np.pi * x / d), 0.0, d, tol=1e-12)
        assert res.value / d == pytest.approx(1.0, abs=1e-12)

    def test_oscillatory_against_analytic(self):
        # int_0^3 e^x cos(5x) dx
        true = (math.exp(3) * (math.cos(15) + 5 * math.sin(15)) - 1) / 26
        res = integrate(lambda x: np.exp(x) * np.cos(5 * x), 0.0, 3.0, tol=1e-10)
        assert res.converged
        assert abs(res.value - true) <= 1e-10

    def test_tightening_tol_never_hurts(self):
        true = (math.exp(3) * (math.cos(15) + 5 * math.sin(15)) - 1) / 26
        errors = []
        for tol in (1e-3, 1e-5, 1e-7, 1e-9, 1e-11):
            res = integrate(lambda x: np.exp(x) * np.cos(5 * x), 0.0, 3.0, tol=tol)
            errors.append(abs(res.value - true))
        for coarse, fine in zip(errors, errors[1:]):
            assert fine <= coarse + 1e-15

    def test_budget_exhaustion_flags_non_convergence(self):
        res = integrate(lambda x: np.cos(200.0 * x), 0.0, 20.0, tol=1e-14, budget=90)
        assert not res.converged
        assert res.evaluations <= 90 + 30
        assert res.error_estimate > 1e-14

    def test_invalid_bounds(self):
        with pytest.raises(ValueError):
            integrate(as_float, 1.0, 0.0, tol=1e-8)
        with pytest.raises(ValueError):
            integrate(as_float, 0.0, 1.0, tol=0.0)

    def test_complex_integrand(self):
        # int_0^1 e^{i a x} dx = (e^{ia} - 1)/(ia)
        a = 3.5
        res = integrate_complex(lambda x: np.exp(1j * a * x), 0.0, 1.0, tol=1e-12)
        true = (np.exp(1j * a) - 1) / (1j * a)
        assert res.converged
        assert abs(res.value - true) < 1e-12


class TestSampleJoint:
    def test_deterministic_for_fixed_seed(self):
        b1 = sample_joint(boson_density, DOMAIN, 20_000, 77)
        b2 = sample_joint(boson_density, DOMAIN, 20_000, 77)
        assert np.array_equal(b1.pairs, b2.pairs)
        assert b1.acceptance_rate == b2.acceptance_rate

    def test_different_seeds_differ(self):
        b1 = sample_joint(boson_density, DOMAIN, 5_000, 1)
        b2 = sample_joint(boson_density, DOMAIN, 5_000, 2)
        assert not np.array_equal(b1.pairs, b2.pairs)

    def test_worker_split_is_deterministic(self):
        b1 = sample_joint(boson_density, DOMAIN, 10_000, 9, workers=3)
        b2 = sample_joint(boson_density, DOMAIN, 10_000, 9, workers=3)
        assert np.array_equal(b1.pairs, b2.pairs)
        assert b1.pairs.shape == (10_000, 2)

    def test_pairs_inside_domain(self):
        b = sample_joint(boson_density, DOMAIN, 10_000, 3)
        x, y = b.pairs[:, 0], b.pairs[:, 1]
        assert x.min() >= DOMAIN[0] and x.max() <= DOMAIN[1]
        assert y.min() >= DOMAIN[2] and y.max() <= DOMAIN[3]
        assert b.postselected_discards == 0

    def test_uniform_density_acceptance_rate(self):
        # flat density under the 1.05 safety envelope accepts ~ 1/1.05
        b = sample_joint(lambda x, y: as_float(x), (0, 1, 0, 1), 50_000, 7)
        assert b.acceptance_rate == pytest.approx(1 / 1.05, abs=0.01)

    def test_fermion_diagonal_stays_empty(self):
        b = sample_joint(fermion_density, DOMAIN, 100_000, 11)
        gap = np.abs(b.pairs[:, 0] - b.pairs[:, 1])
        assert int((gap < 5e-4).sum()) == 0

    def test_degenerate_density_rejected(self):
        with pytest.raises(ValueError):
            sample_joint(lambda x, y: 0.0 * as_float(x), (0, 1, 0, 1), 100, 0)

    def test_envelope_violation_detected(self):
        # spike centered between probe-grid nodes: the 128x128 probe misses
        # its peak, so accepted-region checks must catch the excursion
        cx = -1.0 + 2.0 * 13.5 / 127.0

        def spiky(x, y):
            x = np.asarray(x, dtype=float)
            y = np.asarray(y, dtype=float)
            bump = np.exp(-((x - cx) ** 2 + (y - cx) ** 2) / (2 * 1e-3**2))
            return 1.0 + 10.0 * bump

        with pytest.raises(RuntimeError, match="envelope"):
            sample_joint(spiky, (-1, 1, -1, 1), 100_000, 3)

    def test_pathological_acceptance_aborts(self):
        # needle sitting exactly on a probe node: envelope is honest but
        # almost every proposal lands in zero-density territory
        cx = -1.0 + 2.0 * 13.0 / 127.0

        def needle(x, y):
            x = np.asarray(x, dtype=float)
            y = np.asarray(y, dtype=float)
            return np.exp(-((x - cx) ** 2 + (y - cx) ** 2) / (2 * 2e-5**2))

        with pytest.raises(RuntimeError, match="acceptance"):
            sample_joint(needle, (-1, 1, -1, 1), 10_000, 3)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            sample_joint(boson_density, DOMAIN, 0, 1)
        with pytest.raises(ValueError):
            sample_joint(boson_density, (1, 0, 0, 1), 10, 1)


class TestHistogramCompare:
    def test_chi_square_self_consistency(self):
        # sampling P and comparing against P itself: chi2 should sit near
        # its dof mean; allow the usual 3 sigma for at least 19/20 seeds
        hits = 0
        for seed in range(20):
            b = sample_joint(boson_density, DOMAIN, 100_000, seed)
            rep = histogram_compare(b, boson_density, 6, min_expected=100.0)
            dof = rep.degrees_of_freedom
            if abs(rep.chi_square - dof) <= 3.0 * math.sqrt(2.0 * dof):
                hits += 1
        assert hits >= 19

    def test_discriminates_wrong_density(self):
        b = sample_joint(boson_density, DOMAIN, 200_000, 13)
        rep = histogram_compare(b, fermion_density, 8, min_expected=100.0)
        assert rep.max_relative_deviation > 1.0

    def test_insufficient_statistics_flagged(self):
        b = sample_joint(boson_density, DOMAIN, 500, 17)
        rep = histogram_compare(b, boson_density, 8)  # default min_expected=1000
        assert rep.insufficient_statistics
        assert rep.degrees_of_freedom == 0

    def test_report_shapes(self):
        b = sample_joint(boson_density, DOMAIN, 50_000, 19)
        rep = histogram_compare(b, boson_density, 5, min_expected=50.0)
        assert rep.expected.shape == (5, 5)
        assert rep.observed.shape == (5, 5)
        assert rep.observed.sum() == 50_000
        assert rep.expected.sum() == pytest.approx(50_000, rel=1e-12)
        assert rep.degrees_of_freedom == int(rep.qualifying.sum()) - 1

    def test_rejects_too_few_bins(self):
        b = sample_joint(boson_density, DOMAIN, 1_000, 23)
        with pytest.raises(ValueError):
            histogram_compare(b, boson_density, 1)


class TestConvergenceError:
    def test_carries_achieved_tolerance(self):
        err = ConvergenceError("failed", achieved=4.2e-5)
        assert err.achieved == pytest.approx(4.2e-5)
        assert isinstance(err, RuntimeError)
