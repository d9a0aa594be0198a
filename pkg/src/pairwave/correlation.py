"""Exchange-sensitive spatial correlation function behind a grating.

Two single-mode particles (wavevectors k and p) propagate behind the
same normalized grating; both detectors sit on the plane z = L. The
correlation function is the period-averaged coincidence probability at
separation eta:

    C(eta) = (1/d) integral_0^d P(x, x + eta) dx.

Averaging the explicit Fourier expansion of P term by term leaves two
families of contributions:

* direct products of single-mode intensity harmonics, surviving only
  for index tuples with m > n, s > r and m - n = s - r, each adding
  |a_m a_n a_s a_r| (cos(2 pi (s-r) eta / d + phi^kp) + cos(... + phi^pk));
* exchange (crossed) terms, surviving for s - n + r - m = 0, adding
  +-|a_m a_n a_s a_r| cos(2 pi (r-m) eta / d + Theta^kp),
  + for bosons and - for fermions,

with the phases phi and Theta given by :func:`term_phase_direct` and
:func:`term_phase_crossed`. Every surviving frequency is an integer
harmonic of 1/d: the correlation function inherits the grating's
periods d/n, and the wavevectors enter only through term phases. This
contrasts with free space, where C depends on eta through p - k
(:func:`free_correlation_reference`).

:func:`correlation_numeric` integrates P(x, x + eta) by adaptive
quadrature and is the independent cross-check of the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Axis, Statistics
from .grating import GratingSpec, PlaneWaveMode, _require_normalized, pair_probability_on_plane
from .oracle import ConvergenceError, integrate

_TWO_COEFF_TOL = 1e-12


@dataclass(frozen=True)
class TermPhase:
    """Phase of one term of the correlation sum.

    ``indices`` is the tuple (n, m, r, s); ``kind`` is "direct" for the
    intensity-product family and "crossed" for the exchange family.
    """

    indices: tuple[int, int, int, int]
    value: float
    kind: str


def _xi(g: GratingSpec, n: int) -> float:
    return float(np.angle(g.coefficients[n]))


def term_phase_direct(g: GratingSpec, k: PlaneWaveMode, p: PlaneWaveMode,
                      L: float, n: int, m: int, r: int, s: int) -> TermPhase:
    """phi^kp_(m n s r): phase of a direct (intensity-product) term.

        -(pi L / d^2) [(m^2 - n^2) lambda_k + (r^2 - s^2) lambda_p]
        + xi_m - xi_n - xi_s + xi_r

    Swapping the roles of k and p gives the partner phase phi^pk.
    """
    value = (
        -(math.pi * L / g.d**2)
        * ((m**2 - n**2) * k.wavelength + (r**2 - s**2) * p.wavelength)
        + _xi(g, m) - _xi(g, n) - _xi(g, s) + _xi(g, r)
    )
    return TermPhase((n, m, r, s), value, "direct")


def term_phase_crossed(g: GratingSpec, k: PlaneWaveMode, p: PlaneWaveMode,
                       L: float, n: int, m: int, r: int, s: int) -> TermPhase:
    """Theta^kp_(n m r s): phase of a crossed (exchange) term.

        -(pi L / d^2) [(r^2 - n^2) lambda_k + (s^2 - m^2) lambda_p]
        + xi_r + xi_s - xi_n - xi_m
    """
    value = (
        -(math.pi * L / g.d**2)
        * ((r**2 - n**2) * k.wavelength + (s**2 - m**2) * p.wavelength)
        + _xi(g, r) + _xi(g, s) - _xi(g, n) - _xi(g, m)
    )
    return TermPhase((n, m, r, s), value, "crossed")


def correlation_closed(g: GratingSpec, k: PlaneWaveMode, p: PlaneWaveMode,
                       s: Statistics, L: float, eta):
    """Closed-form C(eta) for bosons or fermions (see module docstring).

    ``eta`` may be a scalar or ndarray. The quadruple sums run over the
    grating's nonzero indices with the selection rules applied as
    filters; tuples of the form (n, m, n, m) satisfy both rules and
    contribute to both families.
    """
    _require_normalized(g)
    if s not in (Statistics.BOSON, Statistics.FERMION):
        raise ValueError("closed-form correlation is defined for boson/fermion")
    if not (math.isfinite(L) and L >= 0):
        raise ValueError("L must be finite and >= 0")
    eta = np.asarray(eta, dtype=float)
    sign = 1.0 if s is Statistics.BOSON else -1.0
    idx = g.indices
    mag = {n: abs(g.coefficients[n]) for n in idx}
    tau = 2.0 * math.pi / g.d

    out = np.ones(eta.shape, dtype=float)
    for n in idx:
        for m in idx:
            for r in idx:
                for ss in idx:
                    w = mag[m] * mag[n] * mag[ss] * mag[r]
                    if m > n and ss > r and (m - n) == (ss - r):
                        pkp = term_phase_direct(g, k, p, L, n, m, r, ss).value
                        ppk = term_phase_direct(g, p, k, L, n, m, r, ss).value
                        freq = (ss - r) * tau
                        out = out + w * (np.cos(freq * eta + pkp) + np.cos(freq * eta + ppk))
                    if (ss - n + r - m) == 0:
                        theta = term_phase_crossed(g, k, p, L, n, m, r, ss).value
                        out = out + sign * w * np.cos((r - m) * tau * eta + theta)
    if out.ndim == 0:
        return float(out)
    return out


def correlation_two_coefficient(a0: float, a1: float, phi_kp: float,
                                s: Statistics, eta, d: float):
    """C(eta) when only two real coefficients a0, a1 are present.

        C = (1 +- 1) +- 2 a0^2 a1^2 (-1 + cos phi_kp)
            + 2 a0^2 a1^2 (+-1 + cos phi_kp) cos(2 pi eta / d)

    Requires a0^2 + a1^2 = 1. At eta = 0 the fermion value cancels to
    exactly 0 and the boson value is 2 + 4 a0^2 a1^2 cos phi_kp.
    """
    if s not in (Statistics.BOSON, Statistics.FERMION):
        raise ValueError("defined for boson/fermion")
    a0 = float(a0)
    a1 = float(a1)
    if abs(a0 * a0 + a1 * a1 - 1.0) > _TWO_COEFF_TOL:
        raise ValueError("coefficients must satisfy a0^2 + a1^2 = 1")
    if not (math.isfinite(d) and d > 0):
        raise ValueError("d must be finite and > 0")
    eta = np.asarray(eta, dtype=float)
    sign = 1.0 if s is Statistics.BOSON else -1.0
    aa = a0 * a0 * a1 * a1
    out = (
        (1.0 + sign)
        + sign * 2.0 * aa * (-1.0 + math.cos(phi_kp))
        + 2.0 * aa * (sign + math.cos(phi_kp)) * np.cos(2.0 * math.pi * eta / d)
    )
    if out.ndim == 0:
        return float(out)
    return out


def small_eta_asymptotics(a0: float, a1: float, phi_kp: float, d: float):
    """Quadratic short-distance coefficients of the two-coefficient case.

    Returns (fermion_coeff, boson_coeff, C0) where for eta -> 0

        C_F(eta)            ~ fermion_coeff * eta^2 = (C0/4)(2 pi/d)^2 eta^2
        C_B(eta) - C_B(0)   ~ boson_coeff * eta^2
                            = -a0^2 a1^2 (2 pi/d)^2 (1 + cos phi_kp) eta^2

    with C0 = 4 a0^2 a1^2 (1 - cos phi_kp).
    """
    if not (math.isfinite(d) and d > 0):
        raise ValueError("d must be finite and > 0")
    aa = float(a0) ** 2 * float(a1) ** 2
    c0 = 4.0 * aa * (1.0 - math.cos(phi_kp))
    k2 = (2.0 * math.pi / d) ** 2
    fermion_coeff = 0.25 * c0 * k2
    boson_coeff = -aa * k2 * (1.0 + math.cos(phi_kp))
    return fermion_coeff, boson_coeff, c0


def correlation_numeric(g: GratingSpec, k: PlaneWaveMode, p: PlaneWaveMode,
                        s: Statistics, L: float, eta: float,
                        tol: float = 1e-9, budget: int = 200_000) -> float:
    """C(eta) by adaptive quadrature of the pair probability over one period.

    Independent of the closed form: integrates
    ``pair_probability_on_plane`` (amplitude composition) over
    x in [0, d] and divides by d. Accepts any Statistics variant.
    Raises :class:`ConvergenceError` if the quadrature cannot reach the
    requested absolute tolerance on C.
    """
    _require_normalized(g)
    eta = float(eta)

    def f(x):
        return pair_probability_on_plane(g, k, p, s, L, x, x + eta)

    res = integrate(f, 0.0, g.d, tol=tol * g.d, budget=budget)
    if not res.converged:
        raise ConvergenceError(
            f"correlation quadrature did not reach tol={tol}; "
            f"achieved {res.error_estimate / g.d:.3e}",
            achieved=res.error_estimate / g.d,
        )
    return res.value / g.d


def free_correlation_reference(k: PlaneWaveMode, p: PlaneWaveMode, s: Statistics, eta):
    """Free-space reference C_free(eta) = 1 +- cos((p - k) eta).

    The period here is set by the wavevector difference; behind a
    grating it is set by d instead, which is the contrast this
    reference exists to draw.
    """
    if s not in (Statistics.BOSON, Statistics.FERMION):
        raise ValueError("defined for boson/fermion")
    eta = np.asarray(eta, dtype=float)
    sign = 1.0 if s is Statistics.BOSON else -1.0
    out = 1.0 + sign * np.cos((p.k - k.k) * eta)
    if out.ndim == 0:
        return float(out)
    return out


def pair_probability_expanded(g: GratingSpec, k: PlaneWaveMode, p: PlaneWaveMode,
                              s: Statistics, L: float, x, y):
    """P(x, y) on the plane z = L via the explicit multi-index expansion.

    Literal term-by-term evaluation of the Fourier expansion of the
    two-particle probability (unit period average per mode):

        P = 1
          + sum_{m>n} |a_n a_m| (cos f^k_mn(x) + cos f^p_mn(x)
                                 + cos f^k_mn(y) + cos f^p_mn(y))
          + 2 sum_{m>n, r>s} |a_n a_m a_r a_s|
                (cos f^k_mn(x) cos f^p_rs(y) + cos f^p_mn(x) cos f^k_rs(y))
          +- sum_{n,m,r,s} |a_n a_m a_r a_s|
                cos(2 pi [(s-n)x + (r-m)y]/d
                    - pi L [lambda_p (s^2-m^2) + lambda_k (r^2-n^2)]/d^2
                    + xi_r + xi_s - xi_n - xi_m)

    with f^k_mn(u) = 2 pi (m-n) u / d - pi L (m^2-n^2) lambda_k / d^2
    + xi_m - xi_n. This is the second, independent route against
    :func:`pairwave.grating.pair_probability_on_plane`. NO_EXCHANGE
    keeps the first three lines; DISTINGUISHABLE evaluates the plain
    intensity product.
    """
    _require_normalized(g)
    if not (math.isfinite(L) and L >= 0):
        raise ValueError("L must be finite and >= 0")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    idx = g.indices
    mag = {n: abs(g.coefficients[n]) for n in idx}
    xi = {n: _xi(g, n) for n in idx}
    d = g.d
    lam_k = k.wavelength
    lam_p = p.wavelength

    def cos_f(lam, lo, hi, u):
        return np.cos(
            2.0 * math.pi * (hi - lo) * u / d
            - math.pi * L * (hi**2 - lo**2) * lam / d**2
            + xi[hi] - xi[lo]
        )

    pairs = [(lo, hi) for i, lo in enumerate(idx) for hi in idx[i + 1 :]]

    if s is Statistics.DISTINGUISHABLE:
        ix = np.ones(np.broadcast(x, y).shape, dtype=float)
        iy = np.ones(np.broadcast(x, y).shape, dtype=float)
        for lo, hi in pairs:
            w = 2.0 * mag[lo] * mag[hi]
            ix = ix + w * cos_f(lam_k, lo, hi, x)
            iy = iy + w * cos_f(lam_p, lo, hi, y)
        out = ix * iy
    else:
        out = np.ones(np.broadcast(x, y).shape, dtype=float)
        for lo, hi in pairs:
            w = mag[lo] * mag[hi]
            out = out + w * (
                cos_f(lam_k, lo, hi, x) + cos_f(lam_p, lo, hi, x)
                + cos_f(lam_k, lo, hi, y) + cos_f(lam_p, lo, hi, y)
            )
        for lo1, hi1 in pairs:
            for lo2, hi2 in pairs:
                w = 2.0 * mag[lo1] * mag[hi1] * mag[lo2] * mag[hi2]
                out = out + w * (
                    cos_f(lam_k, lo1, hi1, x) * cos_f(lam_p, lo2, hi2, y)
                    + cos_f(lam_p, lo1, hi1, x) * cos_f(lam_k, lo2, hi2, y)
                )
        if s is not Statistics.NO_EXCHANGE:
            sign = 1.0 if s is Statistics.BOSON else -1.0
            for n in idx:
                for m in idx:
                    for r in idx:
                        for ss in idx:
                            w = mag[n] * mag[m] * mag[r] * mag[ss]
                            arg = (
                                2.0 * math.pi * ((ss - n) * x + (r - m) * y) / d
                                - math.pi * L * (lam_p * (ss**2 - m**2) + lam_k * (r**2 - n**2)) / d**2
                                + xi[r] + xi[ss] - xi[n] - xi[m]
                            )
                            out = out + sign * w * np.cos(arg)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True, eq=False)
class CorrelationCurve:
    """Sampled C(eta) for one or more statistics on a fixed plane.

    ``values`` maps each Statistics to an array over ``eta_axis``;
    the grating, both wavevectors and the plane distance are kept so
    the curve is self-describing.
    """

    eta_axis: Axis
    values: dict
    grating: GratingSpec
    k: float
    p: float
    L: float

    def __post_init__(self):
        for s, arr in self.values.items():
            if len(np.asarray(arr)) != self.eta_axis.count:
                raise ValueError(f"curve for {s} does not match the eta axis")


def correlation_curve(g: GratingSpec, k: PlaneWaveMode, p: PlaneWaveMode,
                      statistics, L: float, eta_axis: Axis | None = None) -> CorrelationCurve:
    """Evaluate closed-form correlation curves over an eta grid.

    ``statistics`` is an iterable of Statistics; NO_EXCHANGE is
    computed as the boson/fermion mean (the exchange terms cancel).
    Default grid: 257 points over [0, d].
    """
    if eta_axis is None:
        eta_axis = Axis("eta", 0.0, g.d, 257)
    etas = eta_axis.grid()
    values = {}
    for s in statistics:
        s = Statistics(s)
        if s is Statistics.NO_EXCHANGE:
            cb = correlation_closed(g, k, p, Statistics.BOSON, L, etas)
            cf = correlation_closed(g, k, p, Statistics.FERMION, L, etas)
            values[s] = 0.5 * (cb + cf)
        else:
            values[s] = correlation_closed(g, k, p, s, L, etas)
    return CorrelationCurve(eta_axis, values, g, k.k, p.k, L)
