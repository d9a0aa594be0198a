"""Single-particle Gaussian packets and two-particle exchange machinery.

A pair of identical particles occupying modes ``psi_A`` and ``psi_B`` is
described by the (anti)symmetrized amplitude

    (1/sqrt(2)) * (psi_A(x) psi_B(y) +- psi_B(x) psi_A(y)),

the upper sign for bosons, the lower for fermions. The joint detection
probability then splits into a mode-symmetric part and an exchange
(interference) term. Two reference conventions without the exchange term
are provided: ``NO_EXCHANGE`` (the symmetric two-term mean) and
``DISTINGUISHABLE`` (a fixed-label product).

The free single-particle mode used throughout is a Gaussian wave packet
released at t = 0 (for instance by a Gaussian aperture) and evolving
freely afterwards; :func:`packet_amplitude` evaluates it in closed form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

_SQRT2 = math.sqrt(2.0)

# Rounding can push an algebraically non-negative probability slightly
# below zero; anything worse than this (relative) signals a formula bug.
_NEGATIVE_TOL = 1e-12


class Statistics(str, enum.Enum):
    """Exchange-symmetry selector for two-particle quantities.

    BOSON / FERMION add or subtract the exchange term. NO_EXCHANGE keeps
    the symmetric two-term mean without interference. DISTINGUISHABLE is
    the fixed-label product (particle A detected at x, particle B at y).
    """

    BOSON = "boson"
    FERMION = "fermion"
    DISTINGUISHABLE = "distinguishable"
    NO_EXCHANGE = "no-exchange"


#: The two variants that possess a single symmetrized amplitude.
EXCHANGE_STATISTICS = (Statistics.BOSON, Statistics.FERMION)


@dataclass(frozen=True)
class WavePacket1D:
    """Free 1D Gaussian wave packet defined by its momentum distribution.

    Parameters
    ----------
    k0 : float
        Central wavevector (inverse length); group velocity is
        ``hbar_over_m * k0``.
    sigma : float
        Momentum-space width of the Gaussian distribution (inverse
        length), strictly positive.
    hbar_over_m : float
        hbar divided by the particle mass (length^2 / time); only the
        product ``hbar_over_m * t`` enters the evolution, so time and
        mass scale are exposed separately.
    """

    k0: float
    sigma: float
    hbar_over_m: float

    def __post_init__(self):
        for name in ("k0", "sigma", "hbar_over_m"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.sigma <= 0:
            raise ValueError("sigma must be > 0")
        if self.hbar_over_m <= 0:
            raise ValueError("hbar_over_m must be > 0")

    @property
    def velocity(self) -> float:
        """Group velocity of the packet center."""
        return self.hbar_over_m * self.k0

    def mu(self, t: float) -> float:
        """Spreading factor mu(t) = 2 (1 + sigma^4 (hbar t / m)^2)."""
        return 2.0 * (1.0 + self.sigma**4 * (self.hbar_over_m * t) ** 2)

    def envelope_norm(self, t: float) -> complex:
        """Time-dependent normalization C(t) = pi^(-1/4) (1/sigma + i hbar sigma t / m)^(-1/2)."""
        z = 1.0 / self.sigma + 1j * self.hbar_over_m * self.sigma * t
        return math.pi ** (-0.25) * z ** (-0.5)

    def width(self, t: float) -> float:
        """Standard deviation of |psi(x, t)|^2, sqrt(mu(t)) / (2 sigma)."""
        return math.sqrt(self.mu(t)) / (2.0 * self.sigma)


def packet_amplitude(p: WavePacket1D, x, t: float):
    """Evaluate the free Gaussian packet amplitude psi(x, t).

    Closed form (v = hbar k0 / m, mu = mu(t), C = C(t)):

        psi(x, t) = C * exp([-sigma^2 (x - v t)^2
                             + i k0 (2 x - v t)
                             + i (hbar/m) sigma^4 x^2 t] / mu)

    The x^2 phase term carries no extra factor of 2; with this form the
    amplitude satisfies the free-particle evolution equation and is
    exactly normalized for all t (both checked in the test suite).

    ``x`` may be a scalar or ndarray; a complex value of matching shape
    is returned. Requires t >= 0 and finite inputs.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    if not math.isfinite(t) or t < 0:
        raise ValueError("t must be finite and >= 0")
    s2 = p.sigma**2
    v = p.velocity
    mu = p.mu(t)
    expo = (
        -s2 * (x - v * t) ** 2
        + 1j * p.k0 * (2.0 * x - v * t)
        + 1j * p.hbar_over_m * s2**2 * x**2 * t
    ) / mu
    out = p.envelope_norm(t) * np.exp(expo)
    if out.ndim == 0:
        return complex(out)
    return out


def symmetrized_amplitude(psiA_at_x, psiB_at_y, psiB_at_x, psiA_at_y, s: Statistics):
    """Two-particle amplitude (1/sqrt(2)) (psi_A(x) psi_B(y) +- psi_B(x) psi_A(y)).

    Only BOSON (+) and FERMION (-) possess a single amplitude; the other
    variants are rejected. Inputs may be complex scalars or arrays.
    """
    if s not in EXCHANGE_STATISTICS:
        raise ValueError(f"no symmetrized amplitude exists for {s.value!r}")
    sign = 1.0 if s is Statistics.BOSON else -1.0
    return (psiA_at_x * psiB_at_y + sign * psiB_at_x * psiA_at_y) / _SQRT2


def _clamp_probability(p, scale):
    """Clamp rounding-level negatives to 0; reject anything worse."""
    p = np.asarray(p)
    scale = np.asarray(scale)
    if np.any(p < -_NEGATIVE_TOL * scale):
        worst = float(np.min(p))
        raise ValueError(f"probability {worst} negative beyond rounding tolerance")
    return np.where(p < 0.0, 0.0, p)


def joint_probability_generic(psiA, psiB, s: Statistics, x, y, t: float):
    """Joint detection probability P(x, y, t) for two mode functions.

    ``psiA`` and ``psiB`` are callables ``(x, t) -> complex`` (accepting
    ndarray x). For BOSON / FERMION:

        P = 1/2 |psi_A(x)|^2 |psi_B(y)|^2 + 1/2 |psi_B(x)|^2 |psi_A(y)|^2
            +- Re(psi_B*(y) psi_A*(x) psi_A(y) psi_B(x))

    NO_EXCHANGE drops the +- term; DISTINGUISHABLE returns
    |psi_A(x)|^2 |psi_B(y)|^2. Results are clamped to >= 0 within
    rounding; a negative value beyond rounding raises ValueError.
    """
    ax = np.asarray(psiA(x, t))
    ay = np.asarray(psiA(y, t))
    bx = np.asarray(psiB(x, t))
    by = np.asarray(psiB(y, t))
    for arr in (ax, ay, bx, by):
        if not np.all(np.isfinite(arr)):
            raise ValueError("mode functions must be finite on the requested points")
    ax2 = np.abs(ax) ** 2
    ay2 = np.abs(ay) ** 2
    bx2 = np.abs(bx) ** 2
    by2 = np.abs(by) ** 2

    if s is Statistics.DISTINGUISHABLE:
        p = ax2 * by2
        scale = p
    else:
        direct = 0.5 * (ax2 * by2 + bx2 * ay2)
        if s is Statistics.NO_EXCHANGE:
            p = direct
        else:
            cross = np.real(np.conj(by) * np.conj(ax) * ay * bx)
            sign = 1.0 if s is Statistics.BOSON else -1.0
            p = direct + sign * cross
        scale = direct
    p = _clamp_probability(p, scale)
    if p.ndim == 0:
        return float(p)
    return p


def exchange_ratio(psiA, psiB, s: Statistics, x, y, t: float):
    """Ratio P_s(x, y, t) / P_no-exchange(x, y, t).

    Equals 2 (bosons) or 0 (fermions) wherever the two modes coincide up
    to one global phase, and tends to 1 where the modes do not overlap.
    Raises ZeroDivisionError where the no-exchange denominator vanishes
    (both modes have a node), the distinguished "undefined ratio" case.
    """
    if s not in EXCHANGE_STATISTICS:
        raise ValueError(f"exchange ratio is defined for boson/fermion, not {s.value!r}")
    num = joint_probability_generic(psiA, psiB, s, x, y, t)
    den = joint_probability_generic(psiA, psiB, Statistics.NO_EXCHANGE, x, y, t)
    if np.any(np.asarray(den) == 0.0):
        raise ZeroDivisionError("exchange ratio undefined: no-exchange probability vanishes")
    return num / den


@dataclass(frozen=True)
class Axis:
    """Uniform scan axis: ``count`` points from ``lo`` to ``hi`` inclusive."""

    name: str
    lo: float
    hi: float
    count: int
    units: str = "length"

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("axis bounds must be finite")
        if int(self.count) != self.count or self.count < 1:
            raise ValueError("axis count must be a positive integer")
        if self.count > 1 and not self.lo < self.hi:
            raise ValueError("axis must be strictly increasing")

    def grid(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)

    @property
    def step(self) -> float:
        if self.count < 2:
            return 0.0
        return (self.hi - self.lo) / (self.count - 1)


@dataclass(frozen=True, eq=False)
class ScanTable:
    """Rectangular grid of evaluated real observables with axis metadata.

    ``values`` holds one row per grid point in row-major axis order, one
    column per entry of ``columns``; shape (n_points, n_columns).
    """

    axes: tuple[Axis, ...]
    columns: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        axes = tuple(self.axes)
        columns = tuple(str(c) for c in self.columns)
        values = np.asarray(self.values, dtype=float)
        n_points = math.prod(a.count for a in axes) if axes else 0
        if not axes or not columns:
            raise ValueError("at least one axis and one column required")
        if values.size != n_points * len(columns):
            raise ValueError(
                f"value count {values.size} != points {n_points} x columns {len(columns)}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("table values must be finite")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "columns", columns)
        object.__setattr__(self, "values", values.reshape(n_points, len(columns)))

    def column(self, name: str) -> np.ndarray:
        """Return one column by label."""
        if name not in self.columns:
            raise KeyError(name)
        return self.values[:, self.columns.index(name)]
