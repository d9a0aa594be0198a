"""Closed-form joint detection pattern for two free Gaussian packets.

Two identical particles are released at t = 0 in Gaussian packets of
equal width, with central wavevectors k0 and p0, and detected in
coincidence at positions (x, y) after free flight. The joint
probability has the closed form (reduced units, i.e. divided by the
common envelope factor |C(t)|^4):

    P / |C|^4 = 1/2 (e^A + e^B +- 2 e^((A+B)/2) cos((2/mu)(x-y)(k0-p0)))

    A = -(2 sigma^2 / mu) ((x - v_k t)^2 + (y - v_p t)^2)
    B = A with v_k and v_p swapped

with + for bosons, - for fermions. The distinguishable reference is
e^A and the exchange-free mean is (e^A + e^B)/2. The generic product
of :func:`pairwave.core.packet_amplitude` amplitudes reproduces these
values to near machine precision; the test suite enforces it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    Axis,
    ScanTable,
    Statistics,
    WavePacket1D,
    _clamp_probability,
)


@dataclass(frozen=True)
class PacketPair:
    """Two Gaussian packets of equal width and mass scale.

    The closed form above is derived for packets sharing ``sigma`` and
    ``hbar_over_m``; constructing a pair that violates this raises.
    """

    k_packet: WavePacket1D
    p_packet: WavePacket1D

    def __post_init__(self):
        if self.k_packet.sigma != self.p_packet.sigma:
            raise ValueError("packets must share the same sigma")
        if self.k_packet.hbar_over_m != self.p_packet.hbar_over_m:
            raise ValueError("packets must share the same hbar_over_m")

    @property
    def sigma(self) -> float:
        return self.k_packet.sigma

    @property
    def hbar_over_m(self) -> float:
        return self.k_packet.hbar_over_m

    def mu(self, t: float) -> float:
        return self.k_packet.mu(t)

    def envelope4(self, t: float) -> float:
        """|C(t)|^4 = 2 sigma^2 / (pi mu(t)), the common scale factor."""
        return 2.0 * self.sigma**2 / (math.pi * self.mu(t))


def joint_probability_closed(pair: PacketPair, s: Statistics, x, y, t: float, reduced: bool = False):
    """Joint detection probability of the packet pair at (x, y, t).

    Returns the full probability by default; ``reduced=True`` divides
    out |C(t)|^4 (the convention used for plotting scans). ``x`` and
    ``y`` may be scalars or broadcastable arrays.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("x and y must be finite")
    if not math.isfinite(t) or t < 0:
        raise ValueError("t must be finite and >= 0")
    s2 = pair.sigma**2
    mu = pair.mu(t)
    vk_t = pair.k_packet.velocity * t
    vp_t = pair.p_packet.velocity * t
    a = -(2.0 * s2 / mu) * ((x - vk_t) ** 2 + (y - vp_t) ** 2)
    b = -(2.0 * s2 / mu) * ((x - vp_t) ** 2 + (y - vk_t) ** 2)

    if s is Statistics.DISTINGUISHABLE:
        p = np.exp(a)
        scale = p
    elif s is Statistics.NO_EXCHANGE:
        p = 0.5 * (np.exp(a) + np.exp(b))
        scale = p
    else:
        theta = (2.0 / mu) * (x - y) * (pair.k_packet.k0 - pair.p_packet.k0)
        sign = 1.0 if s is Statistics.BOSON else -1.0
        scale = 0.5 * (np.exp(a) + np.exp(b))
        p = scale + sign * np.exp(0.5 * (a + b)) * np.cos(theta)
    p = _clamp_probability(p, scale)
    if not reduced:
        p = p * pair.envelope4(t)
    if p.ndim == 0:
        return float(p)
    return p


def default_y_axis(pair: PacketPair, t: float, halfwidths: float = 5.0, count: int = 401) -> Axis:
    """Scan axis centered on the slow packet: v_p t +- halfwidths * packet width."""
    center = pair.p_packet.velocity * t
    w = pair.k_packet.width(t)
    return Axis("y", center - halfwidths * w, center + halfwidths * w, count)


def detection_scan(pair: PacketPair, t: float, y_axis: Axis) -> ScanTable:
    """Coincidence scan in y at fixed x0 = v_k t, the first packet's peak.

    Returns a table with columns ``y``, ``P_boson``, ``P_fermion``,
    ``P_distinguishable`` in reduced units (divided by |C(t)|^4). The
    distinguishable column is a unit-height Gaussian centered at
    y = v_p t; the boson and fermion columns show the interference
    pattern around it.
    """
    if not isinstance(y_axis, Axis):
        raise TypeError("y_axis must be an Axis")
    if y_axis.count < 1:
        raise ValueError("empty scan grid")
    ys = y_axis.grid()
    x0 = pair.k_packet.velocity * t
    cols = [
        joint_probability_closed(pair, s, x0, ys, t, reduced=True)
        for s in (Statistics.BOSON, Statistics.FERMION, Statistics.DISTINGUISHABLE)
    ]
    values = np.column_stack([ys, *cols])
    return ScanTable(
        axes=(y_axis,),
        columns=("y", "P_boson", "P_fermion", "P_distinguishable"),
        values=values,
    )
