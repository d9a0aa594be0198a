"""Near-field propagation behind a periodic grating (eikonal regime).

A plane wave e^(ikz) hitting a periodic transmission mask

    T(x) = sum_n A_n exp(2 pi i n x / d),    A_n = |A_n| e^(i xi_n)

propagates to the parallel plane at distance L as

    psi_k^L(x) = e^(ikL) sum_n a_n exp(2 pi i n x / d)
                                exp(-i pi n^2 L lambda_k / d^2)

with lambda_k = 2 pi / k and a_n = A_n / A the coefficients normalized
so the period-averaged intensity is 1 (A^2 = sum |A_n|^2). The
quadratic n^2 phase makes the pattern self-imaging with period
2 d^2 / lambda (the near-field revival length).

Two modes k and p produce identical patterns up to a global phase
whenever phi_kp = (pi L / d^2)(lambda_k - lambda_p) is a multiple of
2 pi; on those planes, at L_n = 2 n d^2 / (lambda_k - lambda_p), the
antisymmetrized two-fermion amplitude vanishes identically and no
two-fermion coincidences occur, while one-fermion detections survive.
The multimode extension replaces the sharp wavevector by a Gaussian
distribution f(k) and carries each Fourier order with a coefficient
F_n evaluated by quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .core import Statistics, joint_probability_generic
from .oracle import ConvergenceError, integrate_complex

_NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GratingSpec:
    """Period ``d`` and sparse complex Fourier coefficients ``{n: A_n}``.

    The index map may be asymmetric (A_n != A_-n) and sparse; at least
    one coefficient must be nonzero. ``n_max`` is the truncation order,
    the largest |n| present.
    """

    d: float
    coefficients: Mapping[int, complex]

    def __post_init__(self):
        if not (math.isfinite(self.d) and self.d > 0):
            raise ValueError("grating period d must be finite and > 0")
        coeffs = {}
        for n, c in dict(self.coefficients).items():
            if int(n) != n:
                raise ValueError("coefficient indices must be integers")
            c = complex(c)
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValueError("coefficients must be finite")
            coeffs[int(n)] = c
        if not coeffs or all(c == 0 for c in coeffs.values()):
            raise ValueError("at least one nonzero coefficient required")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def n_max(self) -> int:
        return max(abs(n) for n in self.coefficients)

    @property
    def indices(self) -> tuple[int, ...]:
        """Indices carrying a nonzero coefficient, ascending."""
        return tuple(sorted(n for n, c in self.coefficients.items() if c != 0))

    @property
    def total_power(self) -> float:
        """Sum of |A_n|^2 over all coefficients."""
        return math.fsum(abs(c) ** 2 for c in self.coefficients.values())

    @property
    def is_normalized(self) -> bool:
        return abs(self.total_power - 1.0) <= _NORMALIZATION_TOL


def _require_normalized(g: GratingSpec):
    if not g.is_normalized:
        raise ValueError(
            "grating coefficients must be normalized (sum |a_n|^2 = 1); "
            "apply normalize_coefficients first"
        )


def normalize_coefficients(g: GratingSpec) -> GratingSpec:
    """Rescale coefficients to a_n = A_n / A with A^2 = sum |A_n|^2.

    Keeps every phase xi_n; after the call the period-averaged
    intensity of the transmitted wave equals 1. Idempotent.
    """
    norm = math.sqrt(g.total_power)
    return GratingSpec(g.d, {n: c / norm for n, c in g.coefficients.items()})


@dataclass(frozen=True)
class PlaneWaveMode:
    """Monochromatic mode of wavevector k > 0; wavelength is 2 pi / k."""

    k: float

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k > 0):
            raise ValueError("wavevector k must be finite and > 0")

    @property
    def wavelength(self) -> float:
        return 2.0 * math.pi / self.k


@dataclass(frozen=True)
class MultiModeSpec:
    """Gaussian wavevector distribution: center ``k0``, width ``sigma``.

    The distribution should be sharp (sigma << k0) for the multimode
    approximation to hold; that is diagnosed by
    :func:`multimode_validity` rather than enforced here.
    """

    k0: float
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.k0) and self.k0 > 0):
            raise ValueError("k0 must be finite and > 0")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError("sigma must be finite and > 0")


def propagated_amplitude(g: GratingSpec, m: PlaneWaveMode, L: float, x):
    """Eikonal amplitude at transverse position x on the plane z = L.

    Requires normalized coefficients and L >= 0. ``x`` may be a scalar
    or ndarray. At L = 0 this is the normalized transmission function
    itself (times the trivial phase e^(i k 0) = 1).
    """
    _require_normalized(g)
    if not (math.isfinite(L) and L >= 0):
        raise ValueError("L must be finite and >= 0")
    x = np.asarray(x, dtype=float)
    lam = m.wavelength
    out = np.zeros(x.shape, dtype=complex)
    for n, c in g.coefficients.items():
        if c == 0:
            continue
        phase = 2.0 * math.pi * n * x / g.d - math.pi * n**2 * L * lam / g.d**2
        out = out + c * np.exp(1j * phase)
    out = out * np.exp(1j * m.k * L)
    if out.ndim == 0:
        return complex(out)
    return out


def intensity(g: GratingSpec, m: PlaneWaveMode, L: float, x):
    """|psi^L(x)|^2 via the explicit pairwise cosine expansion.

        1 + 2 sum_{m>n} |a_n a_m| cos(2 pi (m-n) x / d
                                      - pi L (m^2-n^2) lambda / d^2
                                      + xi_m - xi_n)

    This is an independent route from squaring
    :func:`propagated_amplitude`; the two agree to rounding and the
    period average is exactly 1 for normalized coefficients.
    """
    _require_normalized(g)
    if not (math.isfinite(L) and L >= 0):
        raise ValueError("L must be finite and >= 0")
    x = np.asarray(x, dtype=float)
    lam = m.wavelength
    idx = g.indices
    mags = {n: abs(g.coefficients[n]) for n in idx}
    phis = {n: np.angle(g.coefficients[n]) for n in idx}
    out = np.ones(x.shape, dtype=float)
    for i, lo in enumerate(idx):
        for hi in idx[i + 1 :]:
            arg = (
                2.0 * math.pi * (hi - lo) * x / g.d
                - math.pi * L * (hi**2 - lo**2) * lam / g.d**2
                + phis[hi]
                - phis[lo]
            )
            out = out + 2.0 * mags[lo] * mags[hi] * np.cos(arg)
    if out.ndim == 0:
        return float(out)
    return out


def phase_mismatch(k: PlaneWaveMode, p: PlaneWaveMode, d: float, L: float) -> float:
    """phi_kp = (pi L / d^2)(lambda_k - lambda_p), the pattern-matching phase.

    Multiples of 2 pi mean the two modes' patterns on the plane z = L
    coincide up to a global phase.
    """
    if not (math.isfinite(d) and d > 0):
        raise ValueError("d must be finite and > 0")
    if not (math.isfinite(L) and L >= 0):
        raise ValueError("L must be finite and >= 0")
    return math.pi * L / d**2 * (k.wavelength - p.wavelength)


@dataclass(frozen=True)
class NodalPlaneSet:
    """Distances L_n at which two-fermion coincidences are forbidden.

    ``planes`` holds (n, L_n) pairs with L_n > 0, ascending in L,
    plus the trivial entry (0, 0.0) when the requested index range
    contains 0 (``trivial_zero`` set; L = 0 is the grating plane
    itself). ``degenerate`` marks equal wavelengths: the patterns then
    match at every distance and no finite nodal plane exists.
    """

    planes: tuple[tuple[int, float], ...]
    degenerate: bool = False
    trivial_zero: bool = False

    def __iter__(self):
        return iter(self.planes)

    def __len__(self):
        return len(self.planes)

    def distances(self) -> tuple[float, ...]:
        return tuple(L for _, L in self.planes)


def nodal_planes(k: PlaneWaveMode, p: PlaneWaveMode, d: float, n_range) -> NodalPlaneSet:
    """Planes L_n = 2 n d^2 / (lambda_k - lambda_p) within an index range.

    ``n_range`` is a range object or an inclusive (lo, hi) pair. Only
    indices whose sign matches sign(lambda_k - lambda_p) give L_n > 0
    and are returned. Each returned plane satisfies
    phase_mismatch(k, p, d, L_n) = 2 pi n to rounding.
    """
    if not (math.isfinite(d) and d > 0):
        raise ValueError("d must be finite and > 0")
    if isinstance(n_range, range):
        ns = list(n_range)
    else:
        lo, hi = n_range
        if int(lo) != lo or int(hi) != hi or lo > hi:
            raise ValueError("n_range must be a range or an inclusive (lo, hi) pair")
        ns = list(range(int(lo), int(hi) + 1))
    if not ns:
        raise ValueError("empty index range")

    dlam = k.wavelength - p.wavelength
    if dlam == 0.0:
        return NodalPlaneSet(planes=(), degenerate=True)
    planes = []
    for n in ns:
        if n == 0:
            continue
        L = 2.0 * n * d**2 / dlam
        if L > 0:
            planes.append((n, L))
    planes.sort(key=lambda item: item[1])
    trivial = 0 in ns
    if trivial:
        planes.insert(0, (0, 0.0))
    return NodalPlaneSet(planes=tuple(planes), degenerate=False, trivial_zero=trivial)


def pair_probability_on_plane(g: GratingSpec, k: PlaneWaveMode, p: PlaneWaveMode,
                              s: Statistics, L: float, x, y):
    """Two-particle detection probability at (x, y) on the plane z = L.

    Composes the generic exchange machinery with the propagated
    single-mode amplitudes. For fermions at a nodal plane the result is
    zero for all (x, y) to rounding; for k = p fermions it is zero
    everywhere.
    """
    psiA = lambda u, _t: propagated_amplitude(g, k, L, u)
    psiB = lambda u, _t: propagated_amplitude(g, p, L, u)
    return joint_probability_generic(psiA, psiB, s, x, y, 0.0)


def multimode_coefficient(g: GratingSpec, mm: MultiModeSpec, n: int, L: float,
                          tol: float = 1e-10, budget: int = 1_000_000) -> complex:
    """Order-n carrier coefficient F_n of the multimode wave at distance L.

        F_n = integral dk f(k) e^(ikL) exp(-i pi n^2 L lambda_k / d^2)

    with f the normalized Gaussian of ``mm``, integrated over
    k0 +- 8 sigma (the truncation error of the Gaussian tail is below
    1e-14). Quadrature non-convergence raises :class:`ConvergenceError`
    carrying the achieved estimate. For n != 0 the integrand contains
    lambda_k = 2 pi / k, so the distribution must not reach k <= 0.
    """
    if int(n) != n:
        raise ValueError("n must be an integer")
    if not (math.isfinite(L) and L >= 0):
        raise ValueError("L must be finite and >= 0")
    a = mm.k0 - 8.0 * mm.sigma
    b = mm.k0 + 8.0 * mm.sigma
    if n != 0 and a <= 0:
        raise ValueError(
            "mode distribution reaches k <= 0 (k0 - 8 sigma <= 0); the order-n "
            "phase 1/k is undefined there, so F_n exists only for n = 0"
        )
    norm = 1.0 / (mm.sigma * math.sqrt(2.0 * math.pi))
    d2 = g.d**2
    n2 = float(n) ** 2

    def integrand(kk):
        f = norm * np.exp(-((kk - mm.k0) ** 2) / (2.0 * mm.sigma**2))
        phase = kk * L - math.pi * n2 * L * (2.0 * math.pi / kk) / d2
        return f * np.exp(1j * phase)

    res = integrate_complex(integrand, a, b, tol=tol, budget=budget)
    if not res.converged:
        raise ConvergenceError(
            f"F_{n} quadrature did not reach tol={tol}; achieved {res.error_estimate:.3e}",
            achieved=res.error_estimate,
        )
    return complex(res.value)


@dataclass(frozen=True)
class MultiModeValidity:
    """Diagnostics for the sharp-distribution multimode approximation.

    ``retained_fraction``: share of sum |a_n|^2 kept by the truncation.
    ``phase_term_max``: max over retained n of pi n^2 / (d^2 k0^2); the
    approximation needs this to be small. ``negative_k_tail``: mass of
    the wavevector distribution below k = 0. Each diagnostic carries a
    pass flag against its threshold; ``ok`` requires all three.
    """

    retained_fraction: float
    retained_pass: bool
    phase_term_max: float
    phase_term_pass: bool
    negative_k_tail: float
    tail_pass: bool

    @property
    def ok(self) -> bool:
        return self.retained_pass and self.phase_term_pass and self.tail_pass


def multimode_validity(g: GratingSpec, mm: MultiModeSpec, L: float = 0.0,
                       n_keep: int | None = None,
                       max_discarded: float = 1e-6,
                       max_phase_term: float = 1e-2,
                       max_tail: float = 1e-6) -> MultiModeValidity:
    """Evaluate the three validity diagnostics of the multimode carrier.

    ``n_keep`` probes a tighter truncation than the grating's own
    (default: keep everything, fraction 1). The diagnostics do not
    depend on L; the parameter is accepted for call-site uniformity.
    """
    if n_keep is None:
        n_keep = g.n_max
    total = g.total_power
    kept_idx = [n for n in g.indices if abs(n) <= n_keep]
    kept = math.fsum(abs(g.coefficients[n]) ** 2 for n in kept_idx)
    retained = kept / total
    phase_term = max(
        (math.pi * n**2 / (g.d**2 * mm.k0**2) for n in kept_idx), default=0.0
    )
    tail = 0.5 * math.erfc(mm.k0 / (mm.sigma * math.sqrt(2.0)))
    return MultiModeValidity(
        retained_fraction=retained,
        retained_pass=(1.0 - retained) <= max_discarded,
        phase_term_max=phase_term,
        phase_term_pass=phase_term <= max_phase_term,
        negative_k_tail=tail,
        tail_pass=tail <= max_tail,
    )
