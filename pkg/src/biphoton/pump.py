"""Chirped-Gaussian pump pulses and their coherent superpositions.

A single pulse has the complex envelope

    E(t) = xi * exp(-(1 + i a) t^2 / tau^2)

with amplitude ``xi``, duration ``tau`` and chirp parameter ``a``.  The
spectral amplitude follows the convention

    E~(nu) = (1 / 2 pi) Integral E(t) exp(+i nu t) dt

so that a pulse arriving earlier by ``theta`` (envelope ``E(t + theta)``)
picks up the factor ``exp(-i nu theta)``.  With this convention Parseval's
identity reads  Integral |E(t)|^2 dt = 2 pi Integral |E~(nu)|^2 dnu.

The composite pump exposed to configuration is the two-pulse superposition

    E_p(t) = E_1(t) + exp(i phi) E_2(t + theta)

but every function below operates on an arbitrary list of (pulse, delay,
phase) components, which is what the two-pulse container expands to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PumpPulse",
    "PulseComponent",
    "PumpField",
    "NPulsePump",
    "envelope_time",
    "spectrum_amplitude",
    "spectral_intensity",
    "time_support",
    "spectral_support",
]

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class PumpPulse:
    """One chirped Gaussian pulse: amplitude ``xi``, duration ``tau``, chirp ``a``."""

    xi: float
    tau: float
    a: float = 0.0

    def __post_init__(self) -> None:
        for name in ("xi", "tau", "a"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.xi < 0:
            raise ValueError(f"pulse amplitude must be nonnegative, got {self.xi!r}")
        if self.tau <= 0:
            raise ValueError(f"pulse duration must be positive, got {self.tau!r}")

    @property
    def alpha(self) -> complex:
        """Complex Gaussian parameter (1 + i a) / tau^2."""
        return (1.0 + 1j * self.a) / (self.tau * self.tau)

    def amplitude_time(self, t):
        """Complex envelope xi exp(-alpha t^2)."""
        arr = np.asarray(t, dtype=float)
        out = self.xi * np.exp(-self.alpha * arr * arr)
        return complex(out) if np.ndim(t) == 0 else out

    def amplitude_spectrum(self, nu):
        """Spectral amplitude xi tau / (2 sqrt(pi) sqrt(1 + i a)) * Gaussian.

        Uses the principal branch of the complex square root.
        """
        arr = np.asarray(nu, dtype=float)
        one_ia = 1.0 + 1j * self.a
        pref = self.xi * self.tau / (2.0 * _SQRT_PI * np.sqrt(one_ia))
        out = pref * np.exp(-(self.tau * self.tau) * arr * arr / (4.0 * one_ia))
        return complex(out) if np.ndim(nu) == 0 else out

    def time_halfwidth(self, eps: float) -> float:
        """|t| beyond which the pulse's own intensity is below eps * peak."""
        if self.xi == 0.0:
            return 0.0
        return self.tau * math.sqrt(0.5 * math.log(1.0 / eps))

    def spectral_halfwidth(self, eps: float) -> float:
        """|nu| beyond which the spectral intensity is below eps * peak."""
        if self.xi == 0.0:
            return 0.0
        return math.sqrt(2.0 * (1.0 + self.a * self.a) * math.log(1.0 / eps)) / self.tau


@dataclass(frozen=True)
class PulseComponent:
    """A pulse with its arrival advance (s) and phase (rad) in a superposition."""

    pulse: PumpPulse
    delay: float = 0.0
    phase: float = 0.0


@dataclass(frozen=True)
class PumpField:
    """Two-pulse pump: E_1(t) + exp(i phi) E_2(t + theta).

    Positive ``theta`` advances the second pulse (its envelope peaks at
    t = -theta).  Set ``pulse2.xi = 0`` for a single-pulse pump.
    """

    pulse1: PumpPulse
    pulse2: PumpPulse
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ValueError("theta and phi must be finite")

    @property
    def components(self) -> tuple[PulseComponent, ...]:
        return (
            PulseComponent(self.pulse1, 0.0, 0.0),
            PulseComponent(self.pulse2, self.theta, self.phi),
        )

    @property
    def is_zero(self) -> bool:
        return self.pulse1.xi == 0.0 and self.pulse2.xi == 0.0


@dataclass(frozen=True)
class NPulsePump:
    """Generalised pump held as raw components; mainly for internal use."""

    components: tuple[PulseComponent, ...]

    @property
    def is_zero(self) -> bool:
        return all(c.pulse.xi == 0.0 for c in self.components)


def envelope_time(field, t):
    """Composite complex envelope at times ``t`` (scalar or array)."""
    arr = np.asarray(t, dtype=float)
    total = np.zeros(arr.shape, dtype=complex)
    for comp in field.components:
        shifted = arr + comp.delay
        total = total + np.exp(1j * comp.phase) * comp.pulse.xi * np.exp(
            -comp.pulse.alpha * shifted * shifted
        )
    return complex(total) if np.ndim(t) == 0 else total


def spectrum_amplitude(field, nu):
    """Composite spectral amplitude at detunings ``nu`` (scalar or array)."""
    arr = np.asarray(nu, dtype=float)
    total = np.zeros(arr.shape, dtype=complex)
    for comp in field.components:
        phase = np.exp(1j * comp.phase) * np.exp(-1j * arr * comp.delay)
        total = total + phase * comp.pulse.amplitude_spectrum(arr)
    return complex(total) if np.ndim(nu) == 0 else total


def spectral_intensity(field, nu):
    """|spectrum_amplitude|^2 at detunings ``nu``."""
    amp = spectrum_amplitude(field, nu)
    out = np.abs(np.asarray(amp)) ** 2
    return float(out) if np.ndim(nu) == 0 else out


def time_support(field, eps: float) -> tuple[float, float]:
    """Interval outside which the composite intensity is below eps * peak.

    Conservative: component supports are widened by the worst constructive
    superposition factor before being united, so the bound holds for any
    relative phases.  A pump with all amplitudes zero returns (0.0, 0.0).
    """
    comps = [c for c in field.components if c.pulse.xi > 0.0]
    if not comps:
        return (0.0, 0.0)
    n = len(comps)
    peak = max(c.pulse.xi**2 for c in comps)
    lo = math.inf
    hi = -math.inf
    for c in comps:
        # place the threshold against eps*peak/n^2 so the n-component
        # amplitude triangle inequality covers constructive overlap
        ratio = c.pulse.xi**2 * n * n / (eps * peak)
        w = c.pulse.tau * math.sqrt(0.5 * math.log(ratio)) if ratio > 1.0 else 0.0
        lo = min(lo, -c.delay - w)
        hi = max(hi, -c.delay + w)
    return (lo, hi)


def spectral_support(field, eps: float) -> tuple[float, float]:
    """Interval outside which the composite spectral intensity is negligible."""
    comps = [c for c in field.components if c.pulse.xi > 0.0]
    if not comps:
        return (0.0, 0.0)
    n = len(comps)
    peaks = [
        (c.pulse.xi * c.pulse.tau) ** 2 / (4.0 * math.pi * math.sqrt(1.0 + c.pulse.a**2))
        for c in comps
    ]
    ref = max(peaks)
    half = 0.0
    for c, pk in zip(comps, peaks):
        ratio = pk * n * n / (eps * ref)
        if ratio <= 1.0:
            continue
        w = math.sqrt(2.0 * (1.0 + c.pulse.a**2) * math.log(ratio)) / c.pulse.tau
        half = max(half, w)
    return (-half, half)
