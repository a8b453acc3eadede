"""Physical parameter types and shared special functions.

Unit conventions used throughout the package:

* crystal and delay-line lengths are in millimetres,
* inverse group velocities in s/mm,
* times and delays in seconds,
* detunings (frequency offsets from the phase-matched carriers) in rad/s.

The down-conversion geometry is summarised by four derived walk-off
quantities: the pump/photon group-delay mismatches ``D_p1``, ``D_p2`` per
unit length, their mean ``Lambda`` and difference ``D``.  The labelling of
the two down-converted fields is fixed so that ``D >= 0``; inputs given in
the opposite order are swapped on construction and the swap is recorded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BiphotonError",
    "DegenerateGeometryError",
    "CrystalParams",
    "DerivedMismatch",
    "derived_mismatch",
    "DelayLine",
    "tau_l_of_length",
    "length_of_tau_l",
    "NormalizationConstants",
    "rect",
    "sinc",
]


class BiphotonError(Exception):
    """Base class for physics-level errors raised by this package."""


class DegenerateGeometryError(BiphotonError, ValueError):
    """The crystal geometry makes the requested quantity ill-defined."""


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class CrystalParams:
    """Collinear type-II down-conversion crystal.

    Parameters
    ----------
    L:
        Crystal length in mm.
    inv_vp, inv_v1, inv_v2:
        Inverse group velocities of the pump and of the two down-converted
        fields, in s/mm, evaluated at the respective carrier frequencies.
    omega0_1, omega0_2:
        Carrier frequencies of the down-converted fields in rad/s.  They fix
        a global phase of the pair amplitude and drop out of every intensity
        observable; they are stored for completeness only.

    If ``inv_v1 < inv_v2`` the two down-converted labels are swapped so that
    the stored difference ``inv_v1 - inv_v2`` is nonnegative; ``relabeled``
    records that this happened.
    """

    L: float
    inv_vp: float
    inv_v1: float
    inv_v2: float
    omega0_1: float = 0.0
    omega0_2: float = 0.0
    relabeled: bool = field(default=False, init=False)

    def __post_init__(self) -> None:
        for name in ("L", "inv_vp", "inv_v1", "inv_v2", "omega0_1", "omega0_2"):
            _require_finite(name, getattr(self, name))
        if self.L <= 0:
            raise ValueError(f"crystal length must be positive, got {self.L!r}")
        if self.inv_vp <= 0 or self.inv_v1 <= 0 or self.inv_v2 <= 0:
            raise ValueError("inverse group velocities must be positive")
        if self.inv_v1 < self.inv_v2:
            v1, v2 = self.inv_v1, self.inv_v2
            w1, w2 = self.omega0_1, self.omega0_2
            object.__setattr__(self, "inv_v1", v2)
            object.__setattr__(self, "inv_v2", v1)
            object.__setattr__(self, "omega0_1", w2)
            object.__setattr__(self, "omega0_2", w1)
            object.__setattr__(self, "relabeled", True)


@dataclass(frozen=True)
class DerivedMismatch:
    """Group-delay mismatch per unit crystal length (all in s/mm).

    ``D_pj`` is the pump-photon mismatch for field ``j``; ``Lambda`` and
    ``D`` are their mean and difference, so ``D_pj = Lambda + (-1)**j * D/2``.
    """

    D_p1: float
    D_p2: float
    Lambda: float
    D: float

    @property
    def d(self) -> float:
        """Mismatch ratio ``D_p2 / D_p1``."""
        if self.D_p1 == 0.0:
            raise DegenerateGeometryError(
                "mismatch ratio undefined: pump walks off field 1 at zero rate"
            )
        return self.D_p2 / self.D_p1

    def D_p(self, j: int) -> float:
        """Pump-photon mismatch for field ``j`` (1 or 2)."""
        if j == 1:
            return self.D_p1
        if j == 2:
            return self.D_p2
        raise ValueError(f"field index must be 1 or 2, got {j!r}")


def derived_mismatch(crystal: CrystalParams) -> DerivedMismatch:
    """Walk-off quantities derived from the crystal's inverse velocities."""
    d_p1 = crystal.inv_vp - crystal.inv_v1
    d_p2 = crystal.inv_vp - crystal.inv_v2
    lam = 0.5 * (d_p1 + d_p2)
    big_d = crystal.inv_v1 - crystal.inv_v2
    return DerivedMismatch(D_p1=d_p1, D_p2=d_p2, Lambda=lam, D=big_d)


@dataclass(frozen=True)
class DelayLine:
    """Birefringent delay line inserted in one interferometer arm.

    ``inv_g1``/``inv_g2`` are the inverse group velocities (s/mm) seen by the
    two photon polarisations; a plate of thickness ``l`` mm delays one photon
    by ``(inv_g2 - inv_g1) * l`` relative to the other.
    """

    inv_g1: float
    inv_g2: float

    def __post_init__(self) -> None:
        _require_finite("inv_g1", self.inv_g1)
        _require_finite("inv_g2", self.inv_g2)
        if self.inv_g1 == self.inv_g2:
            raise ValueError("delay line must be birefringent (inv_g1 != inv_g2)")


def tau_l_of_length(delay: DelayLine, l: float) -> float:
    """Relative delay in seconds produced by a plate of thickness ``l`` mm."""
    return (delay.inv_g2 - delay.inv_g1) * l


def length_of_tau_l(delay: DelayLine, tau_l: float) -> float:
    """Plate thickness in mm that produces the relative delay ``tau_l``."""
    return tau_l / (delay.inv_g2 - delay.inv_g1)


@dataclass(frozen=True)
class NormalizationConstants:
    """User-set scale factors absorbing detector and collection constants.

    ``c_N`` scales mean photon numbers, ``c_S`` the one-photon spectra and
    ``c_A_sq`` (the squared pair-amplitude scale) the coincidence rates.
    They set the overall units of the respective observables and cancel in
    every normalized quantity.
    """

    c_N: float = 1.0
    c_S: float = 1.0
    c_A_sq: float = 10.0

    def __post_init__(self) -> None:
        for name in ("c_N", "c_S", "c_A_sq"):
            value = getattr(self, name)
            _require_finite(name, value)
            if value < 0:
                raise ValueError(f"{name} must be nonnegative, got {value!r}")


def rect(x):
    """Open-interval indicator: 1 for 0 < x < 1, else 0.

    Accepts scalars or arrays; the endpoints map to 0.
    """
    arr = np.asarray(x, dtype=float)
    out = np.where((arr > 0.0) & (arr < 1.0), 1.0, 0.0)
    if np.ndim(x) == 0:
        return float(out)
    return out


_SINC_SMALL = 1e-4


def sinc(x):
    """sin(x)/x with sinc(0) = 1 (unnormalised convention).

    For ``|x| < 1e-4`` the truncated Taylor series ``1 - x^2/6 + x^4/120`` is
    used, which is exact to double precision on that range.  Accepts scalars
    or arrays.
    """
    arr = np.asarray(x, dtype=float)
    small = np.abs(arr) < _SINC_SMALL
    x2 = arr * arr
    series = 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    # avoid 0/0 warnings: substitute 1 where the series branch is taken
    safe = np.where(small, 1.0, arr)
    ratio = np.sin(safe) / safe
    out = np.where(small, series, ratio)
    if np.ndim(x) == 0:
        return float(out)
    return out
