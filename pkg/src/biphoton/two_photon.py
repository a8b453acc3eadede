"""Two-photon interference of the down-converted pair.

The joint detection amplitude of the pair factors into the pump envelope
evaluated along a tilted line in the (pair mean time, pair time offset)
plane, windowed by the crystal's group-delay spread ``D L``.  Scanning a
birefringent delay ``tau_l`` across that window produces the coincidence
dip; this module computes the normalized coincidence rate

    R_n(tau_l) = 1 - rho(tau_l)

by three interchangeable routes:

* ``rho_general``  - nested quadrature of the overlap integral for an
  arbitrary superposition pump,
* ``rho_two_pulse`` - the same integral split into single-pulse and
  cross-pulse contributions of the two-pulse pump,
* ``rho_gaussian`` - closed-form reduction of the time-offset integral for
  chirped Gaussian pulses, leaving a single smooth quadrature.

The generic and closed-form routes serve as mutual validation oracles.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from .core import (
    BiphotonError,
    CrystalParams,
    DegenerateGeometryError,
    DelayLine,
    NormalizationConstants,
    derived_mismatch,
    length_of_tau_l,
    rect,
    tau_l_of_length,
)
from .numerics import (
    GridSpec,
    NonUnimodalError,
    QuadSpec,
    _golden_minimize,
    integrate_1d,
    integrate_2d_nested,
    maximize_scalar,
)
from .pump import PumpField, envelope_time, time_support

__all__ = [
    "ZeroPumpError",
    "UndefinedVisibilityError",
    "TwoPhotonAmplitude",
    "Interferogram",
    "VisibilityResult",
    "ThetaScan",
    "Tau0Scan",
    "R0_general",
    "rho_general",
    "R0_two_pulse",
    "rho_two_pulse",
    "R0_gaussian",
    "rho_gaussian",
    "interferogram",
    "visibility",
    "visibility_vs_theta",
    "theta_max_vs_tau0",
]

_SQRT_PI = math.sqrt(math.pi)


class ZeroPumpError(BiphotonError, ValueError):
    """The pump integrates to zero power, so normalized rates are undefined."""


class UndefinedVisibilityError(BiphotonError, RuntimeError):
    """The interferogram is flat; there is no dip to measure."""


def _window_halfwidth(tau_l: float, dl: float) -> float:
    """Half-length of the pair-time-offset window at delay ``tau_l``.

    Positive only while the delay lies strictly inside (0, D L).
    """
    return 0.5 * dl - abs(tau_l - 0.5 * dl)


@dataclass(frozen=True)
class TwoPhotonAmplitude:
    """Joint amplitude of the pair vs mean detection time and time offset.

    ``__call__(T0, tau)`` evaluates the amplitude at pair mean time ``T0``
    and signed pair time offset ``tau``; the offset is windowed to the
    crystal's group-delay spread and the pump envelope is sampled along the
    tilted line ``(Lambda / D) tau + T0``.  The carrier contributes only the
    global phase ``exp(-2 i omega0_1 T0)``, which cancels in every rate.
    """

    field: PumpField
    crystal: CrystalParams
    consts: NormalizationConstants = NormalizationConstants()

    def __call__(self, T0, tau):
        mism = derived_mismatch(self.crystal)
        if mism.D == 0.0:
            raise DegenerateGeometryError("pair amplitude undefined for D = 0")
        dl = mism.D * self.crystal.L
        t0 = np.asarray(T0, dtype=float)
        tt = np.asarray(tau, dtype=float)
        window = rect(tt / dl)
        env = envelope_time(self.field, (mism.Lambda / mism.D) * tt + t0)
        phase = np.exp(-2j * self.crystal.omega0_1 * t0)
        out = (
            math.sqrt(self.consts.c_A_sq)
            / abs(mism.D)
            * np.asarray(window)
            * np.asarray(env)
            * phase
        )
        if np.ndim(T0) == 0 and np.ndim(tau) == 0:
            return complex(out)
        return out


def _pulse_halfwidths(field: PumpField, eps: float) -> tuple[float, float]:
    return (field.pulse1.time_halfwidth(eps), field.pulse2.time_halfwidth(eps))


def R0_general(
    field,
    crystal: CrystalParams,
    consts: NormalizationConstants = NormalizationConstants(),
    spec: QuadSpec = QuadSpec(),
) -> float:
    """Coincidence normalisation: pair rate with the delay far outside the dip.

    Nested quadrature of the pump intensity over the full pair window; works
    for any superposition pump.
    """
    mism = derived_mismatch(crystal)
    if mism.D == 0.0:
        raise DegenerateGeometryError("coincidence window collapses for D = 0")
    dl = mism.D * crystal.L
    s = mism.Lambda / mism.D
    lo, hi = time_support(field, spec.truncation_eps)
    if lo == hi:
        return 0.0

    def integrand(tau: float, t0: np.ndarray) -> np.ndarray:
        return np.abs(envelope_time(field, s * tau + t0)) ** 2

    def bounds(tau: float) -> tuple[float, float]:
        return (lo - s * tau, hi - s * tau)

    def inner_cuts(tau: float):
        return [-c.delay - s * tau for c in field.components]

    res = integrate_2d_nested(integrand, (0.0, dl), bounds, spec, inner_breakpoints=inner_cuts)
    return consts.c_A_sq / (2.0 * mism.D**2) * res.value


def _r0_scale(field, crystal: CrystalParams, consts: NormalizationConstants) -> float:
    """Magnitude of the normalisation if the pulses did not interfere.

    Used to decide whether a computed normalisation is genuine or pure
    cancellation noise from a destructively interfering pump.
    """
    mism = derived_mismatch(crystal)
    total = sum(c.pulse.xi**2 * c.pulse.tau for c in field.components)
    return (
        _SQRT_PI * consts.c_A_sq * crystal.L / (2.0 * math.sqrt(2.0) * abs(mism.D)) * total
    )


def _check_r0(r0: float, scale: float) -> float:
    if not (r0 > 1e-9 * scale) or scale == 0.0:
        raise ZeroPumpError(
            "pump power integrates to (numerically) zero; the normalized "
            "coincidence rate is undefined"
        )
    return r0


def rho_general(
    field,
    crystal: CrystalParams,
    tau_l: float,
    consts: NormalizationConstants = NormalizationConstants(),
    spec: QuadSpec = QuadSpec(),
    r0: float | None = None,
) -> float:
    """Dip profile 1 - R_n at delay ``tau_l`` for an arbitrary pump.

    Overlap of the pair amplitude with its delay-exchanged copy; zero
    whenever the delay lies outside the open window (0, D L).  ``r0`` may
    pass in a precomputed :func:`R0_general` value to avoid recomputation.
    """
    mism = derived_mismatch(crystal)
    if mism.D == 0.0:
        raise DegenerateGeometryError("coincidence window collapses for D = 0")
    dl = mism.D * crystal.L
    half = _window_halfwidth(tau_l, dl)
    if half <= 0.0:
        return 0.0
    if r0 is None:
        r0 = R0_general(field, crystal, consts, spec)
    _check_r0(r0, _r0_scale(field, crystal, consts))
    s = mism.Lambda / mism.D
    lo, hi = time_support(field, spec.truncation_eps)
    pad = abs(s) * half
    inner = (lo - pad, hi + pad)

    def integrand(tau: float, t0: np.ndarray) -> np.ndarray:
        fwd = envelope_time(field, s * tau + t0)
        bwd = envelope_time(field, -s * tau + t0)
        return np.real(fwd * np.conj(bwd))

    def inner_cuts(tau: float):
        cuts = []
        for c in field.components:
            cuts.append(-c.delay - s * tau)
            cuts.append(-c.delay + s * tau)
        return cuts

    outer_cuts: list[float] = [0.0]
    if s != 0.0:
        delays = [c.delay for c in field.components]
        for di in delays:
            for dk in delays:
                outer_cuts.append((di - dk) / (2.0 * s))

    res = integrate_2d_nested(
        integrand,
        (-half, half),
        inner,
        spec,
        outer_breakpoints=outer_cuts,
        inner_breakpoints=inner_cuts,
    )
    return consts.c_A_sq / (2.0 * r0 * mism.D**2) * res.value


def R0_two_pulse(
    field: PumpField,
    crystal: CrystalParams,
    consts: NormalizationConstants = NormalizationConstants(),
    spec: QuadSpec = QuadSpec(),
) -> tuple[float, float, float]:
    """Normalisation split into single-pulse and cross-pulse parts.

    Returns ``(R0_auto, R0_cross, R0_total)``.  The auto part adds the two
    pulses' individual powers; the cross part carries the ``exp(-i phi)``
    interference of the overlapping pulses and changes sign under
    ``phi -> phi + pi``.
    """
    mism = derived_mismatch(crystal)
    if mism.D == 0.0:
        raise DegenerateGeometryError("coincidence window collapses for D = 0")
    p1, p2 = field.pulse1, field.pulse2
    theta, phi = field.theta, field.phi
    eps = spec.truncation_eps
    w1, w2 = _pulse_halfwidths(field, eps)
    pref = consts.c_A_sq * crystal.L / abs(mism.D)

    if p1.xi == 0.0 and p2.xi == 0.0:
        return (0.0, 0.0, 0.0)

    def auto(t: np.ndarray) -> np.ndarray:
        return np.abs(p1.amplitude_time(t)) ** 2 + np.abs(p2.amplitude_time(t)) ** 2

    lo = -max(w1, w2)
    hi = max(w1, w2)
    r0_auto = 0.5 * pref * integrate_1d(auto, lo, hi, spec, breakpoints=[0.0]).value

    if p1.xi == 0.0 or p2.xi == 0.0:
        return (r0_auto, 0.0, r0_auto)

    def cross(t: np.ndarray) -> np.ndarray:
        prod = p1.amplitude_time(t) * np.conj(p2.amplitude_time(t + theta))
        return np.real(np.exp(-1j * phi) * prod)

    lo = min(-w1, -theta - w2)
    hi = max(w1, -theta + w2)
    r0_cross = pref * integrate_1d(
        cross, lo, hi, spec, breakpoints=[0.0, -theta, -0.5 * theta]
    ).value
    return (r0_auto, r0_cross, r0_auto + r0_cross)


def rho_two_pulse(
    field: PumpField,
    crystal: CrystalParams,
    tau_l: float,
    consts: NormalizationConstants = NormalizationConstants(),
    spec: QuadSpec = QuadSpec(),
    r0: float | None = None,
) -> tuple[float, float, float]:
    """Dip profile split into single-pulse and cross-pulse contributions.

    Returns ``(rho_auto, rho_cross, rho_total)``; the parts are the overlap
    of each pulse with its own exchanged copy and the interference between
    the two pulses.  ``rho_cross`` flips sign under ``phi -> phi + pi``.
    """
    mism = derived_mismatch(crystal)
    if mism.D == 0.0:
        raise DegenerateGeometryError("coincidence window collapses for D = 0")
    dl = mism.D * crystal.L
    half = _window_halfwidth(tau_l, dl)
    if half <= 0.0:
        return (0.0, 0.0, 0.0)
    if r0 is None:
        r0 = R0_two_pulse(field, crystal, consts, spec)[2]
    _check_r0(r0, _r0_scale(field, crystal, consts))
    p1, p2 = field.pulse1, field.pulse2
    theta, phi = field.theta, field.phi
    s = mism.Lambda / mism.D
    w1, w2 = _pulse_halfwidths(field, spec.truncation_eps)
    w = max(w1, w2)
    pad = abs(s) * half + abs(theta)
    inner = (-w - pad, w + pad)

    def auto(tau: float, t0: np.ndarray) -> np.ndarray:
        out = np.real(
            p1.amplitude_time(s * tau + t0) * np.conj(p1.amplitude_time(-s * tau + t0))
        )
        out += np.real(
            p2.amplitude_time(s * tau + t0) * np.conj(p2.amplitude_time(-s * tau + t0))
        )
        return out

    def cross(tau: float, t0: np.ndarray) -> np.ndarray:
        prod = p1.amplitude_time(s * tau + t0) * np.conj(
            p2.amplitude_time(-s * tau + t0 + theta)
        )
        return np.real(np.exp(-1j * phi) * prod)

    def inner_cuts_auto(tau: float):
        return [-s * tau, s * tau]

    def inner_cuts_cross(tau: float):
        return [-s * tau, s * tau - theta]

    outer_auto: list[float] = [0.0]
    outer_cross: list[float] = [0.0]
    if s != 0.0:
        wt = 0.5 * (w1 + w2) / abs(s)
        centre = theta / (2.0 * s)
        outer_cross.extend([centre, centre - wt, centre + wt])
        outer_auto.extend([-0.5 * w / abs(s), 0.5 * w / abs(s)])

    pref = consts.c_A_sq / (2.0 * r0 * mism.D**2)
    rho_auto = 0.0
    if p1.xi != 0.0 or p2.xi != 0.0:
        rho_auto = (
            pref
            * integrate_2d_nested(
                auto, (-half, half), inner, spec,
                outer_breakpoints=outer_auto, inner_breakpoints=inner_cuts_auto,
            ).value
        )
    rho_cross = 0.0
    if p1.xi != 0.0 and p2.xi != 0.0:
        rho_cross = (
            2.0
            * pref
            * integrate_2d_nested(
                cross, (-half, half), inner, spec,
                outer_breakpoints=outer_cross, inner_breakpoints=inner_cuts_cross,
            ).value
        )
    return (rho_auto, rho_cross, rho_auto + rho_cross)


def R0_gaussian(
    field: PumpField,
    crystal: CrystalParams,
    consts: NormalizationConstants = NormalizationConstants(),
) -> tuple[float, float, float]:
    """Closed-form normalisation for chirped Gaussian pulses.

    Same split as :func:`R0_two_pulse`, with the time integrals done
    analytically (principal branch of the complex square root).
    """
    mism = derived_mismatch(crystal)
    if mism.D == 0.0:
        raise DegenerateGeometryError("coincidence window collapses for D = 0")
    p1, p2 = field.pulse1, field.pulse2
    pref = consts.c_A_sq * crystal.L / abs(mism.D)
    r0_auto = _SQRT_PI / (2.0 * math.sqrt(2.0)) * pref * (
        p1.xi**2 * p1.tau + p2.xi**2 * p2.tau
    )
    if p1.xi == 0.0 or p2.xi == 0.0:
        return (r0_auto, 0.0, r0_auto)
    asum = p1.alpha + np.conj(p2.alpha)
    gamma = p1.alpha * np.conj(p2.alpha) / asum
    r0_cross = (
        _SQRT_PI
        * pref
        * p1.xi
        * p2.xi
        * float(
            np.real(
                np.exp(-1j * field.phi)
                / np.sqrt(asum)
                * np.exp(-gamma * field.theta**2)
            )
        )
    )
    return (r0_auto, r0_cross, r0_auto + r0_cross)


def rho_gaussian(
    field: PumpField,
    crystal: CrystalParams,
    tau_l: float,
    consts: NormalizationConstants = NormalizationConstants(),
    spec: QuadSpec = QuadSpec(),
    r0: float | None = None,
) -> tuple[float, float, float]:
    """Closed-form dip profile for chirped Gaussian pulses.

    The pair-mean-time integral is carried out analytically, leaving one
    smooth quadrature over the pair time offset.  Splits and returns the
    contributions exactly like :func:`rho_two_pulse`.
    """
    mism = derived_mismatch(crystal)
    if mism.D == 0.0:
        raise DegenerateGeometryError("coincidence window collapses for D = 0")
    dl = mism.D * crystal.L
    half = _window_halfwidth(tau_l, dl)
    if half <= 0.0:
        return (0.0, 0.0, 0.0)
    if r0 is None:
        r0 = R0_gaussian(field, crystal, consts)[2]
    _check_r0(r0, _r0_scale(field, crystal, consts))
    p1, p2 = field.pulse1, field.pulse2
    theta, phi = field.theta, field.phi
    s = mism.Lambda / mism.D

    rate1 = math.sqrt(1.0 + p1.a**2) / p1.tau * s
    rate2 = math.sqrt(1.0 + p2.a**2) / p2.tau * s

    def auto(tau: np.ndarray) -> np.ndarray:
        out = p1.xi**2 * p1.tau * np.exp(-2.0 * (rate1 * tau) ** 2)
        out = out + p2.xi**2 * p2.tau * np.exp(-2.0 * (rate2 * tau) ** 2)
        return out

    pref = _SQRT_PI * consts.c_A_sq / (2.0 * math.sqrt(2.0) * r0 * mism.D**2)
    cuts_auto = [0.0]
    if s != 0.0:
        w = max(p1.tau / math.sqrt(1 + p1.a**2), p2.tau / math.sqrt(1 + p2.a**2)) / abs(s)
        cuts_auto.extend([-w, w])
    rho_auto = 0.0
    if p1.xi != 0.0 or p2.xi != 0.0:
        rho_auto = pref * integrate_1d(auto, -half, half, spec, breakpoints=cuts_auto).value

    rho_cross = 0.0
    if p1.xi != 0.0 and p2.xi != 0.0:
        asum = p1.alpha + np.conj(p2.alpha)
        gamma = p1.alpha * np.conj(p2.alpha) / asum
        phase = np.exp(-1j * phi) / np.sqrt(asum)

        def cross(tau: np.ndarray) -> np.ndarray:
            arg = theta - 2.0 * s * tau
            return np.real(phase * np.exp(-gamma * arg * arg))

        cuts = [0.0]
        if s != 0.0:
            centre = theta / (2.0 * s)
            w = 0.5 * (p1.tau + p2.tau) / abs(s)
            cuts.extend([centre, centre - w, centre + w])
        pref_cross = _SQRT_PI * consts.c_A_sq * p1.xi * p2.xi / (r0 * mism.D**2)
        rho_cross = pref_cross * integrate_1d(cross, -half, half, spec, breakpoints=cuts).value
    return (rho_auto, rho_cross, rho_auto + rho_cross)


_METHODS = {"gaussian", "generic"}


@dataclass(frozen=True)
class Interferogram:
    """Sampled coincidence interferogram R_n(tau_l) with its contributions.

    ``lengths`` is the delay-plate thickness axis (mm) matching ``tau_ls``
    (s).  ``rho_auto``/``rho_cross`` are the dip contributions such that
    ``values = 1 - rho_auto - rho_cross``.  ``dl`` is the dip's nominal
    support width ``D L`` in seconds.
    """

    tau_ls: np.ndarray
    lengths: np.ndarray
    values: np.ndarray
    rho_auto: np.ndarray
    rho_cross: np.ndarray
    dl: float
    metadata: dict = dc_field(default_factory=dict)
    evaluator: Callable[[float], float] | None = dc_field(
        default=None, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        for name in ("tau_ls", "lengths", "values", "rho_auto", "rho_cross"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            if arr.shape != self.tau_ls.shape:
                raise ValueError("interferogram arrays must share one shape")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
        if np.any(self.values < -1e-9):
            raise ValueError("coincidence rate must be nonnegative")


def interferogram(
    field: PumpField,
    crystal: CrystalParams,
    delay: DelayLine,
    grid: GridSpec,
    method: str = "gaussian",
    consts: NormalizationConstants = NormalizationConstants(),
    spec: QuadSpec = QuadSpec(),
    grid_axis: str = "tau_l",
    threads: int = 1,
) -> Interferogram:
    """Coincidence interferogram over a delay grid.

    ``grid`` is interpreted on the ``tau_l`` axis (seconds) by default, or
    on the plate-thickness axis (mm) with ``grid_axis="l"``.  ``method``
    selects the closed-form route (``"gaussian"``) or the nested-quadrature
    route (``"generic"``); both return identical curves to within the
    quadrature tolerance.  The normalisation is computed once and shared by
    all points.
    """
    if method not in _METHODS:
        raise ValueError(f"method must be one of {sorted(_METHODS)}, got {method!r}")
    if grid_axis not in ("tau_l", "l"):
        raise ValueError(f"grid_axis must be 'tau_l' or 'l', got {grid_axis!r}")
    mism = derived_mismatch(crystal)
    if mism.D == 0.0:
        raise DegenerateGeometryError("coincidence window collapses for D = 0")
    dl = mism.D * crystal.L

    pts = grid.points()
    if grid_axis == "l":
        lengths = pts
        tau_ls = np.asarray([tau_l_of_length(delay, float(l)) for l in pts])
    else:
        tau_ls = pts
        lengths = np.asarray([length_of_tau_l(delay, float(t)) for t in pts])

    if method == "gaussian":
        r0 = R0_gaussian(field, crystal, consts)[2]
        point = lambda tl: rho_gaussian(field, crystal, tl, consts, spec, r0=r0)
    else:
        r0 = R0_two_pulse(field, crystal, consts, spec)[2]
        point = lambda tl: rho_two_pulse(field, crystal, tl, consts, spec, r0=r0)
    _check_r0(r0, _r0_scale(field, crystal, consts))

    if threads <= 1:
        parts = [point(float(t)) for t in tau_ls]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda t: point(float(t)), tau_ls))
    rho_auto = np.asarray([p[0] for p in parts])
    rho_cross = np.asarray([p[1] for p in parts])
    values = 1.0 - rho_auto - rho_cross

    def evaluate(tau_l: float) -> float:
        return 1.0 - point(float(tau_l))[2]

    return Interferogram(
        tau_ls=tau_ls,
        lengths=lengths,
        values=values,
        rho_auto=rho_auto,
        rho_cross=rho_cross,
        dl=dl,
        metadata={"method": method, "r0": r0},
        evaluator=evaluate,
    )


@dataclass(frozen=True)
class VisibilityResult:
    """Dip visibility (R_max - R_min) / (R_max + R_min) and its location."""

    visibility: float
    rn_min: float
    rn_max: float
    tau_l_at_min: float


def visibility(ifg: Interferogram) -> VisibilityResult:
    """Visibility of an interferogram covering the full dip.

    The curve must extend at least 10% of ``D L`` beyond both dip edges so
    the unit baseline is represented.  The maximum is taken as the baseline
    1 unless a scanned value exceeds it; the minimum is the global scan
    minimum, refined by golden-section when the interferogram carries its
    evaluator.  A flat curve has no dip and raises
    :class:`UndefinedVisibilityError`.
    """
    tau_ls = ifg.tau_ls
    values = ifg.values
    dl = ifg.dl
    tol_cov = 1e-3 * dl
    if tau_ls[0] > -0.1 * dl + tol_cov or tau_ls[-1] < 1.1 * dl - tol_cov:
        raise ValueError(
            "interferogram must cover [-0.1 DL, 1.1 DL] to normalise visibility"
        )
    if float(values.max() - values.min()) < 1e-12:
        raise UndefinedVisibilityError("interferogram is flat; no dip present")

    i_min = int(np.argmin(values))
    rn_min = float(values[i_min])
    tau_at = float(tau_ls[i_min])
    if ifg.evaluator is not None and 0 < i_min < len(tau_ls) - 1:
        step = tau_ls[i_min + 1] - tau_ls[i_min]
        tau_at = _golden_minimize(
            ifg.evaluator, float(tau_ls[i_min - 1]), float(tau_ls[i_min + 1]), 1e-4 * step
        )
        rn_min = min(rn_min, float(ifg.evaluator(tau_at)))

    rn_max = 1.0
    i_max = int(np.argmax(values))
    if float(values[i_max]) > 1.0:
        rn_max = float(values[i_max])
        if ifg.evaluator is not None and 0 < i_max < len(tau_ls) - 1:
            step = tau_ls[i_max + 1] - tau_ls[i_max]
            x_at = _golden_minimize(
                lambda x: -ifg.evaluator(x),
                float(tau_ls[i_max - 1]),
                float(tau_ls[i_max + 1]),
                1e-4 * step,
            )
            rn_max = max(rn_max, float(ifg.evaluator(x_at)))

    vis = (rn_max - rn_min) / (rn_max + rn_min)
    return VisibilityResult(
        visibility=vis, rn_min=rn_min, rn_max=rn_max, tau_l_at_min=tau_at
    )


@dataclass(frozen=True)
class ThetaScan:
    """Visibility against the mutual pump delay, with the refined maximum."""

    thetas: np.ndarray
    visibilities: np.ndarray
    theta_max: float
    v_max: float
    interior: bool


def _default_vis_grid(crystal: CrystalParams) -> GridSpec:
    mism = derived_mismatch(crystal)
    dl = mism.D * crystal.L
    return GridSpec(-0.1 * dl, 1.1 * dl, 121)


def visibility_vs_theta(
    pulse1,
    pulse2,
    phi: float,
    crystal: CrystalParams,
    delay: DelayLine,
    thetas: GridSpec,
    method: str = "gaussian",
    consts: NormalizationConstants = NormalizationConstants(),
    spec: QuadSpec = QuadSpec(),
    ifg_grid: GridSpec | None = None,
    threads: int = 1,
) -> ThetaScan:
    """Scan the dip visibility over the mutual pump delay ``theta``.

    The maximum is located from the scan grid and refined by golden-section
    search; when the coarse bracket is not unimodal the bracket is re-built
    from a denser local scan before giving up.  ``interior`` reports whether
    the maximum sits strictly inside the scanned range.
    """
    grid = ifg_grid if ifg_grid is not None else _default_vis_grid(crystal)

    def vis_at(theta: float) -> float:
        field = PumpField(pulse1, pulse2, theta=float(theta), phi=phi)
        ifg = interferogram(
            field, crystal, delay, grid, method=method, consts=consts, spec=spec,
            threads=threads,
        )
        return visibility(ifg).visibility

    theta_pts = thetas.points()
    vis_vals = np.asarray([vis_at(float(t)) for t in theta_pts])

    i_best = int(np.argmax(vis_vals))
    if i_best == 0 or i_best == len(theta_pts) - 1:
        return ThetaScan(theta_pts, vis_vals, float(theta_pts[i_best]),
                         float(vis_vals[i_best]), interior=False)

    lo, hi = float(theta_pts[i_best - 1]), float(theta_pts[i_best + 1])
    tol = 1e-3 * thetas.step
    try:
        t_max, v_max = maximize_scalar(vis_at, lo, hi, tol)
    except NonUnimodalError:
        dense = np.linspace(lo, hi, 17)
        dense_vals = np.asarray([vis_at(float(t)) for t in dense])
        k = int(np.argmax(dense_vals))
        k = min(max(k, 1), len(dense) - 2)
        t_max, v_max = maximize_scalar(vis_at, float(dense[k - 1]), float(dense[k + 1]), tol)
    return ThetaScan(theta_pts, vis_vals, float(t_max), float(v_max), interior=True)


@dataclass(frozen=True)
class Tau0Scan:
    """Optimal mutual delay against the common pulse duration."""

    tau0s: np.ndarray
    theta_maxes: np.ndarray
    v_maxes: np.ndarray


def theta_max_vs_tau0(
    tau0s,
    crystal: CrystalParams,
    delay: DelayLine,
    a: float = 0.0,
    phi: float = 0.0,
    theta_span: float = 6.0,
    n_theta: int = 25,
    method: str = "gaussian",
    consts: NormalizationConstants = NormalizationConstants(),
    spec: QuadSpec = QuadSpec(),
    ifg_grid: GridSpec | None = None,
    threads: int = 1,
) -> Tau0Scan:
    """Locate the visibility-optimal mutual delay for each pulse duration.

    Both pulses share the duration ``tau0``, unit amplitude and chirp ``a``;
    the delay is scanned over ``[0, theta_span * tau0]``.
    """
    from .pump import PumpPulse

    tau0s = np.asarray(tau0s, dtype=float)
    theta_maxes = np.empty(tau0s.shape)
    v_maxes = np.empty(tau0s.shape)
    for i, tau0 in enumerate(tau0s):
        pulse = PumpPulse(xi=1.0, tau=float(tau0), a=a)
        scan = visibility_vs_theta(
            pulse, pulse, phi, crystal, delay,
            GridSpec(0.0, theta_span * float(tau0), n_theta),
            method=method, consts=consts, spec=spec, ifg_grid=ifg_grid, threads=threads,
        )
        theta_maxes[i] = scan.theta_max
        v_maxes[i] = scan.v_max
    return Tau0Scan(tau0s=tau0s, theta_maxes=theta_maxes, v_maxes=v_maxes)
