"""One-photon observables of the down-converted fields.

Time-resolved mean photon numbers, down-converted spectra, the kernel that
maps one field's spectrum onto its partner's, and a regularised
deconvolution that recovers the pump spectral intensity from a measured
one-photon spectrum.

Everything is expressed with detunings from the phase-matched carriers, so
spectra are centred near zero regardless of the optical frequencies.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    BiphotonError,
    CrystalParams,
    DegenerateGeometryError,
    NormalizationConstants,
    derived_mismatch,
    sinc,
)
from .numerics import GridSpec, QuadSpec, cosine_breakpoints, integrate_1d
from .pump import envelope_time, spectral_intensity, spectral_support, time_support

__all__ = [
    "KernelDegenerateError",
    "KernelDomainError",
    "IllPosedInversionError",
    "SpectrumCurve",
    "PhotonNumberCurve",
    "InversionResult",
    "mean_photon_number",
    "photon_number_curve",
    "spectrum_direct",
    "spectrum_curve",
    "cross_kernel_p",
    "CrossKernelEvaluator",
    "spectrum_from_partner",
    "invert_pump_spectrum",
]

_TWO_PI_SQ = (2.0 * math.pi) ** 2


class KernelDegenerateError(BiphotonError, ValueError):
    """The inter-spectrum kernel is degenerate (mismatch ratio is zero)."""


class KernelDomainError(BiphotonError, ValueError):
    """The inter-spectrum relation's premise |ratio| <= 1 is violated."""


class IllPosedInversionError(BiphotonError, RuntimeError):
    """Deconvolution residual exceeded the acceptance threshold.

    Carries the best-effort :class:`InversionResult` as ``result``.
    """

    def __init__(self, message: str, result: "InversionResult"):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class SpectrumCurve:
    """A sampled spectrum: uniform detuning grid (rad/s) and values.

    ``provenance`` records how the curve was obtained: ``"direct"`` (from
    the pump and crystal), ``"from-partner"`` (mapped from the other
    field's spectrum) or ``"inverted-input"`` (pump spectrum recovered by
    deconvolution).
    """

    grid: GridSpec
    values: np.ndarray
    provenance: str = "direct"

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.shape != (self.grid.n,):
            raise ValueError(f"values shape {vals.shape} does not match grid n={self.grid.n}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("spectrum values must be finite")
        if np.any(vals < 0.0):
            raise ValueError("spectrum values must be nonnegative")
        if self.provenance not in ("direct", "from-partner", "inverted-input"):
            raise ValueError(f"unknown provenance {self.provenance!r}")

    @property
    def abscissas(self) -> np.ndarray:
        return self.grid.points()


@dataclass(frozen=True)
class PhotonNumberCurve:
    """Time-resolved mean photon number on a uniform delay grid (s)."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.shape != (self.grid.n,):
            raise ValueError(f"values shape {vals.shape} does not match grid n={self.grid.n}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("photon-number values must be finite")
        if np.any(vals < 0.0):
            raise ValueError("photon-number values must be nonnegative")

    @property
    def abscissas(self) -> np.ndarray:
        return self.grid.points()


def _map_ordered(fn, items, threads: int):
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def mean_photon_number(
    field,
    crystal: CrystalParams,
    j: int,
    tau: float,
    consts: NormalizationConstants = NormalizationConstants(),
    spec: QuadSpec = QuadSpec(),
) -> float:
    """Mean photon number of field ``j`` at detection delay ``tau``.

    The pump intensity is integrated along the crystal as it walks off the
    detected photon; the walk-off rate ``D_pj`` converts that propagation
    integral into a time integral over ``[tau, tau + D_pj L]``.  A crystal
    with degenerate photon velocities (``D = 0``) is rejected.
    """
    mism = derived_mismatch(crystal)
    if mism.D == 0.0:
        raise DegenerateGeometryError("photon group velocities are degenerate (D = 0)")
    d_pj = mism.D_p(j)
    pref = _TWO_PI_SQ * consts.c_N / abs(mism.D)

    def intensity(t: np.ndarray) -> np.ndarray:
        return np.abs(envelope_time(field, t)) ** 2

    if d_pj == 0.0:
        # the pump stays locked to the photon: the propagation integral is flat
        return pref * crystal.L * float(intensity(np.asarray([tau]))[0])

    lo = min(tau, tau + d_pj * crystal.L)
    hi = max(tau, tau + d_pj * crystal.L)
    sup_lo, sup_hi = time_support(field, spec.truncation_eps)
    cuts = [sup_lo, sup_hi] + [-c.delay for c in field.components]
    res = integrate_1d(intensity, lo, hi, spec, breakpoints=cuts)
    return pref / abs(d_pj) * res.value


def photon_number_curve(
    field,
    crystal: CrystalParams,
    j: int,
    grid: GridSpec,
    consts: NormalizationConstants = NormalizationConstants(),
    spec: QuadSpec = QuadSpec(),
    threads: int = 1,
) -> PhotonNumberCurve:
    """Sample :func:`mean_photon_number` over a delay grid."""
    values = _map_ordered(
        lambda t: mean_photon_number(field, crystal, j, float(t), consts, spec),
        grid.points(),
        threads,
    )
    return PhotonNumberCurve(grid, np.asarray(values))


def _phase_matching_breakpoints(field, crystal, d_other, nu_j, mism, lo, hi):
    """Pre-split cuts for the spectral integrand: pump beats + sinc lobes."""
    cuts: list[float] = []
    delays = [c.delay for c in field.components]
    span = max(delays) - min(delays)
    cuts.extend(cosine_breakpoints(span, lo, hi))
    cuts.extend(cosine_breakpoints(crystal.L * abs(d_other), lo, hi))
    if d_other != 0.0:
        cuts.append(mism.D * nu_j / d_other)  # kernel peak
    return cuts


def spectrum_direct(
    field,
    crystal: CrystalParams,
    j: int,
    nu: float,
    consts: NormalizationConstants = NormalizationConstants(),
    spec: QuadSpec = QuadSpec(),
) -> float:
    """Down-converted spectrum of field ``j`` at detuning ``nu`` (rad/s).

    Convolution of the pump spectral intensity with the phase-matching
    kernel ``L^2 sinc^2[(L/2)(D_p(3-j) nu_p - D nu)]``.
    """
    mism = derived_mismatch(crystal)
    d_other = mism.D_p(3 - j)
    lo, hi = spectral_support(field, spec.truncation_eps)
    if lo == hi:
        return 0.0
    big_l = crystal.L

    def integrand(nu_p: np.ndarray) -> np.ndarray:
        arg = 0.5 * big_l * (d_other * nu_p - mism.D * nu)
        return spectral_intensity(field, nu_p) * (big_l * sinc(arg)) ** 2

    cuts = _phase_matching_breakpoints(field, crystal, d_other, nu, mism, lo, hi)
    res = integrate_1d(integrand, lo, hi, spec, breakpoints=cuts)
    return consts.c_S * res.value


def spectrum_curve(
    field,
    crystal: CrystalParams,
    j: int,
    grid: GridSpec,
    consts: NormalizationConstants = NormalizationConstants(),
    spec: QuadSpec = QuadSpec(),
    threads: int = 1,
) -> SpectrumCurve:
    """Sample :func:`spectrum_direct` over a detuning grid."""
    values = _map_ordered(
        lambda nu: spectrum_direct(field, crystal, j, float(nu), consts, spec),
        grid.points(),
        threads,
    )
    return SpectrumCurve(grid, np.asarray(values), provenance="direct")


def _kernel_checks(x: float, y: float) -> None:
    if not (x > 0.0) or not math.isfinite(x):
        raise ValueError(f"kernel width parameter must be positive, got {x!r}")
    if y == 0.0:
        raise KernelDegenerateError("kernel undefined for mismatch ratio 0")
    if abs(y) > 1.0:
        raise KernelDomainError(
            f"mismatch ratio {y!r} outside [-1, 1]; swap the field labels so the"
            " source field is the one the pump walks off faster"
        )


def cross_kernel_p(x: float, y: float, nu: float, spec: QuadSpec = QuadSpec()) -> float:
    """Inter-spectrum kernel value at detuning difference ``nu``.

    ``p(nu) = (1 / pi y) * Integral_0^x (x - t) / (x - y t) cos(nu t) dt``

    with ``x`` the total group-delay spread ``|D| L`` and ``y`` the mismatch
    ratio.  At ``y = 1`` this reduces to ``sin(nu x) / (pi nu)``.
    Requires ``0 < |y| <= 1``.
    """
    _kernel_checks(x, y)

    def integrand(t: np.ndarray) -> np.ndarray:
        num = x - t
        den = x - y * t
        ratio = np.where(den == 0.0, 1.0, num / np.where(den == 0.0, 1.0, den))
        return ratio * np.cos(nu * t)

    cuts = cosine_breakpoints(nu, 0.0, x)
    res = integrate_1d(integrand, 0.0, x, spec, breakpoints=cuts)
    return res.value / (math.pi * y)


class CrossKernelEvaluator:
    """Vectorized evaluation of the inter-spectrum kernel on many detunings.

    Precomputes a composite Gauss-Kronrod panelisation of ``[0, x]`` fine
    enough for the fastest oscillation ``|nu| <= nu_max`` and evaluates the
    cosine transform for whole detuning arrays at once.  The panel count is
    doubled until the worst-case embedded-rule error estimate falls below
    ``tol`` relative to the kernel scale ``x / pi``.
    """

    _MAX_PANELS = 1 << 18

    def __init__(self, x: float, y: float, nu_max: float, tol: float = 1e-10):
        _kernel_checks(x, y)
        self.x = float(x)
        self.y = float(y)
        n_panels = max(8, int(math.ceil(abs(nu_max) * x / math.pi)))
        scale = x / math.pi
        self._build(n_panels)
        while self._worst_error(nu_max) > tol * scale and self.can_refine():
            self.refine()

    def _build(self, n_panels: int) -> None:
        from .numerics import _NODES, _WG7, _WK15  # shared panel rule

        edges = np.linspace(0.0, self.x, n_panels + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        t = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
        num = self.x - t
        den = self.x - self.y * t
        base = np.where(den == 0.0, 1.0, num / np.where(den == 0.0, 1.0, den))
        self._t = t
        self._wbase_k = (half[:, None] * _WK15[None, :]).ravel() * base
        self._wbase_g = (half[:, None] * _WG7[None, :]).ravel() * base
        self._n_panels = n_panels

    def can_refine(self) -> bool:
        return self._n_panels < self._MAX_PANELS

    def refine(self) -> None:
        """Double the panel count (halves the embedded error scale ~2^15)."""
        self._build(2 * self._n_panels)

    def _worst_error(self, nu_max: float) -> float:
        probe = np.asarray([0.0, 0.5 * nu_max, nu_max], dtype=float)
        cos_k = np.cos(probe[:, None] * self._t[None, :]) * self._wbase_k[None, :]
        cos_g = np.cos(probe[:, None] * self._t[None, :]) * self._wbase_g[None, :]
        diff = (cos_k - cos_g).reshape(len(probe), self._n_panels, 15).sum(axis=2)
        return float(np.abs(diff).sum(axis=1).max())

    def values(self, nus: np.ndarray, chunk: int = 2048) -> np.ndarray:
        """Kernel values at an arbitrary array of detuning differences."""
        nus = np.asarray(nus, dtype=float)
        flat = nus.ravel()
        out = np.empty(flat.shape, dtype=float)
        for start in range(0, flat.size, chunk):
            piece = flat[start:start + chunk]
            cos_mat = np.cos(piece[:, None] * self._t[None, :])
            out[start:start + chunk] = cos_mat @ self._wbase_k
        return out.reshape(nus.shape) / (math.pi * self.y)


def spectrum_from_partner(
    source: SpectrumCurve,
    crystal: CrystalParams,
    consts: NormalizationConstants = NormalizationConstants(),
    spec: QuadSpec = QuadSpec(),
    source_field: int = 2,
    out_grid: GridSpec | None = None,
) -> SpectrumCurve:
    """Map the measured spectrum of one field onto its partner's spectrum.

    With ``source_field = 2`` (the default) this computes field 1's spectrum
    from field 2's via the kernel convolution

        S_1(nu) = Integral p(nu - nu') S_2(-nu' / y) dnu',   y = D_p2 / D_p1.

    The relation requires the pump to walk off the *target* field no slower
    than the source field (``|y| <= 1``); for the opposite ordering call
    with ``source_field = 1``, which applies the same relation with the
    labels exchanged.

    The kernel's cosine transform makes the double integral separable, so
    the nu' integral is done in closed form against the linear interpolant
    of the source curve (treated as zero outside its grid, so the curve
    should decay at its ends) and only the kernel's t integral is panelled,
    with its embedded error estimate driving refinement.  Accuracy in the
    source is therefore second order in the source grid step.
    """
    if source_field not in (1, 2):
        raise ValueError(f"source_field must be 1 or 2, got {source_field!r}")
    mism = derived_mismatch(crystal)
    if mism.D == 0.0:
        raise DegenerateGeometryError("kernel width |D| L vanishes for D = 0")
    d_target = mism.D_p(3 - source_field)
    if d_target == 0.0:
        raise DegenerateGeometryError(
            "mismatch ratio undefined: pump walks off the target field at zero rate"
        )
    y = mism.D_p(source_field) / d_target
    x = abs(mism.D) * crystal.L
    _kernel_checks(x, y)

    grid = out_grid if out_grid is not None else source.grid
    out_nus = grid.points()
    src_nus = source.abscissas
    src_vals = source.values
    h_src = src_nus[1] - src_nus[0]

    # the nu' integral of cos(nu' t) against S(-nu'/y) is, after rescaling,
    # the Fourier transform of the source's linear interpolant: the sample
    # sum windowed by the triangle response |y| h sinc^2(y t h / 2)
    nu_abs_max = max(abs(out_nus[0]), abs(out_nus[-1])) + abs(y) * max(
        abs(src_nus[0]), abs(src_nus[-1])
    )
    kernel = CrossKernelEvaluator(x, y, nu_abs_max)

    def reconstruct() -> tuple[np.ndarray, float]:
        omega = -y * kernel._t
        window = abs(y) * h_src * sinc(0.5 * omega * h_src) ** 2
        ft = np.exp(1j * omega[:, None] * src_nus[None, :]) @ src_vals
        coeff_cos = window * ft.real
        coeff_sin = window * ft.imag
        vals = np.empty(out_nus.shape)
        errs = np.empty(out_nus.shape)
        chunk = 2048
        for start in range(0, out_nus.size, chunk):
            piece = out_nus[start:start + chunk]
            phase = piece[:, None] * kernel._t[None, :]
            weighted = np.cos(phase) * coeff_cos[None, :] + np.sin(phase) * coeff_sin[None, :]
            k15 = weighted @ kernel._wbase_k
            g7 = weighted @ kernel._wbase_g
            vals[start:start + chunk] = k15
            errs[start:start + chunk] = np.abs(k15 - g7)
        scale = math.pi * abs(y)
        return vals / (math.pi * y), float(errs.max()) / scale

    values, err = reconstruct()
    tol = max(spec.abs_tol, spec.rel_tol * float(np.abs(values).max()))
    while err > tol and kernel.can_refine():
        kernel.refine()
        values, err = reconstruct()

    # the convolution is nonnegative up to quadrature error; trim noise
    floor = -1e-9 * max(float(values.max()), 0.0) if values.size else 0.0
    values = np.where((values < 0.0) & (values >= floor), 0.0, values)
    return SpectrumCurve(grid, values, provenance="from-partner")


@dataclass(frozen=True)
class InversionResult:
    """Recovered pump spectral intensity plus the forward-model residual."""

    curve: SpectrumCurve
    residual: float
    lam: float


def invert_pump_spectrum(
    measured: SpectrumCurve,
    crystal: CrystalParams,
    j: int,
    lam: float = 1e-6,
    consts: NormalizationConstants = NormalizationConstants(),
    spec: QuadSpec = QuadSpec(),
) -> InversionResult:
    """Recover the pump spectral intensity from field ``j``'s spectrum.

    The spectrum is a true convolution of the pump spectral intensity with
    the phase-matching kernel once the detuning axis is rescaled to pump
    frequencies, so the inversion is a Tikhonov-regularised FFT division:

        P_hat = S_hat conj(K_hat) / (|K_hat|^2 + lam * max |K_hat|^2)

    Ringing below ``1e-6`` of the recovered peak is clamped to zero.  If the
    relative L2 forward-model residual exceeds 0.05 the problem is deemed
    ill-posed at this ``lam`` and :class:`IllPosedInversionError` is raised
    carrying the best-effort result.
    """
    if not (lam > 0.0) or not math.isfinite(lam):
        raise ValueError(f"regularisation weight must be positive, got {lam!r}")
    if j not in (1, 2):
        raise ValueError(f"field index must be 1 or 2, got {j!r}")
    mism = derived_mismatch(crystal)
    d_other = mism.D_p(3 - j)
    if d_other == 0.0 or mism.D == 0.0:
        raise DegenerateGeometryError(
            "spectrum does not resolve the pump: phase-matching kernel is degenerate"
        )
    big_l = crystal.L
    scale = mism.D / d_other

    # pump-frequency axis: mu = D nu_j / D_p(3-j)
    mu_data = scale * measured.abscissas
    vals = measured.values / max(consts.c_S, np.finfo(float).tiny)
    if scale < 0.0:
        mu_data = mu_data[::-1].copy()
        vals = vals[::-1].copy()

    lobe = 2.0 * math.pi / (big_l * abs(d_other))
    data_step = mu_data[1] - mu_data[0]
    h = min(data_step, lobe / 8.0)
    centre = 0.5 * (mu_data[0] + mu_data[-1])
    half_range = 1.25 * (mu_data[-1] - mu_data[0]) / 2.0 + 60.0 * lobe
    n = 1 << max(8, int(math.ceil(math.log2(2.0 * half_range / h))))
    if n > (1 << 22):
        raise ValueError("inversion grid would be unreasonably large; coarsen the input")

    mu_axis = centre + (np.arange(n) - n // 2) * h
    target = np.interp(mu_axis, mu_data, vals, left=0.0, right=0.0)

    # measured spectra are truncated mid-tail; the boundary step would ring
    # through the deconvolution, so taper the outermost data smoothly to zero
    span = mu_data[-1] - mu_data[0]
    margin = min(max(4.0 * lobe, 0.05 * span), 0.25 * span)
    ramp_lo = np.clip((mu_axis - mu_data[0]) / margin, 0.0, 1.0)
    ramp_hi = np.clip((mu_data[-1] - mu_axis) / margin, 0.0, 1.0)
    taper = np.sin(0.5 * math.pi * ramp_lo) ** 2 * np.sin(0.5 * math.pi * ramp_hi) ** 2
    target = target * taper

    u_wrapped = np.fft.fftfreq(n) * n * h
    kernel = (big_l * sinc(0.5 * big_l * d_other * u_wrapped)) ** 2
    k_hat = np.real(np.fft.rfft(kernel)) * h

    s_hat = np.fft.rfft(target)
    denom = k_hat * k_hat + lam * float(np.max(k_hat * k_hat))
    p_hat = s_hat * k_hat / denom
    recovered = np.fft.irfft(p_hat, n=n)

    model = np.fft.irfft(np.fft.rfft(recovered) * k_hat, n=n)
    in_data = (mu_axis >= mu_data[0] + margin) & (mu_axis <= mu_data[-1] - margin)
    norm = float(np.linalg.norm(target[in_data]))
    residual = float(np.linalg.norm((model - target)[in_data]) / norm) if norm > 0 else math.inf

    peak = float(recovered.max()) if recovered.size else 0.0
    deepest = float(recovered[in_data].min()) if np.any(in_data) else 0.0
    cleaned = np.where(recovered < 0.0, 0.0, recovered)

    out_vals = cleaned[in_data]
    out_mu = mu_axis[in_data]
    grid = GridSpec(float(out_mu[0]), float(out_mu[-1]), int(out_mu.size))
    curve = SpectrumCurve(grid, out_vals, provenance="inverted-input")
    result = InversionResult(curve=curve, residual=residual, lam=lam)
    if residual > 0.05:
        raise IllPosedInversionError(
            f"forward-model residual {residual:.3g} exceeds 0.05; "
            "the measured spectrum is inconsistent with this kernel or too noisy",
            result,
        )
    if peak > 0.0 and deepest < -1e-3 * peak:
        # deep negative ringing that nevertheless fits the data: warn via error
        raise IllPosedInversionError(
            "recovered pump spectrum has deep negative ringing; increase lam",
            result,
        )
    return result
