"""Pulsed-pump biphoton observables.

Simulates what a parametric down-conversion source driven by one or two
(possibly chirped, mutually delayed and dephased) Gaussian pump pulses
produces: time-resolved mean photon numbers, one-photon spectra and their
inter-field relation, coincidence interferograms with their visibility,
and the regularised recovery of the pump spectrum from a measured
one-photon spectrum.
"""

from .core import (
    BiphotonError,
    CrystalParams,
    DegenerateGeometryError,
    DelayLine,
    DerivedMismatch,
    NormalizationConstants,
    derived_mismatch,
    length_of_tau_l,
    rect,
    sinc,
    tau_l_of_length,
)
from .numerics import (
    Extremum,
    GridSpec,
    NonUnimodalError,
    QuadratureError,
    QuadResult,
    QuadSpec,
    cosine_breakpoints,
    integrate_1d,
    integrate_2d_nested,
    maximize_scalar,
    scan_extrema,
)
from .pump import (
    NPulsePump,
    PulseComponent,
    PumpField,
    PumpPulse,
    envelope_time,
    spectral_intensity,
    spectral_support,
    spectrum_amplitude,
    time_support,
)
from .one_photon import (
    CrossKernelEvaluator,
    IllPosedInversionError,
    InversionResult,
    KernelDegenerateError,
    KernelDomainError,
    PhotonNumberCurve,
    SpectrumCurve,
    cross_kernel_p,
    invert_pump_spectrum,
    mean_photon_number,
    photon_number_curve,
    spectrum_curve,
    spectrum_direct,
    spectrum_from_partner,
)
from .two_photon import (
    Interferogram,
    Tau0Scan,
    ThetaScan,
    TwoPhotonAmplitude,
    UndefinedVisibilityError,
    VisibilityResult,
    ZeroPumpError,
    R0_gaussian,
    R0_general,
    R0_two_pulse,
    interferogram,
    rho_gaussian,
    rho_general,
    rho_two_pulse,
    theta_max_vs_tau0,
    visibility,
    visibility_vs_theta,
)

__version__ = "0.1.0"

__all__ = [
    "BiphotonError",
    "CrystalParams",
    "CrossKernelEvaluator",
    "DegenerateGeometryError",
    "DelayLine",
    "DerivedMismatch",
    "Extremum",
    "GridSpec",
    "IllPosedInversionError",
    "Interferogram",
    "InversionResult",
    "KernelDegenerateError",
    "KernelDomainError",
    "NPulsePump",
    "NonUnimodalError",
    "NormalizationConstants",
    "PhotonNumberCurve",
    "PulseComponent",
    "PumpField",
    "PumpPulse",
    "QuadResult",
    "QuadSpec",
    "QuadratureError",
    "R0_gaussian",
    "R0_general",
    "R0_two_pulse",
    "SpectrumCurve",
    "Tau0Scan",
    "ThetaScan",
    "TwoPhotonAmplitude",
    "UndefinedVisibilityError",
    "VisibilityResult",
    "ZeroPumpError",
    "cosine_breakpoints",
    "cross_kernel_p",
    "derived_mismatch",
    "envelope_time",
    "integrate_1d",
    "integrate_2d_nested",
    "interferogram",
    "invert_pump_spectrum",
    "length_of_tau_l",
    "maximize_scalar",
    "mean_photon_number",
    "photon_number_curve",
    "rect",
    "rho_gaussian",
    "rho_general",
    "rho_two_pulse",
    "scan_extrema",
    "sinc",
    "spectral_intensity",
    "spectral_support",
    "spectrum_amplitude",
    "spectrum_curve",
    "spectrum_direct",
    "spectrum_from_partner",
    "tau_l_of_length",
    "theta_max_vs_tau0",
    "time_support",
    "visibility",
    "visibility_vs_theta",
    "__version__",
]
