"""Chirped-Gaussian pump pulses: spectra against an FFT oracle and moments."""

import math

import numpy as np
import pytest

from biphoton.pump import (
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

rng = np.random.default_rng(1139)


def _fft_spectrum(field, n=2 ** 14, t_half=4e-12):
    """Discretised (1/2pi) Integral E(t) exp(+i nu t) dt on the fft grid."""
    dt = 2.0 * t_half / n
    t = -t_half + dt * np.arange(n)
    e = envelope_time(field, t)
    nus = 2.0 * math.pi * np.fft.fftfreq(n, d=dt)
    # ifft supplies exp(+2pi i k m / n); fold in the t0 phase and measure
    vals = n * np.fft.ifft(e) * dt * np.exp(1j * nus * t[0]) / (2.0 * math.pi)
    order = np.argsort(nus)
    return nus[order], vals[order]


def test_single_pulse_spectrum_matches_fft():
    for a in (0.0, 3.0, -7.5):
        field = PumpField(PumpPulse(xi=1.3, tau=1e-13, a=a),
                          PumpPulse(xi=0.0, tau=1e-13), theta=0.0, phi=0.0)
        nus, ref = _fft_spectrum(field)
        keep = np.abs(nus) < 1.5e14
        mine = spectrum_amplitude(field, nus[keep])
        assert np.max(np.abs(mine - ref[keep])) < 1e-6 * np.max(np.abs(ref)), a


def test_two_pulse_spectrum_matches_fft():
    for _ in range(5):
        field = PumpField(
            PumpPulse(xi=rng.uniform(0.5, 1.5), tau=rng.uniform(0.6e-13, 1.5e-13),
                      a=rng.uniform(-5, 5)),
            PumpPulse(xi=rng.uniform(0.5, 1.5), tau=rng.uniform(0.6e-13, 1.5e-13),
                      a=rng.uniform(-5, 5)),
            theta=rng.uniform(0.0, 4e-13),
            phi=rng.uniform(0.0, 2.0 * math.pi),
        )
        nus, ref = _fft_spectrum(field)
        keep = np.abs(nus) < 1.5e14
        mine = spectrum_amplitude(field, nus[keep])
        assert np.max(np.abs(mine - ref[keep])) < 1e-6 * np.max(np.abs(ref))


def test_spectral_peak_value():
    # xi tau / (2 sqrt(pi)) at nu = 0 for an unchirped pulse
    p = PumpPulse(xi=1.0, tau=1e-13, a=0.0)
    assert abs(p.amplitude_spectrum(0.0) - 2.8209479177387814e-14) < 1e-22


def test_parseval_identity():
    from biphoton.numerics import QuadSpec, cosine_breakpoints, integrate_1d

    spec = QuadSpec(rel_tol=1e-11)
    for _ in range(5):
        theta = rng.uniform(-2e-13, 5e-13)
        field = PumpField(
            PumpPulse(xi=rng.uniform(0.2, 2.0), tau=rng.uniform(0.5e-13, 2e-13),
                      a=rng.uniform(-8, 8)),
            PumpPulse(xi=rng.uniform(0.0, 2.0), tau=rng.uniform(0.5e-13, 2e-13),
                      a=rng.uniform(-8, 8)),
            theta=theta,
            phi=rng.uniform(0.0, 2.0 * math.pi),
        )
        t_lo, t_hi = time_support(field, 1e-14)
        energy_t = integrate_1d(
            lambda t: np.abs(envelope_time(field, t)) ** 2, t_lo, t_hi, spec,
            breakpoints=[0.0, -theta],
        ).value
        n_lo, n_hi = spectral_support(field, 1e-14)
        energy_nu = 2.0 * math.pi * integrate_1d(
            lambda nu: spectral_intensity(field, nu), n_lo, n_hi, spec,
            breakpoints=cosine_breakpoints(theta, n_lo, n_hi),
        ).value
        assert abs(energy_t - energy_nu) < 1e-6 * energy_t, theta


def test_chirp_broadens_spectrum_not_envelope():
    plain = PumpPulse(xi=1.0, tau=1e-13, a=0.0)
    chirped = PumpPulse(xi=1.0, tau=1e-13, a=3.0)
    nu = np.linspace(-3e14, 3e14, 20001)
    s0 = np.abs(plain.amplitude_spectrum(nu)) ** 2
    s3 = np.abs(chirped.amplitude_spectrum(nu)) ** 2

    def rms(w):
        return math.sqrt(float(np.sum(w * nu ** 2) / np.sum(w)))

    assert abs(rms(s3) / rms(s0) - math.sqrt(10.0)) < 1e-6
    # time envelopes identical
    t = np.linspace(-5e-13, 5e-13, 101)
    assert np.allclose(np.abs(plain.amplitude_time(t)), np.abs(chirped.amplitude_time(t)))


def test_delay_phase_convention():
    # advancing a pulse by theta multiplies its spectrum by exp(-i nu theta)
    theta = 2.7e-13
    pulse = PumpPulse(xi=1.0, tau=1e-13, a=1.0)
    shifted = PumpField(PumpPulse(xi=0.0, tau=1e-13), pulse, theta=theta, phi=0.0)
    nu = np.linspace(-8e13, 8e13, 257)
    expected = pulse.amplitude_spectrum(nu) * np.exp(-1j * nu * theta)
    assert np.max(np.abs(spectrum_amplitude(shifted, nu) - expected)) < 1e-20


def test_destructive_superposition_vanishes():
    p = PumpPulse(xi=1.0, tau=1e-13, a=0.0)
    field = PumpField(p, p, theta=0.0, phi=math.pi)
    t = np.linspace(-5e-13, 5e-13, 1001)
    assert np.max(np.abs(envelope_time(field, t))) < 1e-15
    assert not field.is_zero  # zero by interference, not by construction


def test_supports_contain_the_mass():
    field = PumpField(PumpPulse(xi=1.0, tau=1e-13, a=4.0),
                      PumpPulse(xi=0.7, tau=0.5e-13, a=-2.0),
                      theta=3e-13, phi=1.0)
    eps = 1e-10
    t_lo, t_hi = time_support(field, eps)
    assert t_lo < -3e-13 - 1e-13 and t_hi > 1e-13  # covers the advanced pulse
    edge = max(abs(envelope_time(field, t_lo)), abs(envelope_time(field, t_hi)))
    peak = np.max(np.abs(envelope_time(field, np.linspace(t_lo, t_hi, 2001))))
    assert edge <= math.sqrt(eps) * peak * 1.01

    n_lo, n_hi = spectral_support(field, eps)
    grid = np.linspace(n_lo, n_hi, 2001)
    s_peak = np.max(spectral_intensity(field, grid))
    s_edge = max(spectral_intensity(field, n_lo), spectral_intensity(field, n_hi))
    assert s_edge <= eps * s_peak * 1.01


def test_npulse_pump_matches_manual_sum():
    comps = (
        PulseComponent(PumpPulse(xi=1.0, tau=1e-13, a=0.0), 0.0, 0.0),
        PulseComponent(PumpPulse(xi=0.5, tau=0.7e-13, a=2.0), 2e-13, 0.4),
        PulseComponent(PumpPulse(xi=0.3, tau=1.2e-13, a=-1.0), -1e-13, 2.2),
    )
    pump = NPulsePump(comps)
    t = np.linspace(-6e-13, 6e-13, 501)
    manual = sum(
        np.exp(1j * c.phase) * c.pulse.amplitude_time(t + c.delay) for c in comps
    )
    assert np.max(np.abs(envelope_time(pump, t) - manual)) < 1e-14


def test_pulse_validation():
    with pytest.raises(ValueError):
        PumpPulse(xi=-1.0, tau=1e-13)
    with pytest.raises(ValueError):
        PumpPulse(xi=1.0, tau=0.0)
    with pytest.raises(ValueError):
        PumpPulse(xi=1.0, tau=1e-13, a=math.nan)
    with pytest.raises(ValueError):
        PumpField(PumpPulse(xi=1.0, tau=1e-13), PumpPulse(xi=1.0, tau=1e-13),
                  theta=math.inf)
