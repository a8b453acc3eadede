"""Command-line front end.

Usage pattern::

    biphoton <command> [--preset NAME] [--config PATH] --out PATH [options]

Commands: ``mean-photons``, ``spectrum``, ``hom``, ``scans``, ``invert``.
Configuration is a flat ``section.key = value`` text file; a preset supplies
a complete configuration for one of the reference scenarios and the config
file (when also given) overrides individual keys.  Unknown or malformed keys
are rejected with the offending key path and line.

Exit codes: 0 success, 2 configuration/input error, 3 numerical failure,
4 ill-posed inversion (best-effort output is still written).
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from .core import (
    BiphotonError,
    CrystalParams,
    DelayLine,
    NormalizationConstants,
    derived_mismatch,
)
from .csvio import CsvFormatError, read_csv, write_csv
from .numerics import GridSpec, NonUnimodalError, QuadratureError, QuadSpec
from .one_photon import (
    IllPosedInversionError,
    SpectrumCurve,
    invert_pump_spectrum,
    photon_number_curve,
    spectrum_curve,
)
from .pump import PumpField, PumpPulse
from .two_photon import (
    R0_two_pulse,
    UndefinedVisibilityError,
    interferogram,
    visibility,
    visibility_vs_theta,
    theta_max_vs_tau0,
)

__all__ = ["ConfigError", "main", "PRESETS"]

TIME_UNIT = 1e-13  # seconds per abscissa unit in CSV output
FREQ_UNIT = 1e13  # rad/s per abscissa unit in CSV output


class ConfigError(ValueError):
    """Configuration file or flag could not be validated."""


# ---------------------------------------------------------------------------
# configuration schema

_FLOAT, _INT, _STR, _FLOAT_LIST = "float", "int", "str", "float list"

# key -> (type, default) ; None default means the key is required when used
_SCHEMA: dict[str, tuple[str, object]] = {
    "pump.pulse1.xi": (_FLOAT, 1.0),
    "pump.pulse1.tau": (_FLOAT, None),
    "pump.pulse1.a": (_FLOAT, 0.0),
    "pump.pulse2.xi": (_FLOAT, 0.0),
    "pump.pulse2.tau": (_FLOAT, None),
    "pump.pulse2.a": (_FLOAT, 0.0),
    "pump.theta": (_FLOAT, 0.0),
    "pump.phi": (_FLOAT, 0.0),
    "crystal.L": (_FLOAT, None),
    "crystal.inv_vp": (_FLOAT, None),
    "crystal.inv_v1": (_FLOAT, None),
    "crystal.inv_v2": (_FLOAT, None),
    "crystal.omega0_1": (_FLOAT, 0.0),
    "crystal.omega0_2": (_FLOAT, 0.0),
    "delay.inv_g1": (_FLOAT, None),
    "delay.inv_g2": (_FLOAT, None),
    "consts.c_N": (_FLOAT, 1.0),
    "consts.c_S": (_FLOAT, 1.0),
    "consts.c_A_sq": (_FLOAT, 10.0),
    "quad.rel_tol": (_FLOAT, 1e-9),
    "quad.abs_tol": (_FLOAT, 1e-15),
    "quad.max_depth": (_INT, 48),
    "quad.truncation_eps": (_FLOAT, 1e-12),
    "grid.tau.lo": (_FLOAT, None),
    "grid.tau.hi": (_FLOAT, None),
    "grid.tau.n": (_INT, None),
    "grid.nu.lo": (_FLOAT, None),
    "grid.nu.hi": (_FLOAT, None),
    "grid.nu.n": (_INT, None),
    "grid.tau_l.lo": (_FLOAT, None),
    "grid.tau_l.hi": (_FLOAT, None),
    "grid.tau_l.n": (_INT, None),
    "grid.theta.lo": (_FLOAT, None),
    "grid.theta.hi": (_FLOAT, None),
    "grid.theta.n": (_INT, None),
    "grid.phi.lo": (_FLOAT, None),
    "grid.phi.hi": (_FLOAT, None),
    "grid.phi.n": (_INT, None),
    "grid.tau0.lo": (_FLOAT, None),
    "grid.tau0.hi": (_FLOAT, None),
    "grid.tau0.n": (_INT, None),
    "mean_photons.field": (_INT, 1),
    "spectrum.field": (_INT, 1),
    "spectrum.thetas": (_FLOAT_LIST, None),
    "hom.method": (_STR, "gaussian"),
    "hom.axis": (_STR, "tau_l"),
    "scan.kind": (_STR, None),
    "scan.theta_span": (_FLOAT, 6.0),
    "scan.n_theta": (_INT, 25),
    "invert.field": (_INT, 1),
    "invert.lambda": (_FLOAT, 1e-6),
    "invert.input": (_STR, None),
    "invert.column": (_INT, 2),
    "output.path": (_STR, None),
}

_STR_CHOICES = {
    "hom.method": ("gaussian", "generic"),
    "hom.axis": ("tau_l", "l"),
    "scan.kind": ("r0-vs-theta", "vis-vs-theta", "vis-vs-phi", "thetamax-vs-tau0"),
}


def parse_config_text(text: str, origin: str) -> dict[str, str]:
    """Parse ``key = value`` lines, rejecting unknown and duplicate keys."""
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"{origin}:{lineno}: unknown key '{key}'")
        if key in entries:
            raise ConfigError(f"{origin}:{lineno}: duplicate key '{key}'")
        if not value:
            raise ConfigError(f"{origin}:{lineno}: empty value for '{key}'")
        entries[key] = value
    return entries


class RunConfig:
    """Typed access to the merged configuration entries."""

    def __init__(self, entries: dict[str, str]):
        self.entries = dict(entries)

    def _raw(self, key: str):
        if key in self.entries:
            return self.entries[key]
        default = _SCHEMA[key][1]
        if default is None:
            raise ConfigError(f"missing required key '{key}'")
        return default

    def get_float(self, key: str) -> float:
        raw = self._raw(key)
        if isinstance(raw, float):
            return raw
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"key '{key}': expected a number, got {raw!r}") from None

    def get_int(self, key: str) -> int:
        raw = self._raw(key)
        if isinstance(raw, int):
            return raw
        try:
            return int(str(raw), 10)
        except ValueError:
            raise ConfigError(f"key '{key}': expected an integer, got {raw!r}") from None

    def get_str(self, key: str) -> str:
        raw = str(self._raw(key))
        choices = _STR_CHOICES.get(key)
        if choices and raw not in choices:
            raise ConfigError(f"key '{key}': expected one of {choices}, got {raw!r}")
        return raw

    def get_float_list(self, key: str) -> list[float]:
        raw = self._raw(key)
        if isinstance(raw, list):
            return raw
        try:
            return [float(tok) for tok in str(raw).split(",") if tok.strip()]
        except ValueError:
            raise ConfigError(f"key '{key}': expected comma-separated numbers") from None

    def has(self, key: str) -> bool:
        return key in self.entries

    # -- domain object builders ------------------------------------------

    def _build(self, ctor, kwargs, what: str):
        try:
            return ctor(**kwargs)
        except (ValueError, BiphotonError) as exc:
            raise ConfigError(f"invalid {what}: {exc}") from None

    def pulse(self, index: int) -> PumpPulse:
        base = f"pump.pulse{index}"
        xi = self.get_float(f"{base}.xi")
        if xi == 0.0 and not self.has(f"{base}.tau"):
            # a switched-off pulse needs no width
            return PumpPulse(xi=0.0, tau=1e-13, a=0.0)
        return self._build(
            PumpPulse,
            dict(
                xi=xi,
                tau=self.get_float(f"{base}.tau"),
                a=self.get_float(f"{base}.a"),
            ),
            f"pump pulse {index}",
        )

    def pump(self, theta: float | None = None) -> PumpField:
        return self._build(
            PumpField,
            dict(
                pulse1=self.pulse(1),
                pulse2=self.pulse(2),
                theta=self.get_float("pump.theta") if theta is None else theta,
                phi=self.get_float("pump.phi"),
            ),
            "pump field",
        )

    def crystal(self) -> CrystalParams:
        return self._build(
            CrystalParams,
            dict(
                L=self.get_float("crystal.L"),
                inv_vp=self.get_float("crystal.inv_vp"),
                inv_v1=self.get_float("crystal.inv_v1"),
                inv_v2=self.get_float("crystal.inv_v2"),
                omega0_1=self.get_float("crystal.omega0_1"),
                omega0_2=self.get_float("crystal.omega0_2"),
            ),
            "crystal",
        )

    def delay(self) -> DelayLine:
        return self._build(
            DelayLine,
            dict(inv_g1=self.get_float("delay.inv_g1"), inv_g2=self.get_float("delay.inv_g2")),
            "delay line",
        )

    def consts(self) -> NormalizationConstants:
        return self._build(
            NormalizationConstants,
            dict(
                c_N=self.get_float("consts.c_N"),
                c_S=self.get_float("consts.c_S"),
                c_A_sq=self.get_float("consts.c_A_sq"),
            ),
            "normalisation constants",
        )

    def quad(self) -> QuadSpec:
        return self._build(
            QuadSpec,
            dict(
                rel_tol=self.get_float("quad.rel_tol"),
                abs_tol=self.get_float("quad.abs_tol"),
                max_depth=self.get_int("quad.max_depth"),
                truncation_eps=self.get_float("quad.truncation_eps"),
            ),
            "quadrature settings",
        )

    def grid(self, name: str) -> GridSpec:
        return self._build(
            GridSpec,
            dict(
                lo=self.get_float(f"grid.{name}.lo"),
                hi=self.get_float(f"grid.{name}.hi"),
                n=self.get_int(f"grid.{name}.n"),
            ),
            f"grid '{name}'",
        )

    def field_index(self, key: str) -> int:
        j = self.get_int(key)
        if j not in (1, 2):
            raise ConfigError(f"key '{key}': field index must be 1 or 2, got {j}")
        return j


# ---------------------------------------------------------------------------
# presets: the reference scenarios (BBO crystal, quartz delay line)

_BBO = {
    "crystal.inv_vp": "56.85e-13",
    "crystal.inv_v1": "56.14e-13",
    "crystal.inv_v2": "54.30e-13",
}
_QUARTZ = {"delay.inv_g1": "51.25e-13", "delay.inv_g2": "51.59e-13"}
_PI = repr(math.pi)

# DL = (inv_v1 - inv_v2) * L = 2.76e-13 s for the 1.5 mm crystal
_HOM_GRID = {"grid.tau_l.lo": "-0.414e-13", "grid.tau_l.hi": "3.174e-13", "grid.tau_l.n": "241"}
_VIS_GRID = {"grid.tau_l.lo": "-0.276e-13", "grid.tau_l.hi": "3.036e-13", "grid.tau_l.n": "121"}
_TWIN_PUMP = {
    "pump.pulse1.xi": "1.0", "pump.pulse1.tau": "1e-13", "pump.pulse1.a": "0.0",
    "pump.pulse2.xi": "1.0", "pump.pulse2.tau": "1e-13", "pump.pulse2.a": "0.0",
}

PRESETS: dict[str, dict[str, str]] = {
    # two-colour chirp contrast in the photon arrival profile
    "fig2": {
        **_BBO, **_QUARTZ,
        "crystal.L": "0.05",
        "pump.pulse1.xi": "1.0", "pump.pulse1.tau": "1e-13", "pump.pulse1.a": "0.0",
        "pump.pulse2.xi": "1.0", "pump.pulse2.tau": "0.5e-13", "pump.pulse2.a": "10.0",
        "pump.theta": "0.0", "pump.phi": "0.0",
        "grid.tau.lo": "-3e-13", "grid.tau.hi": "3e-13", "grid.tau.n": "241",
        "mean_photons.field": "1",
    },
    # spectral interference vs mutual pump delay
    "fig3": {
        **_BBO, **_QUARTZ, **_TWIN_PUMP,
        "crystal.L": "10.0",
        "pump.theta": "0.0", "pump.phi": "0.0",
        "spectrum.field": "1",
        "spectrum.thetas": "0.0,3e-13,10e-13,50e-13",
        "grid.nu.lo": "-6e13", "grid.nu.hi": "6e13", "grid.nu.n": "1201",
    },
    # asymmetric out-of-phase pulse pair: structured dip
    "fig4": {
        **_BBO, **_QUARTZ, **_HOM_GRID,
        "crystal.L": "1.5",
        "pump.pulse1.xi": "1.0", "pump.pulse1.tau": "1e-13", "pump.pulse1.a": "0.0",
        "pump.pulse2.xi": "1.5", "pump.pulse2.tau": "0.5e-13", "pump.pulse2.a": "0.0",
        "pump.theta": "0.0", "pump.phi": _PI,
        "hom.method": "gaussian",
    },
    # pair rate vs mutual delay for identical in-phase pulses
    "fig5": {
        **_BBO, **_QUARTZ, **_TWIN_PUMP,
        "crystal.L": "1.5",
        "pump.theta": "0.0", "pump.phi": "0.0",
        "scan.kind": "r0-vs-theta",
        "grid.theta.lo": "0.0", "grid.theta.hi": "2e-12", "grid.theta.n": "41",
    },
    # visibility vs mutual delay
    "fig6": {
        **_BBO, **_QUARTZ, **_TWIN_PUMP, **_VIS_GRID,
        "crystal.L": "1.5",
        "pump.theta": "0.0", "pump.phi": "0.0",
        "scan.kind": "vis-vs-theta",
        "grid.theta.lo": "0.0", "grid.theta.hi": "2e-12", "grid.theta.n": "41",
    },
    # interferogram at the optimal delay, out of phase / in phase
    "fig7": {
        **_BBO, **_QUARTZ, **_TWIN_PUMP, **_HOM_GRID,
        "crystal.L": "1.5",
        "pump.theta": "2.04e-13", "pump.phi": _PI,
        "hom.method": "gaussian",
    },
    "fig7b": {
        **_BBO, **_QUARTZ, **_TWIN_PUMP, **_HOM_GRID,
        "crystal.L": "1.5",
        "pump.theta": "2.04e-13", "pump.phi": "0.0",
        "hom.method": "gaussian",
    },
    # visibility vs relative phase at the optimal delay
    "fig8": {
        **_BBO, **_QUARTZ, **_TWIN_PUMP, **_VIS_GRID,
        "crystal.L": "1.5",
        "pump.theta": "2.04e-13", "pump.phi": "0.0",
        "scan.kind": "vis-vs-phi",
        "grid.phi.lo": "0.0", "grid.phi.hi": _PI, "grid.phi.n": "25",
    },
    # optimal delay vs pulse duration
    "fig9": {
        **_BBO, **_QUARTZ, **_TWIN_PUMP, **_VIS_GRID,
        "crystal.L": "1.5",
        "pump.phi": "0.0",
        "scan.kind": "thetamax-vs-tau0",
        "grid.tau0.lo": "0.5e-13", "grid.tau0.hi": "2e-13", "grid.tau0.n": "4",
        "scan.theta_span": "6.0", "scan.n_theta": "25",
    },
}


# ---------------------------------------------------------------------------
# commands


def _map_ordered(fn, items, threads: int) -> list:
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _manifest_entries(cfg: RunConfig) -> dict[str, str]:
    # the destination path is not part of the physics configuration
    return {k: v for k, v in cfg.entries.items() if k != "output.path"}


def _quad_meta(quad: QuadSpec, method: str) -> dict[str, str]:
    return {
        "method": method,
        "quad_rel_tol": repr(quad.rel_tol),
        "quad_abs_tol": repr(quad.abs_tol),
        "quad_max_depth": str(quad.max_depth),
        "quad_truncation_eps": repr(quad.truncation_eps),
    }


def cmd_mean_photons(cfg: RunConfig, out: str, threads: int) -> int:
    field = cfg.pump()
    crystal = cfg.crystal()
    consts = cfg.consts()
    quad = cfg.quad()
    j = cfg.field_index("mean_photons.field")
    grid = cfg.grid("tau")
    curve = photon_number_curve(field, crystal, j, grid, consts, quad, threads=threads)
    rows = np.column_stack([grid.points() / TIME_UNIT, curve.values])
    write_csv(out, "mean-photons", _manifest_entries(cfg),
              _quad_meta(quad, "walkoff-quadrature"),
              [f"tau_{TIME_UNIT:.0e}s", f"N{j}"], rows)
    return 0


def cmd_spectrum(cfg: RunConfig, out: str, threads: int) -> int:
    crystal = cfg.crystal()
    consts = cfg.consts()
    quad = cfg.quad()
    j = cfg.field_index("spectrum.field")
    grid = cfg.grid("nu")
    if cfg.has("spectrum.thetas"):
        thetas = cfg.get_float_list("spectrum.thetas")
        if not thetas:
            raise ConfigError("key 'spectrum.thetas': list must not be empty")
    else:
        thetas = [cfg.get_float("pump.theta")]
    columns = [f"nu_{FREQ_UNIT:.0e}rad_s"]
    cols = [grid.points() / FREQ_UNIT]
    for theta in thetas:
        field = cfg.pump(theta=theta)
        curve = spectrum_curve(field, crystal, j, grid, consts, quad, threads=threads)
        columns.append(f"S{j}_theta_{theta:.3e}")
        cols.append(curve.values)
    rows = np.column_stack(cols)
    write_csv(out, "spectrum", _manifest_entries(cfg),
              _quad_meta(quad, "phase-matching-convolution"),
              columns, rows)
    return 0


def cmd_hom(cfg: RunConfig, out: str, threads: int, validate: bool) -> int:
    field = cfg.pump()
    crystal = cfg.crystal()
    delay = cfg.delay()
    consts = cfg.consts()
    quad = cfg.quad()
    method = cfg.get_str("hom.method")
    axis = cfg.get_str("hom.axis")
    grid = cfg.grid("tau_l")
    ifg = interferogram(field, crystal, delay, grid, method=method, consts=consts,
                        spec=quad, grid_axis=axis, threads=threads)
    columns = ["l_mm", f"tau_l_{TIME_UNIT:.0e}s", "R_n", "rho_auto", "rho_cross"]
    cols = [ifg.lengths, ifg.tau_ls / TIME_UNIT, ifg.values, ifg.rho_auto, ifg.rho_cross]
    meta = _quad_meta(quad, method)
    meta["dl_seconds"] = repr(ifg.dl)
    if validate:
        other = "generic" if method == "gaussian" else "gaussian"
        check = interferogram(field, crystal, delay, grid, method=other, consts=consts,
                              spec=quad, grid_axis=axis, threads=threads)
        columns.append(f"R_n_{other}")
        cols.append(check.values)
        meta["validate_method"] = other
        meta["validate_max_abs_diff"] = repr(float(np.abs(check.values - ifg.values).max()))
    write_csv(out, "hom", _manifest_entries(cfg), meta, columns, np.column_stack(cols))
    return 0


def cmd_scans(cfg: RunConfig, out: str, threads: int) -> int:
    kind = cfg.get_str("scan.kind")
    crystal = cfg.crystal()
    delay = cfg.delay()
    consts = cfg.consts()
    quad = cfg.quad()
    meta = _quad_meta(quad, kind)

    if kind == "r0-vs-theta":
        grid = cfg.grid("theta")

        def one(theta: float):
            parts = R0_two_pulse(cfg.pump(theta=float(theta)), crystal, consts, quad)
            return parts

        parts = _map_ordered(one, grid.points(), threads)
        rows = np.column_stack([
            grid.points() / TIME_UNIT,
            [p[2] for p in parts],
            [p[0] for p in parts],
            [p[1] for p in parts],
        ])
        columns = [f"theta_{TIME_UNIT:.0e}s", "R0", "R0_auto", "R0_cross"]
        write_csv(out, "scans", _manifest_entries(cfg), meta, columns, rows)
        return 0

    ifg_grid = cfg.grid("tau_l") if cfg.has("grid.tau_l.lo") else None

    if kind == "vis-vs-theta":
        grid = cfg.grid("theta")
        scan = visibility_vs_theta(
            cfg.pulse(1), cfg.pulse(2), cfg.get_float("pump.phi"), crystal, delay,
            grid, method=cfg.get_str("hom.method"), consts=consts, spec=quad,
            ifg_grid=ifg_grid, threads=threads,
        )
        meta["theta_max_seconds"] = repr(scan.theta_max)
        meta["v_max"] = repr(scan.v_max)
        meta["interior_maximum"] = str(scan.interior).lower()
        rows = np.column_stack([scan.thetas / TIME_UNIT, scan.visibilities])
        write_csv(out, "scans", _manifest_entries(cfg), meta, [f"theta_{TIME_UNIT:.0e}s", "V"], rows)
        return 0

    if kind == "vis-vs-phi":
        grid = cfg.grid("phi")
        method = cfg.get_str("hom.method")

        def one_phi(phi: float) -> float:
            field = PumpField(cfg.pulse(1), cfg.pulse(2),
                              theta=cfg.get_float("pump.theta"), phi=float(phi))
            ifg = interferogram(field, crystal, delay,
                                ifg_grid if ifg_grid is not None else _default_grid(crystal),
                                method=method, consts=consts, spec=quad)
            return visibility(ifg).visibility

        vs = _map_ordered(one_phi, grid.points(), threads)
        rows = np.column_stack([grid.points(), vs])
        write_csv(out, "scans", _manifest_entries(cfg), meta, ["phi_rad", "V"], rows)
        return 0

    # thetamax-vs-tau0
    grid = cfg.grid("tau0")
    scan = theta_max_vs_tau0(
        grid.points(), crystal, delay,
        a=cfg.get_float("pump.pulse1.a"), phi=cfg.get_float("pump.phi"),
        theta_span=cfg.get_float("scan.theta_span"), n_theta=cfg.get_int("scan.n_theta"),
        method=cfg.get_str("hom.method"), consts=consts, spec=quad,
        ifg_grid=ifg_grid, threads=threads,
    )
    rows = np.column_stack([
        scan.tau0s / TIME_UNIT, scan.theta_maxes / TIME_UNIT, scan.v_maxes,
    ])
    columns = [f"tau0_{TIME_UNIT:.0e}s", f"theta_max_{TIME_UNIT:.0e}s", "V_max"]
    write_csv(out, "scans", _manifest_entries(cfg), meta, columns, rows)
    return 0


def _default_grid(crystal: CrystalParams) -> GridSpec:
    mism = derived_mismatch(crystal)
    dl = mism.D * crystal.L
    return GridSpec(-0.1 * dl, 1.1 * dl, 121)


def _load_measured_curve(path: str, column: int) -> SpectrumCurve:
    header, data, _meta = read_csv(path)
    if column < 2 or column > len(header):
        raise ConfigError(
            f"key 'invert.column': column {column} outside the file's "
            f"{len(header)} columns (column 1 is the abscissa)"
        )
    nus = data[:, 0] * FREQ_UNIT
    vals = data[:, column - 1]
    if nus.size < 8:
        raise CsvFormatError(f"{path}: need at least 8 spectrum samples")
    steps = np.diff(nus)
    if steps[0] <= 0 or not np.allclose(steps, steps[0], rtol=1e-6, atol=0.0):
        raise CsvFormatError(f"{path}: abscissas must be uniformly increasing")
    vals = np.where((vals < 0.0) & (vals > -1e-12 * max(vals.max(), 0.0)), 0.0, vals)
    grid = GridSpec(float(nus[0]), float(nus[-1]), int(nus.size))
    return SpectrumCurve(grid, vals, provenance="direct")


def cmd_invert(cfg: RunConfig, out: str, lam_sweep: list[float] | None) -> int:
    crystal = cfg.crystal()
    consts = cfg.consts()
    quad = cfg.quad()
    j = cfg.field_index("invert.field")
    path = cfg.get_str("invert.input")
    column = cfg.get_int("invert.column")
    measured = _load_measured_curve(path, column)

    if lam_sweep:
        rows = []
        for lam in lam_sweep:
            if lam <= 0:
                raise ConfigError("--lambda-sweep values must be positive")
            try:
                res = invert_pump_spectrum(measured, crystal, j, lam, consts, quad)
            except IllPosedInversionError as exc:
                res = exc.result
            rows.append([lam, res.residual])
        meta = _quad_meta(quad, "tikhonov-fft-sweep")
        write_csv(out, "invert", _manifest_entries(cfg), meta, ["lambda", "residual"],
                  np.asarray(rows))
        return 0

    lam = cfg.get_float("invert.lambda")
    if lam <= 0:
        raise ConfigError(f"key 'invert.lambda': must be positive, got {lam}")
    code = 0
    try:
        result = invert_pump_spectrum(measured, crystal, j, lam, consts, quad)
    except IllPosedInversionError as exc:
        print(f"biphoton: warning: {exc}", file=sys.stderr)
        result = exc.result
        code = 4
    meta = _quad_meta(quad, "tikhonov-fft")
    meta["lambda"] = repr(result.lam)
    meta["residual"] = repr(result.residual)
    rows = np.column_stack([result.curve.abscissas / FREQ_UNIT, result.curve.values])
    write_csv(out, "invert", _manifest_entries(cfg), meta,
              [f"nu_p_{FREQ_UNIT:.0e}rad_s", "P_pump"], rows)
    return code


# ---------------------------------------------------------------------------
# argument parsing and dispatch


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biphoton",
        description="Pulsed-pump biphoton observables: photon numbers, spectra, "
                    "coincidence interferograms, scans and pump-spectrum inversion.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="flat 'section.key = value' configuration file")
        p.add_argument("--preset", choices=sorted(PRESETS), help="named reference scenario")
        p.add_argument("--out", help="output CSV path (overrides output.path)")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for independent grid points")

    common(sub.add_parser("mean-photons", help="time-resolved mean photon number"))
    common(sub.add_parser("spectrum", help="down-converted one-photon spectrum"))
    hom = sub.add_parser("hom", help="coincidence interferogram")
    common(hom)
    hom.add_argument("--validate", action="store_true",
                     help="recompute via the other method and report the difference")
    scans = sub.add_parser("scans", help="parameter scans (R0, visibility, optima)")
    common(scans)
    scans.add_argument("--kind", choices=_STR_CHOICES["scan.kind"],
                       help="scan kind (overrides scan.kind)")
    inv = sub.add_parser("invert", help="recover the pump spectrum from a measured one")
    common(inv)
    inv.add_argument("--input", help="measured spectrum CSV (overrides invert.input)")
    inv.add_argument("--lambda", dest="lam", type=float,
                     help="regularisation weight (overrides invert.lambda)")
    inv.add_argument("--lambda-sweep",
                     help="comma-separated weights; writes a residual-vs-lambda table")
    return parser


def _merged_entries(args) -> dict[str, str]:
    if not args.preset and not args.config:
        raise ConfigError("provide --preset and/or --config")
    entries: dict[str, str] = {}
    if args.preset:
        entries.update(PRESETS[args.preset])
    if args.config:
        try:
            text = open(args.config, encoding="utf-8").read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        entries.update(parse_config_text(text, args.config))
    if args.out:
        entries["output.path"] = args.out
    if getattr(args, "kind", None):
        entries["scan.kind"] = args.kind
    if getattr(args, "input", None):
        entries["invert.input"] = args.input
    if getattr(args, "lam", None) is not None:
        entries["invert.lambda"] = repr(args.lam)
    return entries


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(_merged_entries(args))
        out = cfg.get_str("output.path")
        if args.command == "mean-photons":
            return cmd_mean_photons(cfg, out, args.threads)
        if args.command == "spectrum":
            return cmd_spectrum(cfg, out, args.threads)
        if args.command == "hom":
            return cmd_hom(cfg, out, args.threads, args.validate)
        if args.command == "scans":
            return cmd_scans(cfg, out, args.threads)
        sweep = None
        if args.lambda_sweep:
            try:
                sweep = [float(tok) for tok in args.lambda_sweep.split(",") if tok.strip()]
            except ValueError:
                raise ConfigError("--lambda-sweep: expected comma-separated numbers") from None
        return cmd_invert(cfg, out, sweep)
    except (QuadratureError, NonUnimodalError, UndefinedVisibilityError) as exc:
        print(f"biphoton: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, BiphotonError, OSError) as exc:
        print(f"biphoton: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
