"""Convergence studies, dispersion-dissipation fingerprints, and CSV reports.

The spectral analysis treats each (possibly nonlinear) scheme as a black box:
evolve a single Fourier mode of the advection equation by one tiny step and
read the modified wavenumber off the mode's complex amplitude ratio.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .funcspace import FunctionSpec
from .solver import GridSpec, Problem, default_grid, rhs, run, ssp_rk3_step
from .train import convergence_order, interpolation_error

__all__ = [
    "ADRPoint",
    "ConvergenceRow",
    "adr",
    "default_kappa_grid",
    "convergence_study",
    "emit_report",
    "parse_report",
    "ADR_COLUMNS",
    "CONVERGENCE_COLUMNS",
]

ADR_COLUMNS = ("scheme", "kappa_dx", "dispersion", "dissipation", "leakage")
CONVERGENCE_COLUMNS = ("scheme", "nx", "dx", "error", "slope")

#: Fraction of a cell crossing used for the one-step mode evolution.
ADR_DT_FRACTION = 1e-3

DEFAULT_ADR_NX = 256
DEFAULT_ADR_MODES = 64


@dataclass(frozen=True)
class ADRPoint:
    """Modified wavenumber sample: real part dispersion, imaginary dissipation.

    The spectrally ideal scheme has dispersion equal to kappa*dx and zero
    dissipation; stable schemes have dissipation <= 0.
    """

    kappa_dx: float
    dispersion: float
    dissipation: float
    leakage: float
    valid: bool = True


@dataclass(frozen=True)
class ConvergenceRow:
    scheme: str
    nx: int
    dx: float
    error: float
    slope: float


def default_kappa_grid(n_modes: int = DEFAULT_ADR_MODES) -> np.ndarray:
    """n_modes reduced wavenumbers evenly spaced in (0, pi]."""
    return np.pi * np.arange(1, n_modes + 1) / n_modes


def adr(scheme, kappa_dx_list, nx: int = DEFAULT_ADR_NX) -> list[ADRPoint]:
    """Approximate dispersion relation of ``scheme`` for unit-speed advection.

    Each requested kappa*dx must correspond to an integer mode index on the
    nx-cell periodic grid.  The state is the exact cell average of sin(kx);
    one SSP-RK3 step of size 1e-3*dx keeps temporal error far below the
    spatial fingerprint being measured.
    """
    grid = GridSpec(nx, (0.0, 1.0), "periodic")
    dx = grid.dx
    dt = ADR_DT_FRACTION * dx
    points = []
    for kdx in np.atleast_1d(np.asarray(kappa_dx_list, dtype=float)):
        mode = kdx * nx / (2.0 * np.pi)
        m = int(round(mode))
        if abs(mode - m) > 1e-9 or not 1 <= m <= nx // 2:
            raise ValueError(
                f"kappa*dx={kdx} is not an integer mode on nx={nx} cells"
            )
        k = 2.0 * np.pi * m
        edges = grid.edges
        state = np.diff(-np.cos(k * edges) / k) / dx
        after = ssp_rk3_step(state, dt, lambda s: rhs(s, grid, scheme, "advection"))
        spec_before = np.fft.rfft(state)
        spec_after = np.fft.rfft(after)
        amp = spec_before[m]
        if abs(amp) < 1e-12 * nx:
            points.append(ADRPoint(float(kdx), np.nan, np.nan, np.nan, False))
            continue
        kprime_dx = 1j * dx / dt * np.log(spec_after[m] / amp)
        residual = spec_after - spec_before
        residual[m] = 0.0
        leak = float(np.linalg.norm(residual) / abs(amp))
        points.append(
            ADRPoint(float(kdx), float(kprime_dx.real), float(kprime_dx.imag), leak)
        )
    return points


def convergence_study(schemes, target, nx_list) -> list[ConvergenceRow]:
    """Error-vs-resolution table with one fitted slope per scheme.

    ``target`` is either a solver Problem (final-time L1 error) or a
    FunctionSpec (face-reconstruction RMSE).
    """
    nx_list = [int(nx) for nx in nx_list]
    if len(nx_list) < 3:
        raise ValueError("need at least three grid sizes for a convergence study")
    rows: list[ConvergenceRow] = []
    for scheme in schemes:
        errs = []
        dxs = []
        for nx in nx_list:
            if isinstance(target, Problem):
                grid = default_grid(target, nx)
                err = run(target, grid, scheme).final_error
                dxs.append(grid.dx)
            elif isinstance(target, FunctionSpec):
                err = interpolation_error(scheme, target, nx)
                dxs.append((target.domain[1] - target.domain[0]) / nx)
            else:
                raise TypeError(f"cannot run a convergence study on {type(target)!r}")
            errs.append(err)
        slope = convergence_order(list(zip(nx_list, errs)))
        rows.extend(
            ConvergenceRow(scheme.name, nx, dx, err, slope)
            for nx, dx, err in zip(nx_list, dxs, errs)
        )
    return rows


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def emit_report(rows, path, metadata: dict | None = None, columns=None) -> None:
    """Write dict-like rows as CSV with a leading ``# key=value`` metadata line."""
    rows = list(rows)
    if not rows:
        raise ValueError("refusing to emit an empty report")
    first = rows[0] if isinstance(rows[0], dict) else vars(rows[0])
    cols = list(columns) if columns is not None else list(first)
    meta = metadata or {}
    lines = ["# " + ", ".join(f"{k}={v}" for k, v in meta.items())]
    lines.append(",".join(cols))
    for row in rows:
        record = row if isinstance(row, dict) else vars(row)
        lines.append(",".join(_format_cell(record[c]) for c in cols))
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_cell(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def parse_report(path):
    """Inverse of emit_report: (rows as dicts, metadata dict)."""
    lines = Path(path).read_text().splitlines()
    meta: dict[str, str] = {}
    if lines and lines[0].startswith("#"):
        body = lines[0][1:].strip()
        if body:
            for item in body.split(", "):
                if "=" in item:
                    k, v = item.split("=", 1)
                    meta[k] = v
        lines = lines[1:]
    cols = lines[0].split(",")
    rows = [
        {c: _parse_cell(v) for c, v in zip(cols, line.split(","))}
        for line in lines[1:]
        if line
    ]
    return rows, meta
