"""1D finite-volume method-of-lines solver for linear advection and inviscid Burgers.

State variables are exact cell averages; faces are reconstructed by a
pluggable scheme object (minus side from the left-biased stencil, plus side by
mirroring), fluxes are upwind for advection and local Lax-Friedrichs for
Burgers, and time stepping is three-stage SSP Runge-Kutta.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GridSpec",
    "Problem",
    "SolveReport",
    "advection_cosine",
    "advection_sigmoid",
    "burgers_riemann",
    "default_grid",
    "initial_averages",
    "face_states",
    "numerical_flux",
    "rhs",
    "ssp_rk3_step",
    "run",
    "exact_solution",
    "exact_cell_averages",
    "l1_error",
    "total_variation",
]

#: Sigmoid initial-condition constants.
SIGMOID_K = 100.0
SIGMOID_X1 = 0.05
SIGMOID_X2 = 0.2

DEFAULT_CFL = 0.4


@dataclass(frozen=True)
class GridSpec:
    """Uniform 1D grid; ``bc`` is "periodic" or "dirichlet" with fixed edge values."""

    nx: int
    domain: tuple[float, float] = (0.0, 1.0)
    bc: str = "periodic"
    bc_values: tuple[float, float] | None = None

    def __post_init__(self):
        if self.nx < 8:
            raise ValueError(f"nx={self.nx} too small (need nx >= 8)")
        if self.bc not in ("periodic", "dirichlet"):
            raise ValueError(f"unknown bc {self.bc!r}")
        if self.bc == "dirichlet" and self.bc_values is None:
            raise ValueError("dirichlet bc needs bc_values=(left, right)")

    @property
    def dx(self) -> float:
        return (self.domain[1] - self.domain[0]) / self.nx

    @property
    def edges(self) -> np.ndarray:
        return self.domain[0] + self.dx * np.arange(self.nx + 1)

    @property
    def centers(self) -> np.ndarray:
        return self.domain[0] + self.dx * (np.arange(self.nx) + 0.5)


@dataclass(frozen=True)
class Problem:
    kind: str  # "advection" | "burgers"
    init: str  # "cosine" | "sigmoid" | "riemann"
    riemann: tuple[float, float] | None = None
    T: float = 5.0
    cfl: float = DEFAULT_CFL

    def __post_init__(self):
        if self.kind not in ("advection", "burgers"):
            raise ValueError(f"unknown equation kind {self.kind!r}")
        if self.init not in ("cosine", "sigmoid", "riemann"):
            raise ValueError(f"unknown initial condition {self.init!r}")
        if self.init == "riemann" and self.riemann is None:
            raise ValueError("riemann initial condition needs (u_l, u_r)")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"cfl={self.cfl} outside (0, 1]")


def advection_cosine(T: float = 5.0, cfl: float = DEFAULT_CFL) -> Problem:
    return Problem("advection", "cosine", None, T, cfl)


def advection_sigmoid(T: float = 5.0, cfl: float = DEFAULT_CFL) -> Problem:
    return Problem("advection", "sigmoid", None, T, cfl)


def burgers_riemann(
    u_l: float, u_r: float, T: float = 5.0, cfl: float = DEFAULT_CFL
) -> Problem:
    return Problem("burgers", "riemann", (float(u_l), float(u_r)), T, cfl)


def default_grid(problem: Problem, nx: int) -> GridSpec:
    """Canonical grid: advection on [0,1] periodic, Burgers on [-6,6] Dirichlet."""
    if problem.kind == "advection":
        return GridSpec(nx, (0.0, 1.0), "periodic")
    return GridSpec(nx, (-6.0, 6.0), "dirichlet", problem.riemann)


def _softplus(z):
    return np.logaddexp(0.0, z)


def _init_value(problem: Problem, x):
    x = np.asarray(x, dtype=float)
    if problem.init == "cosine":
        return np.cos(2.0 * np.pi * x)
    if problem.init == "sigmoid":
        k = SIGMOID_K
        return 1.0 / (1.0 + np.exp(-k * (x - SIGMOID_X1))) + 1.0 / (
            1.0 + np.exp(k * (x - SIGMOID_X2))
        )
    u_l, u_r = problem.riemann
    return np.where(x < 0.0, u_l, u_r)


def _init_antiderivative(problem: Problem, x):
    x = np.asarray(x, dtype=float)
    if problem.init == "cosine":
        return np.sin(2.0 * np.pi * x) / (2.0 * np.pi)
    if problem.init == "sigmoid":
        k = SIGMOID_K
        return (_softplus(k * (x - SIGMOID_X1)) - _softplus(-k * (x - SIGMOID_X2))) / k
    u_l, u_r = problem.riemann
    return u_l * np.minimum(x, 0.0) + u_r * np.maximum(x, 0.0)


def initial_averages(problem: Problem, grid: GridSpec) -> np.ndarray:
    """Exact cell averages of the initial condition."""
    anti = _init_antiderivative(problem, grid.edges)
    return np.diff(anti) / grid.dx


def _extend(state: np.ndarray, grid: GridSpec, halo: int) -> np.ndarray:
    if grid.bc == "periodic":
        return np.concatenate([state[-halo:], state, state[:halo]])
    left, right = grid.bc_values
    return np.concatenate(
        [np.full(halo, left), state, np.full(halo, right)]
    )


def face_states(state: np.ndarray, grid: GridSpec, scheme):
    """Minus/plus reconstructions at all nx+1 faces.

    The minus side comes from the left-biased stencil; the plus side applies
    the same kernel to the mirrored right-biased stencil.  Ghost cells wrap
    for periodic grids and repeat the boundary value for Dirichlet.
    """
    width = scheme.width
    if grid.nx < width:
        raise ValueError(f"nx={grid.nx} too small for a {width}-cell stencil")
    ext = _extend(state, grid, (width + 1) // 2)
    windows = np.lib.stride_tricks.sliding_window_view(ext, width)
    u_minus = scheme.face_value(windows[:-1])
    u_plus = scheme.face_value(windows[1:, ::-1])
    return u_minus, u_plus


def numerical_flux(u_minus, u_plus, kind: str):
    """Upwind flux for unit-speed advection; local Lax-Friedrichs for Burgers."""
    if kind == "advection":
        return np.asarray(u_minus, dtype=float)
    fm = 0.5 * np.asarray(u_minus) ** 2
    fp = 0.5 * np.asarray(u_plus) ** 2
    a = np.maximum(np.abs(u_minus), np.abs(u_plus))
    return 0.5 * (fm + fp) - 0.5 * a * (u_plus - u_minus)


def rhs(state: np.ndarray, grid: GridSpec, scheme, kind: str) -> np.ndarray:
    u_minus, u_plus = face_states(state, grid, scheme)
    flux = numerical_flux(u_minus, u_plus, kind)
    return -np.diff(flux) / grid.dx


def ssp_rk3_step(state: np.ndarray, dt: float, rhs_fn) -> np.ndarray:
    """Three-stage strong-stability-preserving Runge-Kutta step."""
    u1 = state + dt * rhs_fn(state)
    u2 = 0.75 * state + 0.25 * (u1 + dt * rhs_fn(u1))
    return state / 3.0 + 2.0 / 3.0 * (u2 + dt * rhs_fn(u2))


def _max_wave_speed(state: np.ndarray, kind: str) -> float:
    if kind == "advection":
        return 1.0
    return max(float(np.max(np.abs(state))), 1e-12)


@dataclass
class SolveReport:
    times: np.ndarray
    l1_errors: np.ndarray
    final_state: np.ndarray
    scheme_name: str
    nx: int
    dx: float
    cfl: float
    t_final: float
    wall_time: float = 0.0

    @property
    def final_error(self) -> float:
        return float(self.l1_errors[-1])


def run(problem: Problem, grid: GridSpec, scheme) -> SolveReport:
    """Integrate to ``problem.T`` recording the L1 error after every step."""
    t0 = time.perf_counter()
    u = initial_averages(problem, grid)
    t = 0.0
    times = [0.0]
    errors = [l1_error(u, exact_cell_averages(problem, grid, 0.0), grid.dx)]
    step = 0
    while t < problem.T - 1e-12:
        dt = problem.cfl * grid.dx / _max_wave_speed(u, problem.kind)
        dt = min(dt, problem.T - t)
        u = ssp_rk3_step(u, dt, lambda s: rhs(s, grid, scheme, problem.kind))
        t += dt
        step += 1
        if not np.all(np.isfinite(u)):
            raise RuntimeError(
                f"scheme {scheme.name} produced a non-finite state at step {step}, "
                f"t={t:.6g}"
            )
        times.append(t)
        errors.append(l1_error(u, exact_cell_averages(problem, grid, t), grid.dx))
    return SolveReport(
        np.asarray(times),
        np.asarray(errors),
        u,
        scheme.name,
        grid.nx,
        grid.dx,
        problem.cfl,
        t,
        time.perf_counter() - t0,
    )


def exact_solution(problem: Problem, x, t: float):
    """Pointwise exact solution (periodic translation, shock, or fan)."""
    x = np.asarray(x, dtype=float)
    if problem.kind == "advection":
        return _init_value(problem, np.mod(x - t, 1.0))
    u_l, u_r = problem.riemann
    if t <= 0.0:
        return np.where(x < 0.0, u_l, u_r)
    if u_l > u_r:  # shock moving at the Rankine-Hugoniot speed
        return np.where(x < 0.5 * (u_l + u_r) * t, u_l, u_r)
    if u_l == u_r:
        return np.full_like(x, u_l)
    fan = x / t
    return np.clip(fan, u_l, u_r)


def _exact_antiderivative(problem: Problem, x, t: float):
    """Antiderivative in x of the exact solution at time t."""
    x = np.asarray(x, dtype=float)
    if problem.kind == "advection":
        # integral of the periodic extension of the initial condition
        period = _init_antiderivative(problem, 1.0) - _init_antiderivative(
            problem, 0.0
        )
        y = x - t
        k = np.floor(y)
        return k * period + _init_antiderivative(problem, y - k)
    u_l, u_r = problem.riemann
    if u_l == u_r:
        return u_l * x
    if t <= 0.0 or u_l > u_r:
        s = 0.5 * (u_l + u_r) * t if t > 0.0 else 0.0
        return u_l * np.minimum(x, s) + u_r * np.maximum(x - s, 0.0)
    a1, a2 = u_l * t, u_r * t
    out = np.empty_like(x)
    left = x < a1
    right = x > a2
    mid = ~(left | right)
    out[left] = u_l * x[left]
    out[mid] = u_l * a1 + (x[mid] ** 2 - a1**2) / (2.0 * t)
    out[right] = u_l * a1 + (a2**2 - a1**2) / (2.0 * t) + u_r * (x[right] - a2)
    return out


def exact_cell_averages(problem: Problem, grid: GridSpec, t: float) -> np.ndarray:
    anti = _exact_antiderivative(problem, grid.edges, t)
    return np.diff(anti) / grid.dx


def l1_error(state: np.ndarray, exact_avg: np.ndarray, dx: float) -> float:
    """Discrete L1 norm of the cell-average error."""
    if len(state) != len(exact_avg):
        raise ValueError("state and exact averages must have equal length")
    return float(dx * np.sum(np.abs(state - exact_avg)))


def total_variation(state: np.ndarray) -> float:
    return float(np.sum(np.abs(np.diff(state))))
