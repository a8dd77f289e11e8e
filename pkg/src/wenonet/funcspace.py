"""Analytical function families with exact integrals, and training-pair generation.

Every family here supports closed-form pointwise evaluation and a closed-form
antiderivative, so cell averages and interface values are exact to machine
precision.  No quadrature is used anywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "FunctionSpec",
    "TrainSample",
    "DatasetConfig",
    "Dataset",
    "TRAIN_FAMILIES",
    "EVAL_FAMILIES",
    "DEFAULT_NX_VALUES",
    "DEFAULT_PAIRS_PER_GRID",
    "DATASET_HEADER",
    "philox_rng",
    "sample_function",
    "eval_function",
    "cell_average",
    "interface_value",
    "discretize",
    "face_targets",
    "build_dataset",
]

#: Families used to generate training pairs.
TRAIN_FAMILIES = ("polynomial", "step", "sawjump", "sine", "tanh")

#: Families reserved for model evaluation / selection.
EVAL_FAMILIES = ("sine_cubed", "sine_step")

#: Grid sizes in geometric progression with ratio 2.
DEFAULT_NX_VALUES = (16, 32, 64, 128, 256, 512, 1024)

#: Data pairs contributed by each grid size.
DEFAULT_PAIRS_PER_GRID = 16384

DATASET_HEADER = "ubar_m1,ubar_0,ubar_p1,target,nx"

#: Abscissa of the jump for the discontinuous families.
JUMP_X = 0.5

_DOMAINS = {
    "polynomial": (-1.0, 1.0),
    "tanh": (-1.0, 1.0),
    "sine_cubed": (-1.0, 1.0),
    "step": (0.0, 1.0),
    "sawjump": (0.0, 1.0),
    "sine": (0.0, 1.0),
    "sine_step": (0.0, 1.0),
}

_polyval = np.polynomial.polynomial.polyval
_polyint = np.polynomial.polynomial.polyint


def philox_rng(seed: int, stream: int) -> np.random.Generator:
    """Counter-based generator for the (seed, stream) pair.

    Philox is keyed, versioned by numpy, and platform independent, so any
    consumer can reproduce an individual stream without replaying earlier
    ones.
    """
    key = np.array([seed % 2**64, stream % 2**64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _log_cosh(z: np.ndarray) -> np.ndarray:
    # overflow-safe log(cosh(z)) = |z| + log1p(exp(-2|z|)) - log 2
    a = np.abs(z)
    return a + np.log1p(np.exp(-2.0 * a)) - np.log(2.0)


def _scalar_ok(x, out):
    return float(out) if np.ndim(x) == 0 else out


@dataclass(frozen=True)
class FunctionSpec:
    """One analytical function on a closed interval.

    ``family`` selects the closed form, ``params`` its coefficients.  At an
    exact jump abscissa the pointwise value is the left limit, so interface
    targets at a discontinuous face are deterministic.
    """

    family: str
    params: tuple[float, ...]
    domain: tuple[float, float]

    def value(self, x):
        """Pointwise evaluation (left-limit convention at jumps)."""
        xs = np.asarray(x, dtype=float)
        fam = self.family
        if fam == "polynomial":
            out = _polyval(xs, self.params)
        elif fam == "step":
            ul, ur = self.params
            out = np.where(xs <= JUMP_X, ul, ur)
        elif fam == "sawjump":
            sign, delta = self.params
            out = sign * xs + delta * (xs > JUMP_X)
        elif fam == "sine":
            (k,) = self.params
            out = np.sin(k * np.pi * xs)
        elif fam == "tanh":
            (k,) = self.params
            out = np.tanh(k * xs)
        elif fam == "sine_cubed":
            out = np.sin(np.pi * xs) ** 3
        elif fam == "sine_step":
            out = np.sin(2.0 * np.pi * xs) + (xs > JUMP_X)
        else:
            raise ValueError(f"unknown function family {fam!r}")
        return _scalar_ok(x, out)

    def antiderivative(self, x):
        """Closed-form antiderivative, continuous across jumps."""
        xs = np.asarray(x, dtype=float)
        fam = self.family
        if fam == "polynomial":
            out = _polyval(xs, _polyint(self.params))
        elif fam == "step":
            ul, ur = self.params
            out = np.where(xs <= JUMP_X, ul * xs, ul * JUMP_X + ur * (xs - JUMP_X))
        elif fam == "sawjump":
            sign, delta = self.params
            out = 0.5 * sign * xs**2 + delta * np.maximum(xs - JUMP_X, 0.0)
        elif fam == "sine":
            (k,) = self.params
            out = -np.cos(k * np.pi * xs) / (k * np.pi)
        elif fam == "tanh":
            (k,) = self.params
            out = _log_cosh(k * xs) / k
        elif fam == "sine_cubed":
            c = np.cos(np.pi * xs)
            out = (c**3 / 3.0 - c) / np.pi
        elif fam == "sine_step":
            out = -np.cos(2.0 * np.pi * xs) / (2.0 * np.pi) + np.maximum(
                xs - JUMP_X, 0.0
            )
        else:
            raise ValueError(f"unknown function family {fam!r}")
        return _scalar_ok(x, out)

    def integral(self, lo: float, hi: float) -> float:
        return float(self.antiderivative(hi) - self.antiderivative(lo))


@dataclass(frozen=True)
class TrainSample:
    """One (stencil, exact interface value) pair and its source grid size."""

    ubar: tuple[float, float, float]
    target: float
    nx: int


@dataclass(frozen=True)
class DatasetConfig:
    nx_values: tuple[int, ...] = DEFAULT_NX_VALUES
    pairs_per_grid: int = DEFAULT_PAIRS_PER_GRID
    seed: int = 0

    def validate(self) -> None:
        if not self.nx_values:
            raise ValueError("nx_values must be nonempty")
        for nx in self.nx_values:
            if nx < 4:
                raise ValueError(f"grid size {nx} is too small (need nx >= 4)")
            if self.pairs_per_grid % nx != 0:
                raise ValueError(
                    f"pairs_per_grid={self.pairs_per_grid} is not divisible by "
                    f"nx={nx}; every grid must contribute whole functions"
                )


class Dataset:
    """Array-backed collection of training pairs.

    ``ubar`` has shape (n, 3) holding the three neighboring cell averages,
    ``target`` the exact interface value, ``nx`` the grid each row came from.
    """

    def __init__(self, ubar: np.ndarray, target: np.ndarray, nx: np.ndarray):
        self.ubar = np.asarray(ubar, dtype=float)
        self.target = np.asarray(target, dtype=float)
        self.nx = np.asarray(nx, dtype=np.int64)
        if self.ubar.shape != (len(self.target), 3) or len(self.nx) != len(
            self.target
        ):
            raise ValueError("inconsistent dataset array shapes")

    def __len__(self) -> int:
        return len(self.target)

    def __getitem__(self, i: int) -> TrainSample:
        return TrainSample(tuple(self.ubar[i]), float(self.target[i]), int(self.nx[i]))

    def save_csv(self, path) -> None:
        cols = np.column_stack([self.ubar, self.target, self.nx.astype(float)])
        with open(path, "w") as f:
            np.savetxt(
                f,
                cols,
                fmt=["%.17g"] * 4 + ["%d"],
                delimiter=",",
                header=DATASET_HEADER,
                comments="",
            )

    @classmethod
    def load_csv(cls, path) -> "Dataset":
        raw = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if raw.shape[1] != 5:
            raise ValueError(f"dataset file {path} must have 5 columns")
        return cls(raw[:, :3], raw[:, 3], raw[:, 4].astype(np.int64))


def sample_function(family: str, rng: np.random.Generator) -> FunctionSpec:
    """Draw one random instance of a training family.

    Parameter ranges: polynomial coefficients U(-1,1) with degree 3; step
    levels U(-1,1); sawtooth sign Bernoulli(1/2) with jump height U(0.5,1);
    sine wavenumber U(2,20); tanh steepness U(5,30).
    """
    if family == "polynomial":
        params = tuple(rng.uniform(-1.0, 1.0, size=4))
    elif family == "step":
        params = tuple(rng.uniform(-1.0, 1.0, size=2))
    elif family == "sawjump":
        sign = -1.0 if rng.integers(0, 2) else 1.0
        params = (sign, float(rng.uniform(0.5, 1.0)))
    elif family == "sine":
        params = (float(rng.uniform(2.0, 20.0)),)
    elif family == "tanh":
        params = (float(rng.uniform(5.0, 30.0)),)
    else:
        raise ValueError(
            f"unknown training family {family!r}; expected one of {TRAIN_FAMILIES}"
        )
    return FunctionSpec(family, params, _DOMAINS[family])


def eval_function(name: str) -> FunctionSpec:
    """The two fixed evaluation functions used for model selection."""
    if name not in EVAL_FAMILIES:
        raise ValueError(f"unknown eval function {name!r}; expected {EVAL_FAMILIES}")
    return FunctionSpec(name, (), _DOMAINS[name])


def _check_interval(spec: FunctionSpec, lo: float, hi: float) -> None:
    a, b = spec.domain
    tol = 1e-12 * max(1.0, abs(a), abs(b))
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if lo < a - tol or hi > b + tol:
        raise ValueError(f"interval [{lo}, {hi}] outside domain [{a}, {b}]")


def cell_average(spec: FunctionSpec, lo: float, hi: float) -> float:
    """Exact mean of the function over [lo, hi] from the antiderivative."""
    _check_interval(spec, lo, hi)
    return spec.integral(lo, hi) / (hi - lo)


def interface_value(spec: FunctionSpec, x: float) -> float:
    """Exact value at a face; the left limit if x is a jump abscissa."""
    a, b = spec.domain
    tol = 1e-12 * max(1.0, abs(a), abs(b))
    if x < a - tol or x > b + tol:
        raise ValueError(f"x={x} outside domain [{a}, {b}]")
    return float(spec.value(x))


def discretize(spec: FunctionSpec, nx: int) -> tuple[np.ndarray, float]:
    """Exact cell averages of ``spec`` on nx uniform cells over its domain."""
    a, b = spec.domain
    dx = (b - a) / nx
    edges = a + dx * np.arange(nx + 1)
    anti = spec.antiderivative(edges)
    return np.diff(anti) / dx, dx


def face_targets(spec: FunctionSpec, nx: int) -> np.ndarray:
    """Exact interface values at the right face of every cell (periodic wrap).

    Face i sits at ``a + (i+1)*dx``; the last one coincides with the right
    domain boundary, whose stencil wraps around to the first cell.
    """
    a, b = spec.domain
    dx = (b - a) / nx
    faces = a + dx * np.arange(1, nx + 1)
    return np.asarray(spec.value(faces), dtype=float)


def build_dataset(cfg: DatasetConfig) -> Dataset:
    """Generate the full training set.

    Per grid size nx, ``pairs_per_grid / nx`` random function instances are
    drawn, each contributing one pair per face (periodic wrap), so every grid
    size is equally represented.  Targets are clipped into the convex hull of
    their stencil.  The result is bit-reproducible from ``cfg.seed``; each
    function instance owns Philox stream ``(seed, instance_index)``.
    """
    cfg.validate()
    stencils, targets, grids = [], [], []
    stream = 0
    for nx in cfg.nx_values:
        n_inst = cfg.pairs_per_grid // nx
        for _ in range(n_inst):
            rng = philox_rng(cfg.seed, stream)
            stream += 1
            fam = TRAIN_FAMILIES[rng.integers(len(TRAIN_FAMILIES))]
            spec = sample_function(fam, rng)
            u, _ = discretize(spec, nx)
            t = face_targets(spec, nx)
            s = np.stack([np.roll(u, 1), u, np.roll(u, -1)], axis=1)
            t = np.clip(t, s.min(axis=1), s.max(axis=1))
            stencils.append(s)
            targets.append(t)
            grids.append(np.full(nx, nx, dtype=np.int64))
    return Dataset(
        np.concatenate(stencils), np.concatenate(targets), np.concatenate(grids)
    )
