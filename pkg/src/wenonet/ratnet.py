"""Rational-activation network that maps a 3-cell stencil to two stencil weights.

The network is tiny by design: four per-feature (3,2)-rational featurizers, a
stack of dense layers with one shared (3,2)-rational activation each, and a
two-way softmax head.  A hard-threshold filter restores the
essentially-non-oscillatory property at inference time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .reconstruct import interpolants3

__all__ = [
    "RationalCoeffs",
    "DenseLayer",
    "NetParams",
    "NNScheme",
    "DENOM_GUARD",
    "C_ENO_DEFAULT",
    "DEFAULT_ARCH",
    "FEATURE_COUNT",
    "rational_eval",
    "delta_features",
    "delta_baseline_features",
    "rational_features",
    "forward",
    "eno_filter",
    "nn_reconstruct",
    "fit_relu_rational",
    "init_params",
    "count_params",
    "count_flops",
    "accounting_report",
    "params_to_vector",
    "vector_to_params",
    "save_params",
    "load_params",
]

#: Additive guard on |q(x)| so learned denominators can never blow up.
DENOM_GUARD = 1e-8

#: Hard threshold below which an inferred weight is zeroed.
C_ENO_DEFAULT = 2e-4

#: Hidden widths; the first entry is the rational-feature layer itself.
DEFAULT_ARCH = (4, 4, 4)

FEATURE_COUNT = 4

_NUM_DEG = 3  # numerator degree of every rational activation
_DEN_DEG = 2  # denominator degree

_polyval = np.polynomial.polynomial.polyval

WEIGHT_FORMAT_VERSION = 1


@dataclass
class RationalCoeffs:
    """Coefficients of one (3,2) rational, ascending degree."""

    p: np.ndarray  # (4,) numerator
    q: np.ndarray  # (3,) denominator

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        self.q = np.asarray(self.q, dtype=float)
        if self.p.shape != (_NUM_DEG + 1,) or self.q.shape != (_DEN_DEG + 1,):
            raise ValueError("rational coefficients must have shapes (4,) and (3,)")

    def copy(self) -> "RationalCoeffs":
        return RationalCoeffs(self.p.copy(), self.q.copy())


@dataclass
class DenseLayer:
    W: np.ndarray  # (n_out, n_in)
    b: np.ndarray  # (n_out,)
    act: RationalCoeffs


@dataclass
class NetParams:
    """Every learnable parameter of the network.

    ``feat`` holds one rational per delta feature; ``layers`` the dense
    transitions between consecutive hidden layers (the feature vector is the
    first hidden layer, so ``len(layers) == len(arch) - 1``); ``head`` the
    final 2-way linear map fed to the softmax.
    """

    feat: list[RationalCoeffs]
    layers: list[DenseLayer]
    head_W: np.ndarray  # (2, arch[-1])
    head_b: np.ndarray  # (2,)
    arch: tuple[int, ...] = DEFAULT_ARCH
    c_eno: float = C_ENO_DEFAULT


def _rational_terms(c: RationalCoeffs, x):
    """Numerator, raw denominator, and guarded denominator at x (Horner)."""
    p, q = c.p, c.q
    num = ((p[3] * x + p[2]) * x + p[1]) * x + p[0]
    den_raw = (q[2] * x + q[1]) * x + q[0]
    return num, den_raw, np.abs(den_raw) + DENOM_GUARD


def rational_eval(c: RationalCoeffs, x):
    """p(x) / (|q(x)| + guard); total for every finite input."""
    num, _, den = _rational_terms(c, x)
    return num / den


def delta_features(stencils):
    """Absolute finite differences of the stencil, shape (..., 4).

    The four entries are |u0-um1|, |up1-u0|, |up1-um1| and the absolute
    second difference; all are invariant to adding a constant to the stencil.
    """
    s = np.asarray(stencils, dtype=float)
    um1, u0, up1 = s[..., 0], s[..., 1], s[..., 2]
    return np.stack(
        [
            np.abs(u0 - um1),
            np.abs(up1 - u0),
            np.abs(up1 - um1),
            np.abs(up1 - 2.0 * u0 + um1),
        ],
        axis=-1,
    )


def delta_baseline_features(stencils, eps: float = 1e-15):
    """Delta featurization of the Swish-activation baseline model.

    Each difference is normalized by max of the two one-sided differences,
    guarded by ``eps``.
    """
    d = delta_features(stencils)
    denom = np.maximum(np.maximum(d[..., 0], d[..., 1]), eps)
    return d / denom[..., None]


def rational_features(stencils, feat: list[RationalCoeffs]):
    """Per-feature rationals applied to the deltas, then unit-normalized.

    Rows whose pre-normalization Euclidean norm is below 1e-14 map to the
    zero vector.
    """
    d = delta_features(stencils)
    alpha = np.stack(
        [rational_eval(feat[j], d[..., j]) for j in range(FEATURE_COUNT)], axis=-1
    )
    norm = np.linalg.norm(alpha, axis=-1, keepdims=True)
    safe = np.where(norm < 1e-14, 1.0, norm)
    return np.where(norm < 1e-14, 0.0, alpha / safe)


def _softmax(z):
    m = z - z.max(axis=-1, keepdims=True)
    e = np.exp(m)
    return e / e.sum(axis=-1, keepdims=True)


def forward(params: NetParams, stencils):
    """Pre-threshold stencil weights, shape (..., 2); rows sum to one."""
    a = rational_features(stencils, params.feat)
    for layer in params.layers:
        z = a @ layer.W.T + layer.b
        a = rational_eval(layer.act, z)
    logits = a @ params.head_W.T + params.head_b
    return _softmax(logits)


def eno_filter(weights, c_eno: float = C_ENO_DEFAULT):
    """Zero weights below ``c_eno`` and renormalize the survivors."""
    w = np.asarray(weights, dtype=float)
    kept = np.where(w >= c_eno, w, 0.0)
    s = kept.sum(axis=-1, keepdims=True)
    # a valid convex pair sums to 1 > 2*c_eno, so at least one entry survives
    assert np.all(s > 0.0), "eno_filter received weights that sum below threshold"
    return kept / s


def nn_reconstruct(params: NetParams, stencils, c_eno: float | None = None):
    """Inference-time face value: thresholded network weights on the interpolants."""
    s = np.asarray(stencils, dtype=float)
    w = eno_filter(forward(params, s), params.c_eno if c_eno is None else c_eno)
    i0, i1 = interpolants3(s[..., 0], s[..., 1], s[..., 2])
    return w[..., 0] * i0 + w[..., 1] * i1


class NNScheme:
    """Adapter giving trained parameters the classical-scheme interface."""

    width = 3

    def __init__(self, params: NetParams, name: str = "weno3-nn"):
        self.params = params
        self.name = name

    @property
    def halo(self) -> int:
        return 2

    def face_value(self, windows):
        return nn_reconstruct(self.params, windows)


_relu_fit_cache: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}


def fit_relu_rational(n_points: int = 1001, span: tuple[float, float] = (-3.0, 3.0)):
    """Least-squares (3,2)-rational approximation of ReLU on ``span``.

    Iteratively reweighted linear least squares with the denominator constant
    pinned to 1 (the ratio is scale invariant); Lawson-style reweighting by
    the running residual pushes the fit toward the uniform-error optimum.
    Falls back to a coarser grid if the fit degenerates.  The result is
    cached.
    """
    key = (n_points, span)
    if key not in _relu_fit_cache:
        p, q = _fit_relu(n_points, span)
        err = _relu_fit_error(RationalCoeffs(p, q), span)
        if not np.isfinite(err) or err > 0.5:
            p, q = _fit_relu(101, span)
        _relu_fit_cache[key] = (p, q)
    p, q = _relu_fit_cache[key]
    return RationalCoeffs(p.copy(), q.copy())


def _fit_relu(n_points: int, span: tuple[float, float]):
    x = np.linspace(span[0], span[1], n_points)
    y = np.maximum(x, 0.0)
    q_tail = np.zeros(2)
    lawson = np.ones_like(x)
    cols = np.column_stack([np.ones_like(x), x, x**2, x**3, -y * x, -y * x**2])
    best = None
    best_err = np.inf
    for it in range(60):
        den = 1.0 + q_tail[0] * x + q_tail[1] * x**2
        wgt = lawson / np.maximum(np.abs(den), 1e-6)
        sol, *_ = np.linalg.lstsq(cols * wgt[:, None], y * wgt, rcond=None)
        q_tail = sol[4:]
        cand = RationalCoeffs(sol[:4], np.concatenate([[1.0], q_tail]))
        den_new = _polyval(x, cand.q)
        resid = np.abs(rational_eval(cand, x) - y)
        err = float(resid.max())
        # reject iterates whose denominator approaches a root on the interval
        if err < best_err and np.min(np.abs(den_new)) > 0.1:
            best, best_err = cand, err
        if it >= 20:  # switch on damped residual reweighting toward uniform error
            lawson = np.sqrt(np.maximum(lawson * (resid + 1e-12), 1e-10))
            lawson /= lawson.max()
    if best is None:
        raise RuntimeError("rational fit to ReLU degenerated")
    return best.p.copy(), best.q.copy()


def _relu_fit_error(c: RationalCoeffs, span: tuple[float, float]) -> float:
    x = np.linspace(span[0], span[1], 4001)
    return float(np.max(np.abs(rational_eval(c, x) - np.maximum(x, 0.0))))


def init_params(
    arch: tuple[int, ...] = DEFAULT_ARCH,
    rng: np.random.Generator | None = None,
    c_eno: float = C_ENO_DEFAULT,
) -> NetParams:
    """ReLU-approximant rationals everywhere, LeCun-normal dense weights, zero biases."""
    if arch[0] != FEATURE_COUNT:
        raise ValueError(f"first hidden width must be {FEATURE_COUNT}, got {arch[0]}")
    if rng is None:
        rng = np.random.default_rng(0)
    relu = fit_relu_rational()
    feat = [relu.copy() for _ in range(FEATURE_COUNT)]
    layers = []
    for n_in, n_out in zip(arch[:-1], arch[1:]):
        W = rng.normal(0.0, np.sqrt(1.0 / n_in), size=(n_out, n_in))
        layers.append(DenseLayer(W, np.zeros(n_out), relu.copy()))
    head_W = rng.normal(0.0, np.sqrt(1.0 / arch[-1]), size=(2, arch[-1]))
    head_b = np.zeros(2)
    return NetParams(feat, layers, head_W, head_b, tuple(arch), c_eno)


def count_params(params: NetParams) -> int:
    """Number of stored learnable scalars (every coefficient, weight, and bias)."""
    n = sum(c.p.size + c.q.size for c in params.feat)
    for layer in params.layers:
        n += layer.W.size + layer.b.size + layer.act.p.size + layer.act.q.size
    n += params.head_W.size + params.head_b.size
    return n


_RATIONAL_FLOPS = 12  # Horner 3 mul + 3 add; 2 mul + 2 add; guard add; divide
_EXP_FLOPS = 10  # transcendental convention: exp and sqrt count as 10


def count_flops(params: NetParams) -> int:
    """Flops for one face reconstruction at inference.

    Convention: one flop per scalar multiply, add, or divide; exp and sqrt
    count as 10; comparisons and absolute values are free.
    """
    n = 6  # delta features: 3 single subtractions plus the second difference
    n += FEATURE_COUNT * _RATIONAL_FLOPS
    # normalization: squares, sums, sqrt, divides
    n += FEATURE_COUNT + (FEATURE_COUNT - 1) + _EXP_FLOPS + FEATURE_COUNT
    for layer in params.layers:
        n_out, n_in = layer.W.shape
        n += n_out * 2 * n_in  # matvec multiplies and adds (bias included)
        n += n_out * _RATIONAL_FLOPS
    n += params.head_W.shape[0] * 2 * params.head_W.shape[1]
    n += 2 * _EXP_FLOPS + 1 + 2  # softmax: exps, sum, divides
    n += 3  # eno renormalization: sum plus two divides
    n += 8  # interpolants and the convex combination
    return n


#: Reported accounting of an earlier publication of this architecture, made
#: with an XLA-based counter whose convention differs from ours.
REFERENCE_PARAM_COUNT = 105
REFERENCE_FLOP_COUNT = 508


def accounting_report(params: NetParams) -> str:
    """Human-readable parameter/flop accounting next to the published figures."""
    lines = [
        f"architecture: hidden widths {params.arch}, 4 feature rationals, 2-way head",
        f"parameters: {count_params(params)} "
        "(convention: every stored scalar counts -- rational numerator and "
        "denominator coefficients, dense weights, biases)",
        f"flops per face: {count_flops(params)} "
        "(convention: 1 per multiply/add/divide, 10 per exp or sqrt)",
        f"reference accounting for this architecture: {REFERENCE_PARAM_COUNT} "
        f"parameters, {REFERENCE_FLOP_COUNT} flops (XLA counter; its convention "
        "is not reconstructible from ours, so the figures differ)",
    ]
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# flat parameter vector (fixed layout: feature rationals p then q in feature
# order, then per layer W row-major, b, act.p, act.q, then head W row-major
# and head b)

def params_to_vector(params: NetParams) -> np.ndarray:
    chunks = []
    for c in params.feat:
        chunks += [c.p, c.q]
    for layer in params.layers:
        chunks += [layer.W.ravel(), layer.b, layer.act.p, layer.act.q]
    chunks += [params.head_W.ravel(), params.head_b]
    return np.concatenate(chunks)


def vector_to_params(
    vec: np.ndarray, arch: tuple[int, ...] = DEFAULT_ARCH, c_eno: float = C_ENO_DEFAULT
) -> NetParams:
    vec = np.asarray(vec, dtype=float)
    pos = 0

    def take(n):
        nonlocal pos
        out = vec[pos : pos + n]
        pos += n
        return out.copy()

    feat = [
        RationalCoeffs(take(_NUM_DEG + 1), take(_DEN_DEG + 1))
        for _ in range(FEATURE_COUNT)
    ]
    layers = []
    for n_in, n_out in zip(arch[:-1], arch[1:]):
        W = take(n_out * n_in).reshape(n_out, n_in)
        b = take(n_out)
        act = RationalCoeffs(take(_NUM_DEG + 1), take(_DEN_DEG + 1))
        layers.append(DenseLayer(W, b, act))
    head_W = take(2 * arch[-1]).reshape(2, arch[-1])
    head_b = take(2)
    if pos != vec.size:
        raise ValueError(f"vector length {vec.size} does not match arch {arch}")
    return NetParams(feat, layers, head_W, head_b, tuple(arch), c_eno)


# ---------------------------------------------------------------------------
# weight files: JSON with every real printed to 17 significant digits so a
# load/save round trip is bit-stable


def _jdump(obj, indent: int = 0) -> str:
    pad = " " * indent
    if isinstance(obj, dict):
        inner = ",\n".join(
            f'{pad}  "{k}": {_jdump(v, indent + 2).lstrip()}' for k, v in obj.items()
        )
        return f"{pad}{{\n{inner}\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return pad + "[" + ", ".join(_jreal(v) for v in obj) + "]"
        inner = ",\n".join(_jdump(v, indent + 2) for v in obj)
        return f"{pad}[\n{inner}\n{pad}]"
    if isinstance(obj, bool):
        return pad + ("true" if obj else "false")
    if isinstance(obj, int):
        return pad + str(obj)
    if isinstance(obj, float):
        return pad + _jreal(obj)
    if isinstance(obj, str):
        return pad + json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _jreal(v) -> str:
    if isinstance(v, int) and not isinstance(v, bool):
        return str(v)
    return format(float(v), ".17g")


def params_to_json(params: NetParams) -> str:
    doc = {
        "format_version": WEIGHT_FORMAT_VERSION,
        "arch": list(params.arch),
        "c_eno": float(params.c_eno),
        "feat": [{"p": list(c.p), "q": list(c.q)} for c in params.feat],
        "layers": [
            {
                "W": [list(row) for row in layer.W],
                "b": list(layer.b),
                "act": {"p": list(layer.act.p), "q": list(layer.act.q)},
            }
            for layer in params.layers
        ],
        "head": {"W": [list(row) for row in params.head_W], "b": list(params.head_b)},
    }
    return _jdump(doc) + "\n"


def _field(doc: dict, name: str):
    if name not in doc:
        raise ValueError(f"invalid weight file: missing field '{name}'")
    return doc[name]


def _real_array(value, shape: tuple[int, ...], name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.shape != shape:
        raise ValueError(
            f"invalid weight file: field '{name}' has shape {arr.shape}, "
            f"expected {shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"invalid weight file: field '{name}' has non-finite entries")
    return arr


def params_from_json(text: str) -> NetParams:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"invalid weight file: not valid JSON ({e})") from e
    if _field(doc, "format_version") != WEIGHT_FORMAT_VERSION:
        raise ValueError(
            f"invalid weight file: field 'format_version' is "
            f"{doc['format_version']!r}, expected {WEIGHT_FORMAT_VERSION}"
        )
    arch = tuple(int(n) for n in _field(doc, "arch"))
    if len(arch) < 1 or arch[0] != FEATURE_COUNT:
        raise ValueError(f"invalid weight file: field 'arch' {arch} is unsupported")
    c_eno = float(_field(doc, "c_eno"))
    if not 0.0 < c_eno < 0.5:
        raise ValueError(f"invalid weight file: field 'c_eno' {c_eno} out of range")
    raw_feat = _field(doc, "feat")
    if len(raw_feat) != FEATURE_COUNT:
        raise ValueError("invalid weight file: field 'feat' must have 4 entries")
    feat = [
        RationalCoeffs(
            _real_array(_field(c, "p"), (_NUM_DEG + 1,), f"feat[{j}].p"),
            _real_array(_field(c, "q"), (_DEN_DEG + 1,), f"feat[{j}].q"),
        )
        for j, c in enumerate(raw_feat)
    ]
    raw_layers = _field(doc, "layers")
    if len(raw_layers) != len(arch) - 1:
        raise ValueError(
            f"invalid weight file: field 'layers' has {len(raw_layers)} entries, "
            f"expected {len(arch) - 1} for arch {arch}"
        )
    layers = []
    for i, (raw, n_in, n_out) in enumerate(zip(raw_layers, arch[:-1], arch[1:])):
        act = _field(raw, "act")
        layers.append(
            DenseLayer(
                _real_array(_field(raw, "W"), (n_out, n_in), f"layers[{i}].W"),
                _real_array(_field(raw, "b"), (n_out,), f"layers[{i}].b"),
                RationalCoeffs(
                    _real_array(_field(act, "p"), (_NUM_DEG + 1,), f"layers[{i}].act.p"),
                    _real_array(_field(act, "q"), (_DEN_DEG + 1,), f"layers[{i}].act.q"),
                ),
            )
        )
    head = _field(doc, "head")
    head_W = _real_array(_field(head, "W"), (2, arch[-1]), "head.W")
    head_b = _real_array(_field(head, "b"), (2,), "head.b")
    return NetParams(feat, layers, head_W, head_b, arch, c_eno)


def save_params(params: NetParams, path) -> None:
    Path(path).write_text(params_to_json(params))


def load_params(path) -> NetParams:
    return params_from_json(Path(path).read_text())
