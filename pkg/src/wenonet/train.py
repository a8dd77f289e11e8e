"""Offline training: loss with analytic gradients, Adam, sweeps, model selection.

Gradients are reverse-mode by hand; the network is small enough that explicit
backprop through the softmax head, dense layers, guarded rationals, and the
feature normalization stays short and checkable against finite differences.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .funcspace import (
    DEFAULT_NX_VALUES,
    Dataset,
    FunctionSpec,
    discretize,
    eval_function,
    face_targets,
    philox_rng,
)
from .ratnet import (
    C_ENO_DEFAULT,
    DEFAULT_ARCH,
    DENOM_GUARD,
    FEATURE_COUNT,
    NetParams,
    NNScheme,
    init_params,
    params_to_vector,
    rational_eval,
    vector_to_params,
)
from .reconstruct import IDEAL_WEIGHTS3, interpolants3

__all__ = [
    "LossHyper",
    "TrainConfig",
    "TrainedModel",
    "AdamState",
    "SELECTION_CRITERIA",
    "DEFAULT_SWEEP_ALPHAS",
    "DEFAULT_SWEEP_BETA_D",
    "DEFAULT_SWEEP_PEAK_LR",
    "selection_primary",
    "gamma",
    "loss_and_grad",
    "evaluate_losses",
    "lr_schedule",
    "adam_step",
    "train_model",
    "interpolation_error",
    "evaluate_orders",
    "convergence_order",
    "select_model",
    "sweep_grid",
    "run_sweep",
    "TRAIN_LOG_HEADER",
]

#: Hyperparameter hull spanned by the published model variants.
DEFAULT_SWEEP_ALPHAS = (0.01, 0.03, 0.1, 0.3)
DEFAULT_SWEEP_BETA_D = (0.03, 0.1, 0.3)
DEFAULT_SWEEP_PEAK_LR = (5e-4, 1e-4, 1e-5)

SELECTION_CRITERIA = (
    "conv-sine-step",
    "conv-sin-cubed",
    "least-recon-loss",
    "least-dev-loss",
)

TRAIN_LOG_HEADER = "step,lr,loss,loss_r,loss_d,loss_l2"

_IDEAL = np.asarray(IDEAL_WEIGHTS3)


@dataclass(frozen=True)
class LossHyper:
    """Loss weights: gamma exponent, deviation weight, l2 weight."""

    alpha: float = 0.1
    beta_d: float = 0.1
    beta_w: float = 1e-6
    eps_gamma: float = 1e-15

    def __post_init__(self):
        if min(self.alpha, self.beta_d, self.beta_w) < 0 or self.eps_gamma <= 0:
            raise ValueError("loss hyperparameters must be non-negative, eps_gamma > 0")


@dataclass(frozen=True)
class TrainConfig:
    peak_lr: float = 5e-4
    warmup_steps: int = 1000
    total_steps: int = 20000
    batch_size: int = 1024
    seed: int = 0
    hyper: LossHyper = LossHyper()
    arch: tuple[int, ...] = DEFAULT_ARCH
    c_eno: float = C_ENO_DEFAULT


@dataclass
class TrainedModel:
    params: NetParams
    config: TrainConfig
    grid_errors: dict[str, dict[int, float]] = field(default_factory=dict)
    orders: dict[str, float] = field(default_factory=dict)
    recon_loss: float = float("nan")
    dev_loss: float = float("nan")
    selection_tag: str = ""
    log: np.ndarray | None = None
    skipped_steps: int = 0


def gamma(stencils, eps_gamma: float = 1e-15):
    """Local smoothness ratio in [0, 1]: second difference over one-sided slopes.

    The triangle inequality bounds the ratio by one in exact arithmetic; the
    clip removes last-bit floating-point excess.
    """
    s = np.asarray(stencils, dtype=float)
    um1, u0, up1 = s[..., 0], s[..., 1], s[..., 2]
    num = np.abs(um1 - 2.0 * u0 + up1)
    den = np.abs(u0 - um1) + np.abs(u0 - up1) + eps_gamma
    return np.minimum(num / den, 1.0)


def _rational_backward(coeffs, x, upstream):
    """Backprop through y = P(x)/(|Q(x)| + guard).

    Returns dL/dx of x's shape plus coefficient gradients summed over the
    batch.  The |Q| kink uses sign(0) = 0 as subgradient.
    """
    p, q = coeffs.p, coeffs.q
    x2 = x * x
    x3 = x2 * x
    num = p[0] + p[1] * x + p[2] * x2 + p[3] * x3
    den_raw = q[0] + q[1] * x + q[2] * x2
    den = np.abs(den_raw) + DENOM_GUARD
    sgn = np.sign(den_raw)
    dnum = p[1] + 2.0 * p[2] * x + 3.0 * p[3] * x2
    dden = q[1] + 2.0 * q[2] * x
    inv_den = 1.0 / den
    dx = upstream * (dnum - num * sgn * dden * inv_den) * inv_den
    t_p = upstream * inv_den
    t_q = -t_p * num * sgn * inv_den
    dp = np.array([np.sum(t_p), np.sum(t_p * x), np.sum(t_p * x2), np.sum(t_p * x3)])
    dq = np.array([np.sum(t_q), np.sum(t_q * x), np.sum(t_q * x2)])
    return dx, dp, dq


def loss_and_grad(params: NetParams, stencils, targets, hyper: LossHyper):
    """Total loss, flat gradient, and the raw loss components.

    The loss is ``L_r + beta_d * L_d + beta_w * |theta|^2`` with the hard
    thresholding of inference bypassed, matching how the network trains.
    ``parts`` holds the unweighted L_r, L_d, and |theta|^2.
    """
    s = np.asarray(stencils, dtype=float)
    y = np.asarray(targets, dtype=float)
    n = len(y)
    if n == 0:
        raise ValueError("empty batch")

    # forward, keeping intermediates; the four feature rationals evaluate as
    # one broadcast site with coefficients stacked column-wise
    um1, u0, up1 = s[:, 0], s[:, 1], s[:, 2]
    deltas = np.stack(
        [
            np.abs(u0 - um1),
            np.abs(up1 - u0),
            np.abs(up1 - um1),
            np.abs(up1 - 2.0 * u0 + um1),
        ],
        axis=1,
    )
    feat_p = np.stack([c.p for c in params.feat], axis=1)  # (4 coeffs, 4 features)
    feat_q = np.stack([c.q for c in params.feat], axis=1)
    d2 = deltas * deltas
    d3 = d2 * deltas
    f_num = feat_p[0] + feat_p[1] * deltas + feat_p[2] * d2 + feat_p[3] * d3
    f_den_raw = feat_q[0] + feat_q[1] * deltas + feat_q[2] * d2
    f_den = np.abs(f_den_raw) + DENOM_GUARD
    alpha = f_num / f_den
    norm = np.linalg.norm(alpha, axis=1, keepdims=True)
    valid = norm >= 1e-14
    safe = np.where(valid, norm, 1.0)
    a0 = np.where(valid, alpha / safe, 0.0)

    acts = [a0]
    zs = []
    a = a0
    for layer in params.layers:
        z = a @ layer.W.T + layer.b
        zs.append(z)
        a = rational_eval(layer.act, z)
        acts.append(a)
    logits = a @ params.head_W.T + params.head_b
    shifted = logits - logits.max(axis=1, keepdims=True)
    expz = np.exp(shifted)
    w = expz / expz.sum(axis=1, keepdims=True)

    i0, i1 = interpolants3(um1, u0, up1)
    u_nn = w[:, 0] * i0 + w[:, 1] * i1
    resid = u_nn - y
    if not np.all(np.isfinite(resid)):
        bad = int(np.argmin(np.isfinite(resid)))
        raise RuntimeError(f"non-finite loss contribution at sample {bad}")

    g = np.power(gamma(s, hyper.eps_gamma), hyper.alpha)
    loss_r = float(np.mean(g * resid**2))
    dev = w - _IDEAL
    loss_d = float(np.mean((1.0 - g) * np.sum(dev**2, axis=1)))
    theta = params_to_vector(params)
    loss_l2 = float(np.sum(theta**2))
    loss = loss_r + hyper.beta_d * loss_d + hyper.beta_w * loss_l2

    # backward
    d_w = (2.0 / n) * (g * resid)[:, None] * np.stack([i0, i1], axis=1)
    d_w += hyper.beta_d * (2.0 / n) * (1.0 - g)[:, None] * dev
    d_z = w * (d_w - np.sum(d_w * w, axis=1, keepdims=True))
    g_head_W = d_z.T @ acts[-1]
    g_head_b = d_z.sum(axis=0)
    d_a = d_z @ params.head_W

    layer_grads = []
    for layer, z, a_in in zip(reversed(params.layers), reversed(zs), reversed(acts[:-1])):
        d_zl, dp_act, dq_act = _rational_backward(layer.act, z, d_a)
        layer_grads.append((d_zl.T @ a_in, d_zl.sum(axis=0), dp_act, dq_act))
        d_a = d_zl @ layer.W
    layer_grads.reverse()

    d_alpha = np.where(
        valid, (d_a - a0 * np.sum(d_a * a0, axis=1, keepdims=True)) / safe, 0.0
    )
    f_inv = 1.0 / f_den
    t_p = d_alpha * f_inv  # (n, 4)
    t_q = -t_p * f_num * np.sign(f_den_raw) * f_inv
    dp_feat = np.stack(
        [t_p.sum(0), (t_p * deltas).sum(0), (t_p * d2).sum(0), (t_p * d3).sum(0)]
    )  # (4 coeffs, 4 features)
    dq_feat = np.stack([t_q.sum(0), (t_q * deltas).sum(0), (t_q * d2).sum(0)])

    chunks = []
    for j in range(FEATURE_COUNT):
        chunks += [dp_feat[:, j], dq_feat[:, j]]
    for g_W, g_b, dp, dq in layer_grads:
        chunks += [g_W.ravel(), g_b, dp, dq]
    chunks += [g_head_W.ravel(), g_head_b]
    grad = np.concatenate(chunks) + 2.0 * hyper.beta_w * theta

    parts = {"loss_r": loss_r, "loss_d": loss_d, "loss_l2": loss_l2}
    return loss, grad, parts


def evaluate_losses(params: NetParams, dataset: Dataset, hyper: LossHyper):
    """Reconstruction and deviation losses over a whole dataset (no gradient)."""
    loss, _, parts = loss_and_grad(params, dataset.ubar, dataset.target, hyper)
    return parts["loss_r"], parts["loss_d"]


def lr_schedule(step: int, cfg: TrainConfig) -> float:
    """Linear warmup to the peak, then cosine decay to zero."""
    if not 0 <= step < cfg.total_steps:
        raise ValueError(f"step {step} outside [0, {cfg.total_steps})")
    if cfg.warmup_steps > 0 and step < cfg.warmup_steps:
        return cfg.peak_lr * step / cfg.warmup_steps
    span = max(cfg.total_steps - cfg.warmup_steps, 1)
    frac = (step - cfg.warmup_steps) / span
    return cfg.peak_lr * 0.5 * (1.0 + float(np.cos(np.pi * frac)))


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n: int) -> "AdamState":
        return cls(np.zeros(n), np.zeros(n), 0)


def adam_step(
    theta: np.ndarray,
    grad: np.ndarray,
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
):
    """One bias-corrected Adam update; returns (new theta, new state)."""
    if theta.shape != grad.shape or theta.shape != state.m.shape:
        raise ValueError("parameter, gradient, and state shapes must match")
    t = state.t + 1
    m = beta1 * state.m + (1.0 - beta1) * grad
    v = beta2 * state.v + (1.0 - beta2) * grad**2
    m_hat = m / (1.0 - beta1**t)
    v_hat = v / (1.0 - beta2**t)
    return theta - lr * m_hat / (np.sqrt(v_hat) + eps), AdamState(m, v, t)


def train_model(
    dataset: Dataset,
    cfg: TrainConfig,
    eval_grids: tuple[int, ...] = DEFAULT_NX_VALUES,
) -> TrainedModel:
    """Full Adam run over seeded mini-batches; metrics cover ``eval_grids``.

    Initialization and shuffling use dedicated Philox streams derived from
    ``cfg.seed``, so reruns are bit-identical.
    """
    params = init_params(cfg.arch, philox_rng(cfg.seed, 2**63), cfg.c_eno)
    theta = params_to_vector(params)
    state = AdamState.zeros(theta.size)
    shuffler = philox_rng(cfg.seed, 2**63 + 1)
    n = len(dataset)
    bs = min(cfg.batch_size, n)
    order = shuffler.permutation(n)
    pos = 0
    log = []
    skipped = 0
    for step in range(cfg.total_steps):
        if pos + bs > n:
            order = shuffler.permutation(n)
            pos = 0
        idx = order[pos : pos + bs]
        pos += bs
        params = vector_to_params(theta, cfg.arch, cfg.c_eno)
        loss, grad, parts = loss_and_grad(
            params, dataset.ubar[idx], dataset.target[idx], cfg.hyper
        )
        if loss > 1e6:
            raise RuntimeError(f"training diverged at step {step}: loss={loss:.3g}")
        lr = lr_schedule(step, cfg)
        log.append((step, lr, loss, parts["loss_r"], parts["loss_d"], parts["loss_l2"]))
        if not np.all(np.isfinite(grad)):
            skipped += 1
            continue
        theta, state = adam_step(theta, grad, state, lr)
    params = vector_to_params(theta, cfg.arch, cfg.c_eno)
    model = TrainedModel(
        params=params, config=cfg, log=np.asarray(log), skipped_steps=skipped
    )
    model.grid_errors, model.orders = evaluate_orders(NNScheme(params), eval_grids)
    return model


def interpolation_error(scheme, spec: FunctionSpec, nx: int) -> float:
    """Face-reconstruction RMSE against exact interface values.

    Covers every face whose stencil lies fully inside the domain, so
    non-periodic functions need no boundary convention.
    """
    u, _ = discretize(spec, nx)
    targets = face_targets(spec, nx)
    r = (scheme.width + 1) // 2
    windows = np.lib.stride_tricks.sliding_window_view(u, scheme.width)
    rec = scheme.face_value(windows)
    return float(np.sqrt(np.mean((rec - targets[r - 1 : nx - r + 1]) ** 2)))


def evaluate_orders(scheme, nx_values: tuple[int, ...] = DEFAULT_NX_VALUES):
    """Interpolation errors and fitted orders on the two evaluation functions."""
    grid_errors: dict[str, dict[int, float]] = {}
    orders: dict[str, float] = {}
    for name in ("sine_cubed", "sine_step"):
        spec = eval_function(name)
        errs = {nx: interpolation_error(scheme, spec, nx) for nx in nx_values}
        grid_errors[name] = errs
        orders[name] = convergence_order(list(errs.items()))
    return grid_errors, orders


def convergence_order(points) -> float:
    """Least-squares slope of log(error) against log(dx), dx proportional to 1/nx.

    Non-positive errors are excluded with a warning (constant scale factors in
    dx shift the intercept only, never the slope).
    """
    pts = [(int(nx), float(e)) for nx, e in points]
    kept = [(nx, e) for nx, e in pts if e > 0.0]
    if len(kept) < len(pts):
        warnings.warn(
            f"convergence_order: excluded {len(pts) - len(kept)} non-positive errors",
            stacklevel=2,
        )
    if len(kept) < 2:
        raise ValueError("need at least two positive errors to fit a slope")
    log_dx = np.log([1.0 / nx for nx, _ in kept])
    log_e = np.log([e for _, e in kept])
    return float(np.polyfit(log_dx, log_e, 1)[0])


def selection_primary(
    criterion: str, order_g: float, order_h: float, recon_loss: float, dev_loss: float
) -> float:
    """Primary ranking value (lower is better) for one model under a criterion."""
    if criterion == "conv-sine-step":
        return abs(order_h - 3.0)
    if criterion == "conv-sin-cubed":
        return abs(order_g - 3.0)
    if criterion == "least-recon-loss":
        return recon_loss
    if criterion == "least-dev-loss":
        return dev_loss
    raise ValueError(f"unknown criterion {criterion!r}; expected {SELECTION_CRITERIA}")


def _selection_primary(model: TrainedModel, criterion: str) -> float:
    return selection_primary(
        criterion,
        order_g=model.orders["sine_cubed"],
        order_h=model.orders["sine_step"],
        recon_loss=model.recon_loss,
        dev_loss=model.dev_loss,
    )


def select_model(models: list[TrainedModel], criterion: str) -> TrainedModel:
    """Pick by the criterion; ties fall to lower reconstruction loss, then index."""
    if not models:
        raise ValueError("no models to select from")
    best = min(
        range(len(models)),
        key=lambda i: (_selection_primary(models[i], criterion), models[i].recon_loss, i),
    )
    chosen = models[best]
    chosen.selection_tag = criterion
    return chosen


def sweep_grid(
    alphas=DEFAULT_SWEEP_ALPHAS,
    beta_ds=DEFAULT_SWEEP_BETA_D,
    peak_lrs=DEFAULT_SWEEP_PEAK_LR,
    seed0: int = 0,
    **config_kwargs,
) -> list[TrainConfig]:
    """Cartesian sweep over the loss/learning-rate hull, one seed per point."""
    configs = []
    seed = seed0
    for alpha in alphas:
        for beta_d in beta_ds:
            for peak_lr in peak_lrs:
                hyper = LossHyper(alpha=alpha, beta_d=beta_d)
                configs.append(
                    TrainConfig(
                        peak_lr=peak_lr, seed=seed, hyper=hyper, **config_kwargs
                    )
                )
                seed += 1
    return configs


def run_sweep(
    dataset: Dataset,
    configs: list[TrainConfig],
    val_dataset: Dataset | None = None,
    jobs: int = 1,
    eval_grids: tuple[int, ...] = DEFAULT_NX_VALUES,
) -> list[TrainedModel]:
    """Train every configuration; validation losses come from ``val_dataset``."""

    def one(cfg: TrainConfig) -> TrainedModel:
        model = train_model(dataset, cfg, eval_grids)
        if val_dataset is not None:
            model.recon_loss, model.dev_loss = evaluate_losses(
                model.params, val_dataset, cfg.hyper
            )
        return model

    if jobs <= 1:
        return [one(cfg) for cfg in configs]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(one, configs))
