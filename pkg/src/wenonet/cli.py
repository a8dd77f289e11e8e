"""Command-line pipeline orchestration with reproducible, config-driven runs.

Every subcommand resolves its settings from an optional JSON config file plus
flag overrides (flags win), writes a manifest of the fully resolved
configuration next to its outputs, and is deterministic given (config, seed):
rerunning reproduces data artifacts byte for byte.  Exit codes: 0 success,
1 runtime failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, analysis, solver, train
from .funcspace import Dataset, DatasetConfig, build_dataset, eval_function
from .ratnet import NNScheme, accounting_report, load_params, save_params
from .reconstruct import IdealWeights3, Quick, Weno3JS, Weno3Z, Weno5JS

CLASSICAL_SCHEMES = {
    "weno3-js": Weno3JS,
    "weno3-z": Weno3Z,
    "weno5-js": Weno5JS,
    "quick": Quick,
    "ideal3": IdealWeights3,
}

PROBLEMS = {
    "advection-cosine": lambda T, cfl: solver.advection_cosine(T, cfl),
    "advection-sigmoid": lambda T, cfl: solver.advection_sigmoid(T, cfl),
    "burgers-shock": lambda T, cfl: solver.burgers_riemann(1.0, 0.0, T, cfl),
    "burgers-rarefaction": lambda T, cfl: solver.burgers_riemann(0.0, 1.0, T, cfl),
    "burgers-transonic": lambda T, cfl: solver.burgers_riemann(-1.0, 1.0, T, cfl),
}

RECON_TARGETS = {
    "recon-sin3": "sine_cubed",
    "recon-sine-step": "sine_step",
}

REGISTRY_NAME = "models.csv"
REGISTRY_COLUMNS = (
    "model_id",
    "alpha",
    "beta_d",
    "peak_lr",
    "order_g",
    "order_h",
    "recon_loss",
    "dev_loss",
    "criterion",
)


def make_scheme(name: str):
    """Scheme object from its CLI name; ``nn:<weights-path>`` loads a model."""
    if name in CLASSICAL_SCHEMES:
        return CLASSICAL_SCHEMES[name]()
    if name.startswith("nn:"):
        path = Path(name[3:])
        if not path.exists():
            raise ValueError(f"weight file {path} does not exist")
        return NNScheme(load_params(path), name=f"nn:{path.stem}")
    valid = ", ".join(sorted(CLASSICAL_SCHEMES) + ["nn:<weights-path>"])
    raise ValueError(f"unknown scheme {name!r}; valid schemes: {valid}")


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    doc = json.loads(Path(path).read_text())
    if not isinstance(doc, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    return doc


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(out: Path, command: str, resolved: dict, wall_time: float) -> None:
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
    body = json.dumps(
        {"command": command, "version": __version__, **resolved},
        indent=2,
        sort_keys=True,
        default=str,
    )
    text = f"# generated: {stamp}; wall_time_s={wall_time:.3f}\n{body}\n"
    (out / f"{command}-manifest.txt").write_text(text)


def _pmap(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen_data(args) -> int:
    t0 = time.perf_counter()
    config = _load_config(args.config)
    nx_values = config.get("nx_values")
    if args.nx_values is not None:
        nx_values = [int(v) for v in args.nx_values.split(",")]
    pairs = args.pairs_per_grid or config.get("pairs_per_grid")
    seed = args.seed if args.seed is not None else config.get("seed", 0)
    cfg = DatasetConfig(
        nx_values=tuple(nx_values) if nx_values else DatasetConfig.nx_values,
        pairs_per_grid=int(pairs) if pairs else DatasetConfig.pairs_per_grid,
        seed=int(seed),
    )
    dataset = build_dataset(cfg)
    out = _out_dir(args)
    dataset.save_csv(out / "dataset.csv")
    _write_manifest(
        out,
        "gen-data",
        {
            "nx_values": list(cfg.nx_values),
            "pairs_per_grid": cfg.pairs_per_grid,
            "seed": cfg.seed,
            "rows": len(dataset),
        },
        time.perf_counter() - t0,
    )
    print(f"wrote {len(dataset)} samples to {out / 'dataset.csv'}")
    return 0


def _train_configs(config: dict, args) -> list[train.TrainConfig]:
    base = dict(
        total_steps=args.steps or config.get("total_steps", 20000),
        batch_size=args.batch_size or config.get("batch_size", 1024),
    )
    base["warmup_steps"] = args.warmup_steps or config.get(
        "warmup_steps", max(base["total_steps"] // 20, 1)
    )
    seed0 = args.seed if args.seed is not None else config.get("seed", 0)
    if "configs" in config:
        out = []
        for i, raw in enumerate(config["configs"]):
            hyper = train.LossHyper(
                alpha=float(raw.get("alpha", 0.1)),
                beta_d=float(raw.get("beta_d", 0.1)),
                beta_w=float(raw.get("beta_w", 1e-6)),
            )
            out.append(
                train.TrainConfig(
                    peak_lr=float(raw.get("peak_lr", 5e-4)),
                    warmup_steps=int(raw.get("warmup_steps", base["warmup_steps"])),
                    total_steps=int(raw.get("total_steps", base["total_steps"])),
                    batch_size=int(raw.get("batch_size", base["batch_size"])),
                    seed=int(raw.get("seed", seed0 + i)),
                    hyper=hyper,
                )
            )
        return out
    sweep = config.get("sweep", {})
    return train.sweep_grid(
        alphas=tuple(sweep.get("alphas", train.DEFAULT_SWEEP_ALPHAS)),
        beta_ds=tuple(sweep.get("beta_ds", train.DEFAULT_SWEEP_BETA_D)),
        peak_lrs=tuple(sweep.get("peak_lrs", train.DEFAULT_SWEEP_PEAK_LR)),
        seed0=seed0,
        **base,
    )


def cmd_train(args) -> int:
    t0 = time.perf_counter()
    config = _load_config(args.config)
    dataset = Dataset.load_csv(args.dataset)
    configs = _train_configs(config, args)
    declared = [
        raw.get("criterion", "") for raw in config.get("configs", [])
    ] or [""] * len(configs)

    val_raw = config.get("val", {})
    val_seed = int(val_raw.get("seed", (configs[0].seed + 1000003)))
    val_cfg = DatasetConfig(
        nx_values=tuple(val_raw.get("nx_values", sorted(set(map(int, np.unique(dataset.nx)))))),
        pairs_per_grid=int(val_raw.get("pairs_per_grid", 4096)),
        seed=val_seed,
    )
    val_dataset = build_dataset(val_cfg)

    models = train.run_sweep(dataset, configs, val_dataset, jobs=args.jobs)
    out = _out_dir(args)
    rows = []
    for i, model in enumerate(models):
        model_id = f"model_{i:03d}"
        save_params(model.params, out / f"{model_id}.json")
        log_path = out / f"train_log_{model_id}.csv"
        with open(log_path, "w") as f:
            f.write(train.TRAIN_LOG_HEADER + "\n")
            np.savetxt(
                f,
                model.log,
                fmt=["%d"] + ["%.17g"] * 5,
                delimiter=",",
            )
        rows.append(
            {
                "model_id": model_id,
                "alpha": model.config.hyper.alpha,
                "beta_d": model.config.hyper.beta_d,
                "peak_lr": model.config.peak_lr,
                "order_g": model.orders["sine_cubed"],
                "order_h": model.orders["sine_step"],
                "recon_loss": model.recon_loss,
                "dev_loss": model.dev_loss,
                "criterion": declared[i],
            }
        )
    analysis.emit_report(
        rows,
        out / REGISTRY_NAME,
        metadata={"version": __version__, "seed": configs[0].seed},
        columns=REGISTRY_COLUMNS,
    )
    print(accounting_report(models[0].params))
    _write_manifest(
        out,
        "train",
        {
            "dataset": str(args.dataset),
            "n_models": len(models),
            "val_seed": val_seed,
            "configs": [
                {
                    "alpha": c.hyper.alpha,
                    "beta_d": c.hyper.beta_d,
                    "peak_lr": c.peak_lr,
                    "seed": c.seed,
                    "total_steps": c.total_steps,
                    "batch_size": c.batch_size,
                    "warmup_steps": c.warmup_steps,
                }
                for c in configs
            ],
        },
        time.perf_counter() - t0,
    )
    print(f"trained {len(models)} models into {out}")
    return 0


def cmd_select(args) -> int:
    rows, _ = analysis.parse_report(Path(args.registry))
    if not rows:
        raise ValueError(f"registry {args.registry} holds no models")
    if args.criterion not in train.SELECTION_CRITERIA:
        raise ValueError(
            f"unknown criterion {args.criterion!r}; expected one of "
            f"{train.SELECTION_CRITERIA}"
        )
    keyed = [
        (
            train.selection_primary(
                args.criterion,
                order_g=float(r["order_g"]),
                order_h=float(r["order_h"]),
                recon_loss=float(r["recon_loss"]),
                dev_loss=float(r["dev_loss"]),
            ),
            float(r["recon_loss"]),
            i,
        )
        for i, r in enumerate(rows)
    ]
    best = min(range(len(rows)), key=lambda i: keyed[i])
    print(rows[best]["model_id"])
    return 0


def _resolve_problem(args) -> solver.Problem:
    if args.problem not in PROBLEMS:
        valid = ", ".join(sorted(PROBLEMS) + sorted(RECON_TARGETS))
        raise ValueError(f"unknown problem {args.problem!r}; valid problems: {valid}")
    return PROBLEMS[args.problem](args.T, args.cfl)


def cmd_solve(args) -> int:
    t0 = time.perf_counter()
    problem = _resolve_problem(args)
    scheme = make_scheme(args.scheme)
    grid = solver.default_grid(problem, args.nx)
    report = solver.run(problem, grid, scheme)
    out = _out_dir(args)
    exact = solver.exact_cell_averages(problem, grid, report.t_final)
    sol_rows = [
        {"x": x, "u": u, "u_exact": e}
        for x, u, e in zip(grid.centers, report.final_state, exact)
    ]
    analysis.emit_report(
        sol_rows,
        out / "solution.csv",
        metadata={"version": __version__, "scheme": scheme.name, "nx": grid.nx},
    )
    err_rows = [
        {"t": t, "l1": e} for t, e in zip(report.times, report.l1_errors)
    ]
    analysis.emit_report(
        err_rows,
        out / "error_series.csv",
        metadata={"version": __version__, "scheme": scheme.name, "nx": grid.nx},
    )
    _write_manifest(
        out,
        "solve",
        {
            "problem": args.problem,
            "scheme": scheme.name,
            "nx": grid.nx,
            "cfl": problem.cfl,
            "T": problem.T,
            "final_l1": report.final_error,
        },
        time.perf_counter() - t0,
    )
    print(
        f"{scheme.name} nx={grid.nx} cfl={problem.cfl} T={problem.T}: "
        f"final L1 error {report.final_error:.6g} "
        f"({report.wall_time:.2f}s)"
    )
    return 0


def cmd_converge(args) -> int:
    t0 = time.perf_counter()
    schemes = [make_scheme(name) for name in args.schemes.split(",")]
    nx_list = [int(v) for v in args.nx_list.split(",")]
    if args.problem in RECON_TARGETS:
        target = eval_function(RECON_TARGETS[args.problem])
    else:
        target = _resolve_problem(args)
    if args.jobs > 1 and len(schemes) > 1:
        batches = _pmap(
            lambda s: analysis.convergence_study([s], target, nx_list),
            schemes,
            args.jobs,
        )
        rows = [row for batch in batches for row in batch]
    else:
        rows = analysis.convergence_study(schemes, target, nx_list)
    out = _out_dir(args)
    analysis.emit_report(
        rows,
        out / "convergence.csv",
        metadata={"version": __version__, "problem": args.problem},
        columns=analysis.CONVERGENCE_COLUMNS,
    )
    for scheme in schemes:
        slope = next(r.slope for r in rows if r.scheme == scheme.name)
        print(f"{scheme.name}: slope {slope:.3f}")
    _write_manifest(
        out,
        "converge",
        {"problem": args.problem, "schemes": args.schemes, "nx_list": nx_list},
        time.perf_counter() - t0,
    )
    return 0


def cmd_adr(args) -> int:
    t0 = time.perf_counter()
    schemes = [make_scheme(name) for name in args.schemes.split(",")]
    kappas = analysis.default_kappa_grid(args.modes)
    batches = _pmap(
        lambda s: [(s.name, p) for p in analysis.adr(s, kappas, args.nx)],
        schemes,
        args.jobs,
    )
    rows = [
        {
            "scheme": name,
            "kappa_dx": p.kappa_dx,
            "dispersion": p.dispersion,
            "dissipation": p.dissipation,
            "leakage": p.leakage,
        }
        for batch in batches
        for name, p in batch
    ]
    out = _out_dir(args)
    analysis.emit_report(
        rows,
        out / "adr.csv",
        metadata={"version": __version__, "nx": args.nx},
        columns=analysis.ADR_COLUMNS,
    )
    _write_manifest(
        out,
        "adr",
        {"schemes": args.schemes, "nx": args.nx, "modes": args.modes},
        time.perf_counter() - t0,
    )
    print(f"wrote {len(rows)} spectral samples to {out / 'adr.csv'}")
    return 0


# ---------------------------------------------------------------------------


def _add_common(sub):
    sub.add_argument("--config", help="JSON config file; flags override its keys")
    sub.add_argument("--seed", type=int, default=None, help="global seed")
    sub.add_argument("--out", default="out", help="output directory")
    sub.add_argument("--jobs", type=int, default=1, help="parallel workers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wenonet",
        description="train and benchmark data-driven WENO3 face reconstruction",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate the exact training dataset")
    _add_common(p)
    p.add_argument("--nx-values", help="comma-separated grid sizes")
    p.add_argument("--pairs-per-grid", type=int, default=None)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="train one or more stencil-weight networks")
    _add_common(p)
    p.add_argument("--dataset", required=True, help="dataset CSV from gen-data")
    p.add_argument("--steps", type=int, default=None, help="Adam steps per model")
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--warmup-steps", type=int, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("select", help="pick a model from a training registry")
    _add_common(p)
    p.add_argument("--registry", required=True, help="models.csv from train")
    p.add_argument("--criterion", required=True, help="|".join(train.SELECTION_CRITERIA))
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("solve", help="run one problem with one scheme")
    _add_common(p)
    p.add_argument("--problem", required=True)
    p.add_argument("--scheme", required=True)
    p.add_argument("--nx", type=int, default=256)
    p.add_argument("--T", type=float, default=5.0)
    p.add_argument("--cfl", type=float, default=0.4)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("converge", help="error-vs-resolution study")
    _add_common(p)
    p.add_argument("--problem", required=True)
    p.add_argument("--schemes", required=True, help="comma-separated scheme names")
    p.add_argument("--nx-list", required=True, help="comma-separated grid sizes")
    p.add_argument("--T", type=float, default=5.0)
    p.add_argument("--cfl", type=float, default=0.4)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("adr", help="dispersion-dissipation fingerprint")
    _add_common(p)
    p.add_argument("--schemes", required=True, help="comma-separated scheme names")
    p.add_argument("--nx", type=int, default=analysis.DEFAULT_ADR_NX)
    p.add_argument("--modes", type=int, default=analysis.DEFAULT_ADR_MODES)
    p.set_defaults(func=cmd_adr)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except RuntimeError as e:
        print(f"runtime failure: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
