"""Experiment harness: simulate | train | tune | cv-sweep | evaluate.

Every command is a pure function of its parameters and seeds; file
outputs contain no timestamps, so identical invocations produce byte
identical files. Parameters may come from flags, from a JSON document
via --config, or both; flags win over the document, which wins over
built-in defaults.

Exit codes: 0 success, 2 I/O, 3 shape/contract violations, 4 data
feasibility (splits, folds, missing classes).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .boost import (Variant, fit, load_model, predict_batch, save_model,
                    write_trace_csv)
from .boost import CostVector
from .costopt import GAConfig, tune_costs, write_ga_trace_csv
from .data import (SynthConfig, generate_synthetic, load_csv, save_csv,
                   stratified_kfold, subset, train_test_split)
from .errors import (ConfigError, ContractError, CsBoostError, DataLoadError,
                     DegenerateWeightsError, InfeasibleError)
from .metrics import confusion_matrix, metrics_report

__all__ = [
    "PRESETS",
    "cmd_simulate",
    "cmd_train",
    "cmd_tune",
    "cmd_cv_sweep",
    "cmd_evaluate",
    "main",
    "entrypoint",
]

# Scaled-down defaults keep a full experiment under minutes on one core;
# the full-size setup ships as the "full" preset.
PRESETS = {
    "desk": {
        "n_samples": 10000, "n_features": 10, "n_informative": 5,
        "n_classes": 3, "clusters_per_class": 3, "class_sep": 1.5,
        "weights": [0.90, 0.09, 0.01], "seed": 16,
    },
    "full": {
        "n_samples": 100000, "n_features": 50, "n_informative": 50,
        "n_classes": 3, "clusters_per_class": 2, "class_sep": 2.0,
        "weights": [0.90, 0.09, 0.01], "seed": 16,
    },
}

GA_KEYS = ("population_size", "generations", "cost_low", "cost_high",
           "fixed_minority_cost", "mutation_scale", "elitism")

DEFAULT_COUNTS = [50] + list(range(100, 1001, 100))


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok != ""]
    except ValueError:
        raise ContractError(f"expected comma-separated reals, got {text!r}") \
            from None


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok != ""]
    except ValueError:
        raise ContractError(f"expected comma-separated integers, got {text!r}") \
            from None


def _load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except FileNotFoundError:
        raise DataLoadError(f"no such config file: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid config JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config JSON must be an object")
    return doc


def _merge(defaults: dict, args: argparse.Namespace) -> dict:
    """defaults < preset < --config document < explicit flags."""
    cfg = dict(defaults)
    preset = getattr(args, "preset", None)
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; "
                              f"choose from {sorted(PRESETS)}")
        cfg.update(PRESETS[preset])
    if getattr(args, "config", None) is not None:
        doc = _load_config_file(args.config)
        unknown = set(doc) - set(cfg)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(doc)
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _require(cfg: dict, key: str, flag: str):
    if cfg.get(key) is None:
        raise ContractError(f"missing required {flag}")
    return cfg[key]


def _ga_config(cfg: dict) -> GAConfig:
    return GAConfig(seed=int(cfg["seed"]),
                    **{k: cfg[k] for k in GA_KEYS})


def _print(line: str) -> None:
    print(line, flush=True)


# ---------------------------------------------------------------- simulate

def cmd_simulate(cfg: dict) -> int:
    out = _require(cfg, "out", "--out")
    synth = SynthConfig(
        n_samples=int(cfg["n_samples"]),
        n_features=int(cfg["n_features"]),
        n_informative=int(cfg["n_informative"]),
        n_classes=int(cfg["n_classes"]),
        clusters_per_class=int(cfg["clusters_per_class"]),
        class_sep=float(cfg["class_sep"]),
        weights=tuple(float(w) for w in cfg["weights"]),
        seed=int(cfg["seed"]),
    )
    ds = generate_synthetic(synth)
    save_csv(ds, out)
    _print(f"wrote {out}: {ds.n_samples} samples, {ds.n_features} features, "
           f"{ds.K} classes")
    for k in range(1, ds.K + 1):
        count = int(ds.class_counts[k - 1])
        _print(f"class {k}: {count} ({100.0 * count / ds.n_samples:.2f}%)")
    return 0


# ------------------------------------------------------------------- train

def _resolve_costs(cfg: dict, ds, variant: Variant, T: int) -> CostVector | None:
    if not variant.is_cost_sensitive:
        return None
    if cfg.get("costs") is not None:
        vals = cfg["costs"]
        if isinstance(vals, str):
            vals = _parse_floats(vals)
        return CostVector.of(vals)
    if cfg.get("costs_file") is not None:
        doc = _load_config_file(cfg["costs_file"])
        if "costs" not in doc:
            raise ConfigError(f"{cfg['costs_file']}: no 'costs' key")
        return CostVector.of(doc["costs"])
    if cfg.get("tune"):
        tr, va = train_test_split(ds, 1.0 - float(cfg["val_fraction"]),
                                  int(cfg["seed"]))
        best, _ = tune_costs(tr, va, T, _ga_config(cfg))
        _print("tuned costs: " + ",".join(repr(c) for c in best.cost))
        return best
    raise ContractError(
        f"variant {variant.value} needs costs: pass --costs/--costs-file "
        "or --tune")


def cmd_train(cfg: dict) -> int:
    data_path = _require(cfg, "data", "--data")
    model_out = _require(cfg, "model_out", "--model-out")
    trace_out = _require(cfg, "trace_out", "--trace-out")
    variant = Variant.parse(str(_require(cfg, "variant", "--variant")))
    T = int(cfg["T"])
    ds = load_csv(data_path)
    test_ds = None
    if cfg.get("test") and cfg.get("test_fraction"):
        raise ContractError("pass either --test or --test-fraction, not both")
    if cfg.get("test"):
        test_ds = load_csv(cfg["test"])
    elif cfg.get("test_fraction"):
        ds, test_ds = train_test_split(
            ds, 1.0 - float(cfg["test_fraction"]), int(cfg["seed"]))
    costs = _resolve_costs(cfg, ds, variant, T)

    model, trace = fit(ds, variant, T, costs, eval_ds=test_ds)
    save_model(model, model_out)
    write_trace_csv(trace, trace_out, K=ds.K)

    last = trace.rows[-1] if trace.rows else None
    _print(f"accepted rounds: {model.n_rounds} ({trace.termination_reason})")
    accepted = trace.accepted_rows()
    if accepted:
        final = accepted[-1]
        _print(f"final train_error: {final.train_error!r}")
        if final.test_error is not None:
            _print(f"final test_error: {final.test_error!r} "
                   f"test_mavg: {final.test_mavg!r}")
    elif last is not None:
        _print(f"no usable rounds: first stump error {last.epsilon!r}")
    _print(f"wrote model: {model_out}")
    _print(f"wrote trace: {trace_out}")
    return 0


# -------------------------------------------------------------------- tune

def cmd_tune(cfg: dict) -> int:
    data_path = _require(cfg, "data", "--data")
    costs_out = _require(cfg, "costs_out", "--costs-out")
    trace_out = _require(cfg, "trace_out", "--trace-out")
    ds = load_csv(data_path)
    tr, va = train_test_split(ds, 1.0 - float(cfg["val_fraction"]),
                              int(cfg["seed"]))
    best, trace = tune_costs(tr, va, int(cfg["T"]), _ga_config(cfg))
    with open(costs_out, "w", encoding="utf-8") as handle:
        json.dump({"costs": [float(c) for c in best.cost],
                   "best_mavg": float(trace.best_fitness_per_generation().max())},
                  handle, indent=2)
        handle.write("\n")
    write_ga_trace_csv(trace, trace_out, ds.K)
    per_gen = trace.best_fitness_per_generation()
    _print("best mavg per generation: "
           + ",".join(f"{v:.6f}" for v in per_gen))
    _print("best costs: " + ",".join(repr(float(c)) for c in best.cost))
    _print(f"wrote costs: {costs_out}")
    _print(f"wrote trace: {trace_out}")
    return 0


# ---------------------------------------------------------------- cv-sweep

def cmd_cv_sweep(cfg: dict) -> int:
    data_path = _require(cfg, "data", "--data")
    out = _require(cfg, "out", "--out")
    variant = Variant.parse(str(cfg["variant"]))
    counts = cfg["counts"]
    if isinstance(counts, str):
        counts = _parse_ints(counts)
    counts = [int(c) for c in counts]
    if not counts or any(c < 1 for c in counts):
        raise ContractError("counts must be positive tree counts")
    k_folds = int(cfg["k_folds"])
    seed = int(cfg["seed"])

    ds = load_csv(data_path)
    folds = stratified_kfold(ds, k_folds, seed)
    lines = ["n_trees,cv_mavg,cv_accuracy"]
    for n_trees in counts:
        costs = None
        if variant.is_cost_sensitive:
            # Costs are re-tuned for every tree count on a fixed split of
            # the full dataset, then shared by all folds at that count.
            tr, va = train_test_split(ds, 1.0 - float(cfg["val_fraction"]),
                                      seed + 1)
            ga = GAConfig(seed=seed + 2, **{k: cfg[k] for k in GA_KEYS})
            costs, _ = tune_costs(tr, va, n_trees, ga)
        mavgs = []
        accs = []
        for f in range(k_folds):
            tr_idx, ho_idx = folds.fold_indices(f)
            model, _ = fit(subset(ds, tr_idx), variant, n_trees, costs)
            holdout = subset(ds, ho_idx)
            report = metrics_report(
                holdout.labels, predict_batch(model, holdout), ds.K)
            mavgs.append(report["mavg"])
            accs.append(report["accuracy"])
        cv_mavg = float(np.mean(mavgs))
        cv_acc = float(np.mean(accs))
        _print(f"n_trees={n_trees} cv_mavg={cv_mavg!r} cv_accuracy={cv_acc!r}")
        lines.append(f"{n_trees},{cv_mavg!r},{cv_acc!r}")
    with open(out, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")
    _print(f"wrote sweep: {out}")
    return 0


# ---------------------------------------------------------------- evaluate

def cmd_evaluate(cfg: dict) -> int:
    model_path = _require(cfg, "model", "--model")
    data_path = _require(cfg, "data", "--data")
    model = load_model(model_path)
    ds = load_csv(data_path)
    if ds.K != model.K:
        raise ContractError(f"model expects K={model.K}, data has K={ds.K}")
    if ds.n_features != model.d:
        raise ContractError(f"model expects d={model.d}, "
                            f"data has d={ds.n_features}")
    preds = predict_batch(model, ds)
    report = metrics_report(ds.labels, preds, ds.K)
    cm = confusion_matrix(ds.labels, preds, ds.K)
    report["confusion"] = [[int(v) for v in row] for row in cm.counts]
    text = json.dumps(report, indent=2) + "\n"
    if cfg.get("out"):
        with open(cfg["out"], "w", encoding="utf-8") as handle:
            handle.write(text)
        _print(f"wrote metrics: {cfg['out']}")
    else:
        sys.stdout.write(text)
    return 0


# ----------------------------------------------------------------- parsing

def _add_ga_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--population-size", type=int, help="GA population size M")
    p.add_argument("--generations", type=int,
                   help="GA generations after the initial population")
    p.add_argument("--cost-low", type=float)
    p.add_argument("--cost-high", type=float)
    p.add_argument("--fixed-minority-cost", type=float)
    p.add_argument("--mutation-scale", type=float)
    p.add_argument("--no-elitism", action="store_const", const=False,
                   dest="elitism", help="disable elitist copy per generation")
    p.add_argument("--val-fraction", type=float,
                   help="fraction held out for GA fitness (default 0.2)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csboost",
        description="Cost-sensitive multi-class boosting experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic dataset CSV")
    p.add_argument("--config", help="JSON document with parameters")
    p.add_argument("--preset", help="parameter preset: desk or full")
    p.add_argument("--n-samples", type=int)
    p.add_argument("--n-features", type=int)
    p.add_argument("--n-informative", type=int)
    p.add_argument("--n-classes", type=int)
    p.add_argument("--clusters-per-class", type=int)
    p.add_argument("--class-sep", type=float)
    p.add_argument("--weights", type=_parse_floats,
                   help="comma-separated class weights, e.g. 0.9,0.09,0.01")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(func=cmd_simulate,
                   defaults=dict(PRESETS["desk"], out=None))

    p = sub.add_parser("train", help="fit one variant, write model + trace")
    p.add_argument("--config")
    p.add_argument("--data", help="training CSV")
    p.add_argument("--test", help="held-out CSV for per-round metrics")
    p.add_argument("--test-fraction", type=float,
                   help="carve a stratified held-out fraction from --data")
    p.add_argument("--variant",
                   help="AdaBoostM1 | AdaC2 | SAMME | SAMMEC2")
    p.add_argument("--T", type=int, help="boosting rounds (default 300)")
    p.add_argument("--costs", help="comma-separated per-class costs")
    p.add_argument("--costs-file", help="JSON file with a 'costs' array")
    p.add_argument("--tune", action="store_const", const=True,
                   help="GA-tune costs on an internal split before fitting")
    p.add_argument("--seed", type=int)
    p.add_argument("--model-out")
    p.add_argument("--trace-out")
    _add_ga_flags(p)
    p.set_defaults(func=cmd_train, defaults=dict(
        data=None, test=None, test_fraction=None, variant=None, T=300,
        costs=None, costs_file=None, tune=False, seed=16, val_fraction=0.2,
        model_out=None, trace_out=None,
        population_size=10, generations=10, cost_low=0.95, cost_high=0.999,
        fixed_minority_cost=0.999, mutation_scale=0.001, elitism=True))

    p = sub.add_parser("tune", help="GA-search cost vectors, write best + trace")
    p.add_argument("--config")
    p.add_argument("--data", help="training CSV (split internally)")
    p.add_argument("--T", type=int, help="boosting rounds per fitness fit")
    p.add_argument("--seed", type=int)
    p.add_argument("--costs-out")
    p.add_argument("--trace-out")
    _add_ga_flags(p)
    p.set_defaults(func=cmd_tune, defaults=dict(
        data=None, T=300, seed=16, val_fraction=0.2, costs_out=None,
        trace_out=None,
        population_size=10, generations=10, cost_low=0.95, cost_high=0.999,
        fixed_minority_cost=0.999, mutation_scale=0.001, elitism=True))

    p = sub.add_parser("cv-sweep",
                       help="k-fold CV metrics across tree counts")
    p.add_argument("--config")
    p.add_argument("--data")
    p.add_argument("--variant")
    p.add_argument("--counts", help="comma-separated tree counts")
    p.add_argument("--k-folds", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output CSV path")
    _add_ga_flags(p)
    p.set_defaults(func=cmd_cv_sweep, defaults=dict(
        data=None, variant="SAMMEC2", counts=list(DEFAULT_COUNTS), k_folds=5,
        seed=16, val_fraction=0.2, out=None,
        population_size=10, generations=10, cost_low=0.95, cost_high=0.999,
        fixed_minority_cost=0.999, mutation_scale=0.001, elitism=True))

    p = sub.add_parser("evaluate", help="score a saved model on a dataset")
    p.add_argument("--config")
    p.add_argument("--model")
    p.add_argument("--data")
    p.add_argument("--out", help="metrics JSON path (default: stdout)")
    p.set_defaults(func=cmd_evaluate,
                   defaults=dict(model=None, data=None, out=None))

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _merge(args.defaults, args)
        return args.func(cfg)
    except (DataLoadError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InfeasibleError, DegenerateWeightsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except CsBoostError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main(sys.argv[1:]))
