"""Command-line interface.

Subcommands: synth, fit-rest, fit-task, generate, bench-fake-vs-real,
bench-augment, sweep-k.  Exit codes: 0 success, 2 configuration error,
3 data/parse error, 4 numerical failure.  A ``--config FILE`` of
``key = value`` lines overrides the corresponding flags; keys are the flag
names with dashes replaced by underscores.
"""

import argparse
import sys
from dataclasses import asdict
from pathlib import Path

from . import io
from .augment import (ConditionalICAModel, UnconditionalModel, fit_conditional,
                      fit_unconditional, generate_conditional, generate_conditional_all,
                      generate_unconditional, load_model, save_model)
from .bench import (AugmentBenchConfig, FakeVsRealConfig, SweepKConfig,
                    exp_augmentation_benchmark, exp_fake_vs_real, exp_sensitivity_k)
from .errors import CondicaError, ConfigError
from .reports import write_bench_outputs, write_sweep_outputs
from .synthetic import SyntheticSpec, gen_synthetic_rest, gen_synthetic_task


def _str_list(raw: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in raw.split(",") if part.strip())


def _int_list(raw: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in _str_list(raw))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {raw!r}") from exc


def _float_list(raw: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in _str_list(raw))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {raw!r}") from exc


def _apply_config_file(args: argparse.Namespace, parser: argparse.ArgumentParser, path: str) -> None:
    actions = {a.dest: a for a in parser._actions}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, raw = stripped.partition("=")
        key = key.strip().replace("-", "_")
        raw = raw.strip()
        action = actions.get(key)
        if action is None or key in ("help", "config"):
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            value = action.type(raw) if action.type else raw
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
        if action.choices is not None and value not in action.choices:
            raise ConfigError(f"{path}:{lineno}: {key!r} must be one of {sorted(action.choices)}")
        setattr(args, key, value)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=0, help="root seed")
    sub.add_argument("--out", type=str, default="condica-out", help="output directory")
    sub.add_argument("--format", type=str, choices=io.FORMATS, default="csv",
                     help="matrix file format")
    sub.add_argument("--config", type=str, default=None,
                     help="key=value file overriding flags")


def _add_classifier_knobs(sub: argparse.ArgumentParser, defaults) -> None:
    sub.add_argument("--ica-tol", type=float, default=defaults.ica_tol)
    sub.add_argument("--ica-max-iter", type=int, default=defaults.ica_max_iter)
    sub.add_argument("--n-quantiles", type=int, default=defaults.n_quantiles)
    sub.add_argument("--logreg-grid", type=_float_list, default=defaults.logreg_grid,
                     help="comma-separated inverse L2 strengths")
    sub.add_argument("--logreg-max-iter", type=int, default=defaults.logreg_max_iter)
    sub.add_argument("--mlp-hidden", type=_int_list, default=defaults.mlp_hidden)
    sub.add_argument("--mlp-lr", type=float, default=defaults.mlp_lr)
    sub.add_argument("--mlp-batch", type=int, default=defaults.mlp_batch)
    sub.add_argument("--mlp-epochs", type=int, default=defaults.mlp_epochs)
    sub.add_argument("--mlp-l2", type=float, default=defaults.mlp_l2)


def _print_report(report) -> None:
    print(f"{report.kind} results (seed {report.seed})")
    header = f"{'method':<10} {'classifier':<10} {'acc':>8} {'std':>8} {'pre':>8} {'rec':>8}"
    print(header)
    for cell in report.cells:
        print(f"{cell.method:<10} {cell.classifier:<10} "
              f"{cell.mean_accuracy:>8.4f} {cell.std_accuracy:>8.4f} "
              f"{cell.mean_precision:>8.4f} {cell.mean_recall:>8.4f}")
    for comp in report.comparisons:
        p = "n/a" if comp.p is None else f"{comp.p:.4g}"
        print(f"  t-test {comp.method}/{comp.classifier} vs {comp.baseline}: p={p}")
    for method, seconds in report.runtime_seconds.items():
        print(f"  runtime {method}: {seconds:.2f} s")


# ---------------------------------------------------------------------------
# Subcommands

def cmd_synth(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    spec = SyntheticSpec(p=args.p, k_true=args.k_true, n=args.n,
                         source_family=args.family if len(args.family) > 1 else args.family[0],
                         latent_correlation=args.rho, n_classes=args.classes,
                         class_separation=args.separation, noise_scale=args.noise,
                         seed=args.seed)
    if args.kind == "rest":
        path = out / f"rest.{args.format}"
        io.save_matrix(gen_synthetic_rest(spec), path, args.format)
        print(f"wrote {path}")
    else:
        data = gen_synthetic_task(spec)
        path = out / f"task.{args.format}"
        labels_path = out / "task_labels.txt"
        io.save_matrix(data.X, path, args.format)
        io.save_labels(data.labels, labels_path)
        print(f"wrote {path} and {labels_path}")
    return 0


def cmd_fit_rest(args) -> int:
    x = io.load_matrix(args.data, args.format)
    model = fit_unconditional(x, args.components, seed=args.seed, tol=args.tol,
                              max_iter=args.max_iter, n_quantiles=args.n_quantiles)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "rest_model.cica"
    save_model(model, path)
    um = model.unmixing
    print(f"wrote {path} (k={um.k}, p={um.p}, converged={um.converged}, "
          f"iterations={um.iterations_used})")
    return 0


def cmd_fit_task(args) -> int:
    base = load_model(args.rest_model)
    unmixing = base.unmixing
    x = io.load_matrix(args.data, args.format)
    labels = io.load_labels(args.labels)
    io.check_labels_match(labels, x, args.labels)
    model = fit_conditional(unmixing, x, labels, args.n_quantiles)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "task_model.cica"
    save_model(model, path)
    print(f"wrote {path} (classes: {', '.join(str(c) for c in model.class_ids)})")
    return 0


def cmd_generate(args) -> int:
    model = load_model(args.model)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"fakes.{args.format}"
    if isinstance(model, UnconditionalModel):
        if args.class_id is not None:
            raise ConfigError("--class only applies to conditional models")
        fakes = generate_unconditional(model, args.n_fakes, args.seed)
        io.save_matrix(fakes, path, args.format)
        print(f"wrote {path} ({fakes.shape[1]} samples)")
        return 0
    assert isinstance(model, ConditionalICAModel)
    if args.class_id is not None:
        fakes = generate_conditional(model, args.class_id, args.n_fakes, args.seed)
        io.save_matrix(fakes, path, args.format)
        print(f"wrote {path} ({fakes.shape[1]} samples of class {args.class_id})")
        return 0
    data = generate_conditional_all(model, args.n_fakes, args.seed)
    if data.n_samples == 0:
        raise ConfigError("n_fakes must be >= 1")
    labels_path = out / "fakes_labels.txt"
    io.save_matrix(data.X, path, args.format)
    io.save_labels(data.labels, labels_path)
    print(f"wrote {path} and {labels_path} ({args.n_fakes} per class)")
    return 0


def cmd_bench_fake_vs_real(args) -> int:
    cfg = FakeVsRealConfig(
        p=args.p, k=args.components, k_true=args.k_true, n_rest=args.n_rest,
        latent_correlation=args.rho, source_family=args.family,
        noise_scale=args.noise, n_fakes=args.n_fakes, methods=args.method,
        classifiers=args.classifier, folds=args.folds, seed=args.seed,
        ica_tol=args.ica_tol, ica_max_iter=args.ica_max_iter,
        n_quantiles=args.n_quantiles, logreg_grid=args.logreg_grid,
        logreg_max_iter=args.logreg_max_iter, mlp_hidden=args.mlp_hidden,
        mlp_lr=args.mlp_lr, mlp_batch=args.mlp_batch, mlp_epochs=args.mlp_epochs,
        mlp_l2=args.mlp_l2)
    report = exp_fake_vs_real(cfg)
    written = write_bench_outputs(report, args.out, chance=0.5)
    _print_report(report)
    for path in written:
        print(f"wrote {path}")
    return 0


def _augment_config(args) -> AugmentBenchConfig:
    return AugmentBenchConfig(
        p=args.p, k=args.components, k_true=args.k_true, n_rest=args.n_rest,
        latent_correlation=args.rho, source_family=args.family,
        noise_scale=args.noise, n_classes=args.classes,
        train_per_class=args.train_per_class, test_per_class=args.test_per_class,
        class_separation=args.separation, n_fakes_per_class=args.n_fakes,
        methods=args.method, classifiers=args.classifier, n_splits=args.splits,
        seed=args.seed, ica_tol=args.ica_tol, ica_max_iter=args.ica_max_iter,
        n_quantiles=args.n_quantiles, logreg_grid=args.logreg_grid,
        logreg_max_iter=args.logreg_max_iter, mlp_hidden=args.mlp_hidden,
        mlp_lr=args.mlp_lr, mlp_batch=args.mlp_batch, mlp_epochs=args.mlp_epochs,
        mlp_l2=args.mlp_l2)


def cmd_bench_augment(args) -> int:
    report = exp_augmentation_benchmark(_augment_config(args))
    written = write_bench_outputs(report, args.out)
    _print_report(report)
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_sweep_k(args) -> int:
    classifier = args.classifier[0] if len(args.classifier) >= 1 else "lda"
    cfg = SweepKConfig(bench=_augment_config(args), k_grid=args.k_grid, classifier=classifier)
    points = exp_sensitivity_k(cfg)
    written = write_sweep_outputs(points, asdict(cfg.bench) | {"k_grid": list(cfg.k_grid)},
                                  args.out, classifier=classifier)
    for point in points:
        if point.error is None:
            print(f"k={point.k}: accuracy {point.mean_accuracy:.4f} "
                  f"+/- {point.std_accuracy:.4f}")
        else:
            print(f"k={point.k}: error: {point.error}")
    for path in written:
        print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# Parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="condica",
                                     description="Conditional ICA data augmentation toolkit")
    subs = parser.add_subparsers(dest="command", required=True)

    synth = subs.add_parser("synth", help="emit a synthetic dataset")
    synth.add_argument("--kind", choices=("rest", "task"), required=True)
    synth.add_argument("--p", type=int, default=64)
    synth.add_argument("--k-true", type=int, default=32)
    synth.add_argument("--n", type=int, default=50000)
    synth.add_argument("--rho", type=float, default=0.3, help="latent correlation")
    synth.add_argument("--classes", type=int, default=10)
    synth.add_argument("--separation", type=float, default=3.0)
    synth.add_argument("--family", type=_str_list, default=("laplace",),
                       help="source family, or one per source")
    synth.add_argument("--noise", type=float, default=0.01)
    _add_common(synth)
    synth.set_defaults(func=cmd_synth, _parser=synth)

    fit_rest = subs.add_parser("fit-rest", help="fit the unconditional model on rest data")
    fit_rest.add_argument("--data", required=True, help="rest matrix file")
    fit_rest.add_argument("-k", "--components", type=int, default=32)
    fit_rest.add_argument("--tol", type=float, default=1e-4)
    fit_rest.add_argument("--max-iter", type=int, default=200)
    fit_rest.add_argument("--n-quantiles", type=int, default=1000)
    _add_common(fit_rest)
    fit_rest.set_defaults(func=cmd_fit_rest, _parser=fit_rest)

    fit_task = subs.add_parser("fit-task", help="fit the conditional model on labeled task data")
    fit_task.add_argument("--rest-model", required=True, help="fitted rest model file")
    fit_task.add_argument("--data", required=True, help="task matrix file")
    fit_task.add_argument("--labels", required=True, help="task labels file")
    fit_task.add_argument("--n-quantiles", type=int, default=200)
    _add_common(fit_task)
    fit_task.set_defaults(func=cmd_fit_task, _parser=fit_task)

    generate = subs.add_parser("generate", help="sample surrogate data from a fitted model")
    generate.add_argument("--model", required=True, help="fitted model file")
    generate.add_argument("--n-fakes", type=int, default=100,
                          help="sample count (per class for conditional models)")
    generate.add_argument("--class", dest="class_id", type=int, default=None,
                          help="generate only this class")
    _add_common(generate)
    generate.set_defaults(func=cmd_generate, _parser=generate)

    fvr = subs.add_parser("bench-fake-vs-real", help="fake-vs-real discrimination benchmark")
    fvr_defaults = FakeVsRealConfig()
    fvr.add_argument("--p", type=int, default=fvr_defaults.p)
    fvr.add_argument("-k", "--components", type=int, default=fvr_defaults.k)
    fvr.add_argument("--k-true", type=int, default=fvr_defaults.k_true)
    fvr.add_argument("--n-rest", type=int, default=fvr_defaults.n_rest)
    fvr.add_argument("--rho", type=float, default=fvr_defaults.latent_correlation)
    fvr.add_argument("--family", type=str, default=fvr_defaults.source_family)
    fvr.add_argument("--noise", type=float, default=fvr_defaults.noise_scale)
    fvr.add_argument("--n-fakes", type=int, default=fvr_defaults.n_fakes,
                     help="fake sample count (default: equal volume)")
    fvr.add_argument("--method", type=_str_list, default=fvr_defaults.methods)
    fvr.add_argument("--classifier", type=_str_list, default=fvr_defaults.classifiers)
    fvr.add_argument("--folds", type=int, default=fvr_defaults.folds)
    _add_classifier_knobs(fvr, fvr_defaults)
    _add_common(fvr)
    fvr.set_defaults(func=cmd_bench_fake_vs_real, _parser=fvr)

    def add_augment_flags(sub, defaults):
        sub.add_argument("--p", type=int, default=defaults.p)
        sub.add_argument("-k", "--components", type=int, default=defaults.k)
        sub.add_argument("--k-true", type=int, default=defaults.k_true)
        sub.add_argument("--n-rest", type=int, default=defaults.n_rest)
        sub.add_argument("--rho", type=float, default=defaults.latent_correlation)
        sub.add_argument("--family", type=str, default=defaults.source_family)
        sub.add_argument("--noise", type=float, default=defaults.noise_scale)
        sub.add_argument("--classes", type=int, default=defaults.n_classes)
        sub.add_argument("--train-per-class", type=int, default=defaults.train_per_class)
        sub.add_argument("--test-per-class", type=int, default=defaults.test_per_class)
        sub.add_argument("--separation", type=float, default=defaults.class_separation)
        sub.add_argument("--n-fakes", type=int, default=defaults.n_fakes_per_class,
                         help="fakes per class")
        sub.add_argument("--splits", type=int, default=defaults.n_splits)
        _add_classifier_knobs(sub, defaults)
        _add_common(sub)

    aug = subs.add_parser("bench-augment", help="augmentation benchmark on task data")
    aug_defaults = AugmentBenchConfig()
    aug.add_argument("--method", type=_str_list, default=aug_defaults.methods)
    aug.add_argument("--classifier", type=_str_list, default=aug_defaults.classifiers)
    add_augment_flags(aug, aug_defaults)
    aug.set_defaults(func=cmd_bench_augment, _parser=aug)

    sweep = subs.add_parser("sweep-k", help="component-count sensitivity sweep")
    sweep_defaults = SweepKConfig()
    sweep.add_argument("--k-grid", type=_int_list, default=sweep_defaults.k_grid)
    sweep.add_argument("--method", type=_str_list, default=("condica",),
                       help="(the sweep always runs the conditional model)")
    sweep.add_argument("--classifier", type=_str_list, default=(sweep_defaults.classifier,))
    add_augment_flags(sweep, sweep_defaults.bench)
    sweep.set_defaults(func=cmd_sweep_k, _parser=sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "config", None):
            _apply_config_file(args, args._parser, args.config)
        return args.func(args)
    except CondicaError as exc:
        print(f"condica: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
