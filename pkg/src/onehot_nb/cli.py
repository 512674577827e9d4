"""Command-line interface: ``onehot-nb <command> ...``.

Exit codes: 0 success, 2 invalid input (bad flag, malformed or inconsistent
file), 3 output could not be written.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .encoding import decode_matrix, detect_one_hot_groups, encode_matrix, generate_dataset_arrays
from .errors import OneHotNBError
from .experiments import (
    ExperimentConfig,
    bound_curves,
    run_posterior_comparison,
    run_scatter,
    surface_grid,
)
from .formats import (
    FormatError,
    read_bit_matrix,
    read_dataset,
    read_manifest,
    read_params,
    render_csv,
    write_csv,
    write_dataset,
    write_encoded_dataset,
    write_manifest,
    write_params,
)
from .models import Layout, Model, categorical_posterior, fit_mle, fit_mle_encoded, map_class, multi_feature_posterior, pob_posterior
from .simplex import RngSeed

EXIT_OK, EXIT_INPUT, EXIT_IO = 0, 2, 3


class OutputError(Exception):
    pass


def _alpha(text: str):
    if text == "inv-k":
        return text
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--alpha must be a positive number or 'inv-k', got {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"--alpha must be positive, got {text!r}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--seed must be an integer, got {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"--seed must be a 64-bit unsigned integer, got {text!r}")
    return value


def _value_counts(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--values must be an integer or comma-separated integers, got {text!r}") from None


def _out_dir(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {out}: {exc.strerror}") from exc
    return out


def _config(args) -> ExperimentConfig:
    alpha = 1.0 / args.values if args.alpha == "inv-k" else args.alpha
    return ExperimentConfig(
        n_classes=args.classes,
        n_values=args.values,
        alpha_theta=alpha,
        alpha_pi=args.alpha_pi,
        n_samples=args.samples,
        master_seed=args.seed,
    )


def _config_dict(config: ExperimentConfig) -> dict:
    return {
        "classes": config.n_classes,
        "values": config.n_values,
        "alpha_theta": config.alpha_theta,
        "alpha_pi": config.alpha_pi,
        "samples": config.n_samples,
        "seed": config.master_seed,
    }


def _replay_argv(argv: Sequence[str]) -> list[str]:
    """``argv`` without ``--out``/``--workers`` so a manifest can be replayed elsewhere."""
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok in ("--out", "--workers"):
            skip = True
            continue
        if tok.startswith(("--out=", "--workers=")):
            continue
        out.append(tok)
    return out


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def cmd_classify(args, argv) -> int:
    params = read_params(args.params)
    values = args.x
    model = args.model
    rows = []
    for name in ("categorical", "pob"):
        if model not in (name, "both"):
            continue
        if params.n_features == 1:
            if len(values) != 1:
                raise FormatError(f"x: model has 1 feature, got {len(values)} values")
            post = categorical_posterior(params, values[0]) if name == "categorical" else pob_posterior(params, values[0])
        else:
            post = multi_feature_posterior(params, values, Model(name))
        rows.append([name, *post.values.tolist(), map_class(post)])
    header = ["model"] + [f"p{i}" for i in range(params.n_classes)] + ["map"]
    sys.stdout.write(render_csv(header, rows))
    return EXIT_OK


def cmd_simulate(args, argv) -> int:
    config = _config(args)
    records, stats = run_posterior_comparison(config, workers=args.workers)
    out = _out_dir(args.out)
    c = config.n_classes
    header = (
        ["classifier_index", "j"]
        + [f"categorical_p{i}" for i in range(c)]
        + [f"pob_p{i}" for i in range(c)]
        + ["categorical_map", "pob_map", "max_categorical", "max_pob"]
    )
    rows = (
        [r.classifier_index, r.j, *r.categorical.values.tolist(), *r.pob.values.tolist(),
         r.categorical_map, r.pob_map, r.max_categorical, r.max_pob]
        for r in records
    )
    _write(out / "comparison.csv", header, rows)
    _write(
        out / "summary.csv",
        ["n_cases", "pct_pob_max_higher", "pct_map_disagree"],
        [[stats.n_cases, stats.pct_pob_max_higher, stats.pct_map_disagree]],
    )
    _manifest(out, "simulate", argv, _config_dict(config), config.master_seed, ["comparison.csv", "summary.csv"])
    print(f"n_cases={stats.n_cases} pct_pob_max_higher={stats.pct_pob_max_higher:.2f} "
          f"pct_map_disagree={stats.pct_map_disagree:.2f}")
    return EXIT_OK


def cmd_scatter(args, argv) -> int:
    config = _config(args)
    result = run_scatter(config, workers=args.workers)
    out = _out_dir(args.out)
    header = ["classifier_index", "j", "c", "d", "log_theta_ratio", "log_f_ratio"]
    rows = ([r.classifier_index, r.j, r.c, r.d, r.log_theta_ratio, r.log_f_ratio] for r in result.records)
    _write(out / "scatter.csv", header, rows)
    cfg = _config_dict(config) | {"skipped": result.n_skipped}
    _manifest(out, "scatter", argv, cfg, config.master_seed, ["scatter.csv"])
    print(f"records={len(result.records)} skipped={result.n_skipped}")
    return EXIT_OK


def cmd_bounds(args, argv) -> int:
    rows = bound_curves(args.values, args.step)
    out = _out_dir(args.out)
    _write(out / "bounds.csv", ["theta_j", "lower", "upper"], rows)
    _manifest(out, "bounds", argv, {"values": args.values, "step": args.step}, None, ["bounds.csv"])
    return EXIT_OK


def cmd_surface(args, argv) -> int:
    rows = surface_grid(args.step)
    out = _out_dir(args.out)
    _write(out / "surface.csv", ["theta1", "theta2", "theta3", "q"], rows)
    _manifest(out, "surface", argv, {"step": args.step}, None, ["surface.csv"])
    return EXIT_OK


def cmd_generate(args, argv) -> int:
    params = read_params(args.params)
    obs, labels = generate_dataset_arrays(params, args.samples, RngSeed(args.seed, 0))
    out = _out_dir(args.out)
    _guard_io(write_dataset, out / "dataset.csv", obs, labels)
    _guard_io(write_encoded_dataset, out / "dataset_onehot.csv", encode_matrix(obs, params.n_values), labels, params.n_values)
    cfg = {"params": str(args.params), "samples": args.samples, "seed": args.seed}
    _manifest(out, "generate", argv, cfg, args.seed, ["dataset.csv", "dataset_onehot.csv"])
    return EXIT_OK


def _resolve_counts(observed: list[int], requested: list[int] | None, what: str) -> list[int]:
    if requested is None:
        return observed
    if len(requested) == 1:
        requested = requested * len(observed)
    if len(requested) != len(observed):
        raise FormatError(f"values: got {len(requested)} counts for {len(observed)} features")
    for f, (have, want) in enumerate(zip(observed, requested)):
        if want < have:
            raise FormatError(f"values: feature {f} has {what} {have} but --values gives {want}")
    return requested


def cmd_fit(args, argv) -> int:
    kind, values, labels, sizes = read_dataset(args.dataset)
    n_classes = args.classes if args.classes is not None else int(labels.max()) + 1
    if kind == "ordinal":
        ks = _resolve_counts([int(v) + 1 for v in values.max(axis=0)], args.values, "max value index +")
        ordinal, bits = values, encode_matrix(values, ks)
    else:
        if args.values is not None and _resolve_counts(sizes, args.values, "bit columns") != sizes:
            raise FormatError("values: encoded dataset column groups disagree with --values")
        ks = sizes
        ordinal, bits = decode_matrix(values, sizes), values
    data = list(zip(map(tuple, ordinal.tolist()), labels.tolist()))
    by_ordinal = fit_mle(data, n_classes, ks, Layout.ORDINAL, args.smoothing)
    by_bits = fit_mle_encoded(bits, labels, ks, n_classes, args.smoothing)
    params = by_ordinal if Layout(args.layout) is Layout.ORDINAL else by_bits
    out = _out_dir(args.out)
    _guard_io(write_params, out / "params.csv", params)
    cfg = {"dataset": str(args.dataset), "layout": args.layout, "smoothing": args.smoothing,
           "classes": n_classes, "values": list(ks)}
    _manifest(out, "fit", argv, cfg, None, ["params.csv"])
    print(f"layouts_agree={'true' if by_ordinal == by_bits else 'false'}")
    return EXIT_OK


def cmd_audit(args, argv) -> int:
    names, bits = read_bit_matrix(args.dataset, args.label_column)
    groups = detect_one_hot_groups(bits)
    header = ["group", "k", "columns", "ambiguous"]
    rows = [[g_idx, g.k, ";".join(names[c] for c in g.columns), g.ambiguous] for g_idx, g in enumerate(groups)]
    text = render_csv(header, rows)
    sys.stdout.write(text)
    if args.out:
        out = _out_dir(args.out)
        _write(out / "groups.csv", header, rows)
        _manifest(out, "audit", argv, {"dataset": str(args.dataset), "label_column": args.label_column}, None, ["groups.csv"])
    return EXIT_OK


def cmd_replay(args, argv) -> int:
    manifest = read_manifest(args.manifest)
    replay = manifest.get("argv")
    if not isinstance(replay, list) or not replay:
        raise FormatError(f"{args.manifest}: manifest has no argv")
    return main([*replay, "--out", args.out])


# --------------------------------------------------------------------------


def _guard_io(fn, *a):
    try:
        fn(*a)
    except OSError as exc:
        raise OutputError(f"cannot write {a[0]}: {exc.strerror}") from exc


def _write(path: Path, header, rows) -> None:
    _guard_io(write_csv, path, header, rows)


def _manifest(out: Path, command: str, argv, config: dict, seed, files) -> None:
    _guard_io(write_manifest, out, command, _replay_argv(argv), config, seed, files)


def _add_experiment_flags(p: argparse.ArgumentParser, with_out: bool = True) -> None:
    p.add_argument("--classes", type=int, default=4, help="number of classes C (default 4)")
    p.add_argument("--values", type=int, default=3, help="number of feature values K (default 3)")
    p.add_argument("--alpha", type=_alpha, default=1.0,
                   help="Dirichlet concentration for table rows: a number or 'inv-k' for 1/K (default 1)")
    p.add_argument("--alpha-pi", type=_positive_float, default=1.0,
                   help="Dirichlet concentration for the class prior (default 1)")
    p.add_argument("--samples", type=int, default=100, help="number of sampled classifiers n (default 100)")
    p.add_argument("--seed", type=_seed, default=0, help="master seed (default 0)")
    p.add_argument("--workers", type=int, default=1, help="worker processes; output is identical for any value")
    p.add_argument("--out", required=True, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="onehot-nb", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="posterior for one observation under either model")
    p.add_argument("params", type=Path, help="params CSV")
    p.add_argument("x", type=int, nargs="+", help="0-based value index per feature")
    p.add_argument("--model", choices=["categorical", "pob", "both"], default="both")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("simulate", help="compare posteriors over Dirichlet-sampled classifiers")
    _add_experiment_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scatter", help="log f-ratio vs log theta-ratio for every class pair")
    _add_experiment_flags(p)
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("bounds", help="lower/upper bound curves on f_j")
    p.add_argument("--values", type=int, default=6, help="K (default 6)")
    p.add_argument("--step", type=float, default=0.001)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("surface", help="Q on the 3-point simplex")
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("generate", help="sample a dataset from a params file")
    p.add_argument("params", type=Path)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("fit", help="maximum-likelihood params from a dataset")
    p.add_argument("dataset", type=Path, help="ordinal (x0,...) or encoded (x0_0,...) dataset CSV")
    p.add_argument("--layout", choices=[l.value for l in Layout], default="ordinal")
    p.add_argument("--smoothing", type=float, default=0.0)
    p.add_argument("--classes", type=int, default=None, help="C (default: max label + 1)")
    p.add_argument("--values", type=_value_counts, default=None, help="K, or K per feature comma-separated")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("audit", help="detect one-hot column groups in a bit-matrix CSV")
    p.add_argument("dataset", type=Path)
    p.add_argument("--label-column", default="label", help="column to ignore (default 'label')")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest", type=Path)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, argv)
    except OutputError as exc:
        print(f"onehot-nb: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OneHotNBError, IndexError) as exc:
        print(f"onehot-nb {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
