"""Command-line interface: spectrum algebra, data generation, training,
experiment presets, coefficient extraction, and noisy evaluation.

Exit codes are a stable scripting contract: 0 success, 2 configuration or
validation failure, 3 numeric failure during computation.

Reports are written as two files: `<name>.json` holds the deterministic
results (bitwise reproducible for a fixed config and seed on noiseless
paths) and `<name>.meta.json` holds wall times and environment facts.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .backend import backend_name
from .circuit import build_circuit
from .dataset import TARGET_PRESETS, TargetSpec, grid_dataset, output_scaling, save_csv
from .errors import (
    ConfigurationError,
    ContractViolationError,
    NumericFailureError,
    PqcError,
)
from .experiments import ExperimentConfig, coefficient_report, run_experiment
from .fastpath import ModelEngine
from .noise import NoiseModel, noisy_evaluate
from .spectrum import MixedSpectrum, mixed_cardinality, spectrum_from_prefactors
from .training import multi_run, r2 as r2_score
from .analysis import summarize_runs

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


# ---------------------------------------------------------------------------
# Report plumbing
# ---------------------------------------------------------------------------

def _jsonify(obj):
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_jsonify)
        fh.write("\n")


def _write_report(out_dir: Path, name: str, results: dict, meta: dict) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{name}.json"
    _write_json(path, results)
    _write_json(out_dir / f"{name}.meta.json", meta)
    return path


def _load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigurationError(f"config file {path} must hold a JSON object")
    return ExperimentConfig.from_dict(data)


def _load_theta(path: str, circuit) -> np.ndarray:
    try:
        theta = np.load(path)
    except FileNotFoundError:
        raise ConfigurationError(f"theta file not found: {path}")
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if theta.shape != (circuit.n_params,):
        raise ContractViolationError(
            f"theta file has {theta.size} values but the circuit "
            f"has {circuit.n_params} parameters"
        )
    return theta


def _write_coefficient_csvs(out_dir: Path, tables: dict) -> list:
    paths = []
    for key in ("model", "target"):
        path = out_dir / f"coefficients_{key}.csv"
        tables[key].to_csv(path)
        paths.append(path)
    diff = tables["diff"]
    path = out_dir / "coefficients_diff.csv"
    with open(path, "w") as fh:
        d = len(diff.frequencies[0])
        fh.write(",".join([f"omega_{i + 1}" for i in range(d)] + ["re", "im", "abs"]) + "\n")
        order = sorted(range(len(diff.frequencies)), key=lambda i: diff.frequencies[i])
        for i in order:
            c = diff.diffs[i]
            row = list(diff.frequencies[i]) + [repr(float(c.real)), repr(float(c.imag)), repr(float(abs(c)))]
            fh.write(",".join(str(v) for v in row) + "\n")
    paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

def _parse_floats(text: str, flag: str) -> tuple:
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip() != "")
    except ValueError:
        raise ConfigurationError(f"{flag} expects comma-separated numbers, got {text!r}")
    if not values:
        raise ConfigurationError(f"{flag} is empty")
    if any(v <= 0 for v in values):
        raise ConfigurationError(f"{flag} entries must be positive, got {values}")
    return values


def _parse_groups(text: str, dims: int) -> tuple:
    # CLI groups are 1-based (--groups 1,2/3,4); the library is 0-based
    groups = []
    for part in text.split("/"):
        try:
            ids = tuple(int(v) - 1 for v in part.split(",") if v.strip() != "")
        except ValueError:
            raise ConfigurationError(f"--groups expects integers, got {part!r}")
        if any(i < 0 or i >= dims for i in ids):
            raise ConfigurationError(f"--groups entries must lie in 1..{dims}")
        groups.append(ids)
    flat = sorted(i for g in groups for i in g)
    if flat != list(range(dims)):
        raise ConfigurationError(f"--groups {text!r} is not a partition of 1..{dims}")
    return tuple(groups)


def _format_freq(value: float) -> str:
    return str(int(round(value))) if abs(value - round(value)) < 1e-9 else f"{value:g}"


def cmd_spectrum(args) -> int:
    if (args.prefactors is None) == (args.per_dim is None):
        raise ConfigurationError("pass exactly one of --prefactors or --per-dim")
    if args.prefactors is not None:
        prefactors = _parse_floats(args.prefactors, "--prefactors")
        spec = spectrum_from_prefactors(prefactors)
        print(f"prefactors: {' '.join(_format_freq(p) for p in prefactors)}")
        print(f"frequencies ({len(spec)}): {' '.join(_format_freq(f) for f in spec)}")
        total = len(spec)
    else:
        prefactors = _parse_floats(args.per_dim, "--per-dim")
        dims = args.dims
        if dims is None or dims < 1:
            raise ConfigurationError("--per-dim requires --dims >= 1")
        groups = (
            _parse_groups(args.groups, dims)
            if args.groups
            else (tuple(range(dims)),)
        )
        one_dim = spectrum_from_prefactors(prefactors)
        mixed = MixedSpectrum(dim_spectra=(one_dim,) * dims, groups=groups)
        card = mixed_cardinality(mixed)
        print(f"per-dim frequencies ({len(one_dim)}): "
              f"{' '.join(_format_freq(f) for f in one_dim)}")
        print(f"groups (1-based): {' / '.join(','.join(str(i + 1) for i in g) for g in groups)}")
        print(f"per-group cardinalities: {' '.join(str(c) for c in card.per_group)}")
        print(f"total: {card.total}")
        total = card.total
    if args.params is not None:
        enough = args.params >= total
        print(f"parameters: {args.params} for {total} frequencies -> "
              f"{'sufficient' if enough else 'insufficient'}")
    if args.csv:
        freqs = spec.frequencies if args.prefactors is not None else one_dim.frequencies
        with open(args.csv, "w") as fh:
            fh.write("frequency\n")
            for f in freqs:
                fh.write(f"{_format_freq(f)}\n")
        print(f"wrote {args.csv}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# gen-data
# ---------------------------------------------------------------------------

def _resolve_target(text: str) -> TargetSpec:
    if text in TARGET_PRESETS:
        return TARGET_PRESETS[text]()
    path = Path(text)
    if path.suffix == ".json" or path.exists():
        try:
            with open(path) as fh:
                return TargetSpec.from_dict(json.load(fh))
        except FileNotFoundError:
            raise ConfigurationError(f"target file not found: {text}")
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"target file {text} is not valid JSON: {exc}")
    raise ConfigurationError(
        f"unknown target {text!r}; use a preset ({sorted(TARGET_PRESETS)}) or a JSON file"
    )


def cmd_gen_data(args) -> int:
    target = _resolve_target(args.target)
    dataset = grid_dataset(target, args.points)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "dataset.csv"
    save_csv(dataset, path)
    a, b = output_scaling(dataset)
    _write_json(out_dir / "dataset.json", {
        "target": args.target if args.target in TARGET_PRESETS else target.to_dict(),
        "points_per_dim": args.points,
        "n_rows": dataset.n_rows,
        "output_scaling": {"a": a, "b": b},
    })
    print(f"wrote {path} ({dataset.n_rows} rows, {dataset.n_dims} dims)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------

def cmd_train(args) -> int:
    config = _load_config(args.config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset = grid_dataset(config.target, config.points_per_dim)
    reports = multi_run(config.model, dataset, config.training, config.n_runs)
    best = max(range(len(reports)), key=lambda i: reports[i].r2_test)

    runs = [r.to_dict()["results"] for r in reports]
    results = {
        "schema_version": 1,
        "config": config.to_dict(),
        "runs": runs,
        "best_run": best,
    }
    if len(reports) > 1:
        results["summary"] = summarize_runs([r.r2_test for r in reports]).to_dict()
    meta = {
        "backend": backend_name(),
        "wall_time_s": sum(r.wall_time for r in reports),
        "per_run_wall_s": [r.wall_time for r in reports],
    }

    np.save(out_dir / "theta.npy", reports[best].final_theta)
    for i, report in enumerate(reports):
        suffix = "" if len(reports) == 1 else f"_run{i}"
        report.save_loss_csv(out_dir / f"loss{suffix}.csv")
    path = _write_report(out_dir, "train_report", results, meta)

    if args.coeffs:
        circuit = build_circuit(config.model)
        tables = coefficient_report(
            circuit, reports[best].final_theta, config.target, output_scaling(dataset)
        )
        for p in _write_coefficient_csvs(out_dir, tables):
            print(f"wrote {p}")

    for i, r in enumerate(reports):
        print(f"run {i}: seed={r.seed} final_loss={r.final_loss:.3e} "
              f"r2_train={r.r2_train:.4f} r2_test={r.r2_test:.4f}")
    print(f"wrote {path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# experiment
# ---------------------------------------------------------------------------

def cmd_experiment(args) -> int:
    if args.paper_scale:
        print("warning: --paper-scale runs 100 seeds at full grids; expect many hours",
              file=sys.stderr)
    variants = None
    if args.variants:
        variants = "all" if args.variants == "all" else [v for v in args.variants.split(",") if v]
    blocks = None
    if args.blocks:
        try:
            blocks = [int(b) for b in args.blocks.split(",") if b]
        except ValueError:
            raise ConfigurationError(f"--blocks expects integers, got {args.blocks!r}")

    report = run_experiment(
        args.preset,
        paper_scale=args.paper_scale,
        seed=args.seed,
        n_runs=args.runs,
        iterations=args.iterations,
        points_per_dim=args.points,
        variants=variants,
        blocks=blocks,
        include_coefficients=not args.no_coeffs,
    )
    out_dir = Path(args.out)
    path = _write_report(out_dir, f"experiment_{args.preset}", report["results"], report["meta"])

    with open(out_dir / "summary.csv", "w") as fh:
        fh.write("variant,n_params,spectrum_size,median_r2,q25,q75,mean_r2,min_r2,max_r2\n")
        for label, v in report["results"]["variants"].items():
            s = v["summary"]
            fh.write(",".join(str(x) for x in [
                label, v["n_params"], v["spectrum_size"], s["median"], s["q25"],
                s["q75"], s["mean"], s["min"], s["max"],
            ]) + "\n")

    if "coefficient_tables" in report:
        for p in _write_coefficient_csvs(out_dir, report["coefficient_tables"]):
            print(f"wrote {p}")

    for label, v in report["results"]["variants"].items():
        s = v["summary"]
        print(f"{label}: params={v['n_params']} median_r2={s['median']:.4f} "
              f"iqr=[{s['q25']:.4f}, {s['q75']:.4f}]")
    comparison = report["results"]["comparisons"].get("frequency_design")
    if comparison:
        relation = ">" if comparison["favored_exceeds_rival"] else "<="
        print(f"comparison: {comparison['favored']} {relation} {comparison['rival']} "
              f"({comparison['favored_median_r2']:.4f} vs {comparison['rival_median_r2']:.4f})")
    print(f"wrote {path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# coeffs
# ---------------------------------------------------------------------------

def cmd_coeffs(args) -> int:
    config = _load_config(args.config)
    circuit = build_circuit(config.model)
    theta = _load_theta(args.theta, circuit)
    dataset = grid_dataset(config.target, config.points_per_dim)
    tables = coefficient_report(
        circuit, theta, config.target, output_scaling(dataset), n_grid=args.n_grid
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for p in _write_coefficient_csvs(out_dir, tables):
        print(f"wrote {p}")
    _write_report(out_dir, "coefficients_report",
                  {"config": config.to_dict(), "n_grid": tables["n_grid"],
                   "summary": tables["summary"]},
                  {"backend": backend_name()})
    s = tables["summary"]
    print(f"on-target max |diff| = {s['on_target_max_abs_diff']:.4f} over "
          f"{s['n_on_target']} vectors")
    print(f"off-target max |coeff| = {s['off_target_max_abs_coeff']:.4f} over "
          f"{s['n_off_target']} vectors")
    return EXIT_OK


# ---------------------------------------------------------------------------
# noisy-eval
# ---------------------------------------------------------------------------

def cmd_noisy_eval(args) -> int:
    config = _load_config(args.config)
    circuit = build_circuit(config.model)
    theta = _load_theta(args.theta, circuit)
    noise = config.noise if config.noise is not None else NoiseModel()
    dataset = grid_dataset(config.target, config.points_per_dim)
    split_dataset = dataset.with_split(config.training.seed)
    view = split_dataset.test
    if args.subset is not None:
        if args.subset < 2:
            raise ConfigurationError(f"--subset must be >= 2, got {args.subset}")
        view = type(view)(inputs=view.inputs[: args.subset], targets=view.targets[: args.subset])
    seed = args.seed if args.seed is not None else config.training.seed

    noiseless = ModelEngine(circuit, view.inputs).forward(theta)
    r2_noiseless = r2_score(noiseless, view.targets)
    predictions, r2_noisy = noisy_evaluate(circuit, view, theta, noise, seed)

    results = {
        "schema_version": 1,
        "config": config.to_dict(),
        "noise": noise.to_dict(),
        "seed": seed,
        "n_rows": int(view.n_rows),
        "r2_noiseless": r2_noiseless,
        "r2_noisy": r2_noisy,
        "degradation": r2_noiseless - r2_noisy,
    }
    out_dir = Path(args.out)
    path = _write_report(out_dir, "noisy_eval_report", results, {"backend": backend_name()})
    np.save(out_dir / "noisy_predictions.npy", predictions)
    print(f"r2 noiseless={r2_noiseless:.4f} noisy={r2_noisy:.4f} "
          f"(degradation {r2_noiseless - r2_noisy:+.4f}, {noise.shots} shots)")
    print(f"wrote {path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser and entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pqcfourier",
        description="Angle-encoded quantum circuits as trainable Fourier models",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("spectrum", help="frequency spectrum of encoding prefactors")
    p.add_argument("--prefactors", help="comma-separated prefactors of one feature")
    p.add_argument("--per-dim", dest="per_dim",
                   help="comma-separated prefactors applied to every dimension")
    p.add_argument("--dims", type=int, help="number of dimensions (with --per-dim)")
    p.add_argument("--groups",
                   help="1-based dimension groups, e.g. 1,2/3,4 (default: all mixed)")
    p.add_argument("--params", type=int, help="parameter count to test for sufficiency")
    p.add_argument("--csv", help="write the frequency list to this CSV file")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("gen-data", help="sample a target onto a scaled grid CSV")
    p.add_argument("--target", required=True,
                   help=f"target preset {sorted(TARGET_PRESETS)} or TargetSpec JSON file")
    p.add_argument("--points", type=int, default=30, help="grid points per dimension")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="train a model from a JSON config")
    p.add_argument("--config", required=True, help="experiment config JSON file")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--coeffs", action="store_true",
                   help="also write coefficient CSVs for the best run")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("experiment", help="run a named preset comparison")
    p.add_argument("--preset", required=True, help="exp2d or exp4d")
    p.add_argument("--paper-scale", action="store_true",
                   help="full grids, 5000 iterations, 100 seeds (very slow)")
    p.add_argument("--seed", type=int, default=42, help="base seed")
    p.add_argument("--runs", type=int, help="override the preset's run count")
    p.add_argument("--iterations", type=int, help="override the preset's iteration count")
    p.add_argument("--points", type=int, help="override the preset's grid points per dim")
    p.add_argument("--variants", help="comma-separated variant names, or 'all'")
    p.add_argument("--blocks", help="comma-separated B sweep applied to every variant")
    p.add_argument("--no-coeffs", action="store_true",
                   help="skip coefficient extraction for the best parallel variant")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("coeffs", help="extract model vs target Fourier coefficients")
    p.add_argument("--config", required=True, help="experiment config JSON file")
    p.add_argument("--theta", required=True, help="trained parameter .npy file")
    p.add_argument("--n-grid", dest="n_grid", type=int, help="DFT grid points per dim")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("noisy-eval", help="shot-based noisy evaluation of a trained model")
    p.add_argument("--config", required=True, help="experiment config JSON file")
    p.add_argument("--theta", required=True, help="trained parameter .npy file")
    p.add_argument("--subset", type=int, help="evaluate only the first N test rows")
    p.add_argument("--seed", type=int, help="noise stream seed (default: training seed)")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_noisy_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "func", None) is None:
        parser.print_help()
        return EXIT_CONFIG
    try:
        return args.func(args)
    except NumericFailureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except PqcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
