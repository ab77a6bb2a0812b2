"""Experiment presets and the structured run-report assembler.

Two presets compare frequency-design choices at matched parameter budgets:

* exp2d - the 2-feature target with 9 mixed frequency pairs. Variants pit
  prefactors picked to generate exactly the needed spectrum ("selected",
  e.g. [10, 20] per feature) against a ternary dense ladder ([1, 3, 9, 27])
  whose spectrum is far larger than the parameter budget.
* exp4d - the 4-feature target whose terms only mix dims (0,1) and (2,3).
  Variants pit two separated frequency groups against one all-mixed group
  at an identical parameter count.

Desk scale keeps each preset in the tens of minutes on a single core
(30x30 / 12^4 grids, 3000 iterations, 3 seeds). --paper-scale restores the
reference setting (50x50 / 20^4, 5000 iterations, 100 seeds), which runs
for many hours. At desk scale the 4D serial variants are skipped by
default: the all-mixed serial model cannot use the sandwich factorization
and costs hours alone; pass variants="all" to force them.

Reports are dicts with a deterministic "results" subtree (bitwise
reproducible for a fixed config and seed) and a "meta" subtree for wall
times and environment facts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .analysis import (
    coefficient_diff,
    model_coefficients,
    summarize_runs,
    target_coefficients,
)
from .backend import backend_name
from .circuit import ModelConfig, build_circuit, parameter_sufficiency
from .dataset import TARGET_PRESETS, TargetSpec, grid_dataset, output_scaling
from .errors import ConfigurationError
from .noise import NoiseModel
from .training import TrainConfig, multi_run

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# Whole-run configuration (config-file payload of the train/noisy-eval CLI)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    target: TargetSpec
    model: ModelConfig
    training: TrainConfig
    noise: Optional[NoiseModel] = None
    n_runs: int = 1
    points_per_dim: int = 30
    target_name: Optional[str] = None

    def __post_init__(self):
        if self.model.n_features != self.target.d:
            raise ConfigurationError(
                f"model has {self.model.n_features} features but the target "
                f"has {self.target.d} dimensions"
            )
        if self.n_runs < 1:
            raise ConfigurationError(f"n_runs must be >= 1, got {self.n_runs}")
        if self.points_per_dim < 2:
            raise ConfigurationError(
                f"points_per_dim must be >= 2, got {self.points_per_dim}"
            )

    def to_dict(self) -> dict:
        out = {
            "target": self.target_name or self.target.to_dict(),
            "model": self.model.to_dict(),
            "training": self.training.to_dict(),
            "n_runs": self.n_runs,
            "points_per_dim": self.points_per_dim,
        }
        if self.noise is not None:
            out["noise"] = self.noise.to_dict()
        return out

    @staticmethod
    def from_dict(data: dict) -> "ExperimentConfig":
        known = {"target", "model", "training", "noise", "n_runs", "points_per_dim"}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        missing = {"target", "model"} - set(data)
        if missing:
            raise ConfigurationError(f"missing config keys: {sorted(missing)}")
        target_name = None
        raw_target = data["target"]
        if isinstance(raw_target, str):
            if raw_target not in TARGET_PRESETS:
                raise ConfigurationError(
                    f"unknown target preset {raw_target!r}; choose from "
                    f"{sorted(TARGET_PRESETS)}"
                )
            target = TARGET_PRESETS[raw_target]()
            target_name = raw_target
        else:
            target = TargetSpec.from_dict(raw_target)
        return ExperimentConfig(
            target=target,
            model=ModelConfig.from_dict(data["model"]),
            training=TrainConfig.from_dict(data.get("training", {})),
            noise=None if data.get("noise") is None else NoiseModel.from_dict(data["noise"]),
            n_runs=int(data.get("n_runs", 1)),
            points_per_dim=int(data.get("points_per_dim", 30)),
            target_name=target_name,
        )


# ---------------------------------------------------------------------------
# Preset definitions
# ---------------------------------------------------------------------------

_SELECTED_2D = ((10.0, 20.0), (10.0, 20.0))
_DENSE_2D = ((1.0, 3.0, 9.0, 27.0), (1.0, 3.0, 9.0, 27.0))
_LADDER_4D = ((10.0, 30.0),) * 4
_PAIR_GROUPS = ((0, 1), (2, 3))
_ALL4_GROUP = ((0, 1, 2, 3),)
_BOTH_2D = ((0, 1),)


@dataclass(frozen=True)
class VariantDef:
    name: str
    model: ModelConfig
    desk_default: bool = True   # run without an explicit variants= request?


@dataclass(frozen=True)
class PresetDef:
    name: str
    target_name: str
    desk: tuple     # (points_per_dim, iterations, n_runs)
    paper: tuple
    comparison: tuple  # (favored variant, budget-matched rival)

    def variants(self, paper_scale: bool) -> tuple:
        raise NotImplementedError


class _Preset2D(PresetDef):
    def variants(self, paper_scale: bool) -> tuple:
        dense_b = 7 if paper_scale else 5
        return (
            VariantDef("selected_parallel", ModelConfig("parallel", _SELECTED_2D, _BOTH_2D, 10)),
            VariantDef("dense_parallel", ModelConfig("parallel", _DENSE_2D, _BOTH_2D, dense_b)),
            VariantDef("selected_serial", ModelConfig("serial", _SELECTED_2D, _BOTH_2D, 13)),
            VariantDef("dense_serial", ModelConfig("serial", _DENSE_2D, _BOTH_2D, 8)),
        )


class _Preset4D(PresetDef):
    def variants(self, paper_scale: bool) -> tuple:
        return (
            VariantDef("separated_parallel", ModelConfig("parallel", _LADDER_4D, _PAIR_GROUPS, 3)),
            VariantDef("allmixed_parallel", ModelConfig("parallel", _LADDER_4D, _ALL4_GROUP, 3)),
            VariantDef("separated_serial", ModelConfig("serial", _LADDER_4D, _PAIR_GROUPS, 4),
                       desk_default=paper_scale),
            VariantDef("allmixed_serial", ModelConfig("serial", _LADDER_4D, _ALL4_GROUP, 4),
                       desk_default=paper_scale),
        )


PRESETS = {
    "exp2d": _Preset2D(
        name="exp2d",
        target_name="t2d",
        desk=(30, 3000, 3),
        paper=(50, 5000, 100),
        comparison=("selected_parallel", "dense_parallel"),
    ),
    "exp4d": _Preset4D(
        name="exp4d",
        target_name="t4d",
        desk=(12, 3000, 3),
        paper=(20, 5000, 100),
        comparison=("separated_parallel", "allmixed_parallel"),
    ),
}


# ---------------------------------------------------------------------------
# Coefficient report for a trained model
# ---------------------------------------------------------------------------

def coefficient_report(circuit, theta, target: TargetSpec, scaling, n_grid: Optional[int] = None):
    """Model vs scaled-target coefficient tables over the model's spectrum."""
    if n_grid is None:
        n_grid = 128 if target.d <= 2 else 32
    support = circuit.spectrum.all_vectors()
    known = support if n_grid <= 2 * int(np.abs(support).max()) else None
    model_table = model_coefficients(circuit, theta, n_grid=n_grid, known_support=known)
    target_table = target_coefficients(target, freq_set=model_table.frequencies,
                                       output_scaling=scaling)
    diff = coefficient_diff(model_table, target_table)

    target_vecs = {tuple(int(round(w)) for w in omega) for omega, _ in target.terms}
    target_vecs |= {tuple(-w for w in v) for v in target_vecs}
    target_vecs.add((0,) * target.d)
    on_target = [w for w in model_table.frequencies if w in target_vecs]
    off_target = [w for w in model_table.frequencies if w not in target_vecs]
    on_max = max(abs(diff.get(w)) for w in on_target)
    off_max = max((abs(model_table.get(w)) for w in off_target), default=0.0)
    return {
        "model": model_table,
        "target": target_table,
        "diff": diff,
        "n_grid": n_grid,
        "summary": {
            "on_target_max_abs_diff": float(on_max),
            "off_target_max_abs_coeff": float(off_max),
            "n_on_target": len(on_target),
            "n_off_target": len(off_target),
        },
    }


# ---------------------------------------------------------------------------
# Preset execution
# ---------------------------------------------------------------------------

def _resolve_variants(preset: PresetDef, paper_scale: bool, requested) -> tuple:
    defs = preset.variants(paper_scale)
    if requested is None:
        chosen = tuple(v for v in defs if v.desk_default)
    elif requested == "all" or requested == ["all"]:
        chosen = defs
    else:
        by_name = {v.name: v for v in defs}
        bad = [n for n in requested if n not in by_name]
        if bad:
            raise ConfigurationError(
                f"unknown variants {bad}; choose from {sorted(by_name)} or 'all'"
            )
        chosen = tuple(by_name[n] for n in requested)
    return chosen


def run_experiment(
    name: str,
    paper_scale: bool = False,
    seed: int = 42,
    n_runs: Optional[int] = None,
    iterations: Optional[int] = None,
    points_per_dim: Optional[int] = None,
    variants=None,
    blocks=None,
    include_coefficients: bool = True,
) -> dict:
    """Run a preset's variant sweep and assemble the comparison report."""
    if name not in PRESETS:
        raise ConfigurationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    preset = PRESETS[name]
    scale_points, scale_iters, scale_runs = preset.paper if paper_scale else preset.desk
    points = points_per_dim or scale_points
    iters = iterations or scale_iters
    runs = n_runs or scale_runs
    if seed < 0:
        raise ConfigurationError(f"seed must be >= 0, got {seed}")

    target = TARGET_PRESETS[preset.target_name]()
    dataset = grid_dataset(target, points)
    scaling = output_scaling(dataset)
    train_config = TrainConfig(iterations=iters, seed=seed)
    chosen = _resolve_variants(preset, paper_scale, variants)
    block_sweep = [None] if not blocks else list(blocks)

    variant_results = {}
    meta_times = {}
    start = time.perf_counter()
    for vdef in chosen:
        for b in block_sweep:
            model = vdef.model if b is None else replace(vdef.model, blocks_per_layer=b)
            label = vdef.name if b is None else f"{vdef.name}_b{b}"
            circuit = build_circuit(model)
            sufficiency = parameter_sufficiency(model)
            t0 = time.perf_counter()
            reports = multi_run(model, dataset, train_config, runs)
            meta_times[label] = time.perf_counter() - t0
            scores = [r.r2_test for r in reports]
            variant_results[label] = {
                "model": model.to_dict(),
                "n_params": circuit.n_params,
                "n_qubits": circuit.n_qubits,
                "spectrum_size": sufficiency.spectrum_cardinality,
                "parameters_sufficient": sufficiency.sufficient,
                "runs": [r.to_dict()["results"] for r in reports],
                "summary": summarize_runs(scores).to_dict(),
                "_reports": reports,  # stripped before serialization
            }

    favored, rival = preset.comparison
    comparisons = {}
    if favored in variant_results and rival in variant_results:
        med_a = variant_results[favored]["summary"]["median"]
        med_b = variant_results[rival]["summary"]["median"]
        comparisons["frequency_design"] = {
            "favored": favored,
            "rival": rival,
            "favored_median_r2": med_a,
            "rival_median_r2": med_b,
            "favored_exceeds_rival": bool(med_a > med_b),
        }

    coefficients = None
    best_label = None
    artifacts = None
    parallel = {
        label: v for label, v in variant_results.items()
        if v["model"]["architecture"] == "parallel"
    }
    if parallel:
        best_label = max(parallel, key=lambda k: parallel[k]["summary"]["median"])
        entry = parallel[best_label]
        best_report = max(entry["_reports"], key=lambda r: r.r2_test)
        artifacts = {
            "best_parallel_variant": best_label,
            "best_model": ModelConfig.from_dict(entry["model"]),
            "best_theta": best_report.final_theta,
            "best_seed": best_report.seed,
            "best_r2_test": best_report.r2_test,
        }
        if include_coefficients:
            circuit = build_circuit(artifacts["best_model"])
            coefficients = coefficient_report(circuit, best_report.final_theta, target, scaling)

    for v in variant_results.values():
        del v["_reports"]

    results = {
        "schema_version": SCHEMA_VERSION,
        "experiment": name,
        "scale": "paper" if paper_scale else "desk",
        "config": {
            "target": preset.target_name,
            "points_per_dim": points,
            "training": train_config.to_dict(),
            "n_runs": runs,
            "variants": [v.name for v in chosen],
            "blocks_sweep": blocks,
            "output_scaling": {"a": scaling[0], "b": scaling[1]},
        },
        "variants": variant_results,
        "comparisons": comparisons,
    }
    if coefficients is not None:
        results["coefficients"] = {
            "variant": best_label,
            "n_grid": coefficients["n_grid"],
            "summary": coefficients["summary"],
        }
    report = {
        "results": results,
        "meta": {
            "wall_time_s": time.perf_counter() - start,
            "per_variant_wall_s": meta_times,
            "backend": backend_name(),
        },
    }
    if coefficients is not None:
        report["coefficient_tables"] = coefficients  # rich objects for callers/CSV
    if artifacts is not None:
        report["artifacts"] = artifacts  # best trained theta, for reuse by callers
    return report
