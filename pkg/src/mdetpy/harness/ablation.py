from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Final, List, Mapping, Optional, Sequence, Tuple

import attrs
import numpy as np
from loguru import logger

from ..config import ExperimentConfig
from ..elements import Setting
from ..elements import Variant
from ..utils import timer
from .report import METRIC_COLUMNS, RunReport, render_csv
from .training import train

ABLATION_CSV: Final = "ablation.csv"
RUNS_JSONL: Final = "runs.jsonl"

# what `mdet ablate` trains without a config file: toy-scale grids with fewer pairs and
# epochs, held-out scoring after the last epoch only, and a target background that is
# partly re-textured between views
ABLATION_PROTOCOL: Final[Mapping[str, Any]] = {
    "epochs": 6,
    "lr_decay_epoch": 4,
    "batch_size": 4,
    "train_pairs": 64,
    "eval_pairs": 32,
    "eval_every": 0,
    "ransac_iters": 500,
    "scene": {"background_change": 0.6},
}

Key = Tuple[Variant, Setting]


def protocol_config(**overrides: Any) -> ExperimentConfig:
    return ExperimentConfig(**ABLATION_PROTOCOL).with_overrides(**overrides)


@attrs.frozen
class AblationRow:
    """Seed mean of one (variant, setting) cell of the ablation matrix"""

    variant: Variant
    setting: Setting
    seeds: Tuple[int, ...]
    metrics: Dict[str, float]
    wall_s: float

    def row(self) -> Dict[str, str]:
        out = {"variant": self.variant.label, "setting": self.setting.label}
        out.update({k: f"{self.metrics[k]:.6f}" for k in METRIC_COLUMNS})
        out["seed"] = ";".join(str(s) for s in self.seeds)
        out["wall_s"] = f"{self.wall_s:.3f}"
        return out


def summarize(reports: Sequence[RunReport]) -> List[AblationRow]:
    """One row per (variant, setting) in first-seen order"""
    groups: Dict[Key, List[RunReport]] = {}
    for r in reports:
        groups.setdefault((r.variant, r.setting), []).append(r)
    rows = []
    for (variant, setting), runs in groups.items():
        metrics = {k: float(np.mean([r.metrics[k] for r in runs])) for k in METRIC_COLUMNS}
        rows.append(
            AblationRow(variant, setting, tuple(r.seed for r in runs), metrics, float(sum(r.wall_s for r in runs)))
        )
    return rows


@timer
def run_ablation(
    base: ExperimentConfig,
    variants: Sequence[Variant],
    settings: Sequence[Setting],
    seeds: Sequence[int],
    out_dir: Optional[Path] = None,
) -> List[RunReport]:
    """
    Trains every (variant, setting, seed) combination. MDBase ignores the setting, so
    it is trained once per seed and its report re-labelled for the other settings.
    """
    cache: Dict[int, RunReport] = {}
    reports: List[RunReport] = []
    for variant in variants:
        for setting in settings:
            for seed in seeds:
                if variant.is_baseline and seed in cache:
                    cached = cache[seed]
                    relabelled = {**cached.config, "setting": setting.label}
                    reports.append(attrs.evolve(cached, setting=setting, config=relabelled))
                    continue
                config = base.with_overrides(variant=variant, setting=setting, seed=seed)
                logger.info("ablation: {v} / {s} / seed {seed}", v=variant.label, s=setting.label, seed=seed)
                _, report = train(config)
                if variant.is_baseline:
                    cache[seed] = report
                reports.append(report)
    if out_dir is not None:
        write_ablation(reports, out_dir)
    return reports


def write_ablation(reports: Sequence[RunReport], out_dir: Path) -> Tuple[Path, Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / ABLATION_CSV
    jsonl_path = out_dir / RUNS_JSONL
    with open(csv_path, "w", encoding="utf-8", newline="") as f:
        f.write(render_csv([r.row() for r in summarize(reports)]))
    with open(jsonl_path, "w", encoding="utf-8") as f:
        for r in reports:
            f.write(json.dumps(r.to_dict()) + "\n")
    logger.info("ablation written to {csv} and {jsonl}", csv=csv_path, jsonl=jsonl_path)
    return csv_path, jsonl_path


def _strictly_increasing(
    rows: Dict[Key, AblationRow],
    chain: Sequence[Variant],
    setting: Setting,
    metric: str,
) -> List[str]:
    failures = []
    for lo, hi in zip(chain, chain[1:]):
        a, b = rows.get((lo, setting)), rows.get((hi, setting))
        if a is None or b is None:
            logger.info(
                "ablation check skipped: {s} {metric} {lo} -> {hi}, rows missing",
                s=setting.label,
                metric=metric,
                lo=lo.label,
                hi=hi.label,
            )
            continue
        if not b.metrics[metric] > a.metrics[metric]:
            failures.append(
                f"{setting.label}: {metric} {hi.label}={b.metrics[metric]:.6f} "
                f"not above {lo.label}={a.metrics[metric]:.6f}"
            )
    return failures


def check_ablation(reports: Sequence[RunReport]) -> List[str]:
    """
    Directional checks over seed means; pairs whose rows are missing are skipped.
    Module ladder per setting: AUC3 rises MDBase, +WAM, +WAM+BoxFilter, and AP rises
    from MDBase to +WAM+WSAM. Setting ladder for MatchDet: GTBoxR >= PreBoxR >= NoBoxR
    on AUC3 and AP, each at least MDBase.
    """
    rows = {(r.variant, r.setting): r for r in summarize(reports)}
    settings = list(dict.fromkeys(s for _, s in rows))
    failures: List[str] = []
    for s in settings:
        failures += _strictly_increasing(rows, (Variant.MDBase, Variant.WAM, Variant.WAMBoxFilter), s, "AUC3")
        failures += _strictly_increasing(rows, (Variant.MDBase, Variant.WAMWSAM), s, "AP")

    ladder = [s for s in (Setting.GTBoxR, Setting.PreBoxR, Setting.NoBoxR) if (Variant.MatchDet, s) in rows]
    for metric in ("AUC3", "AP"):
        for hi, lo in zip(ladder, ladder[1:]):
            a, b = rows[(Variant.MatchDet, hi)], rows[(Variant.MatchDet, lo)]
            if a.metrics[metric] < b.metrics[metric]:
                failures.append(f"MatchDet {metric}: {hi.label} below {lo.label}")
        for s in ladder:
            base = rows.get((Variant.MDBase, s))
            if base is not None and rows[(Variant.MatchDet, s)].metrics[metric] < base.metrics[metric]:
                failures.append(f"MatchDet {metric}: {s.label} below MDBase")
    for f in failures:
        logger.warning("ablation check failed: {f}", f=f)
    return failures
