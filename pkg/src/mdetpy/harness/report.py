from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any, Dict, Final, List, Mapping, Sequence, Tuple, TYPE_CHECKING

import attrs
from loguru import logger

from ..elements import ReportFormat
from ..elements import Setting
from ..elements import Variant

if TYPE_CHECKING:
    from ..config import ExperimentConfig

CSV_COLUMNS: Final = ("variant", "setting", "AP", "AP50", "AP75", "AUC3", "AUC5", "AUC10", "seed", "wall_s")
METRIC_COLUMNS: Final = ("AP", "AP50", "AP75", "AUC3", "AUC5", "AUC10")


@attrs.frozen
class EpochRecord:
    epoch: int
    lr: float
    losses: Dict[str, float]
    auc: Dict[str, float]
    ap: Dict[str, float]

    def to_dict(self) -> Dict[str, Any]:
        return {"epoch": self.epoch, "lr": self.lr, "losses": self.losses, "auc": self.auc, "ap": self.ap}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> EpochRecord:
        return cls(int(d["epoch"]), float(d["lr"]), dict(d["losses"]), dict(d["auc"]), dict(d["ap"]))


@attrs.frozen
class RunReport:
    """
    Outcome of one training run: final held-out metrics as fractions in [0, 1], the
    per-epoch history, the wall time (0 when not recorded) and the config it ran with
    """

    variant: Variant
    setting: Setting
    seed: int
    metrics: Dict[str, float]
    wall_s: float = 0.0
    epochs: Tuple[EpochRecord, ...] = ()
    config: Dict[str, Any] = attrs.field(factory=dict)

    @classmethod
    def from_history(cls, config: ExperimentConfig, history: Sequence[EpochRecord], wall_s: float) -> RunReport:
        last = history[-1] if history else None
        metrics = {k: 0.0 for k in METRIC_COLUMNS}
        if last is not None:
            metrics.update({k: float(v) for k, v in last.ap.items() if k in metrics})
            metrics.update({k: float(v) for k, v in last.auc.items() if k in metrics})
        return cls(
            variant=config.variant,
            setting=config.setting,
            seed=config.seed,
            metrics=metrics,
            wall_s=wall_s if config.record_wall_time else 0.0,
            epochs=tuple(history),
            config=config.to_dict(),
        )

    @property
    def lr_schedule(self) -> Dict[str, Any]:
        return {k: self.config.get(k) for k in ("lr", "lr_decay", "lr_decay_epoch")}

    def row(self) -> Dict[str, str]:
        """The CSV row: metrics as %.6f, wall time as %.3f"""
        out = {"variant": self.variant.label, "setting": self.setting.label}
        out.update({k: f"{self.metrics[k]:.6f}" for k in METRIC_COLUMNS})
        out["seed"] = str(self.seed)
        out["wall_s"] = f"{self.wall_s:.3f}"
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "variant": self.variant.label,
            "setting": self.setting.label,
            **{k: self.metrics[k] for k in METRIC_COLUMNS},
            "seed": self.seed,
            "wall_s": self.wall_s,
            "epochs": [e.to_dict() for e in self.epochs],
            "config": self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> RunReport:
        return cls(
            variant=Variant.parse(d["variant"]),
            setting=Setting.parse(d["setting"]),
            seed=int(d["seed"]),
            metrics={k: float(d[k]) for k in METRIC_COLUMNS},
            wall_s=float(d.get("wall_s", 0.0)),
            epochs=tuple(EpochRecord.from_dict(e) for e in d.get("epochs", [])),
            config=dict(d.get("config", {})),
        )


def render_csv(rows: Sequence[Mapping[str, str]]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def emit_report(
    reports: RunReport | Sequence[RunReport],
    path: str | Path,
    fmt: ReportFormat | str = ReportFormat.CSV,
) -> Path:
    """
    Writes one or more reports as CSV (fixed header, one row per report) or JSON (a
    list of report objects). Row order follows the input order.
    """
    items: List[RunReport] = [reports] if isinstance(reports, RunReport) else list(reports)
    fmt = ReportFormat.parse(fmt)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == ReportFormat.CSV:
        text = render_csv([r.row() for r in items])
    else:
        text = json.dumps([r.to_dict() for r in items], indent=2) + "\n"
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info("report written to {path}", path=path)
    return path


def read_json_reports(path: str | Path) -> List[RunReport]:
    with open(path, encoding="utf-8") as f:
        return [RunReport.from_dict(d) for d in json.load(f)]
