from __future__ import annotations

from pathlib import Path

import pytest

from mdetpy.config import ExperimentConfig
from mdetpy.elements import ReportFormat
from mdetpy.elements import Setting
from mdetpy.elements import Variant
from mdetpy.exceptions import UnsupportedException
from mdetpy.harness import CSV_COLUMNS
from mdetpy.harness import EpochRecord
from mdetpy.harness import RunReport
from mdetpy.harness import emit_report
from mdetpy.harness import read_json_reports

from ..test_base import TestBase

METRICS = {"AP": 0.25, "AP50": 0.5, "AP75": 0.125, "AUC3": 0.1, "AUC5": 0.2, "AUC10": 1.0 / 3.0}


def make_report(variant: Variant = Variant.MatchDet, setting: Setting = Setting.GTBoxR, seed: int = 0) -> RunReport:
    return RunReport(variant, setting, seed, dict(METRICS), wall_s=1.23456)


class TestRunReport(TestBase):
    def test_columns(self) -> None:
        assert ",".join(CSV_COLUMNS) == "variant,setting,AP,AP50,AP75,AUC3,AUC5,AUC10,seed,wall_s"

    def test_row(self) -> None:
        row = make_report(seed=4).row()
        assert list(row) == list(CSV_COLUMNS)
        assert ",".join(row.values()) == (
            "matchdet,GTBoxR,0.250000,0.500000,0.125000,0.100000,0.200000,0.333333,4,1.235"
        )

    def test_from_history(self) -> None:
        epoch = EpochRecord(0, 0.01, {"total": 1.0}, {"AUC3": 0.3, "AUC5": 0.4, "AUC10": 0.5}, {"AP": 0.2})
        config = ExperimentConfig(variant="wam", setting="noboxr", seed=2, record_wall_time=False)
        report = RunReport.from_history(config, [epoch], 9.0)
        assert (report.variant, report.setting, report.seed) == (Variant.WAM, Setting.NoBoxR, 2)
        assert report.metrics == {"AP": 0.2, "AP50": 0.0, "AP75": 0.0, "AUC3": 0.3, "AUC5": 0.4, "AUC10": 0.5}
        assert report.wall_s == 0.0
        assert report.lr_schedule == {"lr": 0.01, "lr_decay": 0.1, "lr_decay_epoch": 8}
        assert RunReport.from_history(config.with_overrides(record_wall_time=True), [], 9.0).wall_s == 9.0

    def test_emit_csv(self, tmp_path: Path) -> None:
        path = emit_report([make_report(), make_report(Variant.MDBase, Setting.NoBoxR, 1)], tmp_path / "r" / "a.csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert lines[1].startswith("matchdet,GTBoxR,0.250000,")
        assert lines[2].startswith("mdbase,NoBoxR,")
        assert len(lines) == 3

    def test_emit_json(self, tmp_path: Path) -> None:
        epoch = EpochRecord(1, 0.001, {"total": 0.5}, {"AUC3": 0.1}, {"AP": 0.2})
        report = RunReport(Variant.WAMWSAM, Setting.PreBoxR, 3, dict(METRICS), 2.0, (epoch,), {"lr": 0.01})
        path = emit_report(report, tmp_path / "a.json", "json")
        assert read_json_reports(path) == [report]
        assert emit_report(report, tmp_path / "b.json", ReportFormat.JSON).read_text() == path.read_text()

    def test_unknown_format(self, tmp_path: Path) -> None:
        with pytest.raises(UnsupportedException, match="Unknown ReportFormat: 'xml'"):
            emit_report(make_report(), tmp_path / "a.xml", "xml")
