# utils/export_handlers.py
from pathlib import Path

import pandas as pd

from config.settings import settings
from core.diagnostics import DriftReport, InvariantSeries
from core.observability import observability


class ExportManager:
    """Writes invariant series and drift reports"""

    def __init__(self, float_format: str = None):
        self.observability = observability
        self.float_format = float_format or settings.CSV_FLOAT_FORMAT

    def series_to_csv(self, series: InvariantSeries) -> str:
        return series.frame.to_csv(index=False, float_format=self.float_format, lineterminator="\n")

    def write_series_csv(self, series: InvariantSeries, path) -> Path:
        """Header row t,Pi1,...,K (collective runs append F1..J3), full double precision"""
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", newline="") as handle:
                handle.write(self.series_to_csv(series))
            self.observability.log_info("Wrote invariant series", path=str(path), rows=len(series))
            return path
        except OSError as e:
            self.observability.log_error(f"CSV export failed: {str(e)}", path=str(path))
            raise

    @staticmethod
    def drift_report_path(csv_path) -> Path:
        csv_path = Path(csv_path)
        return csv_path.with_name(csv_path.stem + ".drift.txt")

    def write_drift_report(self, report: DriftReport, path) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", newline="") as handle:
                handle.write(report.to_text())
            return path
        except OSError as e:
            self.observability.log_error(f"Drift report export failed: {str(e)}", path=str(path))
            raise

    @staticmethod
    def read_series_csv(path) -> pd.DataFrame:
        return pd.read_csv(path, float_precision="round_trip")
